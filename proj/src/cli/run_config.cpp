#include "cli/run_config.hpp"

#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include <deltatrain/errors.hpp>

namespace deltatrain::cli {

namespace {

bool one_of(const std::string& value,
            std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (value == a) return true;
  return false;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string::size_type start = 0;
  while (true) {
    const auto end = text.find(sep, start);
    parts.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return parts;
}

int parse_int(const std::string& text, const char* field) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(std::string(field) + ": not an integer: '" + text + "'");
  }
  if (used != text.size())
    throw ConfigError(std::string(field) + ": trailing characters in '" +
                      text + "'");
  return value;
}

}  // namespace

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> out;

  const bool model_ok = one_of(c.model, {"jc", "qle", "diagrams"});
  const bool mode_ok = one_of(c.mode, {"converge", "decay", "covariance", "sum"});
  if (!model_ok) out.push_back("model: must be jc, qle, or diagrams");
  if (!mode_ok)
    out.push_back("mode: must be converge, decay, covariance, or sum");
  if (model_ok && mode_ok) {
    const bool pairing =
        (c.model == "jc" && (c.mode == "converge" || c.mode == "decay")) ||
        (c.model == "qle" && (c.mode == "converge" || c.mode == "covariance")) ||
        (c.model == "diagrams" && c.mode == "sum");
    if (!pairing)
      out.push_back("mode: " + c.mode + " is not defined for model " + c.model);
  }

  if (!one_of(c.units, {"lambda", "omega"}))
    out.push_back("units: must be lambda or omega");
  else if (model_ok && c.units != (c.model == "qle" ? "omega" : "lambda"))
    out.push_back("units: " + c.model + " runs report in units of " +
                  (c.model == "qle" ? "omega" : "lambda"));

  if (!(c.kappa >= 0.0) || !std::isfinite(c.kappa))
    out.push_back("kappa: must be nonnegative and finite");
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda))
    out.push_back("lambda: must be positive and finite");
  if (!(c.omega > 0.0) || !std::isfinite(c.omega))
    out.push_back("omega: must be positive and finite");
  if (c.beta && (!(*c.beta > 0.0) || !std::isfinite(*c.beta)))
    out.push_back("beta: must be positive and finite");
  if (!(c.duration > 0.0) || !std::isfinite(c.duration))
    out.push_back("duration: must be positive and finite");

  if (c.node_counts.empty()) {
    out.push_back("node_counts: need at least one node count");
  } else {
    for (int n : c.node_counts)
      if (n < 1) {
        out.push_back("node_counts: every N must be >= 1");
        break;
      }
    if (c.model == "diagrams")
      for (int n : c.node_counts)
        if (n > 12) {
          out.push_back(
              "node_counts: diagram enumeration is limited to N <= 12");
          break;
        }
    if (one_of(c.mode, {"decay", "covariance", "sum"}) &&
        c.node_counts.size() != 1)
      out.push_back("node_counts: the " + c.mode +
                    " mode runs at a single N");
  }

  for (int j : c.spans)
    if (j < 1) {
      out.push_back("spans: every arc span must be >= 1");
      break;
    }
  if (c.mode != "decay" && c.spans.size() > 1)
    out.push_back("spans: only the decay mode accepts a span list");

  if (!c.chi.empty()) {
    if (c.node_counts.size() != 1)
      out.push_back("chi: tabulated switching requires a single node count");
    else if (static_cast<int>(c.chi.size()) != c.node_counts.front())
      out.push_back("chi: need exactly one amplitude per node");
    for (double x : c.chi)
      if (!std::isfinite(x)) {
        out.push_back("chi: amplitudes must be finite");
        break;
      }
  }

  if (c.mode == "covariance") {
    if (c.points < 2)
      out.push_back("points: need at least two trajectory samples");
    if (!std::isfinite(c.q0) || !std::isfinite(c.p0))
      out.push_back("q0/p0: initial means must be finite");
    if (!c.beta)
      out.push_back("beta: the covariance mode needs an inverse temperature");
  }
  if (!one_of(c.thermal_units, {"physical", "literal"}))
    out.push_back("thermal_units: must be physical or literal");
  if (!one_of(c.format, {"csv", "json"}))
    out.push_back("format: must be csv or json");
  return out;
}

std::vector<int> parse_sweep(const std::string& text) {
  std::vector<int> out;
  for (const std::string& part : split(text, ',')) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_int(part, "node_counts"));
      continue;
    }
    const int a = parse_int(part.substr(0, dots), "node_counts");
    const int b = parse_int(part.substr(dots + 2), "node_counts");
    if (a < 1 || b < a)
      throw ConfigError("node_counts: range must satisfy 1 <= a <= b");
    long long v = a;
    bool triple = true;
    while (v < b) {
      out.push_back(static_cast<int>(v));
      v = triple ? v * 3 : v * 10 / 3;
      triple = !triple;
    }
    out.push_back(b);
  }
  return out;
}

std::vector<double> parse_chi(const std::string& text) {
  if (text == "constant") return {};
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      throw ConfigError("chi: not a number: '" + part + "'");
    }
    if (used != part.size())
      throw ConfigError("chi: trailing characters in '" + part + "'");
    out.push_back(value);
  }
  return out;
}

}  // namespace deltatrain::cli
