#include "cli/commands.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <deltatrain/diagrams.hpp>
#include <deltatrain/errors.hpp>
#include <deltatrain/jaynes_cummings.hpp>
#include <deltatrain/qle.hpp>
#include <deltatrain/reference.hpp>
#include <deltatrain/spectral.hpp>
#include <deltatrain/train.hpp>

namespace deltatrain::cli {

namespace {

// Scientific with 14 significant digits after the point, C locale.
std::string sci(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of a negative zero
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.14e", value);
  return buf;
}

DeltaTrain make_train(const RunConfig& c, int n) {
  if (c.chi.empty()) return DeltaTrain(c.duration, n);
  return DeltaTrain(c.duration, c.chi);
}

std::optional<int> single_span(const RunConfig& c) {
  if (c.spans.empty()) return std::nullopt;
  return c.spans.front();
}

RunTable jc_converge(const RunConfig& c) {
  RunTable t;
  t.columns = {"N", "T_delta", "T_exact", "abs_err"};
  const JCParams params(c.kappa, c.lambda);
  const complex exact = exact_amplitude(c.duration, c.kappa, c.lambda);
  for (int n : c.node_counts) {
    const DeltaTrain train = make_train(c, n);
    const complex value =
        transfer(train, params, single_span(c)).value(c.duration);
    t.rows.push_back(
        {n, value.real(), exact.real(), std::abs(value - exact)});
  }
  return t;
}

// One row per (span, node) pair; the half-line measure repeats along the
// rows of its span.  Span 0 marks the unrestricted kernel.
RunTable jc_decay(const RunConfig& c) {
  RunTable t;
  t.columns = {"j", "k", "t_k", "gamma_k", "rhp_measure"};
  const JCParams params(c.kappa, c.lambda);
  const DeltaTrain train = make_train(c, c.node_counts.front());
  const double delta = train.spacing();
  std::vector<std::optional<int>> spans;
  if (c.spans.empty())
    spans.push_back(std::nullopt);
  else
    for (int j : c.spans) spans.push_back(j);
  for (const auto& span : spans) {
    const std::vector<double> rates = decay_rates(train, params, span);
    const double measure = rhp_measure(rates, delta);
    for (int k = 1; k <= static_cast<int>(rates.size()); ++k)
      t.rows.push_back(
          {span.value_or(0), k, train.node(k), rates[k - 1], measure});
  }
  return t;
}

RunTable qle_converge(const RunConfig& c) {
  RunTable t;
  t.columns = {"N", "G_fP_T", "reference", "abs_err"};
  const SpectralSource source =
      SpectralSource::lorentz_drude(c.kappa, c.lambda);
  const double reference =
      green_constant(c.duration, c.omega, c.kappa, c.lambda);
  for (int n : c.node_counts) {
    const DeltaTrain train = make_train(c, n);
    const KernelSpec kernel =
        qle_kernel(source, train).restricted(single_span(c));
    const double value = script_G(c.duration, train, kernel, c.omega);
    t.rows.push_back({n, value, reference, std::abs(value - reference)});
  }
  return t;
}

RunTable qle_covariance(const RunConfig& c) {
  RunTable t;
  t.columns = {"t", "Q2_delta", "Q2_ref", "abs_err"};
  const DeltaTrain train = make_train(c, c.node_counts.front());
  const SpectralSource source =
      SpectralSource::lorentz_drude(c.kappa, c.lambda, c.beta);
  const KernelSpec kernel =
      qle_kernel(source, train).restricted(single_span(c));
  const ThermalUnits units = c.thermal_units == "literal"
                                 ? ThermalUnits::LiteralPaper
                                 : ThermalUnits::Physical;
  const NoiseCovariance nu = noise_nu(train, source, *c.beta, units);
  const OscillatorParams params(c.omega, Eigen::Vector2d(c.q0, c.p0));
  for (int i = 0; i < c.points; ++i) {
    const double time = c.duration * i / (c.points - 1);
    const TransferPair pair =
        transfer_matrices(time, train, kernel, c.omega, nu);
    const double value = mean_square_position(pair, params);
    const double reference = reference_Q2(time, params, source, *c.beta);
    t.rows.push_back({time, value, reference, std::abs(value - reference)});
  }
  return t;
}

std::string arc_string(const Diagram& d) {
  std::ostringstream out;
  bool first = true;
  for (const Arc& a : d.arcs()) {
    if (!first) out << ";";
    out << a.source << "-" << a.target;
    first = false;
  }
  return out.str();
}

RunTable diagrams_sum(const RunConfig& c) {
  RunTable t;
  t.columns = {"index", "arcs", "weight_re", "weight_im"};
  const int n = c.node_counts.front();
  const DeltaTrain train = make_train(c, n);
  const JCParams params(c.kappa, c.lambda);
  const KernelSpec kernel = jc_kernel(params).restricted(single_span(c));
  const FreePropagator prop = FreePropagator::first_order();
  const std::vector<complex> initials{params.alpha1_0()};
  std::vector<complex> f(n);
  for (int i = 1; i <= n; ++i)
    f[i - 1] = prop.free_solution(train.node(i), initials);

  int index = 0;
  for (const Diagram& d : enumerate_diagrams(n, single_span(c))) {
    const complex w = weight(d, c.duration, train, kernel, prop, f);
    t.rows.push_back({++index, arc_string(d), w.real(), w.imag()});
  }
  const DiagramSum res = sum_check(c.duration, train, kernel,
                                   NoiseSequence::zero(n), initials, prop);
  t.check = {{"diagram_sum_re", res.diagram_sum.real()},
             {"diagram_sum_im", res.diagram_sum.imag()},
             {"solver_re", res.solver_value.real()},
             {"solver_im", res.solver_value.imag()},
             {"abs_difference", res.abs_difference}};
  return t;
}

nlohmann::ordered_json config_echo(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["model"] = c.model;
  j["mode"] = c.mode;
  j["units"] = c.units;
  j["kappa"] = c.kappa;
  j["lambda"] = c.lambda;
  j["omega"] = c.omega;
  if (c.beta)
    j["beta"] = *c.beta;
  else
    j["beta"] = nullptr;
  j["duration"] = c.duration;
  j["node_counts"] = c.node_counts;
  j["spans"] = c.spans;
  if (c.chi.empty())
    j["chi"] = "constant";
  else
    j["chi"] = c.chi;
  j["q0"] = c.q0;
  j["p0"] = c.p0;
  j["points"] = c.points;
  j["thermal_units"] = c.thermal_units;
  j["format"] = c.format;
  j["output"] = c.output.empty() ? "stdout" : c.output;
  return j;
}

}  // namespace

RunTable build_table(const RunConfig& c) {
  if (c.model == "jc" && c.mode == "converge") return jc_converge(c);
  if (c.model == "jc" && c.mode == "decay") return jc_decay(c);
  if (c.model == "qle" && c.mode == "converge") return qle_converge(c);
  if (c.model == "qle" && c.mode == "covariance") return qle_covariance(c);
  if (c.model == "diagrams" && c.mode == "sum") return diagrams_sum(c);
  throw ConfigError("mode: no run defined for " + c.model + "-" + c.mode);
}

std::string render_csv(const RunConfig& c, const RunTable& t) {
  std::ostringstream out;
  out << "# deltatrain " << c.model << "-" << c.mode << "\n";
  const nlohmann::ordered_json echo = config_echo(c);
  for (const auto& [key, value] : echo.items()) {
    out << "# " << key << "=";
    if (value.is_string())
      out << value.get<std::string>();
    else
      out << value.dump();
    out << "\n";
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i)
    out << (i ? "," : "") << t.columns[i];
  out << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      const auto& cell = row[i];
      if (cell.is_number_integer())
        out << cell.get<long long>();
      else if (cell.is_string())
        out << cell.get<std::string>();
      else
        out << sci(cell.get<double>());
    }
    out << "\n";
  }
  if (t.check.is_object())
    for (const auto& [key, value] : t.check.items())
      out << "# " << key << "=" << sci(value.get<double>()) << "\n";
  return out.str();
}

std::string render_json(const RunConfig& c, const RunTable& t) {
  nlohmann::ordered_json doc;
  doc["config"] = config_echo(c);
  doc["columns"] = t.columns;
  doc["rows"] = t.rows;
  if (t.check.is_object()) doc["check"] = t.check;
  return doc.dump(2) + "\n";
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  const std::vector<std::string> violations = validate(config);
  if (!violations.empty()) {
    for (const std::string& v : violations) err << "config error: " << v << "\n";
    return 1;
  }
  try {
    const RunTable table = build_table(config);
    const std::string text = config.format == "json"
                                 ? render_json(config, table)
                                 : render_csv(config, table);
    if (config.output.empty()) {
      out << text;
      return 0;
    }
    std::ofstream file(config.output, std::ios::binary);
    file << text;
    file.close();
    if (!file) {
      err << "config error: output: cannot write " << config.output << "\n";
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace deltatrain::cli
