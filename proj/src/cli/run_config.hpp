#pragma once

#include <optional>
#include <string>
#include <vector>

namespace deltatrain::cli {

// One fully resolved run request.  Physical values are stored in internal
// units where the reporting scale equals 1 (lambda for the two-level model
// and the diagram expansion, omega for the oscillator); the units field
// records which scale that is, for the output echo.
struct RunConfig {
  std::string model;  // jc | qle | diagrams
  std::string mode;   // converge | decay | covariance | sum
  std::string units;  // lambda | omega

  double kappa = 0.0;
  double lambda = 1.0;
  double omega = 1.0;
  std::optional<double> beta;
  double duration = 0.0;

  std::vector<int> node_counts;  // N sweep; one entry for fixed-N modes
  std::vector<int> spans;        // arc-span restrictions j; empty = none
  std::vector<double> chi;       // tabulated switching; empty = constant 1

  double q0 = 1.0;  // initial means, used by the covariance mode
  double p0 = 0.0;
  int points = 11;                         // covariance trajectory samples
  std::string thermal_units = "physical";  // physical | literal

  std::string output;          // artifact path; empty writes to stdout
  std::string format = "csv";  // csv | json
};

// Violations as "field: constraint" strings; empty means the config is
// runnable.  These are structural checks only; physics-level failures
// surface as exceptions from the run itself.
std::vector<std::string> validate(const RunConfig& config);

// Node-count sweeps: comma-separated entries, each a plain integer or a
// geometric range "a..b" stepping through a, 3a, 10a, 30a, ... with the
// endpoint appended (10..2000 gives 10, 30, 100, 300, 1000, 2000).
std::vector<int> parse_sweep(const std::string& text);

// Switching amplitudes: "constant" keeps chi_k = 1; anything else is a
// comma-separated value list, one amplitude per node.
std::vector<double> parse_chi(const std::string& text);

}  // namespace deltatrain::cli
