// Command-line front end.  Every subcommand takes dimensionless ratios plus
// one time scale (lambda for the two-level model and the diagram expansion,
// omega for the oscillator); internally that scale is set to 1.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <deltatrain/errors.hpp>

#include "cli/commands.hpp"
#include "cli/run_config.hpp"

namespace {

struct Flags {
  double kappa_ratio = 0.1;
  double lambda_ratio = 2.0;
  double horizon = 1.0;
  std::vector<std::string> sweep;
  std::vector<std::string> chi{"constant"};
  std::vector<int> spans;
  double beta_omega = 1.0;
  double q0 = 1.0;
  double p0 = 0.0;
  int points = 11;
  std::string thermal_units = "physical";
  std::string output;
  std::string format = "csv";
};

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const std::string& p : parts) {
    if (!out.empty()) out += ',';
    out += p;
  }
  return out;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--N", f.sweep,
                  "node counts: comma list; a..b expands geometrically "
                  "(10..2000 gives 10,30,100,300,1000,2000)")
      ->delimiter(',');
  sub->add_option("--chi", f.chi,
                  "switching amplitudes: 'constant' or one value per node")
      ->delimiter(',');
  sub->add_option("--j", f.spans, "arc-span restrictions (memory depth)")
      ->delimiter(',');
  sub->add_option("--output", f.output, "artifact path (default stdout)");
  sub->add_option("--format", f.format, "artifact format")
      ->transform(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  sub->set_config("--config", "", "flat key=value configuration file");
  sub->allow_config_extras(CLI::config_extras_mode::error);
}

deltatrain::cli::RunConfig common_config(const Flags& f) {
  deltatrain::cli::RunConfig c;
  c.duration = f.horizon;
  if (!f.sweep.empty())
    c.node_counts = deltatrain::cli::parse_sweep(join(f.sweep));
  c.spans = f.spans;
  c.chi = deltatrain::cli::parse_chi(f.chi.empty() ? "constant"
                                                   : join(f.chi));
  c.output = f.output;
  c.format = f.format;
  return c;
}

deltatrain::cli::RunConfig jc_config(const Flags& f, const std::string& mode) {
  deltatrain::cli::RunConfig c = common_config(f);
  c.model = "jc";
  c.mode = mode;
  c.units = "lambda";
  c.kappa = f.kappa_ratio;
  c.lambda = 1.0;
  return c;
}

deltatrain::cli::RunConfig qle_config(const Flags& f, const std::string& mode) {
  deltatrain::cli::RunConfig c = common_config(f);
  c.model = "qle";
  c.mode = mode;
  c.units = "omega";
  c.kappa = f.kappa_ratio;
  c.lambda = f.lambda_ratio;
  c.omega = 1.0;
  return c;
}

// The config file of the one triggered subcommand, fed through that
// subcommand by hand: the library only processes set_config on the root
// app.  Values fill options the command line left empty, so flags win.
void load_config_file(CLI::App* sub) {
  const CLI::Option* opt = sub->get_config_ptr();
  if (opt == nullptr || opt->count() == 0) return;
  const std::string path = opt->as<std::string>();
  std::ifstream file(path);
  if (!file) throw CLI::FileError::Missing(path);
  sub->parse_from_stream(file);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite delta-train dynamics toolkit"};
  app.require_subcommand(1);

  Flags jc_conv, jc_dec, qle_conv, qle_cov, diag;

  CLI::App* sub_jc_conv = app.add_subcommand(
      "jc-converge",
      "two-level amplitude at t = T against the constant-switching closed "
      "form, over a node-count sweep");
  sub_jc_conv->add_option("--kappa-over-lambda", jc_conv.kappa_ratio,
                          "coupling over spectral width")
      ->capture_default_str();
  sub_jc_conv->add_option("--lambda-T", jc_conv.horizon,
                          "duration in units of 1/lambda")
      ->capture_default_str();
  add_common(sub_jc_conv, jc_conv);

  CLI::App* sub_jc_dec = app.add_subcommand(
      "jc-decay",
      "discrete decay rates gamma_k and the half-line measure, one pass per "
      "arc-span restriction");
  jc_dec.kappa_ratio = 2.5;
  jc_dec.horizon = 30.0;
  sub_jc_dec->add_option("--kappa-over-lambda", jc_dec.kappa_ratio,
                         "coupling over spectral width")
      ->capture_default_str();
  sub_jc_dec->add_option("--lambda-T", jc_dec.horizon,
                         "duration in units of 1/lambda")
      ->capture_default_str();
  add_common(sub_jc_dec, jc_dec);

  CLI::App* sub_qle_conv = app.add_subcommand(
      "qle-converge",
      "oscillator response G_fP at t = T against the rational-pole "
      "constant-switching value, over a node-count sweep");
  sub_qle_conv->add_option("--kappa-over-omega", qle_conv.kappa_ratio,
                           "coupling over oscillator frequency")
      ->capture_default_str();
  sub_qle_conv->add_option("--lambda-over-omega", qle_conv.lambda_ratio,
                           "cutoff over oscillator frequency")
      ->capture_default_str();
  sub_qle_conv->add_option("--omega-T", qle_conv.horizon,
                           "duration in units of 1/omega")
      ->capture_default_str();
  add_common(sub_qle_conv, qle_conv);

  CLI::App* sub_qle_cov = app.add_subcommand(
      "qle-covariance",
      "thermal <Q^2(t)> trajectory against the frequency-integral reference");
  sub_qle_cov->add_option("--kappa-over-omega", qle_cov.kappa_ratio,
                          "coupling over oscillator frequency")
      ->capture_default_str();
  sub_qle_cov->add_option("--lambda-over-omega", qle_cov.lambda_ratio,
                          "cutoff over oscillator frequency")
      ->capture_default_str();
  sub_qle_cov->add_option("--omega-T", qle_cov.horizon,
                          "duration in units of 1/omega")
      ->capture_default_str();
  sub_qle_cov->add_option("--beta-omega", qle_cov.beta_omega,
                          "inverse temperature in units of 1/omega")
      ->capture_default_str();
  sub_qle_cov->add_option("--q0", qle_cov.q0, "initial mean position")
      ->capture_default_str();
  sub_qle_cov->add_option("--p0", qle_cov.p0, "initial mean momentum")
      ->capture_default_str();
  sub_qle_cov->add_option("--points", qle_cov.points,
                          "trajectory samples, evenly spaced over [0, T]")
      ->capture_default_str();
  sub_qle_cov
      ->add_option("--thermal-units", qle_cov.thermal_units,
                   "noise normalization: physical rescales beta per node "
                   "spacing, literal takes it verbatim")
      ->transform(CLI::IsMember({"physical", "literal"}))
      ->capture_default_str();
  add_common(sub_qle_cov, qle_cov);

  CLI::App* sub_diag = app.add_subcommand(
      "diagrams",
      "arc-diagram weights for the two-level kernel at t = T, with the "
      "solver cross-check appended");
  sub_diag->add_option("--kappa-over-lambda", diag.kappa_ratio,
                       "coupling over spectral width")
      ->capture_default_str();
  sub_diag->add_option("--lambda-T", diag.horizon,
                       "duration in units of 1/lambda")
      ->capture_default_str();
  add_common(sub_diag, diag);

  try {
    app.parse(argc, argv);
    for (CLI::App* sub : app.get_subcommands()) load_config_file(sub);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    deltatrain::cli::RunConfig config;
    if (sub_jc_conv->parsed()) {
      config = jc_config(jc_conv, "converge");
    } else if (sub_jc_dec->parsed()) {
      config = jc_config(jc_dec, "decay");
    } else if (sub_qle_conv->parsed()) {
      config = qle_config(qle_conv, "converge");
    } else if (sub_qle_cov->parsed()) {
      config = qle_config(qle_cov, "covariance");
      config.beta = qle_cov.beta_omega;
      config.q0 = qle_cov.q0;
      config.p0 = qle_cov.p0;
      config.points = qle_cov.points;
      config.thermal_units = qle_cov.thermal_units;
    } else {
      config = jc_config(diag, "sum");
      config.model = "diagrams";
    }
    return deltatrain::cli::run(config, std::cout, std::cerr);
  } catch (const deltatrain::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const deltatrain::Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  }
}
