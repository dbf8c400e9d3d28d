// Standalone acceptance gate.  Each scenario exercises one end-to-end claim
// of the library at fixed parameters and prints a single PASS/FAIL line with
// the measured figures and the wall time; the exit status is the number of
// failed scenarios.  Runtime ceilings are part of each scenario's contract
// and are checked alongside the numerical tolerances.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <eigen3/Eigen/Dense>

#include "deltatrain/diagrams.hpp"
#include "deltatrain/jaynes_cummings.hpp"
#include "deltatrain/qle.hpp"
#include "deltatrain/quadrature.hpp"
#include "deltatrain/reference.hpp"
#include "deltatrain/solver.hpp"
#include "deltatrain/spectral.hpp"
#include "deltatrain/train.hpp"
#include "unit/helpers.hpp"

namespace {

using deltatrain::complex;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

// Two-level amplitude at constant weak coupling against the closed-form
// solution of the continuous memory equation; the node-count sweep must
// converge monotonically.
Outcome amplitude_convergence() {
  const deltatrain::JCParams params(0.1, 1.0);
  const complex exact = deltatrain::exact_amplitude(1.0, 0.1, 1.0);
  std::vector<double> errs;
  for (int n : {10, 30, 100, 300, 1000}) {
    const deltatrain::DeltaTrain train(1.0, n);
    errs.push_back(
        std::abs(deltatrain::transfer(train, params).value(1.0) - exact));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < errs.size(); ++i)
    decreasing = decreasing && errs[i] < errs[i - 1];
  const bool ok = decreasing && errs.back() < 1e-3;
  return {ok, fmt("err@N=1000 %.2e (tol 1e-03), %s", errs.back(),
                  decreasing ? "decreasing" : "NOT decreasing")};
}

// Random trains, kernels, and propagators: the memory matrix must be
// nilpotent at exactly its own order and the stored resolvent must invert
// I - K to round-off.
Outcome nilpotency_and_resolvent() {
  std::mt19937 rng(211);
  std::uniform_int_distribution<int> size(2, 50);
  std::uniform_real_distribution<double> span(0.5, 2.0);
  double max_power = 0.0;
  double max_defect = 0.0;
  for (int i = 0; i < 50; ++i) {
    const int n = i == 0 ? 50 : size(rng);
    const deltatrain::DeltaTrain train(span(rng),
                                       testutil::random_amplitudes(n, rng));
    const auto kernel = testutil::table_kernel(
        testutil::random_kernel_table(n, rng), train.spacing());
    const auto prop = i % 2 == 0 ? deltatrain::FreePropagator::first_order()
                                 : deltatrain::FreePropagator::harmonic(
                                       span(rng));
    const auto mm = deltatrain::build_K(train, kernel, prop);
    Eigen::MatrixXcd power = mm.K();
    for (int m = 1; m < n; ++m) power = power * mm.K();
    max_power = std::max(max_power, power.cwiseAbs().maxCoeff());
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    max_defect = std::max(
        max_defect,
        ((id - mm.K()) * mm.resolvent() - id).cwiseAbs().maxCoeff());
  }
  const bool ok = max_power == 0.0 && max_defect < 1e-12;
  return {ok, fmt("max|K^N| %.1e (want 0), resolvent defect %.2e (tol 1e-12)",
                  max_power, max_defect)};
}

// Arc-diagram expansion against the direct solve for small trains, plus the
// configuration counts of the two smallest node numbers.
Outcome diagram_sum_equivalence() {
  const std::size_t two = deltatrain::enumerate_diagrams(2).size();
  const std::size_t three = deltatrain::enumerate_diagrams(3).size();
  std::mt19937 rng(307);
  double max_gap = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const deltatrain::DeltaTrain train(1.0, n);
    const auto kernel = testutil::table_kernel(
        testutil::random_kernel_table(n, rng), train.spacing());
    const auto noise = deltatrain::NoiseSequence::from_xi(
        train, testutil::random_noise(n, rng));
    const std::vector<complex> level{complex{0.8, 0.3}};
    const auto first =
        deltatrain::sum_check(1.0, train, kernel, noise, level,
                              deltatrain::FreePropagator::first_order());
    const std::vector<complex> phase_space{complex{0.7, 0.0},
                                           complex{-0.4, 0.2}};
    const auto second =
        deltatrain::sum_check(1.0, train, kernel, noise, phase_space,
                              deltatrain::FreePropagator::harmonic(1.3));
    max_gap =
        std::max({max_gap, first.abs_difference, second.abs_difference});
  }
  const bool ok = two == 1 && three == 4 && max_gap < 1e-10;
  return {ok, fmt("counts %zu/%zu (want 1/4), max gap %.2e (tol 1e-10)", two,
                  three, max_gap)};
}

// Strong-coupling rates: the span-1 restriction keeps every discrete decay
// rate nonnegative so the negativity measure vanishes, while wider spans
// reintroduce backflow.
Outcome nearest_neighbor_rates() {
  const deltatrain::JCParams params(2.5, 1.0);
  const deltatrain::DeltaTrain train(30.0, 40);
  const auto rates = deltatrain::decay_rates(train, params, 1);
  double min_rate = rates.front();
  for (double g : rates) min_rate = std::min(min_rate, g);
  const double base =
      deltatrain::rhp_measure(rates, train.spacing()) + 0.0;
  std::array<double, 3> wider{};
  bool positive = true;
  for (int j : {2, 3, 4}) {
    wider[j - 2] = deltatrain::rhp_measure(
        deltatrain::decay_rates(train, params, j), train.spacing());
    positive = positive && wider[j - 2] > 0.0;
  }
  const bool ok = min_rate >= -1e-9 && base == 0.0 && positive;
  return {ok,
          fmt("span-1 min rate %.2e, measure %g; spans 2-4 %.3g/%.3g/%.3g",
              min_rate, base, wider[0], wider[1], wider[2])};
}

// Composition laws.  Span-1 dynamics factor exactly through every split
// node, for the amplitude and for the covariance pair with uncorrelated
// impulses; the unrestricted kernels break the same laws by a visible
// margin at strong coupling.
Outcome composition_laws() {
  const deltatrain::JCParams jc(2.5, 1.0);
  const deltatrain::DeltaTrain strong(30.0, 40);
  const auto split_gap = [&](std::optional<int> span) {
    const deltatrain::TransferFunction tf(strong, jc, span);
    double worst = 0.0;
    for (double probe : {3.0, 15.0, 30.0}) {
      const complex whole = tf.value(probe);
      for (int a = 1; a < strong.count(); ++a) {
        const double ta = strong.node(a);
        if (!(ta < probe)) break;
        const complex glued =
            deltatrain::transfer_interval(probe, ta, strong, jc, span) *
            tf.value(ta);
        worst = std::max(worst, std::abs(whole - glued));
      }
    }
    return worst;
  };
  const double amplitude_gap = split_gap(1);
  const double witness_amplitude = split_gap(std::nullopt);

  const auto diagonal = [](const deltatrain::NoiseCovariance& full) {
    const Eigen::MatrixXd d = full.nu().diagonal().asDiagonal();
    return deltatrain::NoiseCovariance(d);
  };
  const auto weak_src = deltatrain::SpectralSource::lorentz_drude(0.1, 2.0);
  const deltatrain::DeltaTrain weak(1.0, 40);
  const auto weak_nu = diagonal(deltatrain::noise_nu(weak, weak_src, 1.0));
  const auto weak_kernel =
      deltatrain::qle_kernel(weak_src, weak).restricted(1);
  double transfer_gap = 0.0;
  double noise_gap = 0.0;
  for (int a = 1; a < weak.count(); ++a) {
    const auto r = deltatrain::markov_check(1.0, weak.node(a), weak,
                                            weak_kernel, 1.0, weak_nu);
    transfer_gap = std::max(transfer_gap, r.transfer_residual);
    noise_gap = std::max(noise_gap, r.noise_residual);
  }

  const auto strong_src = deltatrain::SpectralSource::lorentz_drude(2.5, 1.0);
  const auto strong_nu =
      diagonal(deltatrain::noise_nu(strong, strong_src, 1.0));
  const auto strong_kernel = deltatrain::qle_kernel(strong_src, strong);
  double witness_pair = 0.0;
  for (int a = 1; a < strong.count(); ++a) {
    const auto r = deltatrain::markov_check(30.0, strong.node(a), strong,
                                            strong_kernel, 1.0, strong_nu);
    witness_pair =
        std::max({witness_pair, r.transfer_residual, r.noise_residual});
  }
  const double witness = std::max(witness_amplitude, witness_pair);
  const bool ok = amplitude_gap <= 1e-12 && transfer_gap < 1e-9 &&
                  noise_gap < 1e-9 && witness >= 1e-4;
  return {ok,
          fmt("span-1 gaps %.1e/%.1e/%.1e (tol 1e-12/1e-9/1e-9), "
              "unrestricted witness %.2e (>= 1e-4)",
              amplitude_gap, transfer_gap, noise_gap, witness)};
}

// Oscillator response functional against the constant-switching Green
// function, again with a monotone node-count sweep.
Outcome response_convergence() {
  const auto src = deltatrain::SpectralSource::lorentz_drude(0.1, 2.0);
  const double ref = deltatrain::green_constant(1.0, 1.0, 0.1, 2.0);
  std::vector<double> errs;
  for (int n : {10, 30, 100, 300, 1000, 2000}) {
    const deltatrain::DeltaTrain train(1.0, n);
    errs.push_back(std::abs(
        deltatrain::script_G(1.0, train, deltatrain::qle_kernel(src, train),
                             1.0) -
        ref));
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < errs.size(); ++i)
    decreasing = decreasing && errs[i] < errs[i - 1];
  const double rel = errs.back() / std::abs(ref);
  const bool ok = decreasing && rel < 0.01;
  return {ok, fmt("rel err@N=2000 %.2e (tol 1e-02), %s", rel,
                  decreasing ? "decreasing" : "NOT decreasing")};
}

// Thermal position variance of the fine train against the independent
// frequency-integral reference, over the full time window.
Outcome thermal_covariance_agreement() {
  const auto src = deltatrain::SpectralSource::lorentz_drude(0.1, 2.0);
  const deltatrain::DeltaTrain train(1.0, 2000);
  const auto kernel = deltatrain::qle_kernel(src, train);
  const auto nu = deltatrain::noise_nu(train, src, 1.0);
  const deltatrain::OscillatorParams params(1.0, Eigen::Vector2d(1.0, 0.0));
  const deltatrain::OscillatorSolver solver(train, kernel, 1.0);
  double max_rel = 0.0;
  for (int i = 0; i <= 10; ++i) {
    const double t = 0.1 * i;
    const double q2 =
        deltatrain::mean_square_position(solver.pair(t, nu), params);
    const double ref = deltatrain::reference_Q2(t, params, src, 1.0);
    max_rel = std::max(max_rel, std::abs(q2 - ref) / std::abs(ref));
  }
  const bool ok = max_rel < 0.01;
  return {ok, fmt("max rel gap %.2e over 11 points (tol 1e-02)", max_rel)};
}

// Sine-series roundtrip of the periodic density back to the exponential
// correlator samples, and the truncated image-sum identity.
Outcome spectral_identities() {
  const double kappa = 1.3;
  const double lambda = 0.9;
  const double duration = 2.0;
  const int count = 20;
  const deltatrain::PeriodicSpectralDensity s(kappa, lambda, duration, count);
  const double delta = duration / count;
  double max_roundtrip = 0.0;
  for (int k = 1; k <= 10; ++k) {
    double acc = 0.0;
    for (int seg = 0; seg < k; ++seg)
      acc += deltatrain::quad::integrate(
          [&](double w) { return s(w) * std::sin(k * w); }, M_PI * seg / k,
          M_PI * (seg + 1) / k, 1e-12);
    const double target =
        kappa * lambda * lambda * std::exp(-lambda * delta * k);
    max_roundtrip =
        std::max(max_roundtrip, std::abs(2.0 / M_PI * acc - target));
  }
  const auto pc = deltatrain::poisson_check(1.0, 1.0, 1.0, 1.0, 500, 200);
  const bool ok = max_roundtrip <= 1e-8 && pc.abs_diff < 1e-6;
  return {ok, fmt("roundtrip max err %.2e (tol 1e-08), image-sum gap %.2e "
                  "(tol 1e-06)",
                  max_roundtrip, pc.abs_diff)};
}

// Physicality: the Kraus pair resolves the identity and maps arbitrary
// states to unit-trace positive states; thermal oscillator runs keep both
// the map floor and the state floor above the uncertainty bound.
Outcome physicality_suite() {
  std::mt19937 rng(907);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> mag(0.0, 1.0);
  std::uniform_real_distribution<double> phase(-M_PI, M_PI);
  const auto random_density = [&]() {
    Eigen::Matrix2cd a;
    double tr = 0.0;
    do {
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) a(r, c) = complex{u(rng), u(rng)};
      tr = (a * a.adjoint()).trace().real();
    } while (tr < 1e-3);
    return Eigen::Matrix2cd((a * a.adjoint()) / tr);
  };
  const auto traj =
      deltatrain::transfer(deltatrain::DeltaTrain(1.0, 50),
                           deltatrain::JCParams(0.1, 1.0))
          .node_values();
  double completeness = 0.0;
  double trace_gap = 0.0;
  double min_eig = 1.0;
  for (int i = 0; i < 100; ++i) {
    const complex tv = i % 2 == 0
                           ? traj[static_cast<std::size_t>(i / 2) %
                                  traj.size()]
                           : std::polar(mag(rng), phase(rng));
    const auto [e1, e2] = deltatrain::kraus_operators(tv);
    completeness = std::max(
        completeness, (e1.adjoint() * e1 + e2.adjoint() * e2 -
                       Eigen::Matrix2cd::Identity())
                          .cwiseAbs()
                          .maxCoeff());
    const Eigen::Matrix2cd out =
        deltatrain::kraus_channel(tv, random_density());
    trace_gap = std::max(trace_gap, std::abs(out.trace() - complex{1.0}));
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(out);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }

  const auto src = deltatrain::SpectralSource::lorentz_drude(0.1, 2.0);
  double map_floor = std::numeric_limits<double>::infinity();
  double state_floor = std::numeric_limits<double>::infinity();
  const struct {
    double beta;
    int count;
  } runs[] = {{1.0, 400}, {0.2, 137}};
  for (const auto& run : runs) {
    const deltatrain::DeltaTrain train(1.0, run.count);
    const auto kernel = deltatrain::qle_kernel(src, train);
    const auto nu = deltatrain::noise_nu(train, src, run.beta);
    const deltatrain::OscillatorSolver solver(train, kernel, 1.0);
    for (int j = 0; j <= 20; ++j) {
      const auto pair = solver.pair(0.05 * j, nu);
      map_floor = std::min(map_floor, pair.uncertainty_floor());
      state_floor = std::min(
          state_floor, deltatrain::covariance_floor(
                           pair.evolve_covariance(
                               Eigen::Matrix2d::Identity())));
    }
  }
  const bool ok = completeness < 1e-15 && trace_gap < 1e-14 &&
                  min_eig > -1e-14 && map_floor >= -1e-9 &&
                  state_floor >= -1e-9;
  return {ok,
          fmt("completeness %.1e, trace %.1e, state eig %.1e, floors "
              "%.1e/%.1e (tol -1e-9)",
              completeness, trace_gap, min_eig, map_floor, state_floor)};
}

// One-step channel spectrum: closed forms against direct diagonalization of
// the 4x4 block, and the trace-norm correction to the leading-order
// g-function staying quadratic in (coupling x spacing) along real runs.
Outcome one_step_channel_spectrum() {
  double max_gap = 0.0;
  for (double gamma : {-0.5, -0.3, -0.1, 0.0, 0.2, 0.8})
    for (double h : {0.0, 0.05, 0.2})
      for (double delta : {0.01, 0.05, 0.1}) {
        const auto cs = deltatrain::choi_spectrum(gamma, h, delta);
        Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
        m(0, 1) = delta * delta * h;
        m(1, 1) = 1.0 - delta * gamma + delta * delta * h;
        m(1, 2) = m(2, 1) = 1.0 - 0.5 * delta * gamma;
        m(2, 2) = 1.0;
        m(2, 3) = -delta * delta * h;
        m(3, 3) = delta * gamma - delta * delta * h;
        m *= 0.5;
        const Eigen::EigenSolver<Eigen::Matrix4d> es(m);
        std::array<double, 4> numeric{};
        for (int i = 0; i < 4; ++i) numeric[i] = es.eigenvalues()(i).real();
        std::sort(numeric.begin(), numeric.end());
        for (int i = 0; i < 4; ++i)
          max_gap =
              std::max(max_gap, std::abs(numeric[i] - cs.eigenvalues[i]));
      }

  // bound frozen at twice the measured grid maximum
  const double bound = 0.125;
  double max_ratio = 0.0;
  for (double kappa : {0.1, 0.5, 1.0, 2.5})
    for (double delta : {0.005, 0.01, 0.02, 0.04}) {
      const int n = static_cast<int>(std::lround(1.0 / delta));
      const deltatrain::DeltaTrain train(1.0, n);
      const auto samples = deltatrain::rate_samples(
          train, deltatrain::JCParams(kappa, 1.0));
      for (const auto& sample : samples) {
        const auto cs = deltatrain::choi_spectrum(
            sample.gamma, sample.velocity_squared, delta);
        const double correction =
            delta * std::abs(cs.g_exact - cs.g_leading);
        max_ratio = std::max(
            max_ratio, correction / (kappa * delta * kappa * delta));
      }
    }
  const bool ok = max_gap < 1e-12 && max_ratio <= bound;
  return {ok, fmt("spectrum gap %.2e (tol 1e-12), correction/(kd)^2 max "
                  "%.3f (bound %g)",
                  max_gap, max_ratio, bound)};
}

}  // namespace

int main() {
  const struct {
    int index;
    const char* name;
    double limit;
    Outcome (*body)();
  } rows[] = {
      {1, "amplitude convergence", 10.0, amplitude_convergence},
      {2, "nilpotency and resolvent", 5.0, nilpotency_and_resolvent},
      {3, "diagram-sum equivalence", 5.0, diagram_sum_equivalence},
      {4, "nearest-neighbor rates", 5.0, nearest_neighbor_rates},
      {5, "composition laws", 10.0, composition_laws},
      {6, "response convergence", 60.0, response_convergence},
      {7, "thermal covariance", 300.0, thermal_covariance_agreement},
      {8, "spectral identities", 5.0, spectral_identities},
      {9, "physicality suite", 30.0, physicality_suite},
      {10, "one-step channel spectrum", 5.0, one_step_channel_spectrum},
  };
  int failures = 0;
  for (const auto& row : rows) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = row.body();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start)
            .count();
    const bool ok = out.ok && secs < row.limit;
    if (!ok) ++failures;
    std::printf("%s %2d %-26s %s [%.2fs, limit %gs]\n",
                ok ? "PASS" : "FAIL", row.index, row.name,
                out.detail.c_str(), secs, row.limit);
    std::fflush(stdout);
  }
  std::printf("%d/10 passed\n", 10 - failures);
  return failures;
}
