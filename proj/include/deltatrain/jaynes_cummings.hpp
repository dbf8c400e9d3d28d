#pragma once

// Damped two-level amplitude dynamics on the delta train: the transfer
// function T(t) and its interval version T(t, t_a), the closed-form continuum
// amplitude, the amplitude-damping Kraus channel per step, discrete decay
// rates with the negativity measure built from them, and the spectrum of the
// one-step Choi matrix.

#include <eigen3/Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "deltatrain/errors.hpp"
#include "deltatrain/solver.hpp"
#include "deltatrain/train.hpp"

namespace deltatrain {

// Coupling rate, spectral width of the exponential memory, and the initial
// excited/ground amplitudes of the single-excitation state.
class JCParams {
public:
  JCParams(double kappa, double lambda, complex alpha1_0 = complex{1.0, 0.0},
           complex alpha0 = complex{0.0, 0.0})
      : kappa_(kappa), lambda_(lambda), alpha1_0_(alpha1_0), alpha0_(alpha0) {
    if (!(kappa_ >= 0.0) || !std::isfinite(kappa_))
      throw ConfigError("coupling rate must be nonnegative and finite");
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
      throw ConfigError("spectral width must be positive and finite");
    if (std::abs(std::norm(alpha1_0_) + std::norm(alpha0_) - 1.0) > 1e-12)
      throw ConfigError("initial amplitudes must be normalized");
  }

  double kappa() const { return kappa_; }
  double lambda() const { return lambda_; }
  complex alpha1_0() const { return alpha1_0_; }
  complex alpha0() const { return alpha0_; }

private:
  double kappa_;
  double lambda_;
  complex alpha1_0_;
  complex alpha0_;
};

// Memory kernel Gamma(t, t') = (kappa lambda / 2) e^{-lambda (t - t')} with
// positive sign convention; stationary, so the Toeplitz solve path applies.
inline KernelSpec jc_kernel(const JCParams& params) {
  const double k = params.kappa();
  const double l = params.lambda();
  return KernelSpec(
      [k, l](double t, double tp) {
        return complex{0.5 * k * l * std::exp(-l * (t - tp)), 0.0};
      },
      +1.0, std::nullopt, true);
}

// Continuum amplitude e^{-L t/2} [cosh(D t/2) + (L/D) sinh(D t/2)] with
// D = sqrt(L^2 - 2 k L) taken as the principal complex root, so 2k > L turns
// the hyperbolic pair into oscillations.  The (L/D) sinh factor is evaluated
// as (L t / 2) sinh(z)/z, finite through the critically damped point D = 0.
inline complex exact_amplitude(double t, double kappa, double lambda) {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw ConfigError("coupling rate must be nonnegative and finite");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw ConfigError("spectral width must be positive and finite");
  const complex d =
      std::sqrt(complex{lambda * lambda - 2.0 * kappa * lambda, 0.0});
  const complex z = 0.5 * t * d;
  complex sinhc;
  if (std::abs(z) < 1e-4) {
    const complex z2 = z * z;
    sinhc = 1.0 + z2 / 6.0 * (1.0 + z2 / 20.0);
  } else {
    sinhc = std::sinh(z) / z;
  }
  return std::exp(-0.5 * lambda * t) *
         (std::cosh(z) + 0.5 * lambda * t * sinhc);
}

// Discretized transfer function.  Node values come from one forward solve of
// (I - K) u = 1; off-node times add the memory row on top.  The interval
// version T(t, t_a) runs the same construction on the sub-train after node a:
// arcs may start at t_a but nothing lands there.
class TransferFunction {
public:
  TransferFunction(const DeltaTrain& train, const JCParams& params,
                   std::optional<int> restriction = std::nullopt)
      : solver_(train, jc_kernel(params).restricted(restriction),
                FreePropagator::first_order()) {
    const std::vector<complex> ones(train.count(), complex{1.0, 0.0});
    nodes_ = solver_.lower_solve(ones);
  }

  const DeltaTrain& train() const { return solver_.train(); }

  const std::vector<complex>& node_values() const { return nodes_; }

  complex node_value(int k) const {
    if (k < 1 || k > solver_.count())
      throw ConfigError("node index out of range");
    return nodes_[k - 1];
  }

  complex value(double t) const {
    if (t < 0.0) throw ConfigError("time must be nonnegative");
    const std::vector<complex> row = solver_.k_row(t);
    complex acc{1.0, 0.0};
    for (int l = 0; l < solver_.count(); ++l) acc += row[l] * nodes_[l];
    return acc;
  }

  // T(t, t_a) for node index a; a = 0 is the full function.
  complex interval_value(double t, int a) const {
    if (a < 0 || a > solver_.count())
      throw ConfigError("interval start node out of range");
    if (a == 0) return value(t);
    if (!(t > solver_.train().node(a)))
      throw ConfigError("time must lie beyond the interval start");
    return solver_.memory_series(
        t, [](double) { return complex{1.0, 0.0}; }, a);
  }

private:
  MemorySolver solver_;
  std::vector<complex> nodes_;
};

inline TransferFunction transfer(const DeltaTrain& train,
                                 const JCParams& params,
                                 std::optional<int> restriction = std::nullopt) {
  return TransferFunction(train, params, restriction);
}

// T(t, t_a) with t_a given as a time; it must sit on the node grid (or be 0).
inline complex transfer_interval(double t, double t_a, const DeltaTrain& train,
                                 const JCParams& params,
                                 std::optional<int> restriction = std::nullopt) {
  if (!(t_a >= 0.0)) throw ConfigError("interval start must be nonnegative");
  const double delta = train.spacing();
  const int a = static_cast<int>(std::lround(t_a / delta));
  if (a > train.count() ||
      std::abs(t_a - a * delta) > 1e-9 * std::max(delta, t_a))
    throw ConfigError("interval start must lie on the node grid");
  if (!(t > t_a)) throw ConfigError("time must lie beyond the interval start");
  return TransferFunction(train, params, restriction).interval_value(t, a);
}

// Kraus pair of the amplitude-damping step in the basis (excited, ground):
// E1 = diag(T, 1) and E2 with sqrt(1 - |T|^2) in the lower-left corner.
// |T| in (1, 1 + 1e-6] counts as discretization roundoff and is normalized;
// larger overshoots error out unless the caller opts into clamping.
inline std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> kraus_operators(
    complex T_value, bool clamp = false) {
  constexpr double eps_phys = 1e-6;
  const double mod = std::abs(T_value);
  if (!std::isfinite(mod)) throw ConfigError("transfer value must be finite");
  if (mod > 1.0 + eps_phys && !clamp) {
    std::ostringstream msg;
    msg << "transfer magnitude " << mod << " exceeds 1 beyond the guard band";
    throw PhysicalityError(msg.str());
  }
  complex top = T_value;
  if (mod > 1.0) top /= mod;
  Eigen::Matrix2cd e1 = Eigen::Matrix2cd::Zero();
  e1(0, 0) = top;
  e1(1, 1) = complex{1.0, 0.0};
  Eigen::Matrix2cd e2 = Eigen::Matrix2cd::Zero();
  e2(1, 0) = complex{std::sqrt(std::max(0.0, 1.0 - std::norm(top))), 0.0};
  return {e1, e2};
}

inline Eigen::Matrix2cd kraus_channel(complex T_value,
                                      const Eigen::Matrix2cd& rho0,
                                      bool clamp = false) {
  const double scale = std::max(1.0, rho0.cwiseAbs().maxCoeff());
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw ConfigError("density matrix must be Hermitian");
  const auto [e1, e2] = kraus_operators(T_value, clamp);
  return e1 * rho0 * e1.adjoint() + e2 * rho0 * e2.adjoint();
}

namespace detail {

struct AmplitudeSolve {
  MemorySolver solver;
  std::vector<complex> values;
};

inline AmplitudeSolve amplitude_nodes(const DeltaTrain& train,
                                      const JCParams& params,
                                      std::optional<int> restriction) {
  MemorySolver solver(train, jc_kernel(params).restricted(restriction),
                      FreePropagator::first_order());
  const std::vector<complex> ics(train.count(), params.alpha1_0());
  std::vector<complex> values = solver.lower_solve(ics);
  return {std::move(solver), std::move(values)};
}

[[noreturn]] inline void throw_pole(int k) {
  std::ostringstream msg;
  msg << "amplitude vanishes at node " << k << "; decay rate undefined";
  throw EvaluationError(msg.str());
}

}  // namespace detail

// Discrete decay rates from the finite-difference quotient
//   gamma_k = -2 Re[(alpha_{k+1} - alpha_k) / (delta alpha_k)],
// one value per k = 1..N-1.  The span restriction is applied to the kernel
// before solving, so it shapes the amplitudes themselves.
inline std::vector<double> decay_rates(
    const DeltaTrain& train, const JCParams& params,
    std::optional<int> restriction = std::nullopt) {
  const auto [solver, a] = detail::amplitude_nodes(train, params, restriction);
  const double delta = train.spacing();
  std::vector<double> rates;
  rates.reserve(a.size() > 1 ? a.size() - 1 : 0);
  for (int k = 1; k < static_cast<int>(a.size()); ++k) {
    if (a[k - 1] == complex{0.0, 0.0}) detail::throw_pole(k);
    rates.push_back(-2.0 * ((a[k] - a[k - 1]) / (delta * a[k - 1])).real());
  }
  return rates;
}

// Same rates assembled from the kernel arcs landing on t_{k+1},
//   gamma_k = 2 delta Re[sum_{j<=k} Sigma(t_{k+1}, t_j) alpha_j / alpha_k],
// using the node recursion alpha_{k+1} - alpha_k = -delta^2 sum_j Sigma
// alpha_j.  Kept as an independent assembly of the same quantity.
inline std::vector<double> decay_rates_arc_sum(
    const DeltaTrain& train, const JCParams& params,
    std::optional<int> restriction = std::nullopt) {
  const auto [solver, a] = detail::amplitude_nodes(train, params, restriction);
  const double delta = train.spacing();
  std::vector<double> rates;
  rates.reserve(a.size() > 1 ? a.size() - 1 : 0);
  for (int k = 1; k < static_cast<int>(a.size()); ++k) {
    if (a[k - 1] == complex{0.0, 0.0}) detail::throw_pole(k);
    complex acc{0.0, 0.0};
    for (int j = 1; j <= k; ++j) acc += solver.sigma_at(k + 1, j) * a[j - 1];
    rates.push_back(2.0 * delta * (acc / a[k - 1]).real());
  }
  return rates;
}

// Rate and squared amplitude velocity per step, the two inputs of the Choi
// spectrum: gamma_k as above and h_k = |(alpha_{k+1} - alpha_k) / delta|^2.
struct RateSample {
  double gamma = 0.0;
  double velocity_squared = 0.0;
};

inline std::vector<RateSample> rate_samples(
    const DeltaTrain& train, const JCParams& params,
    std::optional<int> restriction = std::nullopt) {
  const auto [solver, a] = detail::amplitude_nodes(train, params, restriction);
  const double delta = train.spacing();
  std::vector<RateSample> samples;
  samples.reserve(a.size() > 1 ? a.size() - 1 : 0);
  for (int k = 1; k < static_cast<int>(a.size()); ++k) {
    if (a[k - 1] == complex{0.0, 0.0}) detail::throw_pole(k);
    const complex vel = (a[k] - a[k - 1]) / delta;
    samples.push_back(
        {-2.0 * (vel / a[k - 1]).real(), std::norm(vel)});
  }
  return samples;
}

// Negativity measure -delta sum_k min(0, gamma_k) over the supplied rates.
inline double rhp_measure(std::span<const double> gammas, double delta) {
  if (!(delta > 0.0)) throw ConfigError("spacing must be positive");
  double acc = 0.0;
  for (double g : gammas) acc += std::min(0.0, g);
  return -delta * acc;
}

// Spectrum of the one-step Choi matrix for rate gamma and squared velocity h,
// plus the g-function in both exact (trace-norm) and leading-order form.
struct ChoiSpectrum {
  std::array<double, 4> eigenvalues{};  // ascending; they sum to 1
  double g_exact = 0.0;
  double g_leading = 0.0;
};

inline ChoiSpectrum choi_spectrum(double gamma, double h, double delta) {
  if (!(delta > 0.0)) throw ConfigError("spacing must be positive");
  if (!(h >= 0.0) || !std::isfinite(h))
    throw ConfigError("squared velocity must be nonnegative and finite");
  if (!std::isfinite(gamma)) throw ConfigError("decay rate must be finite");
  const double x = delta * gamma;
  const double y = delta * delta * h;
  const double lam1 = 0.5 * (x - y);
  const double root = std::hypot(x - 2.0, x - y);
  const double plus = 0.25 * (2.0 - (x - y) + root);
  // lam_plus lam_minus = (4 y - x^2) / 16; the product form keeps lam_minus
  // accurate where the direct difference cancels.
  const double minus = plus > 0.0 ? (4.0 * y - x * x) / (16.0 * plus)
                                  : 0.25 * (2.0 - (x - y) - root);
  ChoiSpectrum out;
  out.eigenvalues = {0.0, lam1, minus, plus};
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  // sum |lam| - 1 = 2 sum of negative parts since the eigenvalues sum to 1.
  double neg = 0.0;
  for (double v : out.eigenvalues) neg += std::max(0.0, -v);
  out.g_exact = 2.0 * neg / delta;
  out.g_leading = std::max(0.0, -gamma);
  return out;
}

}  // namespace deltatrain
