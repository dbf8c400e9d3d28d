#pragma once

// Bath spectral densities and the noise statistics they induce on a delta
// train: the Lorentz-Drude closed forms, the 2*pi-periodic spectral density
// of the discretized kernel, thermal impulse covariances, and the
// continuous-switching correlator consumed by the reference solutions.

#include <cmath>
#include <complex>
#include <cstdlib>
#include <eigen3/Eigen/Dense>
#include <optional>
#include <utility>
#include <vector>

#include "deltatrain/errors.hpp"
#include "deltatrain/quadrature.hpp"
#include "deltatrain/train.hpp"

namespace deltatrain {

// Damping kernel of the Lorentz-Drude bath, kappa Lambda^2 e^{-Lambda|t|}
// sgn(t).  sgn(0) = 0, so Gamma(0) = 0 matches the zeroed kernel diagonal.
inline double gamma_ld(double t, double kappa, double lambda) {
  if (t == 0.0) return 0.0;
  const double mag = kappa * lambda * lambda * std::exp(-lambda * std::abs(t));
  return t > 0.0 ? mag : -mag;
}

// Bath description: either the Lorentz-Drude continuum or an explicit finite
// collection of oscillators with a common coupling.  An inverse temperature
// may be attached for the thermal correlators.
class SpectralSource {
public:
  static SpectralSource lorentz_drude(double kappa, double lambda,
                                      std::optional<double> beta = {}) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw ConfigError("Lorentz-Drude coupling kappa must be >= 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ConfigError("Lorentz-Drude cutoff Lambda must be positive");
    SpectralSource s;
    s.kind_ = Kind::LorentzDrude;
    s.kappa_ = kappa;
    s.lambda_ = lambda;
    s.beta_ = check_beta(beta);
    return s;
  }

  static SpectralSource discrete_oscillators(std::vector<double> frequencies,
                                             double coupling,
                                             std::optional<double> beta = {}) {
    if (frequencies.empty())
      throw ConfigError("discrete bath needs at least one oscillator");
    for (double w : frequencies)
      if (!(w > 0.0) || !std::isfinite(w))
        throw ConfigError("oscillator frequencies must be positive");
    if (!std::isfinite(coupling))
      throw ConfigError("oscillator coupling must be finite");
    SpectralSource s;
    s.kind_ = Kind::Discrete;
    s.frequencies_ = std::move(frequencies);
    s.coupling_ = coupling;
    s.beta_ = check_beta(beta);
    return s;
  }

  bool is_lorentz_drude() const { return kind_ == Kind::LorentzDrude; }

  double kappa() const {
    require_ld();
    return kappa_;
  }
  double lambda() const {
    require_ld();
    return lambda_;
  }
  const std::vector<double>& frequencies() const {
    require_discrete();
    return frequencies_;
  }
  double coupling() const {
    require_discrete();
    return coupling_;
  }
  std::optional<double> beta() const { return beta_; }

  // Memory kernel Gamma(t): closed form for LD, sine sum for oscillators.
  double gamma(double t) const {
    if (kind_ == Kind::LorentzDrude) return gamma_ld(t, kappa_, lambda_);
    double sum = 0.0;
    for (double w : frequencies_)
      sum += coupling_ * coupling_ / w * std::sin(w * t);
    return sum;
  }

private:
  enum class Kind { LorentzDrude, Discrete };

  SpectralSource() = default;

  static std::optional<double> check_beta(std::optional<double> beta) {
    if (beta && (!(*beta > 0.0) || !std::isfinite(*beta)))
      throw ConfigError("inverse temperature beta must be positive");
    return beta;
  }
  void require_ld() const {
    if (kind_ != Kind::LorentzDrude)
      throw ConfigError("operation requires a Lorentz-Drude source");
  }
  void require_discrete() const {
    if (kind_ != Kind::Discrete)
      throw ConfigError("operation requires a discrete-oscillator source");
  }

  Kind kind_ = Kind::LorentzDrude;
  double kappa_ = 0.0;
  double lambda_ = 1.0;
  std::vector<double> frequencies_;
  double coupling_ = 0.0;
  std::optional<double> beta_;
};

// Continuous Lorentz-Drude spectral density kappa omega Lambda^2 /
// (omega^2 + Lambda^2), extended oddly to negative frequencies.
inline double sigma_continuous(double omega, const SpectralSource& spectral) {
  const double kappa = spectral.kappa(), lambda = spectral.lambda();
  return kappa * omega * lambda * lambda / (omega * omega + lambda * lambda);
}

// 2*pi-periodic spectral density of the discretized LD kernel,
//   s(w) = -(kappa Lambda^2 / 2) sin w / (cos w - cosh(Lambda T/N)).
// The denominator is evaluated as -2[sinh^2(Lambda delta/2) + sin^2(w/2)],
// which is exact and keeps tiny w and tiny Lambda delta fully resolved.
class PeriodicSpectralDensity {
public:
  PeriodicSpectralDensity(double kappa, double lambda, double duration,
                          int count)
      : kappa_(kappa), lambda_(lambda), duration_(duration), count_(count) {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw ConfigError("coupling kappa must be >= 0");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ConfigError("cutoff Lambda must be positive");
    if (!(duration > 0.0) || count < 1)
      throw ConfigError("train parameters must satisfy T > 0, N >= 1");
    const double sh = std::sinh(lambda * spacing() / 2.0);
    sinh2_ = sh * sh;
  }

  double operator()(double omega_bar) const {
    const double half = std::sin(omega_bar / 2.0);
    return kappa_ * lambda_ * lambda_ / 4.0 * std::sin(omega_bar) /
           (sinh2_ + half * half);
  }

  // lim_{w -> 0} s(w)/w, the slope at the removable zero.
  double slope_at_zero() const {
    return kappa_ * lambda_ * lambda_ / (4.0 * sinh2_);
  }

  // sinh^2(Lambda delta / 2), the w = 0 value of the denominator.
  double denominator_floor() const { return sinh2_; }

  double kappa() const { return kappa_; }
  double lambda() const { return lambda_; }
  double duration() const { return duration_; }
  int count() const { return count_; }
  double spacing() const { return duration_ / count_; }

private:
  double kappa_, lambda_, duration_;
  int count_;
  double sinh2_;
};

inline double dtft_s(double omega_bar, double kappa, double lambda, double T,
                     int N) {
  return PeriodicSpectralDensity(kappa, lambda, T, N)(omega_bar);
}

// Symmetrized impulse-noise covariance nu_{k,k'} = <{zeta_k, zeta_k'}>.
class NoiseCovariance {
public:
  explicit NoiseCovariance(Eigen::MatrixXd nu) : nu_(std::move(nu)) {
    if (nu_.rows() != nu_.cols())
      throw ConfigError("noise covariance must be square");
    const double scale = std::max(1.0, nu_.cwiseAbs().maxCoeff());
    if ((nu_ - nu_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw ConfigError("noise covariance must be symmetric");
    for (Eigen::Index k = 0; k < nu_.rows(); ++k)
      if (nu_(k, k) < -1e-12 * scale)
        throw PhysicalityError("noise covariance has a negative diagonal");
  }

  static NoiseCovariance zero(int n) {
    return NoiseCovariance(Eigen::MatrixXd::Zero(n, n));
  }

  const Eigen::MatrixXd& nu() const { return nu_; }
  int size() const { return static_cast<int>(nu_.rows()); }

private:
  Eigen::MatrixXd nu_;
};

// Units read on the thermal occupation exponent.  The printed correlator uses
// e^{beta w} with w the dimensionless frequency w = omega T/N; taking beta at
// face value there ties the temperature to the discretization.  Physical mode
// rescales the exponent to beta_eff = beta N/T so that a fixed beta refers to
// the physical frequency and the N -> infinity limit reproduces the
// continuous-switching correlator.  Physical is the default.
enum class ThermalUnits { Physical, LiteralPaper };

namespace detail {

// s(w) coth(beta_eff w / 2), extended evenly; finite at w = 0.  Inside
// |w| < 1e-4 (and small exponent) the removable point is evaluated by the
// quadratic series; elsewhere 1/tanh is stable down to denormal arguments.
inline double s_coth(const PeriodicSpectralDensity& s, double beta_eff,
                     double omega_bar) {
  if (s.kappa() == 0.0) return 0.0;
  const double aw = std::abs(omega_bar);
  if (aw < 1e-4 && beta_eff * aw < 0.02) {
    const double a = s.slope_at_zero();
    const double s2 = -1.0 / 6.0 - 1.0 / (4.0 * s.denominator_floor());
    return 2.0 * a / beta_eff *
           (1.0 + (s2 + beta_eff * beta_eff / 12.0) * omega_bar * omega_bar);
  }
  return s(aw) / std::tanh(beta_eff * aw / 2.0);
}

// int_0^pi s(w) coth(beta_eff w/2) cos(m w) dw, split along the cosine's
// half-periods so the adaptive panels never straddle many oscillations.
inline double thermal_offset_integral(const PeriodicSpectralDensity& s,
                                      double beta_eff, int m,
                                      double abs_tol = 1e-10) {
  const int segments = std::max(1, m);
  const double width = M_PI / segments;
  const double seg_tol = abs_tol / segments;
  double total = 0.0;
  for (int i = 0; i < segments; ++i) {
    const double a = i * width, b = (i + 1) * width;
    total += quad::integrate(
        [&](double w) { return s_coth(s, beta_eff, w) * std::cos(m * w); }, a,
        b, seg_tol);
  }
  return total;
}

}  // namespace detail

// Thermal covariance of the impulse noise, nu_{k,k'} = (T/N)^2 chi_k chi_k'
// (<xi_k xi_k'> + <xi_k' xi_k>).  The symmetrized correlator reduces to
//   (2/pi) int_0^pi s(w) coth(beta_eff w/2) cos(w (k - k')) dw,
// which depends only on k - k', so one integral per offset fills the matrix.
inline NoiseCovariance noise_nu(const DeltaTrain& train,
                                const SpectralSource& spectral, double beta,
                                ThermalUnits units = ThermalUnits::Physical) {
  if (!spectral.is_lorentz_drude())
    throw ConfigError("thermal covariance requires a Lorentz-Drude source");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("inverse temperature beta must be positive");
  const int n = train.count();
  const double delta = train.spacing();
  const PeriodicSpectralDensity s(spectral.kappa(), spectral.lambda(),
                                  train.duration(), n);
  const double beta_eff =
      units == ThermalUnits::Physical ? beta / delta : beta;

  Eigen::MatrixXd nu = Eigen::MatrixXd::Zero(n, n);
  if (spectral.kappa() == 0.0) return NoiseCovariance(std::move(nu));

  std::vector<double> offset(n);
  for (int m = 0; m < n; ++m)
    offset[m] =
        2.0 / M_PI * detail::thermal_offset_integral(s, beta_eff, m);
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n; ++l)
      nu(k - 1, l - 1) = delta * delta * train.amplitude(k) *
                         train.amplitude(l) * offset[std::abs(k - l)];
  return NoiseCovariance(std::move(nu));
}

// Truncated Poisson-summation comparison: the periodic density at w = omega
// T/N against the image sum (N/T) sum_k sigma(omega - 2 pi k N/T) for
// k in [-M, M].  Images are paired by |k| so the odd tails cancel exactly.
struct PoissonCheck {
  double lhs;
  double rhs;
  double abs_diff;
};

inline PoissonCheck poisson_check(double omega, double kappa, double lambda,
                                  double T, int N, int truncation) {
  if (truncation < 0) throw ConfigError("truncation must be >= 0");
  const PeriodicSpectralDensity s(kappa, lambda, T, N);
  const auto src = SpectralSource::lorentz_drude(kappa, lambda);
  const double delta = T / N;
  const double lhs = s(omega * delta);
  double rhs = sigma_continuous(omega, src);
  for (int k = truncation; k >= 1; --k) {
    const double shift = 2.0 * M_PI * k / delta;
    rhs += sigma_continuous(omega - shift, src) +
           sigma_continuous(omega + shift, src);
  }
  rhs /= delta;
  return {lhs, rhs, std::abs(lhs - rhs)};
}

namespace detail {

// int_0^inf w cos(w tau) / (w^2 + Lambda^2) dw
//   = (e^y E1(y) - e^{-y} Ei(y)) / 2 with y = Lambda tau.
// Beyond y ~ 34 direct exponentials overflow; there the difference collapses
// to the odd-order asymptotic tail -(1/y^2 + 6/y^4 + 120/y^6 + ...).
inline double cosine_core(double y) {
  if (!(y > 0.0)) throw EvaluationError("cosine transform needs tau > 0");
  if (y <= 34.0) {
    const double e1 = -std::expint(-y);
    return (std::exp(y) * e1 - std::exp(-y) * std::expint(y)) / 2.0;
  }
  double sum = 0.0, term = 1.0 / (y * y);
  for (int k = 1; term > 1e-17 * (1.0 + sum); k += 2) {
    sum += term;
    term *= static_cast<double>(k + 1) * static_cast<double>(k + 2) / (y * y);
    if (k > 60) break;
  }
  return -sum;
}

}  // namespace detail

// Continuous-switching thermal correlator <xi(t) xi(t')>.  The real part is
// split into the exponentially damped thermal piece plus the closed-form
// zero-point cosine transform; the imaginary part is Gamma(t - t')/2 exactly.
// Equal times are rejected: the zero-point integral diverges logarithmically.
inline complex noise_continuous(double t, double tp,
                                const SpectralSource& spectral, double beta) {
  const double kappa = spectral.kappa(), lambda = spectral.lambda();
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("inverse temperature beta must be positive");
  const double tau = t - tp;
  if (tau == 0.0)
    throw EvaluationError(
        "equal-time continuous correlator diverges (zero-point integral)");
  const double atau = std::abs(tau);

  // Thermal piece: sigma(w) 2/(e^{beta w} - 1) decays like e^{-beta w}; an
  // upper limit with beta W = 45 leaves a tail below 1e-19 of the prefactor.
  const double W = 45.0 / beta;
  const int segments =
      std::max(1, static_cast<int>(std::ceil(W * atau / M_PI)));
  const double seg_tol = 1e-11 / segments;
  double thermal = 0.0;
  for (int i = 0; i < segments; ++i) {
    const double a = W * i / segments, b = W * (i + 1) / segments;
    thermal += quad::integrate(
        [&](double w) {
          const double occ = 2.0 / std::expm1(beta * w);
          return sigma_continuous(w, spectral) * occ * std::cos(w * atau);
        },
        a, b, seg_tol);
  }

  const double zero_point =
      kappa * lambda * lambda * detail::cosine_core(lambda * atau);
  const double re = (thermal + zero_point) / M_PI;
  const double im = gamma_ld(tau, kappa, lambda) / 2.0;
  return complex{re, im};
}

}  // namespace deltatrain
