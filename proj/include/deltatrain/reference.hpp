#pragma once

// Constant-switching baselines: the damped-oscillator response by partial
// fractions of its rational transform, the thermal mean-square position by
// frequency-domain quadrature, and the exponential-kernel amplitude, all
// behind one interface for the convergence comparisons.

#include <eigen3/Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

#include "deltatrain/errors.hpp"
#include "deltatrain/jaynes_cummings.hpp"
#include "deltatrain/qle.hpp"
#include "deltatrain/quadrature.hpp"
#include "deltatrain/spectral.hpp"

namespace deltatrain {

// Response of the continuously damped oscillator as a sum of three
// exponentials: G(t) = sum_i r_i e^{z_i t} with the poles z_i the roots of
// (z^2 + omega^2)(z + lambda) - kappa lambda^2 and residues
// r_i = (z_i + lambda) / q'(z_i).  Roots come from the companion matrix and
// are Newton-polished; conjugate pairing keeps every value real.
class RationalGreen {
public:
  RationalGreen(double omega, double kappa, double lambda)
      : omega_(omega), kappa_(kappa), lambda_(lambda) {
    if (!(omega > 0.0) || !std::isfinite(omega))
      throw ConfigError("oscillator frequency must be positive and finite");
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
      throw ConfigError("coupling must be nonnegative and finite");
    if (!(lambda > 0.0) || !std::isfinite(lambda))
      throw ConfigError("cutoff must be positive and finite");

    const double c2 = lambda;
    const double c1 = omega * omega;
    const double c0 = lambda * (omega * omega - kappa * lambda);
    Eigen::Matrix3d companion;
    companion << 0.0, 0.0, -c0, 1.0, 0.0, -c1, 0.0, 1.0, -c2;
    const Eigen::EigenSolver<Eigen::Matrix3d> es(companion);

    const auto q = [&](complex z) {
      return ((z + c2) * z + c1) * z + c0;
    };
    const auto qd = [&](complex z) {
      return (3.0 * z + 2.0 * c2) * z + c1;
    };
    for (int i = 0; i < 3; ++i) {
      complex z = es.eigenvalues()(i);
      for (int step = 0; step < 2; ++step) {
        const complex d = qd(z);
        if (std::abs(d) == 0.0) break;
        z -= q(z) / d;
      }
      z_[i] = z;
    }

    const double sep = std::min({std::abs(z_[0] - z_[1]),
                                 std::abs(z_[0] - z_[2]),
                                 std::abs(z_[1] - z_[2])});
    if (sep < 1e-8)
      throw DegeneracyError(
          "nearly repeated response poles; perturb the damping or cutoff");

    const double scale = 1.0 + std::abs(c0) + c1 + c2;
    for (int i = 0; i < 3; ++i) {
      if (std::abs(q(z_[i])) > 1e-10 * scale * (1.0 + std::norm(z_[i])))
        throw EvaluationError("response pole residual out of tolerance");
      r_[i] = (z_[i] + lambda) / qd(z_[i]);
    }

    complex sum_r{0.0, 0.0}, sum_rz{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      sum_r += r_[i];
      sum_rz += r_[i] * z_[i];
    }
    if (std::abs(sum_r) > 1e-10 || std::abs(sum_rz - 1.0) > 1e-10)
      throw EvaluationError("residue sum rules out of tolerance");
  }

  double omega() const { return omega_; }
  double kappa() const { return kappa_; }
  double lambda() const { return lambda_; }
  const std::array<complex, 3>& poles() const { return z_; }
  const std::array<complex, 3>& residues() const { return r_; }

  double value(double t) const { return real_sum(t, 0); }
  double slope(double t) const { return real_sum(t, 1); }
  double curvature(double t) const { return real_sum(t, 2); }

  // int_0^t G(u) e^{-i w u} du, the transform of the response over the
  // finite window; the small-argument series keeps kappa = 0 at w = omega
  // finite.
  complex windowed_fourier(double t, double w) const {
    complex acc{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      const complex a = (z_[i] - complex{0.0, w}) * t;
      complex factor;
      if (std::abs(a) < 1e-6) {
        factor = t * (1.0 + a * (0.5 + a * (1.0 / 6.0 + a / 24.0)));
      } else {
        factor = (std::exp(a) - 1.0) * t / a;
      }
      acc += r_[i] * factor;
    }
    return acc;
  }

private:
  double real_sum(double t, int power) const {
    complex acc{0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
      complex w = r_[i];
      for (int p = 0; p < power; ++p) w *= z_[i];
      acc += w * std::exp(z_[i] * t);
    }
    if (std::abs(acc.imag()) > 1e-12 * (1.0 + std::abs(acc.real())))
      throw EvaluationError("conjugate pole pairing lost");
    return acc.real();
  }

  double omega_;
  double kappa_;
  double lambda_;
  std::array<complex, 3> z_;
  std::array<complex, 3> r_;
};

// G(t) for constant unit switching.
inline double green_constant(double t, double omega, double kappa,
                             double lambda) {
  if (!(t >= 0.0)) throw ConfigError("time must be nonnegative");
  return RationalGreen(omega, kappa, lambda).value(t);
}

// Exponential-kernel amplitude under constant switching; the closed form
// lives with the two-level module, re-exported so every baseline sits
// behind one interface.
inline complex jc_exact(double t, double kappa, double lambda) {
  return exact_amplitude(t, kappa, lambda);
}

namespace detail {

// omega * coth(beta omega / 2), smooth through omega = 0.
inline double omega_coth(double w, double beta) {
  const double x = 0.5 * beta * w;
  if (std::abs(x) < 1e-4)
    return (2.0 / beta) * (1.0 + x * x / 3.0 - x * x * x * x / 45.0);
  return w / std::tanh(x);
}

}  // namespace detail

// <Q^2(t)> for constant switching in the Lorentz-Drude thermal bath:
// deterministic part from the response pair (G, Gdot) and the initial
// moments, noise part as the single frequency integral
// (1/pi) int_0^inf sigma(w) coth(beta w / 2) |int_0^t G e^{-i w u} du|^2 dw,
// truncated where the 1/w^3 tail falls below target and completed by the
// analytic tail estimate kappa lambda^2 G(t)^2 / (2 W^2).
inline double reference_Q2(double t, const OscillatorParams& params,
                           const SpectralSource& source, double beta) {
  if (!(t >= 0.0)) throw ConfigError("time must be nonnegative");
  if (!source.is_lorentz_drude())
    throw ConfigError(
        "constant-switching reference supports only the Lorentz-Drude bath");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw ConfigError("inverse temperature must be positive and finite");

  const double kappa = source.kappa();
  const double lambda = source.lambda();
  const RationalGreen green(params.omega(), kappa, lambda);
  const SecondMoments m = initial_second_moments(params);
  const double g = green.value(t);
  const double gd = green.slope(t);
  const double deterministic =
      gd * gd * m.qq + g * g * m.pp + 2.0 * gd * g * m.qp;
  if (kappa == 0.0 || t == 0.0) return deterministic;

  const double ll = lambda * lambda;
  const auto integrand = [&](double w) {
    const double sc =
        kappa * ll / (w * w + ll) * detail::omega_coth(w, beta);
    return sc * std::norm(green.windowed_fourier(t, w));
  };

  // Truncation from the tail bound, floored to clear the spectral knee.
  const double tail_scale = kappa * ll * g * g;
  double w_max = 25.0 * std::max({1.0, params.omega(), lambda});
  if (tail_scale > 0.0)
    w_max = std::max(w_max, std::sqrt(tail_scale / 5e-7));

  const double chunk = 25.0 * std::max(1.0, params.omega());
  const int chunks = std::max(1, static_cast<int>(std::ceil(w_max / chunk)));
  const double step = w_max / chunks;
  double noise = 0.0;
  for (int i = 0; i < chunks; ++i)
    noise += quad::integrate(integrand, i * step, (i + 1) * step,
                             2.5e-7 / chunks);
  noise += tail_scale / (2.0 * w_max * w_max);
  return deterministic + noise / M_PI;
}

}  // namespace deltatrain
