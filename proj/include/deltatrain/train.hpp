#pragma once

// Core types of the delta-train discretization: the switching train itself,
// the free propagator of the memoryless operator, the two-time memory kernel,
// and noise impulse sequences.

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "deltatrain/errors.hpp"

namespace deltatrain {

using complex = std::complex<double>;

// Switching profile chi(t) sampled as N weighted impulses at t_k = k T / N,
// k = 1..N.  Node spacing delta = T / N.
class DeltaTrain {
public:
  DeltaTrain(double duration, int count)
      : DeltaTrain(duration, std::vector<double>(check_count(count), 1.0)) {}

  DeltaTrain(double duration, std::vector<double> amplitudes)
      : duration_(duration), amplitudes_(std::move(amplitudes)) {
    if (!(duration_ > 0.0))
      throw ConfigError("train duration must be positive");
    if (amplitudes_.empty())
      throw ConfigError("train needs at least one impulse");
    for (double a : amplitudes_)
      if (!std::isfinite(a))
        throw ConfigError("train amplitudes must be finite");
  }

  double duration() const { return duration_; }
  int count() const { return static_cast<int>(amplitudes_.size()); }
  double spacing() const { return duration_ / count(); }

  // t_k, 1-based as in the defining sums.
  double node(int k) const { return k * spacing(); }

  double amplitude(int k) const { return amplitudes_[k - 1]; }

  // True when every chi_k coincides; enables the stationary fast path.
  bool uniform_amplitude() const {
    for (double a : amplitudes_)
      if (a != amplitudes_.front()) return false;
    return true;
  }

private:
  static int check_count(int count) {
    if (count < 1) throw ConfigError("impulse count must be positive");
    return count;
  }

  double duration_;
  std::vector<double> amplitudes_;
};

// Green function and free solution of the memoryless operator p(d/dt).
// Supported orders: n = 1 with p = d/dt, and n = 2 with p = d^2/dt^2 + w^2.
class FreePropagator {
public:
  static FreePropagator first_order() { return FreePropagator(1, 0.0); }

  static FreePropagator harmonic(double omega) {
    if (!(omega > 0.0)) throw ConfigError("oscillator frequency must be positive");
    return FreePropagator(2, omega);
  }

  int order() const { return order_; }

  // a_j of p = sum_j a_j d^j/dt^j.
  double coefficient(int j) const {
    if (j < 0 || j > order_) throw ConfigError("coefficient index out of range");
    return coef_[j];
  }

  double omega() const {
    if (order_ != 2) throw ConfigError("omega is defined for the harmonic propagator only");
    return omega_;
  }

  // G_0(t) for t >= 0; callers gate negative times with the step function.
  double green0(double t) const {
    return order_ == 1 ? 1.0 : std::sin(omega_ * t) / omega_;
  }

  double green0_dot(double t) const {
    return order_ == 1 ? 0.0 : std::cos(omega_ * t);
  }

  // Solution of p(d/dt) O = 0 from the initial data (O(0), O'(0), ...).
  complex free_solution(double t, std::span<const complex> initials) const {
    if (static_cast<int>(initials.size()) != order_)
      throw ConfigError("initial data length must equal the propagator order");
    if (order_ == 1) return initials[0];
    return initials[0] * std::cos(omega_ * t) +
           initials[1] * std::sin(omega_ * t) / omega_;
  }

private:
  FreePropagator(int order, double omega) : order_(order), omega_(omega) {
    if (order_ == 1) {
      coef_ = {0.0, 1.0, 0.0};
    } else {
      coef_ = {omega_ * omega_, 0.0, 1.0};
    }
  }

  int order_;
  double omega_;
  std::array<double, 3> coef_{};
};

// Two-time kernel Gamma(t, t') with its sign convention and the optional
// arc-span restriction j (memory reaching back at most j nodes).
//
// The effective node-pair kernel is
//   Sigma(t_k, t_l) = sign * chi_k * chi_l * Gamma(t_k, t_l),
// forced to zero on the diagonal k = l (an impulse never feeds back into
// itself instantaneously) and beyond the arc-span restriction k - l > j.
// Node pairs are compared by integer index only.
class KernelSpec {
public:
  using GammaFn = std::function<complex(double, double)>;

  KernelSpec(GammaFn gamma, double sign = 1.0,
             std::optional<int> max_arc_span = std::nullopt,
             bool stationary = false)
      : gamma_(std::move(gamma)), sign_(sign), span_(max_arc_span),
        stationary_(stationary) {
    if (!gamma_) throw ConfigError("kernel function must be set");
    if (sign_ != 1.0 && sign_ != -1.0)
      throw ConfigError("kernel sign convention must be +1 or -1");
    if (span_ && *span_ < 1)
      throw ConfigError("arc-span restriction must be a positive integer");
  }

  complex gamma(double t, double tp) const { return gamma_(t, tp); }
  double sign() const { return sign_; }
  std::optional<int> max_arc_span() const { return span_; }

  // Gamma depends on t - t' only; allows the Toeplitz solve path.
  bool stationary() const { return stationary_; }

  // Same kernel under a different arc-span restriction.
  KernelSpec restricted(std::optional<int> span) const {
    return KernelSpec(gamma_, sign_, span, stationary_);
  }

  complex sigma(const DeltaTrain& train, int k, int l) const {
    if (k == l) return {0.0, 0.0};
    if (span_ && k - l > *span_) return {0.0, 0.0};
    return sign_ * train.amplitude(k) * train.amplitude(l) *
           gamma_(train.node(k), train.node(l));
  }

private:
  GammaFn gamma_;
  double sign_;
  std::optional<int> span_;
  bool stationary_;
};

// Impulse weights zeta_k = (T/N) chi_k xi(t_k) entering the noise
// superposition.
class NoiseSequence {
public:
  explicit NoiseSequence(std::vector<complex> zeta) : zeta_(std::move(zeta)) {
    if (zeta_.empty()) throw ConfigError("noise sequence must not be empty");
  }

  static NoiseSequence zero(int count) {
    return NoiseSequence(std::vector<complex>(count, complex{0.0, 0.0}));
  }

  // Build from raw noise samples xi(t_k).
  static NoiseSequence from_xi(const DeltaTrain& train,
                               std::span<const complex> xi) {
    if (static_cast<int>(xi.size()) != train.count())
      throw ConfigError("noise sample count must match the train");
    std::vector<complex> z(xi.size());
    for (int k = 1; k <= train.count(); ++k)
      z[k - 1] = train.spacing() * train.amplitude(k) * xi[k - 1];
    return NoiseSequence(std::move(z));
  }

  int count() const { return static_cast<int>(zeta_.size()); }
  complex value(int k) const { return zeta_[k - 1]; }

  bool is_zero() const {
    for (const auto& z : zeta_)
      if (z != complex{0.0, 0.0}) return false;
    return true;
  }

private:
  std::vector<complex> zeta_;
};

}  // namespace deltatrain
