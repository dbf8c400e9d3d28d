#pragma once

// Delta-train solver for integro-differential equations with a two-time
// memory kernel.  The train turns the memory integral into an N x N strictly
// lower triangular matrix K whose Neumann resolvent (I - K)^{-1} is reached
// in at most N - 1 steps; the solution at nodes and intermediate times is
// then plain linear algebra.

#include <eigen3/Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <sstream>
#include <vector>

#include "deltatrain/errors.hpp"
#include "deltatrain/train.hpp"

namespace deltatrain {

// K and its resolvent as dense matrices (0-based storage of the 1-based
// K_{li}).
class MemoryMatrix {
public:
  MemoryMatrix(Eigen::MatrixXcd K, Eigen::MatrixXcd resolvent)
      : K_(std::move(K)), resolvent_(std::move(resolvent)) {}

  const Eigen::MatrixXcd& K() const { return K_; }
  const Eigen::MatrixXcd& resolvent() const { return resolvent_; }

private:
  Eigen::MatrixXcd K_;
  Eigen::MatrixXcd resolvent_;
};

// Shared engine: precomputes the node-pair kernel once and exposes entries,
// rows at intermediate times, and triangular solves.  A stationary kernel on
// a uniform-amplitude train stores only the Toeplitz coefficients, which
// keeps every solve O(N^2); anything else falls back to dense storage.
//
// Window semantics: several operations take a window_start index a.  a = 0
// is the full problem.  a >= 1 restricts the memory series to nodes a..N
// with node a acting as the interval boundary: arcs may start there but
// nothing lands there, and no noise impulse is attached to it (the impulse
// at t_a belongs to the earlier segment).  Callers supply inhomogeneous
// functions already on the relative clock where needed.
class MemorySolver {
public:
  MemorySolver(const DeltaTrain& train, const KernelSpec& kernel,
               const FreePropagator& prop)
      : train_(train), kernel_(kernel), prop_(prop),
        toeplitz_(kernel.stationary() && train.uniform_amplitude()) {
    const int n = train_.count();
    const double delta = train_.spacing();
    if (toeplitz_) {
      sig_.assign(n, complex{0.0, 0.0});
      for (int j = 1; j < n; ++j) {
        sig_[j] = kernel_.sigma(train_, 1 + j, 1);
        check_finite(sig_[j], 1 + j, 1);
      }
      // K_{l,i} depends on l - i only: c_m = -delta^2 sum_j G0((m-j) d) sig_j.
      c_.assign(n, complex{0.0, 0.0});
      for (int m = 1; m < n; ++m) {
        complex acc{0.0, 0.0};
        for (int j = 1; j <= m; ++j)
          acc += prop_.green0((m - j) * delta) * sig_[j];
        c_[m] = -delta * delta * acc;
      }
    } else {
      sigma_mat_ = Eigen::MatrixXcd::Zero(n, n);
      for (int k = 2; k <= n; ++k)
        for (int l = 1; l < k; ++l) {
          const complex s = kernel_.sigma(train_, k, l);
          check_finite(s, k, l);
          sigma_mat_(k - 1, l - 1) = s;
        }
      K_ = Eigen::MatrixXcd::Zero(n, n);
      for (int l = 2; l <= n; ++l)
        for (int i = 1; i < l; ++i) {
          complex acc{0.0, 0.0};
          for (int k = i; k <= l; ++k)
            acc += prop_.green0((l - k) * delta) * sigma_at(k, i);
          K_(l - 1, i - 1) = -delta * delta * acc;
        }
    }
  }

  int count() const { return train_.count(); }
  const DeltaTrain& train() const { return train_; }
  const KernelSpec& kernel() const { return kernel_; }
  const FreePropagator& propagator() const { return prop_; }

  // Sigma(t_k, t_l) from the precomputed store.
  complex sigma_at(int k, int l) const {
    if (k <= l) return kernel_.sigma(train_, k, l);
    return toeplitz_ ? sig_[k - l] : sigma_mat_(k - 1, l - 1);
  }

  // K_{li}, zero for l <= i.
  complex K_entry(int l, int i) const {
    if (l <= i) return {0.0, 0.0};
    return toeplitz_ ? c_[l - i] : K_(l - 1, i - 1);
  }

  // K_{t,t_l} for l = 1..N.
  std::vector<complex> k_row(double t) const { return row_impl(t, false); }

  // Time derivative of K_{t,t_l}.  The step-function boundary term vanishes
  // for the harmonic propagator (G_0(0) = 0), which is the only order using
  // this row.
  std::vector<complex> k_row_dot(double t) const { return row_impl(t, true); }

  // Forward substitution for (I - K_W) y = b on the window starting at
  // max(window_start, 1); b is indexed from that node (size N - s + 1).
  std::vector<complex> lower_solve(std::span<const complex> b,
                                   int window_start = 0) const {
    const int s = std::max(window_start, 1);
    const int m = count() - s + 1;
    if (static_cast<int>(b.size()) != m)
      throw ConfigError("right-hand side length must match the window");
    std::vector<complex> y(b.begin(), b.end());
    for (int l = 1; l < m; ++l)
      for (int i = 0; i < l; ++i)
        y[l] += K_entry(s + l, s + i) * y[i];
    return y;
  }

  // Back substitution for (I - K_W)^T z = r on the same window layout.
  std::vector<complex> upper_solve(std::span<const complex> r,
                                   int window_start = 0) const {
    const int s = std::max(window_start, 1);
    const int m = count() - s + 1;
    if (static_cast<int>(r.size()) != m)
      throw ConfigError("right-hand side length must match the window");
    std::vector<complex> z(r.begin(), r.end());
    for (int i = m - 2; i >= 0; --i)
      for (int l = i + 1; l < m; ++l)
        z[i] += K_entry(s + l, s + i) * z[l];
    return z;
  }

  // f(t) + sum_{l,i in W} K_{t,t_l} [resolvent_W]_{li} f(t_i).
  complex memory_series(double t, const std::function<complex(double)>& f,
                        int window_start = 0) const {
    const int s = std::max(window_start, 1);
    std::vector<complex> b(count() - s + 1);
    for (int i = s; i <= count(); ++i) b[i - s] = f(train_.node(i));
    const std::vector<complex> y = lower_solve(b, window_start);
    const std::vector<complex> row = k_row(t);
    complex acc = f(t);
    for (int l = s; l <= count(); ++l) acc += row[l - 1] * y[l - s];
    return acc;
  }

private:
  static void check_finite(const complex& s, int k, int l) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      std::ostringstream msg;
      msg << "kernel evaluation non-finite at node pair (" << k << ", " << l
          << ")";
      throw EvaluationError(msg.str());
    }
  }

  std::vector<complex> row_impl(double t, bool dot) const {
    const int n = count();
    const double delta = train_.spacing();
    // Largest node not later than t; the step function admits t = t_k, with
    // rounding slack so k * spacing landing an ulp past t still counts.
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    int kmax = 0;
    while (kmax < n && train_.node(kmax + 1) <= t + slack) ++kmax;
    std::vector<complex> row(n, complex{0.0, 0.0});
    for (int l = 1; l <= n; ++l) {
      complex acc{0.0, 0.0};
      for (int k = l; k <= kmax; ++k) {
        const double g = dot ? prop_.green0_dot(t - k * delta)
                             : prop_.green0(t - k * delta);
        acc += g * sigma_at(k, l);
      }
      row[l - 1] = -delta * delta * acc;
    }
    return row;
  }

  DeltaTrain train_;
  KernelSpec kernel_;
  FreePropagator prop_;
  bool toeplitz_;
  std::vector<complex> sig_;    // Toeplitz path: Sigma at offset j
  std::vector<complex> c_;      // Toeplitz path: K at offset m
  Eigen::MatrixXcd sigma_mat_;  // dense path
  Eigen::MatrixXcd K_;          // dense path
};

// The N x N memory matrix and its resolvent (I - K)^{-1}, computed by
// forward substitution column by column.
inline MemoryMatrix build_K(const DeltaTrain& train, const KernelSpec& kernel,
                            const FreePropagator& prop) {
  const MemorySolver solver(train, kernel, prop);
  const int n = train.count();
  Eigen::MatrixXcd K(n, n);
  for (int l = 1; l <= n; ++l)
    for (int i = 1; i <= n; ++i) K(l - 1, i - 1) = solver.K_entry(l, i);
  Eigen::MatrixXcd resolvent(n, n);
  std::vector<complex> e(n, complex{0.0, 0.0});
  for (int j = 0; j < n; ++j) {
    e[j] = 1.0;
    const std::vector<complex> col = solver.lower_solve(e);
    e[j] = 0.0;
    for (int i = 0; i < n; ++i) resolvent(i, j) = col[i];
  }
  return MemoryMatrix(std::move(K), std::move(resolvent));
}

// Literal Neumann sum I + K + ... + K^{N-1}.  Kept as a verification path
// for the nilpotency property; the solves above use substitution.
inline Eigen::MatrixXcd resolvent_power_sum(const Eigen::MatrixXcd& K) {
  const auto n = K.rows();
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd power = Eigen::MatrixXcd::Identity(n, n);
  for (Eigen::Index m = 1; m < n; ++m) {
    power = (power * K).eval();
    acc += power;
  }
  return acc;
}

// K_{t,t_l} for l = 1..N.  The last entry is always zero: the k-sum reaches
// only k = N there and the diagonal of Sigma is zeroed.
inline std::vector<complex> k_row(double t, const DeltaTrain& train,
                                  const KernelSpec& kernel,
                                  const FreePropagator& prop) {
  return MemorySolver(train, kernel, prop).k_row(t);
}

// Noise superposition Xi(t) = sum_k G_0(t - t_k) Theta(t - t_k) zeta_k.
inline complex xi_at(double t, const DeltaTrain& train,
                     const NoiseSequence& noise, const FreePropagator& prop) {
  if (noise.count() != train.count())
    throw ConfigError("noise sequence length must match the train");
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  complex acc{0.0, 0.0};
  for (int k = 1; k <= train.count(); ++k) {
    const double tk = train.node(k);
    if (t + slack >= tk) acc += prop.green0(t - tk) * noise.value(k);
  }
  return acc;
}

// Full solution at any time t >= 0 (nodes or intermediate):
//   O(t) = O0(t) + Xi(t) + sum_{l,i} K_{t,t_l} R_{li} (O0(t_i) + Xi(t_i)).
inline complex solve_at(double t, std::span<const complex> initials,
                        const DeltaTrain& train, const KernelSpec& kernel,
                        const NoiseSequence& noise,
                        const FreePropagator& prop) {
  const MemorySolver solver(train, kernel, prop);
  auto f = [&](double tau) {
    return prop.free_solution(tau, initials) + xi_at(tau, train, noise, prop);
  };
  return solver.memory_series(t, f);
}

// Solution at every node, O = R (O0 + Xi); consistent with solve_at there.
inline std::vector<complex> solve_nodes(std::span<const complex> initials,
                                        const DeltaTrain& train,
                                        const KernelSpec& kernel,
                                        const NoiseSequence& noise,
                                        const FreePropagator& prop) {
  const MemorySolver solver(train, kernel, prop);
  std::vector<complex> b(train.count());
  for (int i = 1; i <= train.count(); ++i)
    b[i - 1] = prop.free_solution(train.node(i), initials) +
               xi_at(train.node(i), train, noise, prop);
  return solver.lower_solve(b);
}

}  // namespace deltatrain
