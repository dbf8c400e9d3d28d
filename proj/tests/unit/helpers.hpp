#pragma once

// Shared helpers for the unit suites: deterministic random instances and
// table-backed kernels whose node values can be edited entry by entry.

#include <eigen3/Eigen/Dense>

#include <complex>
#include <random>
#include <vector>

#include "deltatrain/train.hpp"

namespace testutil {

using deltatrain::complex;

// Kernel defined by an explicit table of node-pair values; times are mapped
// back to indices by rounding, which is exact for node-time arguments.
inline deltatrain::KernelSpec table_kernel(const Eigen::MatrixXcd& values,
                                           double spacing, double sign = 1.0) {
  return deltatrain::KernelSpec(
      [values, spacing](double t, double tp) {
        const auto k = static_cast<Eigen::Index>(std::lround(t / spacing));
        const auto l = static_cast<Eigen::Index>(std::lround(tp / spacing));
        return values(k - 1, l - 1);
      },
      sign);
}

inline Eigen::MatrixXcd random_kernel_table(int n, std::mt19937& rng,
                                            double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = complex{u(rng), u(rng)};
  return m;
}

inline std::vector<double> random_amplitudes(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.25, 1.75);
  std::vector<double> chi(n);
  for (auto& c : chi) c = u(rng);
  return chi;
}

inline std::vector<complex> random_noise(int n, std::mt19937& rng,
                                         double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<complex> xi(n);
  for (auto& x : xi) x = complex{u(rng), u(rng)};
  return xi;
}

}  // namespace testutil
