#pragma once

// Damped harmonic oscillator on the delta train: position-response
// functionals with analytic slopes, two-time position correlators, the
// Gaussian covariance transfer pair (T, N), composition-law residuals, and
// the nearest-neighbor product form of the transfer pair.

#include <eigen3/Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "deltatrain/errors.hpp"
#include "deltatrain/solver.hpp"
#include "deltatrain/spectral.hpp"
#include "deltatrain/train.hpp"

namespace deltatrain {

// The form entering [Q, P] = i and the uncertainty bounds below.
inline Eigen::Matrix2d symplectic_form() {
  Eigen::Matrix2d w;
  w << 0.0, 1.0, -1.0, 0.0;
  return w;
}

namespace detail {

// Smallest eigenvalue of the Hermitian 2x2 matrix S + iA built from a real
// symmetric S and a real antisymmetric A.
inline double min_eig_sym_plus_anti(const Eigen::Matrix2d& s, double a01) {
  const double mean = 0.5 * (s(0, 0) + s(1, 1));
  const double half_gap = 0.5 * (s(0, 0) - s(1, 1));
  return mean - std::hypot(half_gap, std::abs(complex{s(0, 1), a01}));
}

}  // namespace detail

// Smallest eigenvalue of V + i Omega_sym; nonnegative (up to a small floor)
// exactly when V is a valid covariance matrix.
inline double covariance_floor(const Eigen::Matrix2d& v) {
  return detail::min_eig_sym_plus_anti(v, 1.0);
}

// Oscillator frequency with the initial Gaussian data: first moment
// (<Q>, <P>) and covariance V in the anticommutator convention
// V_ij = <{R_i, R_j}> - 2 <R_i><R_j>, so the vacuum at Omega = 1 is the
// identity.  V + i Omega_sym must be positive semidefinite within a floor.
class OscillatorParams {
public:
  explicit OscillatorParams(double omega,
                            Eigen::Vector2d mean = Eigen::Vector2d::Zero(),
                            Eigen::Matrix2d covariance =
                                Eigen::Matrix2d::Identity())
      : omega_(omega), mean_(std::move(mean)), cov_(std::move(covariance)) {
    if (!(omega_ > 0.0) || !std::isfinite(omega_))
      throw ConfigError("oscillator frequency must be positive and finite");
    if (!mean_.allFinite() || !cov_.allFinite())
      throw ConfigError("initial moments must be finite");
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if (std::abs(cov_(0, 1) - cov_(1, 0)) > 1e-12 * scale)
      throw ConfigError("initial covariance must be symmetric");
    if (covariance_floor(cov_) < -1e-10 * scale)
      throw PhysicalityError("initial covariance violates the uncertainty bound");
  }

  double omega() const { return omega_; }
  const Eigen::Vector2d& mean() const { return mean_; }
  const Eigen::Matrix2d& covariance() const { return cov_; }

private:
  double omega_;
  Eigen::Vector2d mean_;
  Eigen::Matrix2d cov_;
};

// Memory kernel Sigma(t, t') = -chi(t) chi(t') Gamma(t - t') with Gamma drawn
// from the bath description; stationary, so the Toeplitz solve path applies.
// The train argument keeps the builder signature uniform with the rest of the
// module; the kernel itself does not depend on it.
inline KernelSpec qle_kernel(const SpectralSource& spectral,
                             const DeltaTrain&) {
  return KernelSpec(
      [spectral](double t, double tp) {
        return complex{spectral.gamma(t - tp), 0.0};
      },
      -1.0, std::nullopt, true);
}

// Selector for the inhomogeneous part of the response series: the two
// rotation functions carrying the initial data, or the impulse response
// attached to node k.
class BaseFunction {
public:
  enum class Kind { Q, P, Impulse };

  static BaseFunction q() { return BaseFunction(Kind::Q, 0); }
  static BaseFunction p() { return BaseFunction(Kind::P, 0); }
  static BaseFunction zeta(int k) {
    if (k < 1) throw ConfigError("impulse node index must be positive");
    return BaseFunction(Kind::Impulse, k);
  }

  Kind kind() const { return kind_; }
  bool is_impulse() const { return kind_ == Kind::Impulse; }
  int node() const {
    if (!is_impulse())
      throw ConfigError("only impulse functions carry a node index");
    return node_;
  }

private:
  BaseFunction(Kind kind, int node) : kind_(kind), node_(node) {}

  Kind kind_;
  int node_;
};

// Linear map on the Gaussian data over one stretch of evolution: the first
// moment goes to T r and the covariance to T V T^T + N.  Construction checks
// that N is symmetric and stores the smallest eigenvalue of
// N + i Omega_sym - i T Omega_sym T^T (for a 2x2 T that matrix is
// N + i(1 - det T) Omega_sym).  The floor is reported rather than enforced:
// with the bath's thermal covariance it stays above -1e-9, while a zero or
// toy noise matrix next to a damped kernel legitimately dips below (damping
// without its noise breaks the bound), and such pairs are exactly what the
// Markovianity diagnostics need to build.
class TransferPair {
public:
  TransferPair(const Eigen::Matrix2d& transfer, const Eigen::Matrix2d& noise)
      : t_(transfer), n_(noise) {
    if (!t_.allFinite() || !n_.allFinite())
      throw EvaluationError("transfer pair entries must be finite");
    const double scale =
        std::max({1.0, n_.cwiseAbs().maxCoeff(), t_.cwiseAbs().maxCoeff()});
    if (std::abs(n_(0, 1) - n_(1, 0)) > 1e-12 * scale)
      throw EvaluationError("noise matrix must be symmetric");
    floor_ = detail::min_eig_sym_plus_anti(n_, 1.0 - t_.determinant());
  }

  const Eigen::Matrix2d& transfer_matrix() const { return t_; }
  const Eigen::Matrix2d& noise_matrix() const { return n_; }

  // min eig of N + i Omega_sym - i T Omega_sym T^T, kept for reporting.
  double uncertainty_floor() const { return floor_; }

  Eigen::Vector2d evolve_mean(const Eigen::Vector2d& r0) const {
    return t_ * r0;
  }

  Eigen::Matrix2d evolve_covariance(const Eigen::Matrix2d& v0) const {
    return t_ * v0 * t_.transpose() + n_;
  }

private:
  Eigen::Matrix2d t_;
  Eigen::Matrix2d n_;
  double floor_;
};

// Response engine for one train/kernel/frequency triple.  Every quantity is
// the memory series f(t) + sum_{l,i} K_{t,t_l} [resolvent]_{li} f(t_i) for
// one of the base functions, or its analytic time derivative (the derivative
// touches only the explicit f(t) and the G_0 factors of the row; the step
// boundary term carries G_0(0) = 0 and drops).
//
// window_start = a >= 1 reruns the series on the sub-train after node a with
// the rotation functions read on the clock starting at t_a, which yields the
// map applied to state data handed over at t_a.  Impulse functions keep
// their absolute node argument and must lie inside the window; the impulse
// at node a itself belongs to the earlier stretch.
class OscillatorSolver {
public:
  OscillatorSolver(const DeltaTrain& train, const KernelSpec& kernel,
                   double omega)
      : solver_(train, kernel, FreePropagator::harmonic(omega)) {}

  const DeltaTrain& train() const { return solver_.train(); }
  const MemorySolver& solver() const { return solver_; }
  double omega() const { return solver_.propagator().omega(); }

  double functional(const BaseFunction& f, double t,
                    int window_start = 0) const {
    const double origin = window_origin(t, window_start);
    const int s = std::max(window_start, 1);
    const int n = solver_.count();
    std::vector<complex> b(n - s + 1);
    for (int i = s; i <= n; ++i)
      b[i - s] = complex{base_value(f, train().node(i), origin), 0.0};
    const std::vector<complex> y = solver_.lower_solve(b, window_start);
    const std::vector<complex> row = solver_.k_row(t);
    complex acc{base_value(f, t, origin), 0.0};
    for (int l = s; l <= n; ++l) acc += row[l - 1] * y[l - s];
    return acc.real();
  }

  double functional_dot(const BaseFunction& f, double t,
                        int window_start = 0) const {
    const double origin = window_origin(t, window_start);
    const int s = std::max(window_start, 1);
    const int n = solver_.count();
    std::vector<complex> b(n - s + 1);
    for (int i = s; i <= n; ++i)
      b[i - s] = complex{base_value(f, train().node(i), origin), 0.0};
    const std::vector<complex> y = solver_.lower_solve(b, window_start);
    const std::vector<complex> row = solver_.k_row_dot(t);
    complex acc{base_slope(f, t, origin), 0.0};
    for (int l = s; l <= n; ++l) acc += row[l - 1] * y[l - s];
    return acc.real();
  }

  // 2x2 map of the first moment: rows (value, slope), columns (f_Q, f_P).
  Eigen::Matrix2d transfer(double t, int window_start = 0) const {
    return assemble(t, window_start, nullptr);
  }

  // Full pair at time t; nu is the impulse covariance of the whole train,
  // windows read the trailing block.
  TransferPair pair(double t, const NoiseCovariance& nu,
                    int window_start = 0) const {
    if (nu.size() != solver_.count())
      throw ConfigError("noise covariance size must match the train");
    Eigen::Matrix2d noise;
    const Eigen::Matrix2d t_mat = assemble(t, window_start, &noise, &nu);
    return TransferPair(t_mat, noise);
  }

  // G_{f_zeta^{(k)}}(t) for every k in the window (k = window_start+1 .. N).
  Eigen::VectorXd impulse_values(double t, int window_start = 0) const {
    Eigen::MatrixXd h = impulse_block(t, window_start);
    return h.col(0);
  }

private:
  double window_origin(double t, int window_start) const {
    if (window_start < 0 || window_start > solver_.count())
      throw ConfigError("window start node out of range");
    if (!(t >= 0.0)) throw ConfigError("time must be nonnegative");
    const double origin =
        window_start >= 1 ? train().node(window_start) : 0.0;
    if (t < origin - 1e-12 * std::max(1.0, origin))
      throw ConfigError("time must lie at or beyond the window start");
    return origin;
  }

  // Base function on the window clock; impulses stay on the absolute clock
  // and are gated with the same rounding slack as the solver rows.
  double base_value(const BaseFunction& f, double t, double origin) const {
    const double w = omega();
    switch (f.kind()) {
      case BaseFunction::Kind::Q:
        return std::cos(w * (t - origin));
      case BaseFunction::Kind::P:
        return std::sin(w * (t - origin)) / w;
      default:
        break;
    }
    const double tk = impulse_time(f, origin);
    if (t + 1e-12 * std::max(1.0, std::abs(t)) < tk) return 0.0;
    return std::sin(w * (t - tk)) / w;
  }

  double base_slope(const BaseFunction& f, double t, double origin) const {
    const double w = omega();
    switch (f.kind()) {
      case BaseFunction::Kind::Q:
        return -w * std::sin(w * (t - origin));
      case BaseFunction::Kind::P:
        return std::cos(w * (t - origin));
      default:
        break;
    }
    const double tk = impulse_time(f, origin);
    if (t + 1e-12 * std::max(1.0, std::abs(t)) < tk) return 0.0;
    return std::cos(w * (t - tk));
  }

  double impulse_time(const BaseFunction& f, double origin) const {
    const int k = f.node();
    if (k > solver_.count())
      throw ConfigError("impulse node index out of range");
    const double tk = train().node(k);
    if (tk <= origin && origin > 0.0)
      throw ConfigError("impulse node must lie inside the window");
    return tk;
  }

  // Shared assembly: two transposed solves against the row and its slope
  // give z, z_dot with G_f = f(t) + sum_i z_i f(t_i) for every f at once.
  Eigen::Matrix2d assemble(double t, int window_start,
                           Eigen::Matrix2d* noise,
                           const NoiseCovariance* nu = nullptr) const {
    const double origin = window_origin(t, window_start);
    const int s = std::max(window_start, 1);
    const int n = solver_.count();
    const double w = omega();

    const auto [z, zd] = dual_rows(t, window_start);

    complex q{std::cos(w * (t - origin)), 0.0};
    complex p{std::sin(w * (t - origin)) / w, 0.0};
    complex qd{-w * std::sin(w * (t - origin)), 0.0};
    complex pd{std::cos(w * (t - origin)), 0.0};
    for (int i = s; i <= n; ++i) {
      const double phase = w * (train().node(i) - origin);
      const complex fq{std::cos(phase), 0.0};
      const complex fp{std::sin(phase) / w, 0.0};
      q += z[i - s] * fq;
      p += z[i - s] * fp;
      qd += zd[i - s] * fq;
      pd += zd[i - s] * fp;
    }
    Eigen::Matrix2d t_mat;
    t_mat << q.real(), p.real(), qd.real(), pd.real();

    if (noise != nullptr) {
      const int first = window_start + 1;
      const int nk = n - window_start;
      const Eigen::MatrixXd h = impulse_block(t, window_start);
      const Eigen::MatrixXd blk =
          nu->nu().block(first - 1, first - 1, nk, nk);
      Eigen::Matrix2d raw = h.transpose() * blk * h;
      *noise = 0.5 * (raw + raw.transpose());
    }
    return t_mat;
  }

  std::pair<std::vector<complex>, std::vector<complex>> dual_rows(
      double t, int window_start) const {
    const int s = std::max(window_start, 1);
    const std::vector<complex> row = solver_.k_row(t);
    const std::vector<complex> row_dot = solver_.k_row_dot(t);
    const std::vector<complex> rw(row.begin() + (s - 1), row.end());
    const std::vector<complex> rwd(row_dot.begin() + (s - 1), row_dot.end());
    return {solver_.upper_solve(rw, window_start),
            solver_.upper_solve(rwd, window_start)};
  }

  // Rows k = window_start+1 .. N of (G_{f_zeta^{(k)}}, Gdot_{f_zeta^{(k)}}).
  Eigen::MatrixXd impulse_block(double t, int window_start) const {
    window_origin(t, window_start);  // validates; impulses stay absolute
    const int s = std::max(window_start, 1);
    const int n = solver_.count();
    const double w = omega();
    const auto [z, zd] = dual_rows(t, window_start);

    Eigen::MatrixXd h(n - window_start, 2);
    for (int k = window_start + 1; k <= n; ++k) {
      const double tk = train().node(k);
      complex val{0.0, 0.0}, slope{0.0, 0.0};
      if (t + 1e-12 * std::max(1.0, std::abs(t)) >= tk) {
        val = complex{std::sin(w * (t - tk)) / w, 0.0};
        slope = complex{std::cos(w * (t - tk)), 0.0};
      }
      for (int i = k + 1; i <= n; ++i) {
        const complex f{std::sin(w * (train().node(i) - tk)) / w, 0.0};
        val += z[i - s] * f;
        slope += zd[i - s] * f;
      }
      h(k - 1 - window_start, 0) = val.real();
      h(k - 1 - window_start, 1) = slope.real();
    }
    return h;
  }

  MemorySolver solver_;
};

// G_f(t) = f(t) + sum_{l,i} K_{t,t_l} [resolvent]_{li} f(t_i).
inline double G_functional(const BaseFunction& f, double t,
                           const DeltaTrain& train, const KernelSpec& kernel,
                           double omega) {
  return OscillatorSolver(train, kernel, omega).functional(f, t);
}

// Analytic time derivative of G_f.
inline double G_functional_dot(const BaseFunction& f, double t,
                               const DeltaTrain& train,
                               const KernelSpec& kernel, double omega) {
  return OscillatorSolver(train, kernel, omega).functional_dot(f, t);
}

// The single response function G_{f_P}; at node times its value and slope
// carry the whole homogeneous solution, and its shifts G(t_l - t_k) the
// impulse responses.
inline double script_G(double t, const DeltaTrain& train,
                       const KernelSpec& kernel, double omega) {
  return G_functional(BaseFunction::p(), t, train, kernel, omega);
}

inline double script_G_dot(double t, const DeltaTrain& train,
                           const KernelSpec& kernel, double omega) {
  return G_functional_dot(BaseFunction::p(), t, train, kernel, omega);
}

// Initial second moments <Q^2>, <P^2>, and <{Q, P}>/2.
struct SecondMoments {
  double qq;
  double pp;
  double qp;
};

inline SecondMoments initial_second_moments(const OscillatorParams& params) {
  const Eigen::Matrix2d& v = params.covariance();
  const Eigen::Vector2d& r = params.mean();
  return {0.5 * v(0, 0) + r(0) * r(0), 0.5 * v(1, 1) + r(1) * r(1),
          0.5 * v(0, 1) + r(0) * r(1)};
}

// Symmetrized two-time position correlator <{Q(t), Q(t')}>/2: the five-term
// sum over G_{f_Q}, G_{f_P}, G_{f_zeta} products with the initial second
// moments and the anticommutator noise matrix (each input enters through its
// symmetrized part, so the output is the symmetrized correlator).
inline double two_time_QQ(double t, double tp, const DeltaTrain& train,
                          const KernelSpec& kernel,
                          const OscillatorParams& params,
                          const NoiseCovariance& nu,
                          const SecondMoments& moments) {
  if (nu.size() != train.count())
    throw ConfigError("noise covariance size must match the train");
  const OscillatorSolver sol(train, kernel, params.omega());
  const double qt = sol.functional(BaseFunction::q(), t);
  const double pt = sol.functional(BaseFunction::p(), t);
  const double qtp = sol.functional(BaseFunction::q(), tp);
  const double ptp = sol.functional(BaseFunction::p(), tp);
  const Eigen::VectorXd gt = sol.impulse_values(t);
  const Eigen::VectorXd gtp = sol.impulse_values(tp);
  double acc = qt * qtp * moments.qq + pt * ptp * moments.pp +
               (qt * ptp + pt * qtp) * moments.qp;
  acc += 0.5 * gt.dot(nu.nu() * gtp);
  return acc;
}

// Operator-ordered correlator <Q(t) Q(t')>; the commutator parts come from
// [Q(0), P(0)] = i and <[zeta_k, zeta_k']> = i delta^2 chi_k chi_k'
// Gamma(t_k - t_k').  Unused by the covariance flow, kept for completeness.
inline complex two_time_QQ_ordered(double t, double tp,
                                   const DeltaTrain& train,
                                   const KernelSpec& kernel,
                                   const OscillatorParams& params,
                                   const NoiseCovariance& nu,
                                   const SecondMoments& moments) {
  if (nu.size() != train.count())
    throw ConfigError("noise covariance size must match the train");
  const OscillatorSolver sol(train, kernel, params.omega());
  const double qt = sol.functional(BaseFunction::q(), t);
  const double pt = sol.functional(BaseFunction::p(), t);
  const double qtp = sol.functional(BaseFunction::q(), tp);
  const double ptp = sol.functional(BaseFunction::p(), tp);
  const Eigen::VectorXd gt = sol.impulse_values(t);
  const Eigen::VectorXd gtp = sol.impulse_values(tp);

  const int n = train.count();
  const double d2 = train.spacing() * train.spacing();
  double comm = 0.0;
  for (int k = 1; k <= n; ++k)
    for (int l = 1; l <= n; ++l)
      comm += gt(k - 1) * gtp(l - 1) * d2 * train.amplitude(k) *
              train.amplitude(l) *
              kernel.gamma(train.node(k), train.node(l)).real();

  const double sym = qt * qtp * moments.qq + pt * ptp * moments.pp +
                     (qt * ptp + pt * qtp) * moments.qp +
                     0.5 * gt.dot(nu.nu() * gtp);
  const double anti = 0.5 * (qt * ptp - pt * qtp) + 0.5 * comm;
  return complex{sym, anti};
}

// Covariance transfer pair at time t: T from the rotation functionals and
// their slopes, N from the impulse-response double sum against nu.
inline TransferPair transfer_matrices(double t, const DeltaTrain& train,
                                      const KernelSpec& kernel, double omega,
                                      const NoiseCovariance& nu) {
  return OscillatorSolver(train, kernel, omega).pair(t, nu);
}

// <Q^2(t)> under the pair, in the factor-2 covariance convention.
inline double mean_square_position(const TransferPair& pair,
                                   const OscillatorParams& params) {
  const Eigen::Matrix2d v = pair.evolve_covariance(params.covariance());
  const Eigen::Vector2d r = pair.evolve_mean(params.mean());
  return 0.5 * v(0, 0) + r(0) * r(0);
}

// Deviation from the composition laws T_t = T_{t,s} T_s and
// N_t = T_{t,s} N_s T_{t,s}^T + N_{t,s}, max-abs entrywise.
struct MarkovResiduals {
  double transfer_residual;
  double noise_residual;
};

// The interval pair T_{t,s}, N_{t,s} lives on the sub-train after the node
// at s, so s must sit on the node grid (s = 0 degenerates to the laws being
// identities).  The transfer law is noise independent; the noise law holds
// for nearest-neighbor dynamics when impulses at distinct nodes are
// uncorrelated, and its residual otherwise reports the bath's cross-interval
// correlations.
inline MarkovResiduals markov_check(double t, double s,
                                    const DeltaTrain& train,
                                    const KernelSpec& kernel, double omega,
                                    const NoiseCovariance& nu) {
  if (!(s >= 0.0)) throw ConfigError("split time must be nonnegative");
  if (!(t > s)) throw ConfigError("time must lie beyond the split");
  const double delta = train.spacing();
  const int a = static_cast<int>(std::lround(s / delta));
  if (a > train.count() ||
      std::abs(s - a * delta) > 1e-9 * std::max(delta, s))
    throw ConfigError("split time must lie on the node grid");

  const OscillatorSolver sol(train, kernel, omega);
  const TransferPair full = sol.pair(t, nu);
  const TransferPair head = sol.pair(s, nu);
  const TransferPair tail = sol.pair(t, nu, a);

  const Eigen::Matrix2d t_gap =
      full.transfer_matrix() -
      tail.transfer_matrix() * head.transfer_matrix();
  const Eigen::Matrix2d n_gap =
      full.noise_matrix() -
      tail.transfer_matrix() * head.noise_matrix() *
          tail.transfer_matrix().transpose() -
      tail.noise_matrix();
  return {t_gap.cwiseAbs().maxCoeff(), n_gap.cwiseAbs().maxCoeff()};
}

// Transfer pair of the nearest-neighbor dynamics as a closed product of 2x2
// matrices: free rotations F(tau) around single-arc corrections
// P_j = X_j g(t_{j+1}) v_j^T with X_j = -delta^2 Sigma(t_{j+1}, t_j),
// g(tau) = (-sin(w tau)/w, cos(w tau)) and v_j = (cos(w t_j), sin(w t_j)/w).
// No N x N solve is involved.  Factors are ordered with the later arc on the
// left; the chain acting on the impulse at node k starts at arc k (arcs
// before k cannot carry it, and arc k itself adds nothing since
// v_k^T g(t_k) = 0).  window_start = a >= 1 builds the interval pair on the
// sub-train after node a, on the clock starting at t_a.
inline TransferPair markov_restricted_transfer(double t,
                                               const DeltaTrain& train,
                                               const KernelSpec& kernel,
                                               double omega,
                                               const NoiseCovariance& nu,
                                               int window_start = 0) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw ConfigError("oscillator frequency must be positive and finite");
  if (nu.size() != train.count())
    throw ConfigError("noise covariance size must match the train");
  const int n = train.count();
  if (window_start < 0 || window_start > n)
    throw ConfigError("window start node out of range");
  if (!(t >= 0.0)) throw ConfigError("time must be nonnegative");
  const double origin =
      window_start >= 1 ? train.node(window_start) : 0.0;
  if (t < origin - 1e-12 * std::max(1.0, origin))
    throw ConfigError("time must lie at or beyond the window start");

  const double w = omega;
  const double delta = train.spacing();
  const auto g = [w](double tau) {
    return Eigen::Vector2d(-std::sin(w * tau) / w, std::cos(w * tau));
  };
  const auto rot = [w](double tau) {
    Eigen::Matrix2d f;
    f << std::cos(w * tau), std::sin(w * tau) / w, -w * std::sin(w * tau),
        std::cos(w * tau);
    return f;
  };

  // Nodes not later than t, same rounding slack as the solver rows.
  const double slack = 1e-12 * std::max(1.0, std::abs(t));
  int m = 0;
  while (m < n && train.node(m + 1) <= t + slack) ++m;

  const int first_arc = std::max(window_start, 1);
  const int first_noise = window_start + 1;
  const int rows = std::max(0, m - window_start);

  Eigen::Matrix2d chain = Eigen::Matrix2d::Identity();
  Eigen::MatrixXd h(rows, 2);
  for (int k = m; k >= first_noise; --k) {
    const Eigen::Vector2d hk = chain * g(train.node(k) - origin);
    h(k - first_noise, 0) = hk(0);
    h(k - first_noise, 1) = hk(1);
    const int j = k - 1;  // arc t_j -> t_{j+1} joins the chain next
    if (j >= first_arc) {
      const double xj =
          -delta * delta * kernel.sigma(train, j + 1, j).real();
      const Eigen::Vector2d vj(std::cos(w * (train.node(j) - origin)),
                               std::sin(w * (train.node(j) - origin)) / w);
      chain += (chain * g(train.node(j + 1) - origin) * xj) * vj.transpose();
    }
  }

  const Eigen::Matrix2d f_t = rot(t - origin);
  const Eigen::Matrix2d t_mat = f_t * chain;
  Eigen::Matrix2d noise = Eigen::Matrix2d::Zero();
  if (rows > 0) {
    const Eigen::MatrixXd blk =
        nu.nu().block(first_noise - 1, first_noise - 1, rows, rows);
    const Eigen::Matrix2d core = h.transpose() * blk * h;
    const Eigen::Matrix2d raw = f_t * core * f_t.transpose();
    noise = 0.5 * (raw + raw.transpose());
  }
  return TransferPair(t_mat, noise);
}

}  // namespace deltatrain
