#pragma once

// Diagrammatic expansion of the memory series.  Every term in the resolvent
// chain K_{t,t_l} K_li ... f_i factorizes into forward arcs Sigma(t_e, t_s)
// joined by free lines G_0, ending in one line to the open time.  The engine
// enumerates those diagrams, weighs them, and certifies the weighted sum
// against the matrix solver.  It exists for verification at small N, not for
// production solving.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "deltatrain/solver.hpp"
#include "deltatrain/train.hpp"

namespace deltatrain {

// One memory arc: Sigma(t_target, t_source) with target > source.
struct Arc {
  int source = 0;
  int target = 0;

  friend bool operator==(const Arc& a, const Arc& b) {
    return a.source == b.source && a.target == b.target;
  }
};

enum class DiagramClass { Markovian, NonMarkovian };

// A chain of arcs s_1 -> e_1, s_2 -> e_2, ... with s_r < e_r <= s_{r+1}.
// The dashed free segment carries f at start_index = s_1; the last line runs
// from e_m to the open time t, or to an explicit terminal node.
class Diagram {
public:
  explicit Diagram(std::vector<Arc> arcs,
                   std::optional<int> terminal_node = {})
      : arcs_(std::move(arcs)), terminal_(terminal_node) {
    if (arcs_.empty()) throw ConfigError("diagram needs at least one arc");
    int prev_end = 0;
    for (const Arc& a : arcs_) {
      if (a.source < 1) throw ConfigError("arc source must be >= 1");
      if (a.target <= a.source)
        throw ConfigError("arcs must run strictly forward in time");
      if (a.source < prev_end)
        throw ConfigError("arcs must chain without overlap");
      prev_end = a.target;
    }
    if (terminal_ && *terminal_ < prev_end)
      throw ConfigError("terminal node precedes the last arc");
  }

  const std::vector<Arc>& arcs() const { return arcs_; }
  int start_index() const { return arcs_.front().source; }
  int last_node() const { return arcs_.back().target; }

  // Empty when the diagram ends at the open time.
  std::optional<int> terminal_node() const { return terminal_; }

private:
  std::vector<Arc> arcs_;
  std::optional<int> terminal_;
};

// Markovian diagrams consist solely of nearest-neighbor arcs.
inline DiagramClass classify(const Diagram& d) {
  for (const Arc& a : d.arcs())
    if (a.target != a.source + 1) return DiagramClass::NonMarkovian;
  return DiagramClass::Markovian;
}

namespace detail {

inline void extend_diagrams(int n, const std::optional<int>& max_span,
                            std::vector<Arc>& stack,
                            std::vector<Diagram>& out) {
  const int first = stack.empty() ? 1 : stack.back().target;
  for (int s = first; s < n; ++s) {
    const int top = max_span ? std::min(n, s + *max_span) : n;
    for (int e = s + 1; e <= top; ++e) {
      stack.push_back({s, e});
      out.push_back(Diagram(stack));
      extend_diagrams(n, max_span, stack, out);
      stack.pop_back();
    }
  }
}

}  // namespace detail

// All diagrams contributing to the memory part of the solution on an N-node
// train, in lexicographic arc order.  Optionally keeps only arcs spanning at
// most max_arc_span nodes, mirroring a restricted kernel.
inline std::vector<Diagram> enumerate_diagrams(
    int n, std::optional<int> max_arc_span = {}) {
  if (n < 1) throw ConfigError("node count must be >= 1");
  if (max_arc_span && *max_arc_span < 1)
    throw ConfigError("max_arc_span must be >= 1");
  std::vector<Diagram> out;
  std::vector<Arc> stack;
  detail::extend_diagrams(n, max_arc_span, stack, out);
  return out;
}

// Weight of one diagram: f at the start node, -delta^2 Sigma per arc, G_0 per
// connecting line, and the final line to the terminal (with its step factor
// when the terminal is the open time).
inline complex weight(const Diagram& d, double t, const DeltaTrain& train,
                      const KernelSpec& kernel, const FreePropagator& prop,
                      std::span<const complex> f_values) {
  const int n = train.count();
  if (d.last_node() > n || (d.terminal_node() && *d.terminal_node() > n))
    throw ConfigError("diagram references nodes beyond the train");
  if (static_cast<int>(f_values.size()) != n)
    throw ConfigError("need one f value per node");

  const double delta = train.spacing();
  complex w = f_values[d.start_index() - 1];
  int prev_end = 0;
  for (const Arc& a : d.arcs()) {
    if (prev_end != 0)
      w *= prop.green0(train.node(a.source) - train.node(prev_end));
    w *= -delta * delta * kernel.sigma(train, a.target, a.source);
    prev_end = a.target;
  }
  if (d.terminal_node())
    w *= prop.green0(train.node(*d.terminal_node()) - train.node(prev_end));
  else if (t + 1e-12 * std::max(1.0, std::abs(t)) >= train.node(prev_end))
    w *= prop.green0(t - train.node(prev_end));
  else
    return complex{0.0, 0.0};
  return w;
}

struct DiagramSum {
  complex diagram_sum;
  complex solver_value;
  double abs_difference;
};

// Brute-force certification: the weighted diagram sum plus the bare f_t must
// reproduce the matrix solver.  Refuses large trains; the diagram count grows
// combinatorially (28656 already at N = 12).
inline DiagramSum sum_check(double t, const DeltaTrain& train,
                            const KernelSpec& kernel,
                            const NoiseSequence& noise,
                            std::span<const complex> initials,
                            const FreePropagator& prop) {
  const int n = train.count();
  if (n > 12)
    throw ConfigError("diagram enumeration is limited to N <= 12 nodes");

  std::vector<complex> f(n);
  for (int i = 1; i <= n; ++i)
    f[i - 1] = prop.free_solution(train.node(i), initials) +
               xi_at(train.node(i), train, noise, prop);

  complex total{0.0, 0.0};
  for (const Diagram& d : enumerate_diagrams(n))
    total += weight(d, t, train, kernel, prop, f);
  total += prop.free_solution(t, initials) + xi_at(t, train, noise, prop);

  const complex direct = solve_at(t, initials, train, kernel, noise, prop);
  return {total, direct, std::abs(total - direct)};
}

}  // namespace deltatrain
