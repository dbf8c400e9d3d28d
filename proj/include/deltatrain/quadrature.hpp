#pragma once

// Adaptive panel integration on finite intervals, Gauss-Kronrod 7/15.
// Panels are bisected worst-first until the summed error estimate meets an
// absolute target.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "deltatrain/errors.hpp"

namespace deltatrain::quad {

namespace detail {

// Kronrod-15 abscissae on [0, 1] side of the panel and the matching
// Kronrod / Gauss-7 weights (Gauss weight 0 on Kronrod-only points).
struct NodeRow {
  double x, wg, wk;
};

inline constexpr NodeRow g7k15[8] = {
    {0.000000000000000000000000000000000, 0.417959183673469387755102040816327,
     0.209482141084727828012999174891714},
    {0.405845151377397166906606412076961, 0.381830050505118944950369775488975,
     0.190350578064785409913256402421014},
    {0.741531185599394439863864773280788, 0.279705391489276667901467771423780,
     0.140653259715525918745189590510238},
    {0.949107912342758524526189684047851, 0.129484966168869693270611432679082,
     0.063092092629978553290700663189204},
    {0.207784955007898467600689403773245, 0.0,
     0.204432940075298892414161999234649},
    {0.586087235467691130294144838258730, 0.0,
     0.169004726639267902826583426598550},
    {0.864864423359769072789712788640926, 0.0,
     0.104790010322250183839998060075660},
    {0.991455371120812639206854697526329, 0.0,
     0.022935322010529224963732008058970},
};

template <class F>
std::pair<double, double> panel_g7k15(F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  const double y0 = f(mid);
  double g7 = g7k15[0].wg * y0;
  double k15 = g7k15[0].wk * y0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * g7k15[i].x;
    const double yi = f(mid + dx) + f(mid - dx);
    g7 += g7k15[i].wg * yi;
    k15 += g7k15[i].wk * yi;
  }
  g7 *= half;
  k15 *= half;
  // |K15 - G7| bounds the Gauss error and overstates the Kronrod error,
  // which keeps the refinement conservative.
  return {k15, std::abs(k15 - g7)};
}

struct Segment {
  double a, b, value, error;
};

}  // namespace detail

// Integrate f over [a, b] to the absolute target abs_tol.  Throws
// AccuracyError (carrying the achieved estimate) if the panel budget is
// exhausted first, EvaluationError if the integrand goes non-finite.
template <class F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10,
                 std::size_t max_panels = 4096) {
  if (a == b) return 0.0;
  double flip = 1.0;
  if (b < a) {
    std::swap(a, b);
    flip = -1.0;
  }

  std::vector<detail::Segment> segs;
  segs.reserve(64);
  auto push = [&](double lo, double hi) {
    auto [v, e] = detail::panel_g7k15(f, lo, hi);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand non-finite on [" << lo << ", " << hi << "]";
      throw EvaluationError(msg.str());
    }
    segs.push_back({lo, hi, v, e});
  };
  push(a, b);

  auto totals = [&] {
    double v = 0.0, e = 0.0;
    for (const auto& s : segs) {
      v += s.value;
      e += s.error;
    }
    return std::pair{v, e};
  };

  while (true) {
    auto [value, error] = totals();
    if (error <= abs_tol) return flip * value;
    if (segs.size() >= max_panels) {
      std::ostringstream msg;
      msg << "quadrature stalled at error estimate " << error << " (target "
          << abs_tol << ", " << segs.size() << " panels); value " << value;
      throw AccuracyError(msg.str(), error);
    }
    auto worst = std::max_element(
        segs.begin(), segs.end(),
        [](const auto& l, const auto& r) { return l.error < r.error; });
    const detail::Segment s = *worst;
    segs.erase(worst);
    const double mid = 0.5 * (s.a + s.b);
    push(s.a, mid);
    push(mid, s.b);
  }
}

}  // namespace deltatrain::quad
