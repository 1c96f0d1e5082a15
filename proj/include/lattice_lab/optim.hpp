#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>

namespace lattice_lab {

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  int evals = 0;
};

// Golden-section minimization on [a, b]; assumes a single interior minimum in
// the bracket (callers establish one with a scan first).  Stops when the
// bracket width drops below xtol.
template <class F>
GoldenResult golden_min(F&& f, double a, double b, double xtol,
                        int max_iter = 200) {
  if (!(a < b)) throw std::invalid_argument("golden_min needs a < b");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  GoldenResult r;
  if (f1 <= f2) {
    r.x = x1;
    r.value = f1;
  } else {
    r.x = x2;
    r.value = f2;
  }
  r.evals = evals;
  return r;
}

// One parabolic refinement through (c-h, c, c+h); returns the vertex clamped
// to [c-h, c+h], or c when the stencil is not convex.
template <class F>
double parabolic_refine(F&& f, double c, double h) {
  const double fm = f(c - h), f0 = f(c), fp = f(c + h);
  const double denom = fm - 2.0 * f0 + fp;
  if (!(denom > 0.0)) return c;
  double step = 0.5 * h * (fm - fp) / denom;
  step = std::clamp(step, -h, h);
  return c + step;
}

struct SimplexResult {
  double x = 0.0, y = 0.0;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Deterministic Nelder-Mead on two variables with standard coefficients
// (reflect 1, expand 2, contract 1/2, shrink 1/2).  Converges when the
// simplex diameter falls below diam_tol.
template <class F>
SimplexResult nelder_mead_2d(F&& f, double x0, double y0, double hx, double hy,
                             double diam_tol, int max_iter = 600) {
  struct Vertex {
    double x, y, v;
  };
  std::array<Vertex, 3> s = {Vertex{x0, y0, f(x0, y0)},
                             Vertex{x0 + hx, y0, f(x0 + hx, y0)},
                             Vertex{x0, y0 + hy, f(x0, y0 + hy)}};
  auto order = [&s]() {
    std::stable_sort(s.begin(), s.end(),
                     [](const Vertex& a, const Vertex& b) { return a.v < b.v; });
  };
  auto diameter = [&s]() {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j)
        d = std::max(d, std::hypot(s[i].x - s[j].x, s[i].y - s[j].y));
    return d;
  };

  order();
  int it = 0;
  for (; it < max_iter; ++it) {
    if (diameter() < diam_tol) break;
    const double cx = 0.5 * (s[0].x + s[1].x);
    const double cy = 0.5 * (s[0].y + s[1].y);

    const double rx = cx + (cx - s[2].x), ry = cy + (cy - s[2].y);
    const double fr = f(rx, ry);
    if (fr < s[0].v) {
      const double ex = cx + 2.0 * (cx - s[2].x), ey = cy + 2.0 * (cy - s[2].y);
      const double fe = f(ex, ey);
      if (fe < fr)
        s[2] = {ex, ey, fe};
      else
        s[2] = {rx, ry, fr};
    } else if (fr < s[1].v) {
      s[2] = {rx, ry, fr};
    } else {
      const bool outside = fr < s[2].v;
      const double px = outside ? cx + 0.5 * (cx - s[2].x)
                                : cx - 0.5 * (cx - s[2].x);
      const double py = outside ? cy + 0.5 * (cy - s[2].y)
                                : cy - 0.5 * (cy - s[2].y);
      const double fp = f(px, py);
      if (fp < std::min(fr, s[2].v)) {
        s[2] = {px, py, fp};
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i].x = s[0].x + 0.5 * (s[i].x - s[0].x);
          s[i].y = s[0].y + 0.5 * (s[i].y - s[0].y);
          s[i].v = f(s[i].x, s[i].y);
        }
      }
    }
    order();
  }

  SimplexResult r;
  r.x = s[0].x;
  r.y = s[0].y;
  r.value = s[0].v;
  r.iterations = it;
  r.converged = diameter() < diam_tol;
  return r;
}

// Bisection for the sign change of a continuous function: requires
// f(lo) and f(hi) of opposite signs; returns the midpoint of the final
// bracket of width <= xtol.
template <class F>
double bisect_sign_change(F&& f, double lo, double hi, double xtol,
                          int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0))
    throw std::invalid_argument("bisect_sign_change needs a sign change");
  for (int i = 0; i < max_iter && (hi - lo) > xtol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
      fhi = fm;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace lattice_lab
