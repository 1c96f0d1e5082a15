#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lattice_lab/derivatives.hpp"
#include "lattice_lab/lattice.hpp"
#include "lattice_lab/optim.hpp"
#include "lattice_lab/potential.hpp"
#include "lattice_lab/sums.hpp"

namespace lattice_lab {

// The four structural lattice sums entering the stability thresholds, with
// q(m, n) = m^2 + m*n + n^2 on the triangular side and m^2 + n^2 on the
// square side:
//   S1(s) = sum m^4 / q^s          (triangular, s > 3)
//   S2(s) = sum m^2 / (m^2+n^2)^s  (square, s > 2)
//   S3(s) = sum m^2 n^2 / (m^2+n^2)^s        (square, s > 3)
//   S4(s) = sum (n^2 - m^2)^2 / (m^2+n^2)^s  (square, s > 3)
struct SSumTable {
  double s = 0.0;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  double err_bound = 0.0;  // max certified truncation error across the four
};

namespace detail {

// On (1/2, sqrt(3)/2, sqrt(3)/2) the engine's squared length is exactly
// q = (m + n/2)^2 + (3/4) n^2 = m^2 + m*n + n^2.
inline LatticePoint2D unit_edge_triangular() {
  const double r = std::sqrt(3.0) / 2.0;
  return LatticePoint2D{0.5, r, r};
}

}  // namespace detail

inline SumResult s1_sum(double s, double tol) {
  if (!(s > 3.0)) throw std::invalid_argument("S1 requires s > 3");
  return certified_sum(detail::unit_edge_triangular(),
                       Majorant::power_law(64.0 / 9.0, s - 2.0), tol,
                       [s](long m, long, double, double q) {
                         const double m2 =
                             static_cast<double>(m) * static_cast<double>(m);
                         return m2 * m2 * std::pow(q, -s);
                       });
}

inline SumResult s2_sum(double s, double tol) {
  if (!(s > 2.0)) throw std::invalid_argument("S2 requires s > 2");
  return certified_sum(square_point(1.0), Majorant::power_law(1.0, s - 1.0),
                       tol, [s](long m, long, double, double Q) {
                         const double mm = static_cast<double>(m);
                         return mm * mm * std::pow(Q, -s);
                       });
}

inline SumResult s3_sum(double s, double tol) {
  if (!(s > 3.0)) throw std::invalid_argument("S3 requires s > 3");
  return certified_sum(square_point(1.0), Majorant::power_law(0.25, s - 2.0),
                       tol, [s](long m, long n, double, double Q) {
                         const double mm = static_cast<double>(m);
                         const double nn = static_cast<double>(n);
                         return mm * mm * nn * nn * std::pow(Q, -s);
                       });
}

inline SumResult s4_sum(double s, double tol) {
  if (!(s > 3.0)) throw std::invalid_argument("S4 requires s > 3");
  return certified_sum(square_point(1.0), Majorant::power_law(1.0, s - 2.0),
                       tol, [s](long m, long n, double, double Q) {
                         const double t = static_cast<double>(n * n - m * m);
                         return t * t * std::pow(Q, -s);
                       });
}

inline SSumTable s_sums(double s, double tol) {
  if (!(s > 3.0)) throw std::invalid_argument("s_sums requires s > 3");
  const SumResult r1 = s1_sum(s, tol);
  const SumResult r2 = s2_sum(s, tol);
  const SumResult r3 = s3_sum(s, tol);
  const SumResult r4 = s4_sum(s, tol);
  SSumTable t;
  t.s = s;
  t.s1 = r1.value;
  t.s2 = r2.value;
  t.s3 = r3.value;
  t.s4 = r4.value;
  t.err_bound = std::max({r1.tail_bound, r2.tail_bound, r3.tail_bound,
                          r4.tail_bound});
  return t;
}

// g(s) = S2(s+1) - 2(s+1) S3(s+2) and k(s) = (s+1) S4(s+2) - 2 S2(s+1);
// both are positive for every s > 1, which makes the thresholds below
// well-defined.
inline std::pair<double, double> g_and_k(double s, double tol) {
  if (!(s > 1.0)) throw std::invalid_argument("g and k require s > 1");
  const double sub_tol = tol / (4.0 * (s + 2.0));
  const double v2 = s2_sum(s + 1.0, sub_tol).value;
  const double v3 = s3_sum(s + 2.0, sub_tol).value;
  const double v4 = s4_sum(s + 2.0, sub_tol).value;
  const double g = v2 - 2.0 * (s + 1.0) * v3;
  const double k = (s + 1.0) * v4 - 2.0 * v2;
  return {g, k};
}

// Area below which the triangular lattice is a local minimizer (and above
// which a local maximizer):
//   A0 = (sqrt(3)/2) * [a2 t2 (t2-1) S1(t2+2) / (a1 t1 (t1-1) S1(t1+2))]
//        ^ (1/(t2-t1)).
inline double threshold_A0(const LJParams& prm, double tol) {
  validate(prm);
  if (!(prm.a1 > 0.0))
    throw std::invalid_argument("threshold requires a1 > 0");
  const double num =
      prm.a2 * prm.t2 * (prm.t2 - 1.0) * s1_sum(prm.t2 + 2.0, tol).value;
  const double den =
      prm.a1 * prm.t1 * (prm.t1 - 1.0) * s1_sum(prm.t1 + 2.0, tol).value;
  return (std::sqrt(3.0) / 2.0) *
         std::pow(num / den, 1.0 / (prm.t2 - prm.t1));
}

// Window (A1, A2) on which the square lattice is a local minimizer:
//   A1 = [a2 t2 g(t2) / (a1 t1 g(t1))]^(1/(t2-t1)),
//   A2 = [a2 t2 k(t2) / (a1 t1 k(t1))]^(1/(t2-t1)).
inline std::pair<double, double> thresholds_A1_A2(const LJParams& prm,
                                                  double tol) {
  validate(prm);
  if (!(prm.a1 > 0.0))
    throw std::invalid_argument("threshold requires a1 > 0");
  const auto [g_lo, k_lo] = g_and_k(prm.t1, tol);
  const auto [g_hi, k_hi] = g_and_k(prm.t2, tol);
  if (!(g_lo > 0.0) || !(g_hi > 0.0) || !(k_lo > 0.0) || !(k_hi > 0.0))
    throw std::runtime_error("g or k evaluated non-positive");
  const double e = 1.0 / (prm.t2 - prm.t1);
  const double a1 =
      std::pow((prm.a2 * prm.t2 * g_hi) / (prm.a1 * prm.t1 * g_lo), e);
  const double a2 =
      std::pow((prm.a2 * prm.t2 * k_hi) / (prm.a1 * prm.t1 * k_lo), e);
  if (!(a1 < a2))
    throw std::runtime_error(
        "square stability window is empty for these parameters");
  return {a1, a2};
}

struct ABZResult {
  double value = 0.0;
  double x = 0.0, y = 0.0;  // location of the minimizing unit-area lattice
};

// Area threshold up to which the triangular lattice beats every other
// unit-density lattice:
//   A_BZ = inf over L != Lambda of
//          [a2 (zeta_L(2 t2) - zeta_Tri(2 t2)) /
//           (a1 (zeta_L(2 t1) - zeta_Tri(2 t1)))]^(1/(t2-t1)),
// both zeta differences being positive.  The ratio tends to a 0/0 form at the
// triangular point, so a small ball around it is excluded; it grows along
// degenerating directions, so the grid is capped at y = 4 and the cap row is
// verified to stay above the interior minimum.
inline ABZResult threshold_A_BZ(const LJParams& prm, double tol) {
  validate(prm);
  if (!(prm.a1 > 0.0))
    throw std::invalid_argument("threshold requires a1 > 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double s_lo = 2.0 * prm.t1, s_hi = 2.0 * prm.t2;
  const double power = 1.0 / (prm.t2 - prm.t1);
  const double xtri = 0.5, ytri = std::sqrt(3.0) / 2.0;
  const LatticePoint2D tri = triangular_point(1.0);
  const double zt_lo = epstein_zeta(tri, s_lo, 1e-12).value;
  const double zt_hi = epstein_zeta(tri, s_hi, 1e-12).value;

  auto ratio = [&](double x, double y, double ztol) -> double {
    if (!(y > 0.2) || !(y < 8.0) || std::fabs(x) > 1.2) return inf;
    const LatticePoint2D rp = reduce_to_domain(x, y, 1.0);
    if (std::hypot(rp.x - xtri, rp.y - ytri) < 1e-3) return inf;
    const double den =
        prm.a1 * (epstein_zeta(rp, s_lo, ztol).value - zt_lo);
    const double num =
        prm.a2 * (epstein_zeta(rp, s_hi, ztol).value - zt_hi);
    if (!(den > 0.0) || !(num > 0.0)) return inf;
    return std::pow(num / den, power);
  };

  struct Cell {
    double r, x, y;
    bool operator<(const Cell& o) const {
      if (r != o.r) return r < o.r;
      if (x != o.x) return x < o.x;
      return y < o.y;
    }
  };
  const int nx = 48, ny = 48;
  std::vector<Cell> cells;
  cells.reserve(static_cast<size_t>(nx) * ny);
  double cap_row_min = inf;
  for (int i = 0; i < nx; ++i) {
    const double x = 0.5 * i / (nx - 1);
    const double y_arc = std::sqrt(std::max(1.0 - x * x, 0.0));
    for (int j = 0; j < ny; ++j) {
      const double y = y_arc + (4.0 - y_arc) * j / (ny - 1);
      const double r = ratio(x, y, 1e-9);
      if (j == ny - 1) cap_row_min = std::min(cap_row_min, r);
      if (std::isfinite(r)) cells.push_back({r, x, y});
    }
  }
  if (cells.empty())
    throw ConvergenceError("ratio grid produced no finite values");
  std::sort(cells.begin(), cells.end());

  const double hx = 0.5 / (nx - 1) / 2.0;
  const double hy = (4.0 - 0.8) / (ny - 1) / 2.0;
  Cell best{inf, 0.0, 0.0};
  const int starts = std::min<size_t>(5, cells.size());
  bool polished = false;
  for (int i = 0; i < starts; ++i) {
    const SimplexResult sr = nelder_mead_2d(
        [&](double x, double y) { return ratio(x, y, 1e-11); }, cells[i].x,
        cells[i].y, hx, hy, 1e-9, 500);
    polished = polished || sr.converged;
    const Cell c{sr.value, sr.x, sr.y};
    if (c < best) best = c;
  }
  if (!polished)
    throw ConvergenceError("simplex polish did not converge for A_BZ");

  const LatticePoint2D rp = reduce_to_domain(best.x, best.y, 1.0);
  if (std::hypot(rp.x - xtri, rp.y - ytri) <= 1e-2)
    throw ConvergenceError(
        "A_BZ minimizer collapsed into the excluded triangular ball");
  const double refined = ratio(best.x, best.y, std::min(tol * 1e-2, 1e-12));
  if (!(cap_row_min > refined))
    throw ConvergenceError("A_BZ search cap y=4 is not above the minimum");
  ABZResult out;
  out.value = refined;
  out.x = rp.x;
  out.y = rp.y;
  return out;
}

struct ThresholdSet {
  LJParams params;
  double A0 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double A_BZ = 0.0;
  double abz_x = 0.0, abz_y = 0.0;
};

inline ThresholdSet compute_thresholds(const LJParams& prm, double tol) {
  ThresholdSet t;
  t.params = prm;
  t.A0 = threshold_A0(prm, tol);
  const auto [a1, a2] = thresholds_A1_A2(prm, tol);
  t.A1 = a1;
  t.A2 = a2;
  const ABZResult bz = threshold_A_BZ(prm, tol);
  t.A_BZ = bz.value;
  t.abz_x = bz.x;
  t.abz_y = bz.y;
  return t;
}

// Sufficient condition under which the triangular lattice at its optimal
// density is the global minimizer over all lattices and densities:
// pi^(-t2) Gamma(t2) t2 <= pi^(-t1) Gamma(t1) t1.  (False for the classical
// parameters.)
inline bool global_min_condition(const LJParams& prm) {
  validate(prm);
  const double lhs = std::pow(kPi, -prm.t2) * std::tgamma(prm.t2) * prm.t2;
  const double rhs = std::pow(kPi, -prm.t1) * std::tgamma(prm.t1) * prm.t1;
  return lhs <= rhs;
}

// Stability entries as scalar functions of the area, for sign bisection
// against the closed-form thresholds.
inline double square_k1(const LJParams& prm, double area, double tol) {
  return square_hessian_diagonal(detail::LJPot(prm), area, tol).k1.value;
}

inline double square_k2(const LJParams& prm, double area, double tol) {
  return square_hessian_diagonal(detail::LJPot(prm), area, tol).k2.value;
}

inline double triangular_t(const LJParams& prm, double area, double tol) {
  return triangular_hessian_entry(detail::LJPot(prm), area, tol).value;
}

}  // namespace lattice_lab
