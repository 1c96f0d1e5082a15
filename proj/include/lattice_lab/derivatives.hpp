#pragma once

#include <cmath>
#include <stdexcept>

#include "lattice_lab/lattice.hpp"
#include "lattice_lab/potential.hpp"
#include "lattice_lab/sums.hpp"

// Derivatives of the lattice energy E(x, y) = sum f(Q(m, n; x, y, area)) with
// Q = area*((m + x*n)^2/y + y*n^2).  Each operator is an absolutely
// convergent lattice sum whose summand is the derivative of f(Q) by the chain
// rule; the envelopes passed to certified_sum bound the polynomial prefactors
// through the pointwise inequalities (alpha = m + x*n, u = Q):
//   |n*alpha|      <= u / (2*area)          (AM-GM on the two parts of Q)
//   alpha^2        <= u * y / area
//   n^2            <= u / (area * y)
//   |n^2 - alpha^2/y^2| <= u / (area * y).

namespace lattice_lab {

struct Gradient2 {
  double dx = 0.0, dy = 0.0;            // partial derivatives of the energy
  double dx_bound = 0.0, dy_bound = 0.0;  // certified truncation-error bounds
  double scale = 0.0;                     // max sum of |term|: rounding scale
};

struct Hessian2 {
  double dxx = 0.0, dyy = 0.0, dxy = 0.0;
  double err_bound = 0.0;  // max certified truncation error over the entries
  double scale = 0.0;      // max sum of |term| over the entries
};

// d/dx of the energy alone (the sign test over wide grids needs only this).
template <class P>
SumResult grad_x_energy(const P& pot, const LatticePoint2D& p, double tol) {
  const double A = p.area, y = p.y;
  const Majorant env = Majorant(pot.decay(1)).times_power(1).scaled(1.0 / y);
  const double c = 2.0 * A / y;
  return certified_sum(p, env, tol, [&pot, c](long, long n, double alpha,
                                              double Q) {
    return c * static_cast<double>(n) * alpha * pot.df(Q);
  });
}

template <class P>
SumResult grad_y_energy(const P& pot, const LatticePoint2D& p, double tol) {
  const double A = p.area, y = p.y;
  const Majorant env = Majorant(pot.decay(1)).times_power(1).scaled(1.0 / y);
  const double c = -A / (y * y);
  return certified_sum(p, env, tol,
                       [&pot, c, y](long, long n, double alpha, double Q) {
                         const double nn = static_cast<double>(n);
                         return c * (alpha * alpha - y * y * nn * nn) *
                                pot.df(Q);
                       });
}

template <class P>
Gradient2 grad_energy(const P& pot, const LatticePoint2D& p, double tol) {
  const SumResult gx = grad_x_energy(pot, p, tol);
  const SumResult gy = grad_y_energy(pot, p, tol);
  Gradient2 g;
  g.dx = gx.value;
  g.dy = gy.value;
  g.dx_bound = gx.tail_bound;
  g.dy_bound = gy.tail_bound;
  g.scale = std::max(gx.abs_sum, gy.abs_sum);
  return g;
}

template <class P>
Hessian2 hessian_energy(const P& pot, const LatticePoint2D& p, double tol) {
  const double A = p.area, y = p.y;
  const Majorant c1(pot.decay(1));
  const Majorant c2(pot.decay(2));

  const Majorant env_diag = c1.times_power(1).scaled(2.0 / (y * y)).joined(
      c2.times_power(2).scaled(1.0 / (y * y)));
  const Majorant env_mix = c1.times_power(1).scaled(1.0 / (y * y)).joined(
      c2.times_power(2).scaled(1.0 / (y * y)));

  const SumResult rxx = certified_sum(
      p, env_diag, tol, [&pot, A, y](long, long n, double alpha, double Q) {
        const double nn = static_cast<double>(n);
        return (2.0 * A / y) * nn * nn * pot.df(Q) +
               (4.0 * A * A / (y * y)) * nn * nn * alpha * alpha * pot.d2f(Q);
      });
  const SumResult ryy = certified_sum(
      p, env_diag, tol, [&pot, A, y](long, long n, double alpha, double Q) {
        const double nn = static_cast<double>(n);
        const double t = nn * nn - alpha * alpha / (y * y);
        return (2.0 * A / (y * y * y)) * alpha * alpha * pot.df(Q) +
               A * A * t * t * pot.d2f(Q);
      });
  const SumResult rxy = certified_sum(
      p, env_mix, tol, [&pot, A, y](long, long n, double alpha, double Q) {
        const double nn = static_cast<double>(n);
        const double t = nn * nn - alpha * alpha / (y * y);
        return (2.0 * A * A / y) * nn * alpha * t * pot.d2f(Q) -
               (2.0 * A / (y * y)) * nn * alpha * pot.df(Q);
      });

  Hessian2 h;
  h.dxx = rxx.value;
  h.dyy = ryy.value;
  h.dxy = rxy.value;
  h.err_bound = std::max({rxx.tail_bound, ryy.tail_bound, rxy.tail_bound});
  h.scale = std::max({rxx.abs_sum, ryy.abs_sum, rxy.abs_sum});
  return h;
}

struct CurvatureValue {
  double value = 0.0;
  double err_bound = 0.0;
};

// At the square lattice (0, 1, A) the Hessian is diagonal with
//   dxx = 2*A*K1(A),  K1 = sum n^2 f'(Q) + 2*A* sum m^2 n^2 f''(Q),
//   dyy =   A*K2(A),  K2 = 2*sum m^2 f'(Q) + A*sum (n^2 - m^2)^2 f''(Q),
// where Q = A*(m^2 + n^2).
struct SquareCurvature {
  CurvatureValue k1, k2;
};

template <class P>
SquareCurvature square_hessian_diagonal(const P& pot, double area, double tol) {
  const LatticePoint2D p = square_point(area);
  const double A = area;
  const Majorant c1(pot.decay(1));
  const Majorant c2(pot.decay(2));

  const Majorant env1 = c1.times_power(1).scaled(1.0 / A).joined(
      c2.times_power(2).scaled(0.5 / A));
  const SumResult r1 = certified_sum(
      p, env1, tol, [&pot, A](long m, long n, double, double Q) {
        const double mm = static_cast<double>(m), nn = static_cast<double>(n);
        return nn * nn * pot.df(Q) + 2.0 * A * mm * mm * nn * nn * pot.d2f(Q);
      });

  const Majorant env2 = c1.times_power(1).scaled(2.0 / A).joined(
      c2.times_power(2).scaled(1.0 / A));
  const SumResult r2 = certified_sum(
      p, env2, tol, [&pot, A](long m, long n, double, double Q) {
        const double mm = static_cast<double>(m), nn = static_cast<double>(n);
        const double t = nn * nn - mm * mm;
        return 2.0 * mm * mm * pot.df(Q) + A * t * t * pot.d2f(Q);
      });

  return SquareCurvature{{r1.value, r1.tail_bound}, {r2.value, r2.tail_bound}};
}

// At the triangular lattice (1/2, sqrt(3)/2, A) the Hessian is a multiple of
// the identity: dxx = dyy = T(A), dxy = 0, with
//   T = (4*A/sqrt(3)) * sum n^2 f'(Q) + (4*A^2/3) * sum n^4 f''(Q).
template <class P>
CurvatureValue triangular_hessian_entry(const P& pot, double area, double tol) {
  const LatticePoint2D p = triangular_point(area);
  const double A = area;
  const Majorant env = Majorant(pot.decay(1))
                           .times_power(1)
                           .scaled(8.0 / 3.0)
                           .joined(Majorant(pot.decay(2))
                                       .times_power(2)
                                       .scaled(16.0 / 9.0));
  const double c1 = 4.0 * A / std::sqrt(3.0);
  const double c2 = 4.0 * A * A / 3.0;
  const SumResult r = certified_sum(
      p, env, tol, [&pot, c1, c2](long, long n, double, double Q) {
        const double n2 = static_cast<double>(n) * static_cast<double>(n);
        return c1 * n2 * pot.df(Q) + c2 * n2 * n2 * pot.d2f(Q);
      });
  return CurvatureValue{r.value, r.tail_bound};
}

enum class Verdict { LocalMin, Saddle, LocalMax, Degenerate };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::LocalMin:   return "LocalMin";
    case Verdict::Saddle:     return "Saddle";
    case Verdict::LocalMax:   return "LocalMax";
    default:                  return "Degenerate";
  }
}

struct StabilityReport {
  LatticePoint2D point;
  Hessian2 hessian;                   // dxy = 0 exactly at the special points
  Verdict verdict = Verdict::Degenerate;
  double eig_lo = 0.0, eig_hi = 0.0;  // Hessian eigenvalues, sorted
  double margin = 0.0;                // min |eigenvalue|
  double scale = 0.0;                 // |dxx| + |dyy| + |dxy|
  bool is_critical = false;
  double grad_norm = 0.0;
};

namespace detail {

inline Verdict verdict_from_eigs(double lo, double hi, double scale) {
  if (std::min(std::fabs(lo), std::fabs(hi)) < 1e-9 * scale)
    return Verdict::Degenerate;
  if (lo > 0.0) return Verdict::LocalMin;
  if (hi < 0.0) return Verdict::LocalMax;
  return Verdict::Saddle;
}

}  // namespace detail

// Stability of the square lattice of a given area as a critical point of the
// energy (it is one for every area, by symmetry).
template <class P>
StabilityReport classify_square(const P& pot, double area, double tol) {
  const SquareCurvature c = square_hessian_diagonal(pot, area, tol);
  const double dxx = 2.0 * area * c.k1.value;
  const double dyy = area * c.k2.value;
  StabilityReport r;
  r.point = square_point(area);
  r.hessian = Hessian2{dxx, dyy, 0.0,
                       std::max(2.0 * area * c.k1.err_bound,
                                area * c.k2.err_bound),
                       std::fabs(dxx) + std::fabs(dyy)};
  r.eig_lo = std::min(dxx, dyy);
  r.eig_hi = std::max(dxx, dyy);
  r.scale = std::fabs(dxx) + std::fabs(dyy);
  r.margin = std::min(std::fabs(dxx), std::fabs(dyy));
  r.verdict = detail::verdict_from_eigs(r.eig_lo, r.eig_hi, r.scale);
  r.is_critical = true;
  r.grad_norm = 0.0;
  return r;
}

template <class P>
StabilityReport classify_triangular(const P& pot, double area, double tol) {
  const CurvatureValue t = triangular_hessian_entry(pot, area, tol);
  StabilityReport r;
  r.point = triangular_point(area);
  r.hessian = Hessian2{t.value, t.value, 0.0, t.err_bound,
                       2.0 * std::fabs(t.value)};
  r.eig_lo = r.eig_hi = t.value;
  r.scale = 2.0 * std::fabs(t.value);
  r.margin = std::fabs(t.value);
  r.verdict = detail::verdict_from_eigs(r.eig_lo, r.eig_hi, r.scale);
  r.is_critical = true;
  r.grad_norm = 0.0;
  return r;
}

// Dispatcher over the two special lattices.
template <class P>
StabilityReport classify_point(const P& pot, LatticeShape which, double area,
                               double tol) {
  if (which == LatticeShape::Square) return classify_square(pot, area, tol);
  if (which == LatticeShape::Triangular)
    return classify_triangular(pot, area, tol);
  throw std::invalid_argument(
      "classify_point handles the square and triangular lattices only");
}

// Stability report at an arbitrary lattice: gradient plus full Hessian.
template <class P>
StabilityReport classify_lattice(const P& pot, const LatticePoint2D& p,
                                 double tol) {
  const Gradient2 g = grad_energy(pot, p, tol);
  const Hessian2 h = hessian_energy(pot, p, tol);
  const double tr = h.dxx + h.dyy;
  const double det = h.dxx * h.dyy - h.dxy * h.dxy;
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  StabilityReport r;
  r.point = p;
  r.hessian = h;
  r.eig_lo = 0.5 * (tr - disc);
  r.eig_hi = 0.5 * (tr + disc);
  r.scale = std::fabs(h.dxx) + std::fabs(h.dyy) + std::fabs(h.dxy);
  r.margin = std::min(std::fabs(r.eig_lo), std::fabs(r.eig_hi));
  r.verdict = detail::verdict_from_eigs(r.eig_lo, r.eig_hi, r.scale);
  r.grad_norm = std::hypot(g.dx, g.dy);
  r.is_critical = r.grad_norm <= 1e-7 * (1.0 + g.scale);
  return r;
}

// Certified residual bounds for sum identities that hold exactly on the unit
// triangular lattice by hexagonal symmetry.  Sums run over the lattice with
// x = 1/2, y = sqrt(3)/2, area = sqrt(3)/2, for which the squared vector
// length is exactly q = (m + n/2)^2 + (3/4)*n^2.  The first two residuals
// combine the paired terms inside a single pass, so cancellation happens
// termwise; the third cancels over complete hexagonal orbits, all of which
// share one q and are enumerated together.  Certified truncation bounds are
// added on top of the accumulated values.
struct TriangularIdentityResiduals {
  double cross = 0.0;    // | sum m*n/q^s     + (1/2) sum n^2/q^s |
  double cubic = 0.0;    // | sum n^3*m/q^s   + (1/2) sum n^4/q^s |
  double quartic = 0.0;  // | sum m^2*n^2/q^s - (1/2) sum n^4/q^s |
};

// Residuals of the three identities above with F(q) = q^(-s); requires s > 3,
// since the quartic-weighted summands only decay like q^(2-s).
inline TriangularIdentityResiduals check_latsum_identities(double s,
                                                           double tol) {
  if (!(s > 3.0))
    throw std::invalid_argument("identity residuals require s > 3");
  const double root3_2 = std::sqrt(3.0) / 2.0;
  const LatticePoint2D p{0.5, root3_2, root3_2};

  const SumResult cross = certified_sum(
      p, Majorant::power_law(1.0 / std::sqrt(3.0), s - 1.0), tol,
      [s](long, long n, double alpha, double q) {
        // m*n + n^2/2 = n*(m + n/2) = n*alpha
        return static_cast<double>(n) * alpha * std::pow(q, -s);
      });
  const SumResult cubic = certified_sum(
      p, Majorant::power_law(std::pow(4.0 / 3.0, 1.5), s - 2.0), tol,
      [s](long, long n, double alpha, double q) {
        const double nn = static_cast<double>(n);
        return nn * nn * nn * alpha * std::pow(q, -s);
      });
  const SumResult quartic = certified_sum(
      p, Majorant::power_law(32.0 / 9.0, s - 2.0), tol,
      [s](long m, long n, double, double q) {
        const double mm = static_cast<double>(m), nn = static_cast<double>(n);
        return nn * nn * (mm * mm - 0.5 * nn * nn) * std::pow(q, -s);
      });

  TriangularIdentityResiduals r;
  r.cross = std::fabs(cross.value) + cross.tail_bound;
  r.cubic = std::fabs(cubic.value) + cubic.tail_bound;
  r.quartic = std::fabs(quartic.value) + quartic.tail_bound;
  return r;
}

// Certified residual of the moment identity
//   sum m^2/q^(s+1) = sum m^4/q^(s+2)
// on the same unit-edge triangular lattice (both sides equal the same
// hexagonally averaged sum); requires s > 1.
inline double moment_identity_residual(double s, double tol) {
  if (!(s > 1.0))
    throw std::invalid_argument("moment identity requires s > 1");
  const double root3_2 = std::sqrt(3.0) / 2.0;
  const LatticePoint2D p{0.5, root3_2, root3_2};
  const SumResult m2 = certified_sum(
      p, Majorant::power_law(8.0 / 3.0, s), tol,
      [s](long m, long, double, double q) {
        const double mm = static_cast<double>(m);
        return mm * mm * std::pow(q, -(s + 1.0));
      });
  const SumResult m4 = certified_sum(
      p, Majorant::power_law(64.0 / 9.0, s), tol,
      [s](long m, long, double, double q) {
        const double mm = static_cast<double>(m);
        return mm * mm * mm * mm * std::pow(q, -(s + 2.0));
      });
  return std::fabs(m2.value - m4.value) + m2.tail_bound + m4.tail_bound;
}

}  // namespace lattice_lab
