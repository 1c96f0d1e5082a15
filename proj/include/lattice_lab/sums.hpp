#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "lattice_lab/lattice.hpp"
#include "lattice_lab/potential.hpp"

namespace lattice_lab {

inline constexpr double kPi = 3.14159265358979323846;

// Thrown when a sum cannot be evaluated to the requested tolerance within the
// configured work budget, or when no convergent tail bound exists.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Result of a truncated lattice sum together with its certificate: the
// discarded tail is bounded by tail_bound, so value is within tail_bound of
// the full sum (up to floating-point rounding of the accumulated terms).
struct SumResult {
  double value = 0.0;
  double abs_sum = 0.0;            // sum of |term|, a scale for rounding error
  double truncation_radius = 0.0;  // all |p| <= radius were accumulated
  double tail_bound = 0.0;
  std::int64_t terms = 0;
};

// Compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = v - comp;
    const double u = sum + t;
    comp = (u - sum) - t;
    sum = u;
  }
};

// b^k for integer k >= 0.
inline double powi(double b, long k) {
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= b;
    b *= b;
    k >>= 1;
  }
  return r;
}

namespace detail {

// Farthest distance from a lattice point to the corners of its centred
// primitive cell: half the sum of the generator lengths.
inline double cell_reach(const LatticePoint2D& p) {
  const double ulen = std::sqrt(p.area / p.y);
  const double vlen = std::sqrt(p.area * (p.x * p.x + p.y * p.y) / p.y);
  return 0.5 * (ulen + vlen);
}

// Bound for sum of envelope(|p|^2) over lattice points with |p| > R.  Each
// omitted point owns a centred primitive cell of area `area` lying in
// { |q| >= R - d }, and envelope(|p|^2) <= envelope((|q| - d)^2) there, so the
// sum is at most (1/area) * int_{|q| >= R-d} env((|q|-d)^2) dq, which radial
// integration turns into the expression below.  Requires R > 2d.
inline double tail_bound_at(double R, double d, double area,
                            const Majorant& env) {
  const double s = R - 2.0 * d;
  if (s <= 0.0) return std::numeric_limits<double>::infinity();
  return (kPi / area) * (1.0 + d / s) * env.tail_integral(s * s);
}

}  // namespace detail

// Evaluate sum over (m, n) != (0, 0) of term(m, n, alpha, Q), where
// alpha = m + x*n and Q = area*(alpha^2/y + y*n^2) is the squared length of
// the lattice vector.  `envelope` must satisfy |term| <= envelope(Q) wherever
// Q >= envelope.valid_from().  The truncation radius is chosen so the
// certified tail bound is below tol; terms inside the radius are accumulated
// with compensated summation in a fixed deterministic order.
template <class Term>
SumResult certified_sum(const LatticePoint2D& p, const Majorant& envelope,
                        double tol, Term&& term,
                        std::int64_t max_terms = 800000000) {
  validate_lattice(p);
  if (!(tol > 0.0) || !std::isfinite(tol))
    throw std::invalid_argument("sum tolerance must be positive and finite");
  if (envelope.empty() || !envelope.integrable())
    throw ConvergenceError(
        "summand envelope is not integrable: no finite tail bound exists");

  const double d = detail::cell_reach(p);
  const double base = 2.0 * d + std::sqrt(envelope.valid_from()) + 1.0;

  double hi = base;
  int doublings = 0;
  while (detail::tail_bound_at(hi, d, p.area, envelope) > tol) {
    hi *= 2.0;
    if (++doublings > 200 || hi > 1e12)
      throw ConvergenceError("no truncation radius reaches the tolerance");
  }
  double lo = doublings > 0 ? hi / 2.0 : 0.0;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 2.0 * d) {
      lo = mid;
      continue;
    }
    if (detail::tail_bound_at(mid, d, p.area, envelope) <= tol)
      hi = mid;
    else
      lo = mid;
  }
  const double R = hi;

  const double estimated =
      kPi * R * R / p.area + 4.0 * R / std::sqrt(p.area) + 64.0;
  if (estimated > static_cast<double>(max_terms))
    throw ConvergenceError(
        "tolerance needs about " + std::to_string(estimated) +
        " terms, above the budget of " + std::to_string(max_terms));

  const double R2 = R * R;
  const double ay = p.area * p.y;    // coefficient of n^2 in Q
  const double aoy = p.area / p.y;   // coefficient of alpha^2 in Q
  const long nmax = static_cast<long>(std::floor(R / std::sqrt(ay)));

  Kahan acc;
  double abs_acc = 0.0;
  std::int64_t count = 0;
  for (long n = -nmax; n <= nmax; ++n) {
    const double cn = ay * static_cast<double>(n) * static_cast<double>(n);
    const double rem = R2 - cn;
    if (rem < 0.0) continue;
    const double w = std::sqrt(rem / aoy);
    const double center = -p.x * static_cast<double>(n);
    const long mlo = static_cast<long>(std::ceil(center - w));
    const long mhi = static_cast<long>(std::floor(center + w));
    for (long m = mlo; m <= mhi; ++m) {
      if (m == 0 && n == 0) continue;
      const double alpha = static_cast<double>(m) + p.x * static_cast<double>(n);
      const double Q = aoy * alpha * alpha + cn;
      const double v = term(m, n, alpha, Q);
      acc.add(v);
      abs_acc += std::fabs(v);
      ++count;
    }
    if (count > max_terms)
      throw ConvergenceError("term budget exceeded during accumulation");
  }

  SumResult out;
  out.value = acc.sum;
  out.abs_sum = abs_acc;
  out.truncation_radius = R;
  out.tail_bound = detail::tail_bound_at(R, d, p.area, envelope);
  out.terms = count;
  return out;
}

namespace detail {

// Inline evaluator for the two-term inverse-power interaction, with fast
// integer-exponent paths; used by the hot loops instead of std::function.
struct LJPot {
  double a1, a2, t1, t2;
  long k1 = 0, k2 = 0;
  bool integral = false;

  explicit LJPot(const LJParams& p)
      : a1(p.a1), a2(p.a2), t1(p.t1), t2(p.t2) {
    validate(p);
    k1 = std::lround(t1);
    k2 = std::lround(t2);
    integral = std::fabs(t1 - static_cast<double>(k1)) < 1e-12 &&
               std::fabs(t2 - static_cast<double>(k2)) < 1e-12;
  }

  double f(double u) const {
    if (integral) {
      const double iu = 1.0 / u;
      return a2 * powi(iu, k2) - a1 * powi(iu, k1);
    }
    return a2 * std::pow(u, -t2) - a1 * std::pow(u, -t1);
  }
  double df(double u) const {
    if (integral) {
      const double iu = 1.0 / u;
      return -a2 * t2 * powi(iu, k2 + 1) + a1 * t1 * powi(iu, k1 + 1);
    }
    return -a2 * t2 * std::pow(u, -t2 - 1.0) + a1 * t1 * std::pow(u, -t1 - 1.0);
  }
  double d2f(double u) const {
    if (integral) {
      const double iu = 1.0 / u;
      return a2 * t2 * (t2 + 1.0) * powi(iu, k2 + 2) -
             a1 * t1 * (t1 + 1.0) * powi(iu, k1 + 2);
    }
    return a2 * t2 * (t2 + 1.0) * std::pow(u, -t2 - 2.0) -
           a1 * t1 * (t1 + 1.0) * std::pow(u, -t1 - 2.0);
  }

  Majorant decay(int k) const {
    switch (k) {
      case 0:
        return Majorant::power_law(a2, t2).joined(Majorant::power_law(a1, t1));
      case 1:
        return Majorant::power_law(a2 * t2, t2 + 1.0)
            .joined(Majorant::power_law(a1 * t1, t1 + 1.0));
      default:
        return Majorant::power_law(a2 * t2 * (t2 + 1.0), t2 + 2.0)
            .joined(Majorant::power_law(a1 * t1 * (t1 + 1.0), t1 + 2.0));
    }
  }
};

}  // namespace detail

// Sum of pot.f over the nonzero lattice vectors.
inline SumResult lattice_sum(const Potential& pot, const LatticePoint2D& p,
                             double tol) {
  return certified_sum(p, pot.decay(0), tol,
                       [&pot](long, long, double, double Q) { return pot.f(Q); });
}

// Epstein zeta: sum of |p|^(-s) over nonzero lattice vectors; requires s > 2.
inline SumResult epstein_zeta(const LatticePoint2D& p, double s, double tol) {
  if (!(s > 2.0))
    throw std::invalid_argument("epstein_zeta requires s > 2 in dimension 2");
  const double half = 0.5 * s;
  const long k = std::lround(half);
  const Majorant env = Majorant::power_law(1.0, half);
  if (std::fabs(half - static_cast<double>(k)) < 1e-12 && k >= 2)
    return certified_sum(p, env, tol, [k](long, long, double, double Q) {
      return powi(1.0 / Q, k);
    });
  return certified_sum(p, env, tol, [half](long, long, double, double Q) {
    return std::pow(Q, -half);
  });
}

// Theta function: sum of exp(-pi*alpha*|p|^2) over ALL lattice vectors,
// including the origin; requires alpha > 0.
inline SumResult theta_function(const LatticePoint2D& p, double alpha,
                                double tol) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("theta_function requires alpha > 0");
  const double rate = kPi * alpha;
  SumResult r = certified_sum(
      p, Majorant::exp_law(1.0, rate), tol,
      [rate](long, long, double, double Q) { return std::exp(-rate * Q); });
  r.value += 1.0;
  r.abs_sum += 1.0;
  r.terms += 1;
  return r;
}

// Interaction energy of the two-term inverse-power potential on the lattice.
inline SumResult lj_energy(const LJParams& prm, const LatticePoint2D& p,
                           double tol) {
  const detail::LJPot pot(prm);
  return certified_sum(p, pot.decay(0), tol,
                       [&pot](long, long, double, double Q) { return pot.f(Q); });
}

}  // namespace lattice_lab
