#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lattice_lab {

// One envelope piece: coeff * u^(-power) * exp(-rate*u), declared valid for
// u >= from.  A Majorant is a finite sum of such pieces that dominates the
// absolute value of a summand as a function of u = |lattice vector|^2.
struct MajorantAtom {
  double coeff = 0.0;
  double power = 0.0;
  double rate  = 0.0;
  double from  = 0.0;
};

class Majorant {
 public:
  Majorant() = default;

  explicit Majorant(std::vector<MajorantAtom> atoms) : atoms_(std::move(atoms)) {
    for (const MajorantAtom& a : atoms_) {
      if (!(a.coeff >= 0.0) || !std::isfinite(a.coeff))
        throw std::invalid_argument("majorant coefficient must be finite and >= 0");
      if (!std::isfinite(a.power) || !(a.rate >= 0.0) || !std::isfinite(a.rate))
        throw std::invalid_argument("majorant exponents must be finite, rate >= 0");
      if (a.rate == 0.0 && a.power < 0.0)
        throw std::invalid_argument("pure power-law majorant must be nonincreasing");
    }
  }

  static Majorant power_law(double coeff, double power) {
    return Majorant({MajorantAtom{coeff, power, 0.0, 0.0}});
  }

  static Majorant exp_law(double coeff, double rate) {
    return Majorant({MajorantAtom{coeff, 0.0, rate, 0.0}});
  }

  bool empty() const { return atoms_.empty(); }
  const std::vector<MajorantAtom>& atoms() const { return atoms_; }

  Majorant scaled(double c) const {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw std::invalid_argument("majorant scale must be finite and >= 0");
    std::vector<MajorantAtom> out = atoms_;
    for (MajorantAtom& a : out) a.coeff *= c;
    return Majorant(std::move(out));
  }

  // Envelope multiplied by u^j (used when a summand carries a polynomial
  // prefactor bounded by a power of u).
  Majorant times_power(double j) const {
    std::vector<MajorantAtom> out = atoms_;
    for (MajorantAtom& a : out) a.power -= j;
    return Majorant(std::move(out));
  }

  Majorant joined(const Majorant& other) const {
    std::vector<MajorantAtom> out = atoms_;
    out.insert(out.end(), other.atoms_.begin(), other.atoms_.end());
    return Majorant(std::move(out));
  }

  // Smallest u0 from which every piece is valid and nonincreasing.
  double valid_from() const {
    double u0 = 0.0;
    for (const MajorantAtom& a : atoms_) {
      u0 = std::max(u0, a.from);
      if (a.rate > 0.0 && a.power < 0.0) u0 = std::max(u0, -a.power / a.rate);
    }
    return u0;
  }

  bool integrable() const {
    for (const MajorantAtom& a : atoms_)
      if (a.coeff > 0.0 && a.rate == 0.0 && a.power <= 1.0) return false;
    return !atoms_.empty();
  }

  // Upper bound for the integral of the envelope over [u0, infinity).
  double tail_integral(double u0) const {
    const double inf = std::numeric_limits<double>::infinity();
    if (!(u0 > 0.0) || u0 < valid_from()) return inf;
    double total = 0.0;
    for (const MajorantAtom& a : atoms_) {
      if (a.coeff == 0.0) continue;
      if (a.rate == 0.0) {
        if (a.power <= 1.0) return inf;
        total += a.coeff * std::pow(u0, 1.0 - a.power) / (a.power - 1.0);
      } else {
        // With k = ceil(max(-power, 0)):  u^(-power) <= u^k * u0^(-power-k)
        // for u >= u0, and  int_{u0}^inf u^k e^(-r u) du
        //   = (k!/r^(k+1)) e^(-r u0) sum_{j<=k} (r u0)^j / j!.
        const int k = a.power < 0.0 ? static_cast<int>(std::ceil(-a.power)) : 0;
        const double r = a.rate;
        double series = 1.0, term = 1.0, fact = 1.0;
        for (int j = 1; j <= k; ++j) {
          term *= r * u0 / j;
          series += term;
          fact *= j;
        }
        const double integral =
            fact * std::pow(r, -(k + 1)) * std::exp(-r * u0) * series;
        total += a.coeff * std::pow(u0, -(a.power + k)) * integral;
      }
    }
    return total;
  }

 private:
  std::vector<MajorantAtom> atoms_;
};

// Parameters of the two-term inverse-power potential
//   V(r) = a2 / r^t2 - a1 / r^t1,   applied to r = |p|^2,
// so the pair interaction, as a function of u = |p|^2, is
//   f(u) = a2 * u^(-t2) - a1 * u^(-t1).
struct LJParams {
  double a1 = 2.0;
  double a2 = 1.0;
  double t1 = 3.0;
  double t2 = 6.0;
};

inline LJParams classical_lj() { return LJParams{2.0, 1.0, 3.0, 6.0}; }

inline void validate(const LJParams& p) {
  if (!std::isfinite(p.a1) || !std::isfinite(p.a2) || !std::isfinite(p.t1) ||
      !std::isfinite(p.t2))
    throw std::invalid_argument("potential parameters must be finite");
  if (!(p.a1 >= 0.0)) throw std::invalid_argument("potential requires a1 >= 0");
  if (!(p.a2 > 0.0)) throw std::invalid_argument("potential requires a2 > 0");
  if (!(1.0 < p.t1 && p.t1 < p.t2))
    throw std::invalid_argument("potential requires 1 < t1 < t2");
}

// A pair interaction f of the squared distance, with two derivatives and,
// for each derivative order k, a Majorant dominating |f^(k)| and the decay
// exponent used to check convergence of the lattice sums that use it.
class Potential {
 public:
  using Fn = std::function<double(double)>;

  Potential(std::string name, Fn f, Fn df, Fn d2f,
            std::array<double, 3> decay_exponents,
            std::array<Majorant, 3> decay_majorants)
      : name_(std::move(name)),
        f_(std::move(f)),
        df_(std::move(df)),
        d2f_(std::move(d2f)),
        exps_(decay_exponents),
        majorants_(std::move(decay_majorants)) {
    if (!f_ || !df_ || !d2f_)
      throw std::invalid_argument("potential needs f, f', f''");
    for (double e : exps_)
      if (!(e > 1.0))
        throw std::invalid_argument(
            "potential decay exponents must exceed 1 for summability");
  }

  const std::string& name() const { return name_; }
  double f(double u) const { return f_(u); }
  double df(double u) const { return df_(u); }
  double d2f(double u) const { return d2f_(u); }

  // Majorant of |f^(k)|, k in {0, 1, 2}.
  const Majorant& decay(int k) const { return majorants_.at(static_cast<size_t>(k)); }
  const std::array<double, 3>& decay_exponents() const { return exps_; }

  // f(u) = u^(-s), s > 1.
  static Potential inverse_power(double s) {
    if (!(s > 1.0) || !std::isfinite(s))
      throw std::invalid_argument("inverse power requires s > 1");
    auto f = [s](double u) { return std::pow(u, -s); };
    auto df = [s](double u) { return -s * std::pow(u, -s - 1.0); };
    auto d2f = [s](double u) { return s * (s + 1.0) * std::pow(u, -s - 2.0); };
    std::array<Majorant, 3> maj = {
        Majorant::power_law(1.0, s), Majorant::power_law(s, s + 1.0),
        Majorant::power_law(s * (s + 1.0), s + 2.0)};
    return Potential("inverse_power", f, df, d2f, {s, s + 1.0, s + 2.0},
                     std::move(maj));
  }

  // f(u) = exp(-alpha*u), alpha > 0.
  static Potential exponential(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha))
      throw std::invalid_argument("exponential requires alpha > 0");
    const double inf = std::numeric_limits<double>::infinity();
    auto f = [alpha](double u) { return std::exp(-alpha * u); };
    auto df = [alpha](double u) { return -alpha * std::exp(-alpha * u); };
    auto d2f = [alpha](double u) {
      return alpha * alpha * std::exp(-alpha * u);
    };
    std::array<Majorant, 3> maj = {Majorant::exp_law(1.0, alpha),
                                   Majorant::exp_law(alpha, alpha),
                                   Majorant::exp_law(alpha * alpha, alpha)};
    return Potential("exponential", f, df, d2f, {inf, inf, inf},
                     std::move(maj));
  }

  // f(u) = a2 * u^(-t2) - a1 * u^(-t1).
  static Potential lennard_jones(const LJParams& p) {
    validate(p);
    const double a1 = p.a1, a2 = p.a2, t1 = p.t1, t2 = p.t2;
    auto f = [=](double u) {
      return a2 * std::pow(u, -t2) - a1 * std::pow(u, -t1);
    };
    auto df = [=](double u) {
      return -a2 * t2 * std::pow(u, -t2 - 1.0) +
             a1 * t1 * std::pow(u, -t1 - 1.0);
    };
    auto d2f = [=](double u) {
      return a2 * t2 * (t2 + 1.0) * std::pow(u, -t2 - 2.0) -
             a1 * t1 * (t1 + 1.0) * std::pow(u, -t1 - 2.0);
    };
    std::array<Majorant, 3> maj = {
        Majorant::power_law(a2, t2).joined(Majorant::power_law(a1, t1)),
        Majorant::power_law(a2 * t2, t2 + 1.0)
            .joined(Majorant::power_law(a1 * t1, t1 + 1.0)),
        Majorant::power_law(a2 * t2 * (t2 + 1.0), t2 + 2.0)
            .joined(Majorant::power_law(a1 * t1 * (t1 + 1.0), t1 + 2.0))};
    // The slowest-decaying piece sets the convergence exponent; with a1 = 0
    // the potential is purely repulsive and decays like u^(-t2).
    const double e0 = a1 > 0.0 ? t1 : t2;
    return Potential("lennard_jones", f, df, d2f, {e0, e0 + 1.0, e0 + 2.0},
                     std::move(maj));
  }

 private:
  std::string name_;
  Fn f_, df_, d2f_;
  std::array<double, 3> exps_;
  std::array<Majorant, 3> majorants_;
};

}  // namespace lattice_lab
