#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lattice_lab/derivatives.hpp"
#include "lattice_lab/lattice.hpp"
#include "lattice_lab/optim.hpp"
#include "lattice_lab/potential.hpp"
#include "lattice_lab/sums.hpp"
#include "lattice_lab/thresholds.hpp"

namespace lattice_lab {

// Roots X1 <= X2 of R_A(X) = -2X^2 + 2 zeta(6) A^3 X + zeta(12) A^2 - 4 A^4,
// where the zetas are Epstein zetas of the unit square lattice.  For the
// classical potential, any rectangular minimizer's aspect ratio y satisfies
// X1^(1/3) <= y <= X2^(1/3) when the bounds are valid.
struct DegeneracyBounds {
  double area = 0.0;
  double x1 = 0.0, x2 = 0.0;
  double discriminant = 0.0;
  bool valid = false;  // discriminant > 0 and X1 >= 1
};

namespace detail {

struct SquareZetas {
  double z6, z12;
};

inline SquareZetas square_zetas(double tol) {
  static const SquareZetas cached{
      epstein_zeta(square_point(1.0), 6.0, 1e-13).value,
      epstein_zeta(square_point(1.0), 12.0, 1e-13).value};
  if (tol >= 1e-13) return cached;
  return SquareZetas{epstein_zeta(square_point(1.0), 6.0, tol).value,
                     epstein_zeta(square_point(1.0), 12.0, tol).value};
}

}  // namespace detail

inline DegeneracyBounds degeneracy_bounds(double area, double tol = 1e-12) {
  if (!(area > 0.0) || !std::isfinite(area))
    throw std::invalid_argument("degeneracy bounds require area > 0");
  const auto [z6, z12] = detail::square_zetas(tol);
  DegeneracyBounds b;
  b.area = area;
  const double a2 = area * area;
  const double a3 = a2 * area;
  b.discriminant =
      4.0 * z6 * z6 * a3 * a3 - 32.0 * a2 * a2 + 8.0 * z12 * a2;
  if (b.discriminant > 0.0) {
    const double root = std::sqrt(b.discriminant);
    b.x1 = (2.0 * z6 * a3 - root) / 4.0;
    b.x2 = (2.0 * z6 * a3 + root) / 4.0;
    b.valid = b.x1 >= 1.0;
  }
  return b;
}

namespace detail {

// The degeneracy polynomial encodes the classical strengths a = (2, 1); the
// X2-based cap applies exactly when the parameters are a positive multiple of
// the classical potential.
inline bool classical_shape(const LJParams& p) {
  return std::fabs(p.t1 - 3.0) < 1e-9 && std::fabs(p.t2 - 6.0) < 1e-9 &&
         std::fabs(p.a1 - 2.0 * p.a2) < 1e-9 * p.a2;
}

template <class P>
double energy_at(const P& pot, double x, double y, double area, double tol) {
  const LatticePoint2D p{x, y, area};
  const Majorant env(pot.decay(0));
  return certified_sum(p, env, tol, [&pot](long, long, double, double Q) {
           return pot.f(Q);
         })
      .value;
}

}  // namespace detail

inline double rect_search_cap(const LJParams& prm, double area) {
  if (detail::classical_shape(prm)) {
    const DegeneracyBounds b = degeneracy_bounds(area);
    if (b.valid) return std::cbrt(b.x2) + 1.0;
  }
  return 50.0;
}

struct RhombicResult {
  double theta_deg = 60.0;  // angle between the unit generators, in [60, 90]
  double x = 0.5, y = 0.0;  // (cos theta, sin theta)
  double energy = 0.0;
  bool at_triangular_endpoint = false;  // theta snapped to 60
  bool at_square_endpoint = false;      // theta snapped to 90
};

// Minimize the energy along the rhombic arc x^2 + y^2 = 1 of the modular
// domain, parametrized by the generator angle theta in [60, 90] degrees:
// 200-point scan, golden-section refinement to 1e-4 degrees, then one
// parabolic polish on tighter sums.
template <class P>
RhombicResult minimize_rhombic_pot(const P& pot, double area, double tol) {
  if (!(area > 0.0) || !std::isfinite(area))
    throw std::invalid_argument("minimize_rhombic requires area > 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  auto energy = [&](double theta_deg, double t) {
    const double r = theta_deg * kPi / 180.0;
    return detail::energy_at(pot, std::cos(r), std::sin(r), area, t);
  };

  const int n = 200;
  const double tol_scan = std::max(tol, 1e-8);
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double th = 60.0 + 30.0 * i / (n - 1);
    const double v = energy(th, tol_scan);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }

  const double lo = 60.0 + 30.0 * std::max(0, best - 2) / (n - 1);
  const double hi = 60.0 + 30.0 * std::min(n - 1, best + 2) / (n - 1);
  const double tol_ref = std::max(std::min(tol, 1e-10), 1e-12);
  double theta =
      golden_min([&](double th) { return energy(th, tol_ref); }, lo, hi, 1e-4)
          .x;

  const double snap = 5e-4;
  if (theta > 60.0 + snap && theta < 90.0 - snap) {
    const double h = 0.02;
    const double c = std::clamp(theta, 60.0 + h, 90.0 - h);
    const double tol_fin = std::min(tol, 1e-12);
    theta = parabolic_refine([&](double th) { return energy(th, tol_fin); },
                             c, h);
  }

  RhombicResult r;
  if (theta <= 60.0 + snap) {
    r.theta_deg = 60.0;
    r.at_triangular_endpoint = true;
  } else if (theta >= 90.0 - snap) {
    r.theta_deg = 90.0;
    r.at_square_endpoint = true;
  } else {
    r.theta_deg = theta;
  }
  const double rad = r.theta_deg * kPi / 180.0;
  r.x = std::cos(rad);
  r.y = std::sin(rad);
  r.energy = energy(r.theta_deg, std::min(tol, 1e-12));
  return r;
}

inline RhombicResult minimize_rhombic(const LJParams& prm, double area,
                                      double tol) {
  return minimize_rhombic_pot(detail::LJPot(prm), area, tol);
}

struct RectangularResult {
  double y = 1.0;  // aspect parameter of the rectangular lattice (0, y, A)
  double energy = 0.0;
  bool boundary_capped = false;
  double y_cap = 50.0;
};

// Minimize the energy along the rectangular ray x = 0, y in [1, y_cap]:
// geometric scan, golden-section refinement to 1e-6 in y, parabolic polish.
template <class P>
RectangularResult minimize_rectangular_pot(const P& pot, double area,
                                           double tol, double y_cap) {
  if (!(area > 0.0) || !std::isfinite(area))
    throw std::invalid_argument("minimize_rectangular requires area > 0");
  if (!(y_cap > 1.0)) throw std::invalid_argument("y_cap must exceed 1");
  auto energy = [&](double y, double t) {
    return detail::energy_at(pot, 0.0, y, area, t);
  };

  const int n = 320;
  const double tol_scan = std::max(tol, 1e-8);
  const double ratio = std::pow(y_cap, 1.0 / (n - 1));
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  double yi = 1.0;
  for (int i = 0; i < n; ++i, yi *= ratio) {
    const double v = energy(yi, tol_scan);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }

  const double lo = std::pow(y_cap, static_cast<double>(std::max(0, best - 2)) /
                                        (n - 1));
  const double hi = std::pow(
      y_cap, static_cast<double>(std::min(n - 1, best + 2)) / (n - 1));
  const double tol_ref = std::max(std::min(tol, 1e-10), 1e-12);
  double y = lo >= hi ? lo
                      : golden_min([&](double yy) { return energy(yy, tol_ref); },
                                   lo, hi, 1e-6)
                            .x;

  RectangularResult r;
  r.y_cap = y_cap;
  const double tol_fin = std::min(tol, 1e-12);
  if (y > 1.0 + 2e-6 && y < y_cap * (1.0 - 1e-6)) {
    const double h = std::max(1e-4, 1e-5 * y);
    const double c = std::clamp(y, 1.0 + h, y_cap - h);
    y = parabolic_refine([&](double yy) { return energy(yy, tol_fin); }, c, h);
  }
  if (y <= 1.0 + 2e-6) {
    r.y = 1.0;
  } else if (y >= y_cap * (1.0 - 1e-6)) {
    r.y = y_cap;
    r.boundary_capped = true;
  } else {
    r.y = y;
  }
  r.energy = energy(r.y, tol_fin);
  return r;
}

inline RectangularResult minimize_rectangular(const LJParams& prm, double area,
                                              double tol) {
  return minimize_rectangular_pot(detail::LJPot(prm), area, tol,
                                  rect_search_cap(prm, area));
}

enum class Certainty { GridPolished, BoundaryCapped };

inline const char* certainty_name(Certainty c) {
  return c == Certainty::BoundaryCapped ? "BoundaryCapped" : "GridPolished";
}

struct PhasePoint {
  double area = 0.0;
  LatticePoint2D minimizer;
  LatticeShape shape = LatticeShape::Generic;
  double theta_deg = std::numeric_limits<double>::quiet_NaN();  // Rhombic only
  double energy = 0.0;
  Certainty certainty = Certainty::GridPolished;
  bool gradient_ok = false;
  double grad_norm = 0.0;
};

// Global minimization over the half modular domain at fixed area: structured
// candidates (triangular, square, best rectangular, best rhombic) plus
// multi-start simplex descent seeded from a 60x60 grid.  The result snaps to
// the most symmetric candidate whose energy ties the best value found, with
// precedence Triangular > Square > Rectangular > Rhombic > Generic.
template <class P>
PhasePoint minimize_full_pot(const P& pot, double area, double tol,
                             double rect_cap) {
  if (!(area > 0.0) || !std::isfinite(area))
    throw std::invalid_argument("minimize_full requires area > 0");
  const double inf = std::numeric_limits<double>::infinity();
  const double tol_fin = std::min(tol, 1e-12);
  auto energy = [&](double x, double y, double t) {
    return detail::energy_at(pot, x, y, area, t);
  };

  // Structured candidates.
  const RhombicResult rh = minimize_rhombic_pot(pot, area, tol);
  const RectangularResult rc =
      minimize_rectangular_pot(pot, area, tol, rect_cap);
  const double y_tri = std::sqrt(3.0) / 2.0;

  struct Candidate {
    LatticeShape shape;
    double x, y, theta, energy;
  };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<Candidate> candidates;
  candidates.push_back(
      {LatticeShape::Triangular, 0.5, y_tri, nan, energy(0.5, y_tri, tol_fin)});
  candidates.push_back(
      {LatticeShape::Square, 0.0, 1.0, nan, energy(0.0, 1.0, tol_fin)});
  if (rc.y > 1.0)
    candidates.push_back(
        {LatticeShape::Rectangular, 0.0, rc.y, nan, rc.energy});
  if (!rh.at_triangular_endpoint && !rh.at_square_endpoint)
    candidates.push_back(
        {LatticeShape::Rhombic, rh.x, rh.y, rh.theta_deg, rh.energy});

  // Grid multi-start.
  const double y_lo = 0.85;
  const double y_hi = std::max(4.0, 1.5 * rc.y);
  const int gn = 60;
  struct Cell {
    double v, x, y;
    bool operator<(const Cell& o) const {
      if (v != o.v) return v < o.v;
      if (x != o.x) return x < o.x;
      return y < o.y;
    }
  };
  std::vector<Cell> cells;
  cells.reserve(gn * gn);
  const double tol_grid = std::max(tol, 1e-6);
  for (int i = 0; i < gn; ++i) {
    const double x = 0.5 * i / (gn - 1);
    for (int j = 0; j < gn; ++j) {
      const double y = y_lo * std::pow(y_hi / y_lo, static_cast<double>(j) /
                                                        (gn - 1));
      cells.push_back({energy(x, y, tol_grid), x, y});
    }
  }
  std::sort(cells.begin(), cells.end());

  const double tol_nm = std::max(tol, 1e-8);
  auto objective = [&](double x, double y) -> double {
    if (!(y > 0.3) || y > y_hi + 2.0 || x < -0.6 || x > 1.1) return inf;
    return energy(x, y, tol_nm);
  };
  const double hx = 0.5 / (gn - 1);
  Cell nm_best{inf, 0.5, y_tri};
  for (int i = 0; i < 5 && i < static_cast<int>(cells.size()); ++i) {
    const double hy = cells[i].y * (std::pow(y_hi / y_lo, 1.0 / (gn - 1)) - 1.0);
    const SimplexResult sr = nelder_mead_2d(objective, cells[i].x, cells[i].y,
                                            hx, std::max(hy, 1e-3), 1e-6, 400);
    const Cell c{sr.value, sr.x, sr.y};
    if (c < nm_best) nm_best = c;
  }

  double best_energy = std::min(nm_best.v, rh.energy);
  for (const Candidate& c : candidates) best_energy = std::min(best_energy, c.energy);

  // Refine the simplex point only when it strictly beats every structured
  // candidate; otherwise the snap below decides and extra polish is wasted.
  double nm_energy = nm_best.v;
  double nm_x = nm_best.x, nm_y = nm_best.y;
  {
    bool beats = std::isfinite(nm_energy);
    for (const Candidate& c : candidates)
      if (c.energy <= nm_energy + 1e-7) beats = false;
    if (beats) {
      const SimplexResult sr = nelder_mead_2d(
          [&](double x, double y) -> double {
            if (!(y > 0.3) || y > y_hi + 2.0 || x < -0.6 || x > 1.1) return inf;
            return energy(x, y, std::min(tol, 1e-10));
          },
          nm_x, nm_y, 1e-5, 1e-5, 1e-9, 200);
      nm_x = sr.x;
      nm_y = sr.y;
      nm_energy = energy(nm_x, nm_y, tol_fin);
      best_energy = std::min(best_energy, nm_energy);
    }
  }

  PhasePoint out;
  out.area = area;
  const double slack = 1e-10 * (1.0 + std::fabs(best_energy));
  const Candidate* chosen = nullptr;
  for (const Candidate& c : candidates) {
    if (c.energy <= best_energy + slack) {
      chosen = &c;
      break;  // candidates are already in precedence order
    }
  }
  if (chosen != nullptr) {
    out.minimizer = LatticePoint2D{chosen->x, chosen->y, area};
    out.shape = chosen->shape;
    out.theta_deg = chosen->theta;
    out.energy = chosen->energy;
  } else {
    const LatticePoint2D red = reduce_to_domain(nm_x, nm_y, area);
    out.minimizer = red;
    out.shape = classify_shape(red.x, red.y);
    if (out.shape == LatticeShape::Rhombic)
      out.theta_deg = rhombic_angle_deg(red.x, red.y);
    out.energy = nm_energy;
  }
  out.certainty = (out.shape == LatticeShape::Rectangular && rc.boundary_capped)
                      ? Certainty::BoundaryCapped
                      : Certainty::GridPolished;

  const Gradient2 g = grad_energy(pot, out.minimizer, std::min(tol, 1e-9));
  out.grad_norm = std::hypot(g.dx, g.dy);
  out.gradient_ok = out.grad_norm <= 1e-7 * (1.0 + g.scale) ||
                    out.certainty == Certainty::BoundaryCapped;
  return out;
}

inline PhasePoint minimize_full(const LJParams& prm, double area, double tol) {
  return minimize_full_pot(detail::LJPot(prm), area, tol,
                           rect_search_cap(prm, area));
}

// True when the minimizer at the given area (default 1) is the triangular
// point and its energy undercuts every other structured local minimum by
// more than tol.
template <class P>
bool verify_global_min_pot(const P& pot, double tol, double area,
                           double rect_cap) {
  const PhasePoint p = minimize_full_pot(pot, area, tol, rect_cap);
  if (p.shape != LatticeShape::Triangular) return false;
  const double e_tri = p.energy;
  const double tol_fin = std::min(tol, 1e-12);
  std::vector<double> rivals;
  rivals.push_back(detail::energy_at(pot, 0.0, 1.0, area, tol_fin));
  const RectangularResult rc = minimize_rectangular_pot(pot, area, tol, rect_cap);
  if (rc.y > 1.0) rivals.push_back(rc.energy);
  const RhombicResult rh = minimize_rhombic_pot(pot, area, tol);
  if (!rh.at_triangular_endpoint) rivals.push_back(rh.energy);
  for (double e : rivals)
    if (!(e_tri + tol < e)) return false;
  return true;
}

inline bool verify_global_min_at_unit_area(const LJParams& prm, double tol,
                                           double area = 1.0) {
  return verify_global_min_pot(detail::LJPot(prm), tol, area,
                               rect_search_cap(prm, area));
}

// Sign survey of dE/dx over a grid on the half modular domain with
// x in (0, 1/2] and y from the unit-circle arc up to y_cap (the rectangular
// search cap when y_cap is not given).  A sharp truncation ball leaves a
// genuine signed tail of the order of the certified bound, so a raw value
// near zero says nothing about the sign of the exact derivative; a point is
// counted as negative only when its value is certifiably below zero at the
// tightest tier, and `resolution` records the certification floor: every
// uncounted point has exact value > -resolution.
struct SignCheckReport {
  double area = 0.0;
  int grid_n = 0;
  double min_value = 0.0;  // most negative tight-tier value seen (diagnostic)
  double min_x = 0.0, min_y = 0.0;
  long points = 0;
  long negative_points = 0;  // certified sign violations
  bool nonnegative = false;
  double y_cap = 0.0;
  double resolution = 0.0;
};

inline SignCheckReport rankin_sign_check(double area, int grid_n,
                                         const LJParams& prm = classical_lj(),
                                         double y_cap = 0.0) {
  if (!(area > 0.0) || grid_n < 2)
    throw std::invalid_argument("sign check requires area > 0 and grid_n >= 2");
  const detail::LJPot pot(prm);
  SignCheckReport rep;
  rep.area = area;
  rep.grid_n = grid_n;
  rep.y_cap = y_cap > 1.0 ? y_cap : rect_search_cap(prm, area);
  rep.resolution = 2e-13;
  rep.min_value = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= grid_n; ++i) {
    const double x = 0.5 * i / grid_n;
    const double y_arc = std::sqrt(std::max(1.0 - x * x, 0.0));
    for (int j = 0; j < grid_n; ++j) {
      const double y =
          y_arc * std::pow(rep.y_cap / y_arc, static_cast<double>(j) /
                                                  (grid_n - 1));
      const LatticePoint2D p{x, y, area};
      ++rep.points;
      double v = grad_x_energy(pot, p, 1e-8).value;
      bool violation = v < -1e-7;
      if (std::fabs(v) <= 1e-7) {  // sign not settled at the coarse tier
        v = grad_x_energy(pot, p, 1e-11).value;
        if (v < -1e-10) {
          violation = true;
        } else if (v <= 1e-10) {  // still straddling zero: tightest tier
          v = grad_x_energy(pot, p, 1e-13).value;
          violation = v < -rep.resolution;
        }
      }
      if (violation) ++rep.negative_points;
      if (v < rep.min_value) {
        rep.min_value = v;
        rep.min_x = x;
        rep.min_y = y;
      }
    }
  }
  rep.nonnegative = rep.negative_points == 0;
  return rep;
}

struct SweepRow {
  double area = 0.0;
  bool ok = false;
  PhasePoint point;
  std::string error;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  std::vector<std::string> diagnostics;  // monotonicity/order observations
  long failures = 0;
};

inline SweepOutcome phase_sweep(const LJParams& prm,
                                const std::vector<double>& areas, double tol,
                                int jobs = 1) {
  if (areas.empty()) throw std::invalid_argument("phase_sweep needs areas");
  SweepOutcome out;
  out.rows.resize(areas.size());

  auto run_one = [&](size_t i) {
    SweepRow& row = out.rows[i];
    row.area = areas[i];
    try {
      row.point = minimize_full(prm, areas[i], tol);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
  };

  if (jobs <= 1) {
    for (size_t i = 0; i < areas.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (size_t i = next.fetch_add(1); i < areas.size();
           i = next.fetch_add(1))
        run_one(i);
    };
    std::vector<std::thread> pool;
    const int nw = std::min<int>(jobs, static_cast<int>(areas.size()));
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  for (const SweepRow& r : out.rows)
    if (!r.ok) ++out.failures;

  // Diagnostics: theta nondecreasing inside the rhombic band, y nondecreasing
  // inside the rectangular band, phases in the canonical order.
  auto rank = [](LatticeShape s) {
    switch (s) {
      case LatticeShape::Triangular:  return 0;
      case LatticeShape::Rhombic:     return 1;
      case LatticeShape::Square:      return 2;
      case LatticeShape::Rectangular: return 3;
      default:                        return 4;
    }
  };
  const SweepRow* prev = nullptr;
  for (const SweepRow& r : out.rows) {
    if (!r.ok) continue;
    if (prev != nullptr) {
      if (rank(r.point.shape) < rank(prev->point.shape))
        out.diagnostics.push_back(
            "phase order regression at A=" + std::to_string(r.area));
      if (r.point.shape == LatticeShape::Rhombic &&
          prev->point.shape == LatticeShape::Rhombic &&
          r.point.theta_deg < prev->point.theta_deg - 1e-3)
        out.diagnostics.push_back(
            "theta decreased inside rhombic band at A=" +
            std::to_string(r.area));
      if (r.point.shape == LatticeShape::Rectangular &&
          prev->point.shape == LatticeShape::Rectangular &&
          r.point.minimizer.y < prev->point.minimizer.y - 1e-9)
        out.diagnostics.push_back(
            "y decreased inside rectangular band at A=" +
            std::to_string(r.area));
    }
    prev = &r;
  }
  return out;
}

// Area where the minimizer's shape label changes, located by bisection on
// minimize_full down to a bracket of width area_tol.
inline double find_phase_boundary(const LJParams& prm, double lo, double hi,
                                  double area_tol, double tol) {
  if (!(lo < hi)) throw std::invalid_argument("need lo < hi");
  LatticeShape shape_lo = minimize_full(prm, lo, tol).shape;
  LatticeShape shape_hi = minimize_full(prm, hi, tol).shape;
  if (shape_lo == shape_hi)
    throw std::invalid_argument("no shape change across the bracket");
  while (hi - lo > area_tol) {
    const double mid = 0.5 * (lo + hi);
    if (minimize_full(prm, mid, tol).shape == shape_lo)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace lattice_lab
