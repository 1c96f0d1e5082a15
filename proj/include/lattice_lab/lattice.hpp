#pragma once

#include <cmath>
#include <stdexcept>

namespace lattice_lab {

// A two-dimensional Bravais lattice of fixed cell area, generated by
//   u = (sqrt(area/y), 0),   v = (x*sqrt(area/y), sqrt(area*y)),
// so that |m*u + n*v|^2 = area * ((m + x*n)^2 / y + y*n^2).
// Every lattice is equivalent, up to rotation, to one with parameters in the
// half modular domain { 0 <= x <= 1/2, y > 0, x^2 + y^2 >= 1 }.
struct LatticePoint2D {
  double x = 0.0;
  double y = 1.0;
  double area = 1.0;
};

inline void validate_lattice(const LatticePoint2D& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.area))
    throw std::invalid_argument("lattice parameters must be finite");
  if (p.y <= 0.0) throw std::invalid_argument("lattice parameter y must be positive");
  if (p.area <= 0.0) throw std::invalid_argument("lattice area must be positive");
}

inline bool in_half_domain(double x, double y, double slack = 0.0) {
  return x >= -slack && x <= 0.5 + slack && y > 0.0 &&
         x * x + y * y >= 1.0 - slack;
}

// Constructor for points that are required to already lie in the half domain.
inline LatticePoint2D domain_point(double x, double y, double area) {
  LatticePoint2D p{x, y, area};
  validate_lattice(p);
  if (!in_half_domain(x, y, 1e-12))
    throw std::invalid_argument("(x, y) is outside the half modular domain");
  return p;
}

inline LatticePoint2D square_point(double area) {
  return LatticePoint2D{0.0, 1.0, area};
}

inline LatticePoint2D triangular_point(double area) {
  return LatticePoint2D{0.5, std::sqrt(3.0) / 2.0, area};
}

// Squared length of the lattice vector m*u + n*v.
inline double quadratic_form(double m, double n, const LatticePoint2D& p) {
  const double a = m + p.x * n;
  return p.area * (a * a / p.y + p.y * n * n);
}

// Map (x, y) into the half modular domain by integer translations of x,
// inversions (x, y) -> (-x, y)/(x^2+y^2), and the mirror x -> -x.  All three
// moves change the basis of the same lattice (up to rotation), so lattice sums
// are invariant under the reduction.
inline LatticePoint2D reduce_to_domain(double x, double y, double area,
                                       int max_iter = 64) {
  validate_lattice(LatticePoint2D{x, y, area});
  double xx = x, yy = y;
  for (int i = 0; i < max_iter; ++i) {
    xx -= std::round(xx);
    const double r2 = xx * xx + yy * yy;
    if (r2 >= 1.0 - 1e-15) {
      xx = std::fabs(xx);
      if (xx > 0.5) xx = 0.5;
      return LatticePoint2D{xx, yy, area};
    }
    xx = -xx / r2;
    yy = yy / r2;
  }
  throw std::runtime_error("modular reduction did not converge in 64 steps");
}

enum class LatticeShape { Triangular, Square, Rectangular, Rhombic, Generic };

inline const char* shape_name(LatticeShape s) {
  switch (s) {
    case LatticeShape::Triangular:  return "Triangular";
    case LatticeShape::Square:      return "Square";
    case LatticeShape::Rectangular: return "Rectangular";
    case LatticeShape::Rhombic:     return "Rhombic";
    default:                        return "Generic";
  }
}

// Coordinate-based shape label for a reduced point.  Precedence:
// Triangular > Square > Rectangular > Rhombic > Generic.
inline LatticeShape classify_shape(double x, double y, double tol = 1e-6) {
  const double y_tri = std::sqrt(3.0) / 2.0;
  if (std::fabs(x - 0.5) < tol && std::fabs(y - y_tri) < tol)
    return LatticeShape::Triangular;
  if (std::fabs(x) < tol && std::fabs(y - 1.0) < tol) return LatticeShape::Square;
  if (std::fabs(x) < tol && y > 1.0 + tol) return LatticeShape::Rectangular;
  if (std::fabs(x * x + y * y - 1.0) < tol) return LatticeShape::Rhombic;
  return LatticeShape::Generic;
}

// Angle (degrees) between the two generators of a rhombic lattice (x, y) on
// the unit circle; 60 is triangular, 90 is square.
inline double rhombic_angle_deg(double x, double y) {
  return std::atan2(y, x) * 180.0 / 3.14159265358979323846;
}

}  // namespace lattice_lab
