#pragma once

// Shared test fixtures: reference constants that were computed independently
// of the library (closed forms, high-precision summation, and brute-force
// box sums), plus a deliberately naive long-double evaluator used to
// cross-check the certified engine with a completely different enumeration
// and accumulation strategy.

#include <cmath>
#include <utility>
#include <vector>

#include "lattice_lab/lattice_lab.hpp"

namespace oracle {

// --- Epstein zeta values at unit area ---------------------------------------
inline constexpr double kZetaSquare4 = 6.02681203969194012;
inline constexpr double kZetaSquare6 = 4.65891361560384344;
inline constexpr double kZetaSquare12 = 4.06402192772130348;
inline constexpr double kZetaTriangular4 = 5.78335929967867231;
inline constexpr double kZetaTriangular6 = 4.14125654720341639;
inline constexpr double kZetaTriangular12 = 2.53539025086070188;

// --- Theta values at area 1/2 -----------------------------------------------
inline constexpr double kThetaSquareAlpha1 = 2.01496744069016941;
inline constexpr double kThetaSquareAlpha2 = 1.18034059901609623;
inline constexpr double kThetaTriangularAlpha1 = 2.00847791859791998;
inline constexpr double kThetaTriangularAlpha2 = 1.159595266963928;

// --- Structural lattice sums -------------------------------------------------
inline constexpr double kS1At5 = 4.25058770188656460;
inline constexpr double kS1At8 = 4.00654261864407210;
inline constexpr double kS2At4 = 2.32945680780192172;
inline constexpr double kS2At7 = 2.03201096386065174;
inline constexpr double kS3At5 = 0.139499215933977;
inline constexpr double kS3At8 = 0.015711888691007;
inline constexpr double kS4At5 = 4.100916751867934;
inline constexpr double kS4At8 = 4.001174372957274;
inline constexpr double kGAt3 = 1.213463080330103;
inline constexpr double kGAt6 = 1.812044522186547;
inline constexpr double kKAt3 = 11.744753391867892;
inline constexpr double kKAt6 = 23.944198682979614;

// --- Area thresholds (classical parameters) ----------------------------------
inline constexpr double kA0 = 1.1524379814;
inline constexpr double kA1 = 1.1430031631;
inline constexpr double kA2 = 1.2679986810;
inline constexpr double kABZ = 1.13784741;
inline constexpr double kABZx = 0.2339;
inline constexpr double kABZy = 0.9723;

// --- Minimization landmarks (classical parameters) ---------------------------
inline constexpr double kEnergyTriangularArea1 = -5.74712284354603;
inline constexpr double kThetaAt1p141 = 82.3323;     // rhombic angle, degrees
inline constexpr double kOnsetTheta = 76.474;        // angle just above the
                                                     // triangular/rhombic edge
inline constexpr double kRectYAt1p27 = 1.033377;
inline constexpr double kRectYAt5 = 5.027910;
inline constexpr double kRectYAt10 = 10.056628;
inline constexpr double kRectYAt20 = 20.113307;
inline constexpr double kBoundaryTriRhombic = 1.137850;
inline constexpr double kBoundaryRhombicSquare = 1.143001;
inline constexpr double kBoundarySquareRect = 1.268002;

// --- Degeneracy-bound roots --------------------------------------------------
inline constexpr double kX1At5 = 2.06652511940448369;
inline constexpr double kX2At5 = 580.297676831075946;
inline constexpr double kX1At10 = 4.25311338908483559;
inline constexpr double kX2At10 = 4654.6605022147586;
inline constexpr double kX1At20 = 8.5658534317471574;
inline constexpr double kX2At20 = 37262.7430713990004;

// --- Naive reference summation ----------------------------------------------

// Two-term inverse-power energy summed over a plain centred box in long
// double, box size doubled until two passes agree to `rel`.  Shares no code
// or strategy with the certified engine (square box instead of a disc, naive
// accumulation instead of compensated, long double instead of double).
inline double brute_energy(double x, double y, double area,
                           const lattice_lab::LJParams& prm,
                           double rel = 5e-11) {
  const long double lx = x, ly = y, la = area;
  const long double a1 = prm.a1, a2 = prm.a2, t1 = prm.t1, t2 = prm.t2;
  auto pass = [&](long box) {
    long double acc = 0.0L;
    for (long m = -box; m <= box; ++m) {
      for (long n = -box; n <= box; ++n) {
        if (m == 0 && n == 0) continue;
        const long double al = static_cast<long double>(m) + lx * n;
        const long double q = la * (al * al / ly + ly * n * n);
        acc += a2 * powl(q, -t2) - a1 * powl(q, -t1);
      }
    }
    return acc;
  };
  long box = 32;
  long double prev = pass(box);
  for (int i = 0; i < 7; ++i) {
    box *= 2;
    const long double cur = pass(box);
    if (fabsl(cur - prev) <= rel * std::max(1.0L, fabsl(cur)))
      return static_cast<double>(cur);
    prev = cur;
  }
  return static_cast<double>(prev);
}

// d/dx of the energy above, same naive strategy.
inline double brute_grad_x(double x, double y, double area,
                           const lattice_lab::LJParams& prm,
                           double rel = 5e-11) {
  const long double lx = x, ly = y, la = area;
  const long double a1 = prm.a1, a2 = prm.a2, t1 = prm.t1, t2 = prm.t2;
  auto pass = [&](long box) {
    long double acc = 0.0L;
    for (long m = -box; m <= box; ++m) {
      for (long n = -box; n <= box; ++n) {
        if (m == 0 && n == 0) continue;
        const long double al = static_cast<long double>(m) + lx * n;
        const long double q = la * (al * al / ly + ly * n * n);
        const long double dfq =
            -a2 * t2 * powl(q, -t2 - 1.0L) + a1 * t1 * powl(q, -t1 - 1.0L);
        acc += (2.0L * la / ly) * n * al * dfq;
      }
    }
    return acc;
  };
  long box = 32;
  long double prev = pass(box);
  for (int i = 0; i < 7; ++i) {
    box *= 2;
    const long double cur = pass(box);
    if (fabsl(cur - prev) <= rel * std::max(1.0L, fabsl(cur)))
      return static_cast<double>(cur);
    prev = cur;
  }
  return static_cast<double>(prev);
}

// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const size_t n = xs.size();
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return sxy / sxx;
}

}  // namespace oracle
