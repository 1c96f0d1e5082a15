#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>
#include <vector>

#include "lattice_lab/derivatives.hpp"
#include "lattice_lab/minimize.hpp"
#include "lattice_lab/thresholds.hpp"

namespace lattice_lab {

// Locale-independent general float formatting (12 significant digits by
// default, '.' decimal separator), so that identical inputs always serialize
// to identical bytes.
inline std::string fmt_g(double v, int precision = 12) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 64> buf;
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, precision);
  return std::string(buf.data(), res.ptr);
}

namespace detail {

inline std::string csv_escape_free(const std::string& s) {
  // All emitted strings are enum labels or numbers; commas never appear.
  return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Sweep serialization.  Schema: A,phase,x,y,theta_deg,energy,certainty with
// theta_deg populated only for rhombic rows and ERROR rows carrying only the
// area and the phase label.
// ---------------------------------------------------------------------------

inline std::string sweep_csv(const SweepOutcome& sweep) {
  std::string out = "A,phase,x,y,theta_deg,energy,certainty\n";
  for (const SweepRow& r : sweep.rows) {
    out += fmt_g(r.area);
    if (!r.ok) {
      out += ",ERROR,,,,,\n";
      continue;
    }
    const PhasePoint& p = r.point;
    out += ',';
    out += shape_name(p.shape);
    out += ',';
    out += fmt_g(p.minimizer.x);
    out += ',';
    out += fmt_g(p.minimizer.y);
    out += ',';
    if (p.shape == LatticeShape::Rhombic) out += fmt_g(p.theta_deg);
    out += ',';
    out += fmt_g(p.energy);
    out += ',';
    out += certainty_name(p.certainty);
    out += '\n';
  }
  return out;
}

inline std::string sweep_json(const SweepOutcome& sweep) {
  std::string out = "[\n";
  bool first = true;
  for (const SweepRow& r : sweep.rows) {
    if (!first) out += ",\n";
    first = false;
    out += "  {\"A\": " + fmt_g(r.area);
    if (!r.ok) {
      out +=
          ", \"phase\": \"ERROR\", \"x\": null, \"y\": null, "
          "\"theta_deg\": null, \"energy\": null, \"certainty\": null}";
      continue;
    }
    const PhasePoint& p = r.point;
    out += ", \"phase\": \"";
    out += shape_name(p.shape);
    out += "\", \"x\": " + fmt_g(p.minimizer.x);
    out += ", \"y\": " + fmt_g(p.minimizer.y);
    out += ", \"theta_deg\": ";
    out += (p.shape == LatticeShape::Rhombic ? fmt_g(p.theta_deg) : "null");
    out += ", \"energy\": " + fmt_g(p.energy);
    out += ", \"certainty\": \"";
    out += certainty_name(p.certainty);
    out += "\"}";
  }
  out += "\n]\n";
  return out;
}

namespace detail {

inline const char* phase_color(LatticeShape s) {
  switch (s) {
    case LatticeShape::Triangular:  return "#1b9e77";
    case LatticeShape::Rhombic:     return "#7570b3";
    case LatticeShape::Square:      return "#d95f02";
    case LatticeShape::Rectangular: return "#e7298a";
    default:                        return "#666666";
  }
}

}  // namespace detail

// Self-contained SVG: a phase strip over the swept area range, the rhombic
// angle curve (left scale, 60..90 degrees) and the rectangular aspect curve
// (right scale, 1..max).
inline std::string sweep_svg(const SweepOutcome& sweep) {
  const double W = 960, H = 480, L = 70, R = 890, T = 30;
  const double strip_t = T, strip_b = T + 36;
  const double plot_t = T + 64, plot_b = H - 54;
  double a_min = 0.0, a_max = 1.0;
  bool have = false;
  double y_max = 1.5;
  for (const SweepRow& r : sweep.rows) {
    if (!have) {
      a_min = a_max = r.area;
      have = true;
    }
    a_min = std::min(a_min, r.area);
    a_max = std::max(a_max, r.area);
    if (r.ok && r.point.shape == LatticeShape::Rectangular)
      y_max = std::max(y_max, r.point.minimizer.y);
  }
  if (!(a_max > a_min)) a_max = a_min + 1.0;
  auto xpos = [&](double a) {
    return L + (R - L) * (a - a_min) / (a_max - a_min);
  };
  auto ypos_theta = [&](double th) {
    return plot_b - (plot_b - plot_t) * (th - 60.0) / 30.0;
  };
  auto ypos_rect = [&](double y) {
    return plot_b - (plot_b - plot_t) * (y - 1.0) / (y_max - 1.0);
  };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_g(W, 6) +
       "\" height=\"" + fmt_g(H, 6) + "\" viewBox=\"0 0 " + fmt_g(W, 6) + " " +
       fmt_g(H, 6) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt_g(W, 6) + "\" height=\"" +
       fmt_g(H, 6) + "\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt_g(L, 6) +
       "\" y=\"20\" font-family=\"monospace\" font-size=\"14\">minimizer "
       "shape, rhombic angle and rectangular aspect vs area</text>\n";

  // Phase strip: merge consecutive rows with the same label.
  const size_t n = sweep.rows.size();
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    auto label = [&](const SweepRow& r) {
      return r.ok ? std::string(shape_name(r.point.shape))
                  : std::string("ERROR");
    };
    const std::string lab = label(sweep.rows[i]);
    while (j + 1 < n && label(sweep.rows[j + 1]) == lab) ++j;
    const double x0 =
        i == 0 ? xpos(sweep.rows[i].area)
               : 0.5 * (xpos(sweep.rows[i - 1].area) + xpos(sweep.rows[i].area));
    const double x1 = j + 1 == n ? xpos(sweep.rows[j].area)
                                 : 0.5 * (xpos(sweep.rows[j].area) +
                                          xpos(sweep.rows[j + 1].area));
    const char* color = sweep.rows[i].ok
                            ? detail::phase_color(sweep.rows[i].point.shape)
                            : "#bbbbbb";
    s += "<rect x=\"" + fmt_g(x0, 8) + "\" y=\"" + fmt_g(strip_t, 6) +
         "\" width=\"" + fmt_g(std::max(x1 - x0, 0.5), 8) + "\" height=\"" +
         fmt_g(strip_b - strip_t, 6) + "\" fill=\"" + color + "\"/>\n";
    i = j + 1;
  }

  // Axes.
  s += "<rect x=\"" + fmt_g(L, 6) + "\" y=\"" + fmt_g(plot_t, 6) +
       "\" width=\"" + fmt_g(R - L, 6) + "\" height=\"" +
       fmt_g(plot_b - plot_t, 6) +
       "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double a = a_min + (a_max - a_min) * k / 4.0;
    s += "<text x=\"" + fmt_g(xpos(a) - 18, 8) + "\" y=\"" +
         fmt_g(plot_b + 18, 6) +
         "\" font-family=\"monospace\" font-size=\"12\">" + fmt_g(a, 6) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt_g(0.5 * (L + R) - 10, 8) + "\" y=\"" +
       fmt_g(H - 16, 6) +
       "\" font-family=\"monospace\" font-size=\"13\">A</text>\n";
  for (int th = 60; th <= 90; th += 10) {
    s += "<text x=\"8\" y=\"" + fmt_g(ypos_theta(th) + 4, 8) +
         "\" font-family=\"monospace\" font-size=\"12\" fill=\"#7570b3\">" +
         fmt_g(th, 6) + "&#176;</text>\n";
  }
  s += "<text x=\"" + fmt_g(R + 8, 6) + "\" y=\"" + fmt_g(ypos_rect(1.0) + 4, 8) +
       "\" font-family=\"monospace\" font-size=\"12\" fill=\"#e7298a\">y=1</text>\n";
  s += "<text x=\"" + fmt_g(R + 8, 6) + "\" y=\"" +
       fmt_g(ypos_rect(y_max) + 4, 8) +
       "\" font-family=\"monospace\" font-size=\"12\" fill=\"#e7298a\">y=" +
       fmt_g(y_max, 4) + "</text>\n";

  // Rhombic angle curve.
  std::string pts;
  for (const SweepRow& r : sweep.rows) {
    if (!r.ok || r.point.shape != LatticeShape::Rhombic) continue;
    pts += fmt_g(xpos(r.area), 8) + "," + fmt_g(ypos_theta(r.point.theta_deg), 8) +
           " ";
  }
  if (!pts.empty())
    s += "<polyline points=\"" + pts +
         "\" fill=\"none\" stroke=\"#7570b3\" stroke-width=\"2\"/>\n";

  // Rectangular aspect curve.
  pts.clear();
  for (const SweepRow& r : sweep.rows) {
    if (!r.ok || r.point.shape != LatticeShape::Rectangular) continue;
    pts += fmt_g(xpos(r.area), 8) + "," + fmt_g(ypos_rect(r.point.minimizer.y), 8) +
           " ";
  }
  if (!pts.empty())
    s += "<polyline points=\"" + pts +
         "\" fill=\"none\" stroke=\"#e7298a\" stroke-width=\"2\"/>\n";

  // Legend.
  const LatticeShape legend[] = {LatticeShape::Triangular, LatticeShape::Rhombic,
                                 LatticeShape::Square,
                                 LatticeShape::Rectangular};
  double lx = L;
  for (LatticeShape sh : legend) {
    s += "<rect x=\"" + fmt_g(lx, 8) + "\" y=\"" + fmt_g(strip_b + 6, 6) +
         "\" width=\"12\" height=\"12\" fill=\"" +
         std::string(detail::phase_color(sh)) + "\"/>\n";
    s += "<text x=\"" + fmt_g(lx + 16, 8) + "\" y=\"" + fmt_g(strip_b + 16, 6) +
         "\" font-family=\"monospace\" font-size=\"12\">" + shape_name(sh) +
         "</text>\n";
    lx += 150;
  }

  s += "</svg>\n";
  return s;
}

// ---------------------------------------------------------------------------
// Threshold serialization.
// ---------------------------------------------------------------------------

inline std::string thresholds_text(const ThresholdSet& t, double tol) {
  std::string s;
  s += "A_BZ=" + fmt_g(t.A_BZ) + " (argmin x=" + fmt_g(t.abz_x, 6) +
       ", y=" + fmt_g(t.abz_y, 6) + ")\n";
  s += "A0=" + fmt_g(t.A0) + "\n";
  s += "A1=" + fmt_g(t.A1) + "\n";
  s += "A2=" + fmt_g(t.A2) + "\n";
  s += "requested_tolerance=" + fmt_g(tol) + "\n";
  s += "params a1=" + fmt_g(t.params.a1) + " a2=" + fmt_g(t.params.a2) +
       " t1=" + fmt_g(t.params.t1) + " t2=" + fmt_g(t.params.t2) + "\n";
  return s;
}

inline std::string thresholds_csv(const ThresholdSet& t, double tol) {
  std::string s = "name,value\n";
  s += "A_BZ," + fmt_g(t.A_BZ) + "\n";
  s += "A0," + fmt_g(t.A0) + "\n";
  s += "A1," + fmt_g(t.A1) + "\n";
  s += "A2," + fmt_g(t.A2) + "\n";
  s += "abz_x," + fmt_g(t.abz_x) + "\n";
  s += "abz_y," + fmt_g(t.abz_y) + "\n";
  s += "tolerance," + fmt_g(tol) + "\n";
  s += "a1," + fmt_g(t.params.a1) + "\n";
  s += "a2," + fmt_g(t.params.a2) + "\n";
  s += "t1," + fmt_g(t.params.t1) + "\n";
  s += "t2," + fmt_g(t.params.t2) + "\n";
  return s;
}

inline std::string thresholds_json(const ThresholdSet& t, double tol) {
  std::string s = "{\n";
  s += "  \"A_BZ\": " + fmt_g(t.A_BZ) + ",\n";
  s += "  \"A0\": " + fmt_g(t.A0) + ",\n";
  s += "  \"A1\": " + fmt_g(t.A1) + ",\n";
  s += "  \"A2\": " + fmt_g(t.A2) + ",\n";
  s += "  \"abz_x\": " + fmt_g(t.abz_x) + ",\n";
  s += "  \"abz_y\": " + fmt_g(t.abz_y) + ",\n";
  s += "  \"tolerance\": " + fmt_g(tol) + ",\n";
  s += "  \"params\": {\"a1\": " + fmt_g(t.params.a1) +
       ", \"a2\": " + fmt_g(t.params.a2) + ", \"t1\": " + fmt_g(t.params.t1) +
       ", \"t2\": " + fmt_g(t.params.t2) + "}\n";
  s += "}\n";
  return s;
}

// ---------------------------------------------------------------------------
// Stability-report serialization (square + triangular pair).
// ---------------------------------------------------------------------------

inline std::string stability_text(const char* label,
                                  const StabilityReport& r) {
  std::string s;
  s += std::string(label) + ": " + verdict_name(r.verdict);
  s += " (dxx=" + fmt_g(r.hessian.dxx, 6) + ", dyy=" + fmt_g(r.hessian.dyy, 6) +
       ", dxy=" + fmt_g(r.hessian.dxy, 6) + ", margin=" + fmt_g(r.margin, 6) +
       ")\n";
  return s;
}

inline std::string classify_text(const StabilityReport& sq,
                                 const StabilityReport& tri, double area) {
  std::string s = "A=" + fmt_g(area) + "\n";
  s += stability_text("Square", sq);
  s += stability_text("Triangular", tri);
  return s;
}

inline std::string classify_csv(const StabilityReport& sq,
                                const StabilityReport& tri, double area) {
  std::string s = "name,value\n";
  s += "A," + fmt_g(area) + "\n";
  s += "square_verdict," + std::string(verdict_name(sq.verdict)) + "\n";
  s += "square_dxx," + fmt_g(sq.hessian.dxx) + "\n";
  s += "square_dyy," + fmt_g(sq.hessian.dyy) + "\n";
  s += "square_margin," + fmt_g(sq.margin) + "\n";
  s += "triangular_verdict," + std::string(verdict_name(tri.verdict)) + "\n";
  s += "triangular_dxx," + fmt_g(tri.hessian.dxx) + "\n";
  s += "triangular_dyy," + fmt_g(tri.hessian.dyy) + "\n";
  s += "triangular_margin," + fmt_g(tri.margin) + "\n";
  return s;
}

inline std::string classify_json(const StabilityReport& sq,
                                 const StabilityReport& tri, double area) {
  auto one = [](const StabilityReport& r) {
    std::string s = "{\"verdict\": \"";
    s += verdict_name(r.verdict);
    s += "\", \"dxx\": " + fmt_g(r.hessian.dxx) +
         ", \"dyy\": " + fmt_g(r.hessian.dyy) +
         ", \"dxy\": " + fmt_g(r.hessian.dxy) +
         ", \"margin\": " + fmt_g(r.margin) +
         ", \"err_bound\": " + fmt_g(r.hessian.err_bound) + "}";
    return s;
  };
  std::string s = "{\n";
  s += "  \"A\": " + fmt_g(area) + ",\n";
  s += "  \"square\": " + one(sq) + ",\n";
  s += "  \"triangular\": " + one(tri) + "\n";
  s += "}\n";
  return s;
}

// ---------------------------------------------------------------------------
// Single-point minimization serialization.
// ---------------------------------------------------------------------------

inline std::string phase_point_text(const PhasePoint& p) {
  std::string s;
  s += "A=" + fmt_g(p.area) + "\n";
  s += "phase=" + std::string(shape_name(p.shape)) + "\n";
  s += "x=" + fmt_g(p.minimizer.x) + "\n";
  s += "y=" + fmt_g(p.minimizer.y) + "\n";
  if (p.shape == LatticeShape::Rhombic)
    s += "theta_deg=" + fmt_g(p.theta_deg) + "\n";
  s += "energy=" + fmt_g(p.energy) + "\n";
  s += "certainty=" + std::string(certainty_name(p.certainty)) + "\n";
  s += "grad_norm=" + fmt_g(p.grad_norm, 6) + "\n";
  return s;
}

inline std::string phase_point_csv(const PhasePoint& p) {
  std::string s = "A,phase,x,y,theta_deg,energy,certainty\n";
  s += fmt_g(p.area);
  s += ',';
  s += shape_name(p.shape);
  s += ',';
  s += fmt_g(p.minimizer.x);
  s += ',';
  s += fmt_g(p.minimizer.y);
  s += ',';
  if (p.shape == LatticeShape::Rhombic) s += fmt_g(p.theta_deg);
  s += ',';
  s += fmt_g(p.energy);
  s += ',';
  s += certainty_name(p.certainty);
  s += '\n';
  return s;
}

inline std::string phase_point_json(const PhasePoint& p) {
  std::string s = "{\n";
  s += "  \"A\": " + fmt_g(p.area) + ",\n";
  s += "  \"phase\": \"" + std::string(shape_name(p.shape)) + "\",\n";
  s += "  \"x\": " + fmt_g(p.minimizer.x) + ",\n";
  s += "  \"y\": " + fmt_g(p.minimizer.y) + ",\n";
  s += "  \"theta_deg\": " +
       (p.shape == LatticeShape::Rhombic ? fmt_g(p.theta_deg)
                                         : std::string("null")) +
       ",\n";
  s += "  \"energy\": " + fmt_g(p.energy) + ",\n";
  s += "  \"certainty\": \"" + std::string(certainty_name(p.certainty)) +
       "\"\n";
  s += "}\n";
  return s;
}

inline std::string rhombic_text(const RhombicResult& r, double area) {
  std::string s;
  s += "A=" + fmt_g(area) + "\n";
  s += "family=rhombic\n";
  s += "theta_deg=" + fmt_g(r.theta_deg) + "\n";
  s += "x=" + fmt_g(r.x) + "\n";
  s += "y=" + fmt_g(r.y) + "\n";
  s += "energy=" + fmt_g(r.energy) + "\n";
  s += std::string("at_triangular_endpoint=") +
       (r.at_triangular_endpoint ? "true" : "false") + "\n";
  s += std::string("at_square_endpoint=") +
       (r.at_square_endpoint ? "true" : "false") + "\n";
  return s;
}

inline std::string rectangular_text(const RectangularResult& r, double area) {
  std::string s;
  s += "A=" + fmt_g(area) + "\n";
  s += "family=rectangular\n";
  s += "y=" + fmt_g(r.y) + "\n";
  s += "energy=" + fmt_g(r.energy) + "\n";
  s += "y_cap=" + fmt_g(r.y_cap) + "\n";
  s += std::string("boundary_capped=") + (r.boundary_capped ? "true" : "false") +
       "\n";
  return s;
}

}  // namespace lattice_lab
