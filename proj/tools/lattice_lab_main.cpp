// lattice-lab: thresholds, stability classification, restricted/full lattice
// energy minimization, and phase-diagram sweeps for Lennard-Jones-type
// potentials on the half modular domain.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lattice_lab/lattice_lab.hpp"

namespace ll = lattice_lab;

namespace {

struct Common {
  double a1 = 2.0, a2 = 1.0, t1 = 3.0, t2 = 6.0;
  double tol = 1e-10;
  double area = 1.0;
  double area_min = 0.0, area_max = 0.0, step = 0.0;
  std::string format;  // "", "csv", "json"
  std::string out, plot, family = "full";
  int jobs = 0;
};

void add_params(CLI::App* sub, Common& c) {
  sub->add_option("--a1", c.a1, "strength of the attractive power term");
  sub->add_option("--a2", c.a2, "strength of the repulsive power term");
  sub->add_option("--t1", c.t1, "attractive exponent (f ~ -a1 u^-t1)");
  sub->add_option("--t2", c.t2, "repulsive exponent (f ~ a2 u^-t2)");
  sub->add_option("--tol", c.tol, "certified truncation tolerance")
      ->envname("LATTICE_LAB_TOL")
      ->check(CLI::Range(1e-300, 1e-4));
  sub->add_option("--format", c.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", c.out, "write the table to this path");
  sub->add_option("--jobs", c.jobs, "worker threads for sweeps");
}

ll::LJParams params_of(const Common& c) {
  ll::LJParams p;
  p.a1 = c.a1;
  p.a2 = c.a2;
  p.t1 = c.t1;
  p.t2 = c.t2;
  ll::validate(p);
  return p;
}

int emit(const Common& c, const std::string& body) {
  if (c.out.empty()) {
    std::cout << body;
    return 0;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot open output path " << c.out << "\n";
    return 2;
  }
  f << body;
  return f.good() ? 0 : 2;
}

int run_thresholds(const Common& c) {
  const ll::LJParams prm = params_of(c);
  const ll::ThresholdSet t = ll::compute_thresholds(prm, c.tol);
  if (c.format == "csv") return emit(c, ll::thresholds_csv(t, c.tol));
  if (c.format == "json") return emit(c, ll::thresholds_json(t, c.tol));
  return emit(c, ll::thresholds_text(t, c.tol));
}

int run_classify(const Common& c) {
  const ll::LJParams prm = params_of(c);
  const ll::detail::LJPot pot(prm);
  const ll::StabilityReport sq =
      ll::classify_point(pot, ll::LatticeShape::Square, c.area, c.tol);
  const ll::StabilityReport tri =
      ll::classify_point(pot, ll::LatticeShape::Triangular, c.area, c.tol);
  if (c.format == "csv") return emit(c, ll::classify_csv(sq, tri, c.area));
  if (c.format == "json") return emit(c, ll::classify_json(sq, tri, c.area));
  return emit(c, ll::classify_text(sq, tri, c.area));
}

std::string kv_to_csv(const std::string& text) {
  std::string out = "name,value\n";
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    const size_t eq = line.find('=');
    if (eq != std::string::npos) line[eq] = ',';
    out += line + "\n";
    pos = nl + 1;
  }
  return out;
}

std::string kv_to_json(const std::string& text) {
  std::string out = "{\n";
  bool first = true;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    const std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    const size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    const bool numeric =
        !val.empty() && (std::isdigit(static_cast<unsigned char>(val[0])) ||
                         val[0] == '-' || val[0] == '+');
    if (!first) out += ",\n";
    first = false;
    out += "  \"" + key + "\": ";
    out += numeric || val == "true" || val == "false" ? val : "\"" + val + "\"";
  }
  out += "\n}\n";
  return out;
}

int run_minimize(const Common& c) {
  const ll::LJParams prm = params_of(c);
  std::string text;
  if (c.family == "rhombic") {
    text = ll::rhombic_text(ll::minimize_rhombic(prm, c.area, c.tol), c.area);
  } else if (c.family == "rectangular") {
    text = ll::rectangular_text(ll::minimize_rectangular(prm, c.area, c.tol),
                                c.area);
  } else {
    const ll::PhasePoint p = ll::minimize_full(prm, c.area, c.tol);
    if (c.format == "csv") return emit(c, ll::phase_point_csv(p));
    if (c.format == "json") return emit(c, ll::phase_point_json(p));
    return emit(c, ll::phase_point_text(p));
  }
  if (c.format == "csv") return emit(c, kv_to_csv(text));
  if (c.format == "json") return emit(c, kv_to_json(text));
  return emit(c, text);
}

int run_sweep(const Common& c, bool have_range, bool have_area) {
  const ll::LJParams prm = params_of(c);
  std::vector<double> areas;
  if (have_range) {
    if (!(c.step > 0.0)) {
      std::cerr << "error: --step must be positive\n";
      return 2;
    }
    if (!(c.area_min > 0.0) || !(c.area_max >= c.area_min)) {
      std::cerr << "error: need 0 < --area-min <= --area-max\n";
      return 2;
    }
    const long n =
        std::lround(std::floor((c.area_max - c.area_min) / c.step + 1e-9)) + 1;
    if (n > 2000000) {
      std::cerr << "error: range too fine (" << n << " rows)\n";
      return 2;
    }
    areas.reserve(n);
    for (long i = 0; i < n; ++i) areas.push_back(c.area_min + i * c.step);
  } else if (have_area) {
    areas.push_back(c.area);
  } else {
    std::cerr << "error: sweep needs --area-min/--area-max/--step or --area\n";
    return 2;
  }

  int jobs = c.jobs;
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
  }
  const ll::SweepOutcome sweep = ll::phase_sweep(prm, areas, c.tol, jobs);

  for (const std::string& d : sweep.diagnostics)
    std::cerr << "diagnostic: " << d << "\n";
  for (const ll::SweepRow& r : sweep.rows)
    if (!r.ok)
      std::cerr << "row failure at A=" << ll::fmt_g(r.area) << ": " << r.error
                << "\n";

  const int rc = emit(
      c, c.format == "json" ? ll::sweep_json(sweep) : ll::sweep_csv(sweep));
  if (rc != 0) return rc;

  if (!c.plot.empty()) {
    std::ofstream f(c.plot, std::ios::binary);
    if (!f) {
      std::cerr << "error: cannot open plot path " << c.plot << "\n";
      return 2;
    }
    f << ll::sweep_svg(sweep);
  }

  const double frac_ok =
      1.0 - static_cast<double>(sweep.failures) /
                static_cast<double>(sweep.rows.size());
  return frac_ok >= 0.9 ? 0 : 3;
}

struct SelfTest {
  int failures = 0;
  void check(const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  " << name;
    if (!detail.empty()) std::cout << "  (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }
};

int run_selftest(const Common&) {
  SelfTest st;

  // Structural identities of the triangular lattice sums.
  for (double s : {5.0, 8.0}) {
    const ll::TriangularIdentityResiduals r =
        ll::check_latsum_identities(s, 1e-12);
    const double worst = std::max({r.cross, r.cubic, r.quartic});
    st.check("lattice-sum identities at s=" + ll::fmt_g(s, 3), worst <= 1e-10,
             "max residual " + ll::fmt_g(worst, 3));
  }
  for (double s : {3.0, 6.0}) {
    const double r = ll::moment_identity_residual(s, 1e-12);
    st.check("second-vs-fourth moment identity at s=" + ll::fmt_g(s, 3),
             r <= 1e-10, "residual " + ll::fmt_g(r, 3));
  }

  // Positivity of the threshold building blocks.
  bool gk_ok = true;
  std::string gk_detail;
  for (double s : {1.5, 2.0, 3.0, 4.5, 6.0, 8.0}) {
    const auto [g, k] = ll::g_and_k(s, 1e-10);
    if (!(g > 0.0) || !(k > 0.0)) {
      gk_ok = false;
      gk_detail = "failure at s=" + ll::fmt_g(s, 3);
    }
  }
  st.check("g and k positive at six exponents", gk_ok, gk_detail);

  // Critical-point gradients and Hessian diagonality for a potential battery.
  std::vector<ll::Potential> battery;
  battery.push_back(ll::Potential::exponential(1.0));
  battery.push_back(ll::Potential::inverse_power(3.0));
  battery.push_back(ll::Potential::inverse_power(6.0));
  battery.push_back(ll::Potential::lennard_jones(ll::classical_lj()));
  bool grad_ok = true, diag_ok = true;
  double grad_worst = 0.0, diag_worst = 0.0;
  for (const ll::Potential& pot : battery) {
    for (double a : {0.3, 0.7, 1.0, 1.5, 5.0}) {
      for (const ll::LatticePoint2D& p :
           {ll::square_point(a), ll::triangular_point(a)}) {
        const ll::Gradient2 g = ll::grad_energy(pot, p, 1e-12);
        const double gn =
            std::max(std::fabs(g.dx), std::fabs(g.dy)) / (1.0 + g.scale);
        grad_worst = std::max(grad_worst, gn);
        if (gn > 1e-9) grad_ok = false;
        const ll::Hessian2 h = ll::hessian_energy(pot, p, 1e-12);
        const double rel = std::fabs(h.dxy) /
                           (std::fabs(h.dxx) + std::fabs(h.dyy));
        diag_worst = std::max(diag_worst, rel);
        if (rel > 1e-10) diag_ok = false;
      }
    }
  }
  st.check("gradient vanishes at square and triangular points", grad_ok,
           "worst scaled component " + ll::fmt_g(grad_worst, 3));
  st.check("Hessian diagonal at square and triangular points", diag_ok,
           "worst relative off-diagonal " + ll::fmt_g(diag_worst, 3));

  // Finite-difference agreement at 20 deterministic pseudo-random points.
  const ll::detail::LJPot pot(ll::classical_lj());
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> ux(0.05, 0.45), uy(1.05, 1.7),
      ua(0.6, 1.8);
  bool fd_ok = true;
  double fd_worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double x = ux(rng), y = uy(rng), a = ua(rng);
    const ll::LatticePoint2D p{x, y, a};
    const double hx = 1e-5 * std::max(1.0, std::fabs(x));
    const double hy = 1e-5 * std::max(1.0, std::fabs(y));
    auto energy = [&](double xx, double yy) {
      return ll::lj_energy(ll::classical_lj(),
                           ll::LatticePoint2D{xx, yy, a}, 1e-12)
          .value;
    };
    auto grad = [&](double xx, double yy) {
      return ll::grad_energy(pot, ll::LatticePoint2D{xx, yy, a}, 1e-12);
    };
    const ll::Gradient2 g = grad(x, y);
    const ll::Hessian2 h = ll::hessian_energy(pot, p, 1e-12);
    const double fdx = (energy(x + hx, y) - energy(x - hx, y)) / (2.0 * hx);
    const double fdy = (energy(x, y + hy) - energy(x, y - hy)) / (2.0 * hy);
    const ll::Gradient2 gxp = grad(x + hx, y), gxm = grad(x - hx, y);
    const ll::Gradient2 gyp = grad(x, y + hy), gym = grad(x, y - hy);
    const double fdxx = (gxp.dx - gxm.dx) / (2.0 * hx);
    const double fdyy = (gyp.dy - gym.dy) / (2.0 * hy);
    const double fdxy = (gyp.dx - gym.dx) / (2.0 * hy);
    auto mixed = [&](double analytic, double fd) {
      const double err = std::fabs(analytic - fd) / (1.0 + std::fabs(analytic));
      fd_worst = std::max(fd_worst, err);
      if (err > 1e-5) fd_ok = false;
    };
    mixed(g.dx, fdx);
    mixed(g.dy, fdy);
    mixed(h.dxx, fdxx);
    mixed(h.dyy, fdyy);
    mixed(h.dxy, fdxy);
  }
  st.check("finite differences match analytic derivatives at 20 points",
           fd_ok, "worst mixed error " + ll::fmt_g(fd_worst, 3));

  std::cout << (st.failures == 0 ? "ALL PASS" : "FAILURES DETECTED") << "\n";
  return st.failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "lattice-lab: certified lattice-energy computations on the half "
      "modular domain (thresholds, stability, minimization, phase sweeps)"};
  app.require_subcommand(1);

  Common c;
  CLI::App* th = app.add_subcommand(
      "thresholds", "closed-form stability/optimality area thresholds");
  add_params(th, c);

  CLI::App* cl = app.add_subcommand(
      "classify", "square and triangular stability verdicts at one area");
  add_params(cl, c);
  cl->add_option("--area", c.area, "lattice cell area")
      ->required()
      ->check(CLI::PositiveNumber);

  CLI::App* mi = app.add_subcommand(
      "minimize", "minimize the energy at one area (full or restricted)");
  add_params(mi, c);
  mi->add_option("--area", c.area, "lattice cell area")
      ->required()
      ->check(CLI::PositiveNumber);
  mi->add_option("--family", c.family, "search family")
      ->check(CLI::IsMember({"full", "rhombic", "rectangular"}));

  CLI::App* sw = app.add_subcommand(
      "sweep", "phase-diagram sweep over a range of areas");
  add_params(sw, c);
  CLI::Option* o_min =
      sw->add_option("--area-min", c.area_min, "first area of the range");
  CLI::Option* o_max =
      sw->add_option("--area-max", c.area_max, "last area of the range");
  CLI::Option* o_step = sw->add_option("--step", c.step, "area increment");
  CLI::Option* o_area =
      sw->add_option("--area", c.area, "single area (one-row sweep)");
  sw->add_option("--plot", c.plot, "write a self-contained SVG to this path");

  CLI::App* se = app.add_subcommand(
      "selftest", "identity, critical-point and finite-difference battery");
  add_params(se, c);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(th)) return run_thresholds(c);
    if (app.got_subcommand(cl)) return run_classify(c);
    if (app.got_subcommand(mi)) return run_minimize(c);
    if (app.got_subcommand(sw)) {
      const bool have_range =
          o_min->count() > 0 || o_max->count() > 0 || o_step->count() > 0;
      const bool complete_range =
          o_min->count() > 0 && o_max->count() > 0 && o_step->count() > 0;
      if (have_range && !complete_range) {
        std::cerr
            << "error: --area-min, --area-max and --step go together\n";
        return 2;
      }
      return run_sweep(c, complete_range, o_area->count() > 0);
    }
    if (app.got_subcommand(se)) return run_selftest(c);
  } catch (const ll::ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
