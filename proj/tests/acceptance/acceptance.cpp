// Acceptance runner: one PASS/FAIL line per criterion, details indented below.

#include "fracollo/fractional_time.hpp"
#include "fracollo/harness.hpp"
#include "fracollo/solver.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fracollo;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { lines.push_back("      " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within_ratio(double value, double target, double factor) {
  return std::isfinite(value) && value <= factor * target && value >= target / factor;
}

// ---------------------------------------------------------------------------

Outcome table_rectangle() {
  struct Column {
    double alpha;
    int m;
    double printed[3];
    double orders[2];
  };
  const Column cols[] = {{0.1, 3, {3.4971e-6, 6.1913e-7, 1.7198e-7}, {2.4979, 1.8480}},
                         {0.5, 3, {2.5365e-6, 4.5642e-7, 1.2340e-7}, {2.4744, 1.8870}},
                         {0.8, 1, {1.7604e-6, 3.1358e-7, 8.5040e-8}, {2.4890, 1.8826}},
                         {1.0, 1, {1.1468e-6, 1.8610e-7, 4.5807e-8}, {2.6235, 2.0224}}};
  const int ns[] = {8, 16, 32};
  const Domain d = case_domain(0);
  Outcome out;
  for (const auto& col : cols) {
    const auto prob = tfpde_manufactured(col.alpha);
    double errs[3];
    for (int k = 0; k < 3; ++k) {
      TfpdeParams p;
      p.space.nx = p.space.ny = ns[k];
      p.m = col.m;
      p.kappa = 2.0;
      p.delta = 0.0;
      try {
        const auto r = solve_tfpde(d, prob, p);
        errs[k] = l2_error(r.disc.dofs, r.final, [&](Point q) { return prob.exact(q, p.T); }, d).l2_abs;
      } catch (const std::exception& e) {
        errs[k] = NAN;
        out.note(fmt("alpha=%g N=%d: %s", col.alpha, ns[k], e.what()));
      }
      const double rel = std::abs(errs[k] - col.printed[k]) / col.printed[k];
      out.check(std::isfinite(errs[k]) && rel <= 0.2,
                fmt("alpha=%g m=%d N=%d error %.4e, printed %.4e (%+.0f%%)", col.alpha, col.m, ns[k], errs[k],
                    col.printed[k], 100 * (errs[k] / col.printed[k] - 1)));
    }
    for (int k = 0; k < 2; ++k) {
      const double o = observed_order(ns[k], errs[k], ns[k + 1], errs[k + 1]);
      out.check(std::isfinite(o) && std::abs(o - col.orders[k]) <= 0.3,
                fmt("alpha=%g order %d->%d %.4f, printed %.4f", col.alpha, ns[k], ns[k + 1], o, col.orders[k]));
    }
  }
  return out;
}

Outcome cross_path() {
  const Domain d = case_domain(3);
  const auto prob = exponential_problem(0.1);
  const int ns[] = {32, 64};
  const double printed[] = {2.5601e-7, 6.8002e-8};
  Outcome out;
  for (int k = 0; k < 2; ++k) {
    double e[2];
    int i = 0;
    for (SolverPath path : {SolverPath::qr, SolverPath::kkt}) {
      SteadyParams p;
      p.space.nx = p.space.ny = ns[k];
      p.space.lambda = 1e5;
      p.space.path = path;
      p.delta = 1e-4;
      p.epsilon = 1e-4;
      const auto r = solve_model(d, prob, p);
      e[i++] = l2_error(r.disc.dofs, r.solution.c, prob.exact, d).l2_rel;
    }
    out.check(std::abs(e[0] - e[1]) <= 5e-7 * e[0],
              fmt("N=%d qr %.9e kkt %.9e (relative gap %.1e)", ns[k], e[0], e[1], std::abs(e[0] - e[1]) / e[0]));
    out.check(within_ratio(e[0], printed[k], 3.0), fmt("N=%d error %.4e, printed %.4e", ns[k], e[0], printed[k]));
    SteadyParams p;
    p.space.nx = p.space.ny = ns[k];
    p.delta = 1e-4;
    p.epsilon = 1e-4;
    const auto disc = Discretization::build(d, p.space);
    LsBlocks b = steady_blocks(disc, prob, p);
    b.d_star = perturb_reference(bootstrap_reference(b, SolverPath::qr, p.delta0), p.epsilon, p.seed);
    b.delta = p.delta;
    const Eigen::VectorXd ck = solve_kkt(b).c;
    for (double lambda : {1e5, 1e6, 1e7}) {
      b.lambda = lambda;
      const Eigen::VectorXd cq = solve_penalized(b).c;
      out.note(fmt("N=%d fixed reference, lambda=%g: |c_qr - c_kkt| / |c_kkt| = %.1e", ns[k], lambda,
                   (cq - ck).norm() / ck.norm()));
    }
  }
  return out;
}

Outcome fvm_limit() {
  const Domain d = case_domain(2);
  const auto prob = exponential_problem(0.1);
  auto run = [&](Method m, double rho, Outcome& out) {
    SteadyParams p;
    p.space.nx = p.space.ny = 64;
    p.space.method = m;
    p.space.rho = rho;
    p.delta = 0.01;
    p.epsilon = 1e-2;
    const auto r = solve_model(d, prob, p);
    const double e = l2_error(r.disc.dofs, r.solution.c, prob.exact, d).l2_rel;
    out.note(fmt("%s rho=%g error %.4e%s", to_string(m), m == Method::lsc ? 0.0 : rho, e,
                 r.fvm_fallback.empty() ? "" : fmt(" (%zu fallback rows)", r.fvm_fallback.size()).c_str()));
    return e;
  };
  Outcome out;
  const double lsc = run(Method::lsc, 0.0, out);
  const double fvm = run(Method::lsfvm, 1e-4, out);
  out.check(std::abs(lsc - fvm) <= 1e-3 * lsc, fmt("rho=1e-4 matches collocation (relative gap %.1e)", std::abs(lsc - fvm) / lsc));
  double prev = 0.0;
  bool mono = true;
  for (double rho : {1e-3, 1e-2, 2e-2, 1e-1}) {
    const double e = run(Method::lsfvm, rho, out);
    mono = mono && e > prev;
    prev = e;
  }
  out.check(mono, "error increases with rho");
  return out;
}

Outcome conditioning() {
  const Domain d = Domain::circle({0, 0}, 0.76);
  Outcome out;
  for (DensityMode mode : {DensityMode::uniform, DensityMode::nonuniform}) {
    SteadyParams p;
    p.space.nx = p.space.ny = 4;
    p.space.p = p.space.q = 15;
    p.space.mode = mode;
    p.space.lambda = 1e4;
    p.space.box = Box{-1, 1, -1, 1};
    const auto disc = Discretization::build(d, p.space);
    LsBlocks b = steady_blocks(disc, exponential_problem(0.1), p);
    const auto s = singular_values(b, 32);
    const double smin = s.front(), smax = s.back();
    if (mode == DensityMode::uniform) {
      out.check(smin <= 1e-10 * smax, fmt("uniform set: sigma_min %.3e, sigma_max %.3e", smin, smax));
    } else {
      out.check(smin >= 1e-8 && smin < 1e-6, fmt("nonuniform set: sigma_min %.3e", smin));
    }
    for (double delta : {1e-10, 1e-6, 1e-2}) {
      b.delta = delta;
      const double m = smallest_singular_values(b, 1).front();
      out.check(m >= std::sqrt(delta) * (1 - 1e-12), fmt("%s, delta=%g: sigma_min %.6e >= sqrt(delta)",
                                                          mode == DensityMode::uniform ? "uniform" : "nonuniform", delta, m));
    }
  }
  return out;
}

Outcome steady_orders() {
  const auto prob = exponential_problem(0.1);
  const std::vector<int> ns{8, 16, 32, 64};
  Outcome out;
  auto series = [&](int cs, BoundaryKind bc, double delta) {
    const Domain d = case_domain(cs);
    std::vector<double> errs;
    std::string row;
    for (int n : ns) {
      SteadyParams p;
      p.space.nx = p.space.ny = n;
      p.bc = bc;
      p.delta = delta;
      p.epsilon = 1e-3;
      const auto r = solve_model(d, prob, p);
      errs.push_back(l2_error(r.disc.dofs, r.solution.c, prob.exact, d).l2_rel);
      row += fmt(" %.3e", errs.back());
    }
    const double o = fitted_order(ns, errs);
    out.check(o >= 1.8, fmt("case %d %s delta=%g: fitted order %.3f, errors%s", cs, to_string(bc), delta, o, row.c_str()));
  };
  for (int cs = 1; cs <= 4; ++cs) series(cs, BoundaryKind::dirichlet, 0.01);
  for (int cs = 1; cs <= 2; ++cs) series(cs, BoundaryKind::neumann, 1e-4);
  return out;
}

std::vector<double> powers(double g, double tau, std::size_t n) {
  std::vector<double> h(n + 1);
  for (std::size_t j = 0; j <= n; ++j) h[j] = std::pow(static_cast<double>(j) * tau, g);
  return h;
}

Outcome fractional_suite() {
  Outcome out;
  {
    const auto w = cq_weights(1.0, 64);
    bool exact = w[0] == 1.5 && w[1] == -2.0 && w[2] == 0.5;
    for (std::size_t k = 3; k < w.size(); ++k) exact = exact && w[k] == 0.0;
    out.check(exact, "alpha=1 weights are (3/2, -2, 1/2, 0, ...)");
  }
  {
    double worst = 0.0;
    const double tau = 1.0 / 1024;
    for (double alpha : {0.1, 0.5, 0.8}) {
      const auto s = FractionalScheme::standard(alpha, tau, 1024, 3, 0.0);
      for (int k = 1; k <= 3; ++k) {
        const double g = k * alpha;
        const auto h = powers(g, tau, 1024);
        for (std::size_t n = 1; n <= 1024; ++n) {
          const double t = static_cast<double>(n) * tau;
          const double exact = std::tgamma(g + 1) / std::tgamma(g + 1 - alpha) * std::pow(t, g - alpha);
          worst = std::max(worst, std::abs(apply_d_tau(s, h, n) - exact) / exact);
        }
      }
    }
    out.check(worst <= 1e-8, fmt("corrected operator exact on t^(k alpha), n <= 1024: worst relative %.2e", worst));
  }
  {
    double worst = 0.0;
    for (double alpha : {0.1, 0.5, 0.8}) {
      const auto g = default_exponents(alpha, 3);
      for (double gk : g) {
        const auto h = powers(gk, 1.0 / 256, 256);
        for (std::size_t n = g.size() + 1; n <= 256; ++n) worst = std::max(worst, std::abs(apply_e2(e2_weights(g, n), h, n)));
      }
    }
    out.check(worst <= 1e-12, fmt("E2 annihilates t^(k alpha): worst %.2e", worst));
  }
  {
    std::ifstream in(FRACOLLO_TEST_DATA "/mittag_leffler.csv");
    std::string line;
    std::getline(in, line);
    double worst = 0.0;
    int rows = 0;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string a, z, v;
      std::getline(ss, a, ',');
      std::getline(ss, z, ',');
      std::getline(ss, v, ',');
      const double ref = std::stod(v);
      worst = std::max(worst, std::abs(mittag_leffler(std::stod(a), std::stod(z)) - ref) / std::max(1.0, std::abs(ref)));
      ++rows;
    }
    out.check(rows > 0 && worst <= 1e-10, fmt("Mittag-Leffler vs oracle, %d values: worst %.2e", rows, worst));
  }
  {
    auto slope = [](double alpha, int m, const std::function<double(double)>& exact) {
      double e[2];
      int i = 0;
      for (double tau : {1.0 / 64, 1.0 / 128}) {
        const auto r = solve_fivp(alpha, -1.0, [](double, double) { return 0.0; }, 1.0, 0.0, tau, m, 1.0);
        e[i++] = std::abs(r.u.back() - exact(1.0));
      }
      return std::log2(e[0] / e[1]);
    };
    const double s1 = slope(1.0, 1, [](double t) { return std::exp(-t); });
    out.check(std::abs(s1 - 2) <= 0.1, fmt("scalar IVP alpha=1 slope %.3f", s1));
    const double s2 = slope(0.5, 3, [](double t) { return mittag_leffler(0.5, -std::sqrt(t)); });
    out.check(std::abs(s2 - 2) <= 0.2, fmt("scalar IVP alpha=0.5 slope %.3f", s2));
  }
  return out;
}

Outcome coupled() {
  Outcome out;
  const Domain inner = coupled_inner_domain();
  const Domain outer = coupled_outer_domain();
  {
    const auto prob = coupled_manufactured(0.5, 0.5);
    CoupledParams p;
    p.space.nx = p.space.ny = 32;
    p.space.box = coupled_box();
    const auto r = solve_coupled(inner, outer, prob, p);
    const auto eu = l2_error(r.inner.dofs, r.final_u, [&](Point q) { return prob.exact_u(q, p.T); }, inner);
    const auto ev = l2_error(r.outer.dofs, r.final_v, [&](Point q) { return prob.exact_v(q, p.T); }, outer);
    out.check(within_ratio(eu.l2_abs, 2.9992e-5, 3.0), fmt("u error %.4e, printed 2.9992e-5", eu.l2_abs));
    out.check(within_ratio(ev.l2_abs, 2.7286e-5, 3.0), fmt("v error %.4e, printed 2.7286e-5", ev.l2_abs));
    out.check(r.interface_jump <= 1e-6 * eu.exact_norm,
              fmt("interface jump %.2e <= 1e-6 |u| = %.2e", r.interface_jump, 1e-6 * eu.exact_norm));
  }
  {
    struct Run {
      double alpha, beta;
      std::vector<double> nu, nv;
    };
    std::vector<Run> runs{{0.2, 0.2, {}, {}}, {0.8, 0.8, {}, {}}, {0.2, 0.8, {}, {}}};
    for (auto& run : runs) {
      const auto prob = coupled_oscillating(run.alpha, run.beta);
      CoupledParams p;
      p.space.nx = p.space.ny = 16;
      p.space.box = coupled_box();
      p.tau = 0x1p-7;
      p.T = 1.0;
      const auto zero = [](Point) { return 0.0; };
      std::optional<DofMap> du, dv;
      std::vector<Eigen::VectorXd> su, sv;
      solve_coupled(inner, outer, prob, p, [&](std::size_t n, double, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        if (n % 16 == 0) {
          su.push_back(a);
          sv.push_back(b);
        }
      });
      const auto disc_u = Discretization::build(inner, p.space);
      const auto disc_v = Discretization::build(outer, p.space);
      for (const auto& c : su) run.nu.push_back(l2_error(disc_u.dofs, c, zero, inner, 101).l2_abs);
      for (const auto& c : sv) run.nv.push_back(l2_error(disc_v.dofs, c, zero, outer, 101).l2_abs);
      if (run.alpha == run.beta) {
        bool mono = true;
        for (std::size_t k = 1; k < run.nu.size(); ++k) mono = mono && run.nu[k] < run.nu[k - 1] && run.nv[k] < run.nv[k - 1];
        out.check(mono, fmt("alpha=beta=%g: |u|, |v| decrease in t (|u(1)| %.3e, |v(1)| %.3e)", run.alpha,
                            run.nu.back(), run.nv.back()));
      }
    }
    out.check(runs[1].nu.back() < runs[0].nu.back() && runs[1].nv.back() < runs[0].nv.back(),
              "larger alpha = beta decays faster at t = 1");
    const double ru = runs[2].nu.back() / runs[2].nu.front();
    const double rv = runs[2].nv.back() / runs[2].nv.front();
    out.check(ru > rv, fmt("alpha=0.2, beta=0.8: u retains %.3e, v retains %.3e", ru, rv));
  }
  return out;
}

bool polygon_contains(const std::vector<Point>& poly, Point p) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point a = poly[i], b = poly[j];
    if ((a.y > p.y) != (b.y > p.y) && p.x < (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

Outcome basis_geometry() {
  Outcome out;
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0, 1);
  const Domain sq = Domain::rectangle({0, 1, 0, 1});
  const auto dm = DofMap::build(BackgroundMesh::uniform(sq, 5, 7));
  {
    double worst = 0.0;
    for (int px = 0; px <= 3; ++px) {
      for (int py = 0; py <= 3; ++py) {
        auto mono = [&](double x, int k) { return k < 0 ? 0.0 : std::pow(x, k); };
        const auto c = dm.interpolate([&](Point p) {
          return std::array<double, 4>{mono(p.x, px) * mono(p.y, py), px * mono(p.x, px - 1) * mono(p.y, py),
                                       py * mono(p.x, px) * mono(p.y, py - 1),
                                       px * py * mono(p.x, px - 1) * mono(p.y, py - 1)};
        });
        for (int k = 0; k < 200; ++k) {
          const Point p{u(gen), u(gen)};
          worst = std::max(worst, std::abs(dm.eval(c, p, Deriv::id) - mono(p.x, px) * mono(p.y, py)));
        }
      }
    }
    out.check(worst <= 1e-10, fmt("bicubic reproduction: worst %.2e", worst));
  }
  Eigen::VectorXd c(dm.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = 2 * u(gen) - 1;
  {
    double worst = 0.0;
    const auto& gx = dm.mesh().grid_x();
    const auto& gy = dm.mesh().grid_y();
    for (int i = 1; i < dm.mesh().nx(); ++i) {
      for (int j = 0; j < dm.mesh().ny(); ++j) {
        const Point p{gx[i], gy[j] + u(gen) * (gy[j + 1] - gy[j])};
        for (Deriv k : {Deriv::id, Deriv::dx, Deriv::dy}) {
          worst = std::max(worst, std::abs(dm.row_in_cell({i - 1, j}, p, k).dot(c) - dm.row_in_cell({i, j}, p, k).dot(c)));
        }
      }
    }
    for (int j = 1; j < dm.mesh().ny(); ++j) {
      for (int i = 0; i < dm.mesh().nx(); ++i) {
        const Point p{gx[i] + u(gen) * (gx[i + 1] - gx[i]), gy[j]};
        for (Deriv k : {Deriv::id, Deriv::dx, Deriv::dy}) {
          worst = std::max(worst, std::abs(dm.row_in_cell({i, j - 1}, p, k).dot(c) - dm.row_in_cell({i, j}, p, k).dot(c)));
        }
      }
    }
    out.check(worst <= 1e-10, fmt("C1 continuity across cell edges: worst %.2e", worst));
  }
  {
    const double h = 1e-4;
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const Point p{0.02 + 0.96 * u(gen), 0.02 + 0.96 * u(gen)};
      const auto cell = dm.mesh().locate(p).value();
      const Box b = dm.mesh().cell_box(cell.i, cell.j);
      if (p.x - h <= b.x_min || p.x + h >= b.x_max || p.y - h <= b.y_min || p.y + h >= b.y_max) continue;
      auto v = [&](double x, double y) { return dm.row_in_cell(cell, {x, y}, Deriv::id).dot(c); };
      const double fd = (v(p.x + h, p.y) + v(p.x - h, p.y) + v(p.x, p.y + h) + v(p.x, p.y - h) - 4 * v(p.x, p.y)) / (h * h);
      const double lap = dm.row_in_cell(cell, p, Deriv::laplacian).dot(c);
      worst = std::max(worst, std::abs(fd - lap) / std::max(1.0, std::abs(lap)));
    }
    out.check(worst <= 1e-5, fmt("Laplacian vs central differences: worst relative %.2e", worst));
  }
  {
    double worst = 1.0;
    for (int cs = 1; cs <= 4; ++cs) {
      const Domain d = case_domain(cs);
      const Curve& cv = d.curve(0);
      std::vector<Point> poly(20000);
      for (std::size_t k = 0; k < poly.size(); ++k) {
        poly[k] = cv.point(cv.t_begin() + (cv.t_end() - cv.t_begin()) * static_cast<double>(k) / static_cast<double>(poly.size()));
      }
      const Box b = d.bounding_box();
      int agree = 0;
      const int n = 100000;
      for (int k = 0; k < n; ++k) {
        const Point p{b.x_min + u(gen) * b.width(), b.y_min + u(gen) * b.height()};
        agree += d.contains(p) == polygon_contains(poly, p) ? 1 : 0;
      }
      worst = std::min(worst, static_cast<double>(agree) / n);
    }
    out.check(worst >= 0.9999, fmt("inside test vs winding oracle: worst agreement %.6f", worst));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::vector<int> which;
  app.add_option("--criterion,-c", which, "criteria to run (default: all)")->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"rectangle time-fractional table", table_rectangle},
      {"QR and KKT paths agree", cross_path},
      {"finite-volume limit", fvm_limit},
      {"conditioning of the collocation stack", conditioning},
      {"steady convergence orders", steady_orders},
      {"fractional operator properties", fractional_suite},
      {"coupled system", coupled},
      {"basis and geometry properties", basis_geometry}};

  bool all = true;
  for (int k : which) {
    const auto& [name, fn] = criteria[static_cast<std::size_t>(k - 1)];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%.1f s)\n", k, o.pass ? "PASS" : "FAIL", name, secs);
    for (const auto& l : o.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
