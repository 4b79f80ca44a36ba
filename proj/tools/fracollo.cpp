#include "fracollo/config.hpp"
#include "fracollo/errors.hpp"
#include "fracollo/harness.hpp"
#include "fracollo/lsq.hpp"
#include "fracollo/solver.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace fracollo;

namespace {

struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> path;
};

RunConfig load(const std::string& file, const Overrides& o) {
  RunConfig cfg = load_config(file);
  if (o.out) cfg.out_dir = *o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.path) {
    try {
      cfg.space.path = solver_path_from_string(*o.path);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  fs::create_directories(cfg.out_dir);
  return cfg;
}

std::ofstream open_csv(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << std::setprecision(10);
  return out;
}

int n_of(const RunConfig& cfg) { return std::max(cfg.space.nx, cfg.space.ny); }

void write_singular_values(const std::vector<double>& s, std::size_t count, const fs::path& p) {
  auto out = open_csv(p);
  out << "index,sigma\n";
  for (std::size_t k = 0; k < std::min(count, s.size()); ++k) out << k << ',' << s[k] << '\n';
  out << "max," << s.back() << '\n';
}

// --- solve-model ------------------------------------------------------------

ErrorReport run_model(const RunConfig& cfg, const fs::path& dir, bool log) {
  const Domain d = make_domain(cfg);
  const SteadyProblem prob = make_steady_problem(cfg);
  const SteadyParams p = steady_params(cfg);
  const SteadyResult r = solve_model(d, prob, p);
  const ErrorReport e = l2_error(r.disc.dofs, r.solution.c, prob.exact, d, cfg.lattice);
  if (log) {
    std::printf("N=%d M=%d interior=%zu boundary=%zu  error %.6e (relative %.6e)  %.2f s\n", n_of(cfg),
                r.disc.dofs.size(), r.disc.points.interior.size(), r.disc.points.boundary.size(), e.l2_abs,
                e.l2_rel, r.seconds);
    for (const auto& w : r.solution.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    auto out = open_csv(dir / "summary.csv");
    out << "N,M,interior,boundary,l2_abs,l2_rel,residual_interior,residual_boundary\n"
        << n_of(cfg) << ',' << r.disc.dofs.size() << ',' << r.disc.points.interior.size() << ','
        << r.disc.points.boundary.size() << ',' << e.l2_abs << ',' << e.l2_rel << ','
        << r.solution.residual_interior << ',' << r.solution.residual_boundary << '\n';
    if (cfg.export_fields) export_field(r.disc.dofs, r.solution.c, d, cfg.lattice, cfg.lattice, dir / "field.csv");
  }
  return e;
}

// --- solve-tfpde ------------------------------------------------------------

ErrorReport run_tfpde(const RunConfig& cfg, const fs::path& dir, bool log) {
  const Domain d = make_domain(cfg);
  const TfpdeProblem prob = make_tfpde_problem(cfg);
  TfpdeParams p = tfpde_params(cfg, d);
  if (cfg.kappa_auto) {
    const KappaEstimate k = estimate_kappa(d, prob, cfg.T);
    p.kappa = k.kappa;
    if (log) {
      std::printf("kappa %.4f (max |f_u| %.4f)%s%s\n", k.kappa, k.max_derivative, k.fallback ? ", fallback: " : "",
                  k.note.c_str());
    }
  }
  std::vector<std::pair<double, Eigen::VectorXd>> snaps;
  std::vector<std::size_t> wanted;
  for (double t : cfg.record_times) wanted.push_back(static_cast<std::size_t>(std::llround(t / p.tau)));
  const TrajectoryObserver obs = [&](std::size_t n, double t, const Eigen::VectorXd& c) {
    for (std::size_t w : wanted) {
      if (w == n) snaps.emplace_back(t, c);
    }
  };
  const TfpdeResult r = solve_tfpde(d, prob, p, log ? obs : TrajectoryObserver{});
  ErrorReport e;
  if (prob.exact) {
    e = l2_error(r.disc.dofs, r.final, [&](Point q) { return prob.exact(q, p.T); }, d, cfg.lattice);
  } else {
    e = l2_error(r.disc.dofs, r.final, [](Point) { return 0.0; }, d, cfg.lattice);
    e.l2_rel = std::nan("");
  }
  if (log) {
    std::printf("N=%d steps=%zu kappa=%g  error %.6e (relative %.6e)  factor %.2f s, %.4f s/step\n", n_of(cfg),
                r.steps, p.kappa, e.l2_abs, e.l2_rel, r.factor_seconds, r.step_seconds);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    auto out = open_csv(dir / "summary.csv");
    out << "N,steps,tau,T,alpha,m,kappa,l2_abs,l2_rel\n"
        << n_of(cfg) << ',' << r.steps << ',' << p.tau << ',' << p.T << ',' << prob.alpha << ',' << p.m << ','
        << p.kappa << ',' << e.l2_abs << ',' << e.l2_rel << '\n';
    if (!snaps.empty()) {
      auto tr = open_csv(dir / "trajectory.csv");
      tr << "t,l2_norm,l2_abs\n";
      for (std::size_t k = 0; k < snaps.size(); ++k) {
        const auto& [t, c] = snaps[k];
        const double nrm = l2_error(r.disc.dofs, c, [](Point) { return 0.0; }, d, cfg.lattice).l2_abs;
        const double err = prob.exact ? l2_error(r.disc.dofs, c, [&](Point q) { return prob.exact(q, t); }, d,
                                                 cfg.lattice).l2_abs
                                      : std::nan("");
        tr << t << ',' << nrm << ',' << err << '\n';
        if (cfg.export_fields) {
          export_field(r.disc.dofs, c, d, cfg.lattice, cfg.lattice, dir / ("field_" + std::to_string(k) + ".csv"));
        }
      }
    }
    if (cfg.export_fields) export_field(r.disc.dofs, r.final, d, cfg.lattice, cfg.lattice, dir / "field.csv");
  }
  return e;
}

// --- solve-coupled ----------------------------------------------------------

std::pair<ErrorReport, ErrorReport> run_coupled(const RunConfig& cfg, const fs::path& dir, bool log) {
  const Domain inner = coupled_inner_domain();
  const Domain outer = coupled_outer_domain();
  const CoupledProblem prob = make_coupled_problem(cfg);
  const CoupledParams p = coupled_params(cfg);
  const CoupledResult r = solve_coupled(inner, outer, prob, p);
  auto err = [&](const DofMap& dm, const Eigen::VectorXd& c, const SpaceTimeFn& exact, const Domain& d) {
    if (exact) return l2_error(dm, c, [&](Point q) { return exact(q, p.T); }, d, cfg.lattice);
    ErrorReport e = l2_error(dm, c, [](Point) { return 0.0; }, d, cfg.lattice);
    e.l2_rel = std::nan("");
    return e;
  };
  const ErrorReport eu = err(r.inner.dofs, r.final_u, prob.exact_u, inner);
  const ErrorReport ev = err(r.outer.dofs, r.final_v, prob.exact_v, outer);
  if (log) {
    std::printf("N=%d steps=%zu  u error %.6e  v error %.6e  interface jump %.3e, flux jump %.3e  factor %.2f s, "
                "%.4f s/step\n",
                n_of(cfg), r.steps, eu.l2_abs, ev.l2_abs, r.interface_jump, r.interface_flux_jump, r.factor_seconds,
                r.step_seconds);
    for (const auto& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    auto out = open_csv(dir / "summary.csv");
    out << "N,steps,alpha,beta,u_l2_abs,u_l2_rel,v_l2_abs,v_l2_rel,interface_jump,interface_flux_jump\n"
        << n_of(cfg) << ',' << r.steps << ',' << prob.alpha << ',' << prob.beta << ',' << eu.l2_abs << ','
        << eu.l2_rel << ',' << ev.l2_abs << ',' << ev.l2_rel << ',' << r.interface_jump << ','
        << r.interface_flux_jump << '\n';
    if (cfg.export_fields) {
      export_field(r.inner.dofs, r.final_u, inner, cfg.lattice, cfg.lattice, dir / "field_u.csv");
      export_field(r.outer.dofs, r.final_v, outer, cfg.lattice, cfg.lattice, dir / "field_v.csv");
    }
  }
  return {eu, ev};
}

// --- convergence ------------------------------------------------------------

void run_convergence(const RunConfig& cfg) {
  auto with_n = [&](int n) {
    RunConfig c = cfg;
    c.space.nx = c.space.ny = n;
    c.export_fields = false;
    return c;
  };
  const fs::path dir = cfg.out_dir;
  if (cfg.study_target == "coupled") {
    std::vector<double> ev(cfg.study_n.size(), std::nan(""));
    const auto rows = convergence_study(cfg.study_n, [&](int n) {
      const auto [u, v] = run_coupled(with_n(n), dir, false);
      for (std::size_t k = 0; k < cfg.study_n.size(); ++k) {
        if (cfg.study_n[k] == n) ev[k] = v.l2_abs;
      }
      return u.l2_abs;
    });
    write_study(rows, dir / "convergence_u.csv");
    std::vector<StudyRow> vrows = rows;
    const StudyRow* prev = nullptr;
    for (std::size_t k = 0; k < vrows.size(); ++k) {
      vrows[k].error = ev[k];
      vrows[k].order.reset();
      if (!vrows[k].failure.empty()) continue;
      if (prev) vrows[k].order = observed_order(prev->n, prev->error, vrows[k].n, vrows[k].error);
      prev = &vrows[k];
    }
    write_study(vrows, dir / "convergence_v.csv");
    for (std::size_t k = 0; k < rows.size(); ++k) {
      std::printf("N=%-4d u %.4e %s  v %.4e %s %s\n", rows[k].n, rows[k].error,
                  rows[k].order ? std::to_string(*rows[k].order).c_str() : "        ", vrows[k].error,
                  vrows[k].order ? std::to_string(*vrows[k].order).c_str() : "        ", rows[k].failure.c_str());
    }
    return;
  }
  const bool tfpde = cfg.study_target == "tfpde";
  const auto rows = convergence_study(cfg.study_n, [&](int n) {
    return tfpde ? run_tfpde(with_n(n), dir, false).l2_abs : run_model(with_n(n), dir, false).l2_abs;
  });
  write_study(rows, dir / "convergence.csv");
  for (const auto& r : rows) {
    std::printf("N=%-4d %.4e %s %s\n", r.n, r.error, r.order ? std::to_string(*r.order).c_str() : "        ",
                r.failure.c_str());
  }
}

// --- diagnose-svd -----------------------------------------------------------

void run_svd(const RunConfig& cfg) {
  const Domain d = make_domain(cfg);
  const SteadyParams p = steady_params(cfg);
  const Discretization disc = Discretization::build(d, p.space);
  LsBlocks b = steady_blocks(disc, make_steady_problem(cfg), p);
  b.delta = cfg.delta.value_or(0.0);
  const auto s = singular_values(b, cfg.svd_count);
  std::printf("M=%d rows=%ld  sigma_min %.6e  sigma_max %.6e  condition %.3e\n", disc.dofs.size(),
              static_cast<long>(b.op.rows() + b.boundary.rows()), s.front(), s.back(), s.back() / s.front());
  write_singular_values(s, cfg.svd_count, fs::path(cfg.out_dir) / "singular_values.csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Least-squares collocation solvers on irregular domains"};
  app.require_subcommand(1);
  Overrides o;
  std::string file;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", file, "JSON run description")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", o.seed, "seed of the reference perturbation");
    sub->add_option("--path", o.path, "least-squares solver path")->check(CLI::IsMember({"qr", "kkt", "normal"}));
    return sub;
  };
  CLI::App* model = add("solve-model", "steady problem u - nu Lap u = f");
  CLI::App* tfpde = add("solve-tfpde", "time-fractional reaction-diffusion problem");
  CLI::App* coupled = add("solve-coupled", "two-domain coupled time-fractional system");
  CLI::App* conv = add("convergence", "error table over study.N");
  CLI::App* svd = add("diagnose-svd", "singular values of the stacked steady matrix");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = load(file, o);
    const fs::path dir = cfg.out_dir;
    if (*model) run_model(cfg, dir, true);
    else if (*tfpde) run_tfpde(cfg, dir, true);
    else if (*coupled) run_coupled(cfg, dir, true);
    else if (*conv) run_convergence(cfg);
    else if (*svd) run_svd(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
