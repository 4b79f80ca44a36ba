#include "fracollo/solver.hpp"

#include "fracollo/errors.hpp"
#include "fracollo/fractional_time.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracollo {

const char* to_string(Method m) { return m == Method::lsc ? "lsc" : "lsfvm"; }

Method method_from_string(const std::string& s) {
  if (s == "lsc") return Method::lsc;
  if (s == "lsfvm") return Method::lsfvm;
  throw ConfigError("unknown method '" + s + "' (expected lsc or lsfvm)");
}

const char* to_string(BoundaryKind b) { return b == BoundaryKind::dirichlet ? "dirichlet" : "neumann"; }

BoundaryKind boundary_kind_from_string(const std::string& s) {
  if (s == "dirichlet") return BoundaryKind::dirichlet;
  if (s == "neumann") return BoundaryKind::neumann;
  throw ConfigError("unknown boundary condition '" + s + "' (expected dirichlet or neumann)");
}

std::size_t SpaceParams::boundary_count() const {
  if (n_boundary > 0) return n_boundary;
  return 4 * static_cast<std::size_t>(std::max(nx, ny));
}

Discretization Discretization::build(const Domain& domain, const SpaceParams& params) {
  const BackgroundMesh mesh = params.box ? BackgroundMesh::uniform(domain, *params.box, params.nx, params.ny)
                                         : BackgroundMesh::uniform(domain, params.nx, params.ny);
  CollocationSet pts =
      build_collocation_set(mesh, domain, params.p, params.q, params.mode, params.boundary_count());
  return {DofMap::build(mesh), std::move(pts)};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd sample(const SpaceFn& f, std::span<const Point> pts) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(pts[i]);
  return v;
}

Eigen::VectorXd sample(const SpaceTimeFn& f, std::span<const Point> pts, double t) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(pts[i], t);
  return v;
}

std::vector<Point> points_of(std::span<const BoundarySample> s) {
  std::vector<Point> out;
  out.reserve(s.size());
  for (const auto& b : s) out.push_back(b.point);
  return out;
}

// Operator pair (lift, Laplacian analog) for the chosen spatial method.
struct SpatialOperators {
  SpMat A;      // plain point values
  SpMat A_op;   // A or its control-volume analog
  SpMat S_op;   // Laplacian or discrete flux
  std::vector<std::size_t> fallback;
};

SpatialOperators spatial_operators(const Discretization& disc, const SpaceParams& sp) {
  SpatialOperators out;
  const auto& pts = disc.points.interior;
  if (sp.method == Method::lsc) {
    auto blocks = assemble_collocation(disc.dofs, pts);
    out.A = blocks.A;
    out.A_op = std::move(blocks.A);
    out.S_op = std::move(blocks.S);
  } else {
    out.A = assemble_rows(disc.dofs, pts, Deriv::id);
    auto fvm = assemble_fvm(disc.dofs, pts, sp.rho, sp.flux_nodes, sp.flux_rule);
    out.A_op = std::move(fvm.A);
    out.S_op = std::move(fvm.S);
    out.fallback = std::move(fvm.fallback);
  }
  return out;
}

// Least-squares projection of nodal data onto the spline space.
Eigen::VectorXd project(const SpMat& A, const Eigen::VectorXd& values, const SpMat& B, const Eigen::VectorXd& bvalues,
                        double lambda, double delta) {
  LsFactorization f(A, B, lambda, delta, SolverPath::qr);
  return f.solve(values, bvalues, Eigen::VectorXd::Zero(A.cols())).c;
}

}  // namespace

LsBlocks steady_blocks(const Discretization& disc, const SteadyProblem& problem, const SteadyParams& params,
                       std::vector<std::size_t>* fvm_fallback) {
  if (!(problem.nu > 0.0)) throw ConfigError("diffusion coefficient nu must be positive");
  const auto ops = spatial_operators(disc, params.space);
  if (fvm_fallback) *fvm_fallback = ops.fallback;
  const auto& dm = disc.dofs;
  const auto& bs = disc.points.boundary;
  const std::vector<Point> bpts = points_of(bs);

  LsBlocks b;
  b.lambda = params.space.lambda;
  const SpMat interior = ops.A_op - problem.nu * ops.S_op;
  const Eigen::VectorXd f_in = sample(problem.source, disc.points.interior);
  if (params.bc == BoundaryKind::dirichlet) {
    b.op = interior;
    b.rhs = f_in;
    b.boundary = assemble_dirichlet(dm, bs);
    b.boundary_data = sample(problem.exact, bpts);
  } else {
    if (!problem.exact_gradient) throw ConfigError("Neumann data needs the exact gradient");
    const double w = params.neumann_weight > 0.0 ? params.neumann_weight : default_neumann_weight(dm.mesh());
    const SpMat rows = assemble_neumann(dm, bs, problem.nu, w);
    Eigen::VectorXd g(static_cast<Eigen::Index>(bs.size()));
    for (std::size_t i = 0; i < bs.size(); ++i) {
      g[static_cast<Eigen::Index>(i)] = dot(problem.exact_gradient(bs[i].point), bs[i].normal);
    }
    const Eigen::VectorXd f_b = sample(problem.source, bpts);
    b.op = vstack({&interior, &rows});
    b.rhs.resize(f_in.size() + f_b.size());
    b.rhs << f_in, neumann_rhs(f_b, g, w);
    b.boundary = SpMat(0, dm.size());
    b.boundary_data = Eigen::VectorXd(0);
  }
  return b;
}

SteadyResult solve_model(const Domain& domain, const SteadyProblem& problem, const SteadyParams& params) {
  if (params.delta < 0.0 || params.epsilon < 0.0) throw ConfigError("delta and epsilon must be non-negative");
  const auto t0 = Clock::now();
  SteadyResult res{Discretization::build(domain, params.space), {}, {}, {}, 0.0};
  LsBlocks b = steady_blocks(res.disc, problem, params, &res.fvm_fallback);
  if (params.delta > 0.0) {
    const Eigen::VectorXd boot = bootstrap_reference(b, SolverPath::qr, params.delta0);
    b.d_star = perturb_reference(boot, params.epsilon, params.seed);
    b.delta = params.delta;
    res.reference = b.d_star;
  }
  res.solution = solve(b, params.space.path);
  if (!res.fvm_fallback.empty()) {
    res.solution.warnings.push_back(std::to_string(res.fvm_fallback.size()) +
                                    " control volumes left the active mesh; collocation rows used there");
  }
  res.seconds = seconds_since(t0);
  return res;
}

TfpdeResult solve_tfpde(const Domain& domain, const TfpdeProblem& problem, const TfpdeParams& params,
                        const TrajectoryObserver& observer) {
  if (!(params.tau > 0.0) || !(params.T > 0.0)) throw ConfigError("tau and T must be positive");
  if (params.r != 0 && params.r != 1) throw ConfigError("reference rule r must be 0 or 1");
  if (params.m < 0) throw ConfigError("correction count m must be non-negative");
  if (params.delta < 0.0) throw ConfigError("delta must be non-negative");
  const auto steps = static_cast<std::size_t>(std::llround(params.T / params.tau));
  if (std::fabs(static_cast<double>(steps) * params.tau - params.T) > 1e-9 * params.T) {
    throw ConfigError("T must be an integer multiple of tau");
  }

  TfpdeResult res{Discretization::build(domain, params.space), {}, {}, steps, 0.0, 0.0, {}, {}};
  const auto& dm = res.disc.dofs;
  const auto& pts = res.disc.points.interior;
  const auto& bs = res.disc.points.boundary;
  const std::vector<Point> bpts = points_of(bs);
  const auto ops = spatial_operators(res.disc, params.space);
  res.fvm_fallback = ops.fallback;
  const SpMat Ab = assemble_dirichlet(dm, bs);

  const FractionalScheme scheme =
      FractionalScheme::standard(problem.alpha, params.tau, steps, params.m, params.kappa);
  const double ta = scheme.tau_alpha();
  const SpMat op = (scheme.omega()[0] + params.kappa * ta) * ops.A_op - problem.nu * ta * ops.S_op;

  const auto t_fact = Clock::now();
  const LsFactorization fac(op, Ab, params.space.lambda, params.delta, params.space.path);
  res.factor_seconds = seconds_since(t_fact);
  res.warnings = fac.warnings();

  res.initial = project(ops.A, sample(problem.initial, pts), Ab, sample(problem.initial, bpts), params.space.lambda,
                        params.projection_delta);

  TimeField field;
  field.scheme = &scheme;
  field.offset = 0;
  field.size = dm.size();
  field.lift = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(ops.A_op * v); };
  if (problem.reaction) {
    field.reaction = [&](const Eigen::VectorXd& c, double t) {
      const Eigen::VectorXd u = ops.A * c;
      Eigen::VectorXd out(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = problem.reaction(u[i], pts[static_cast<std::size_t>(i)], t);
      return out;
    };
  }
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dm.size());
  StepSolve step = [&](const Eigen::VectorXd& rhs, std::size_t n, const Eigen::VectorXd& prev) {
    const double t = static_cast<double>(n) * params.tau;
    return fac.solve(rhs, sample(problem.boundary, bpts, t), params.r == 1 ? prev : zero).c;
  };
  if (observer) observer(0, 0.0, res.initial);
  Eigen::VectorXd last = res.initial;
  StepObserver obs = [&](std::size_t n, const Eigen::VectorXd& c) {
    last = c;
    if (observer) observer(n, static_cast<double>(n) * params.tau, c);
  };
  const std::array<TimeField, 1> fields{field};
  const auto t_steps = Clock::now();
  run_fractional_stepper(fields, res.initial, step, params.stepper, obs);
  res.step_seconds = steps > 0 ? seconds_since(t_steps) / static_cast<double>(steps) : 0.0;
  res.final = last;
  return res;
}

KappaEstimate estimate_kappa(const Domain& domain, const TfpdeProblem& problem, double T, int n_coarse,
                             std::size_t coarse_steps, double fallback_kappa) {
  KappaEstimate est;
  if (!problem.reaction_du || !problem.reaction) {
    est.kappa = fallback_kappa;
    est.fallback = true;
    est.note = "no reaction derivative available";
    return est;
  }
  SpaceParams sp;
  sp.nx = sp.ny = n_coarse;
  const Discretization disc = Discretization::build(domain, sp);
  const auto& dm = disc.dofs;
  const auto& pts = disc.points.interior;
  const std::vector<Point> bpts = points_of(disc.points.boundary);
  const auto blocks = assemble_collocation(dm, pts);
  const SpMat Ab = assemble_dirichlet(dm, disc.points.boundary);
  const double tau = T / static_cast<double>(coarse_steps);
  const FractionalScheme scheme = FractionalScheme::standard(problem.alpha, tau, coarse_steps, 0, 0.0);
  const auto& om = scheme.omega();
  const double ta = scheme.tau_alpha();
  const SpMat L = om[0] * blocks.A - problem.nu * ta * blocks.S;
  constexpr double kDelta = 1e-10;

  std::vector<Eigen::VectorXd> c;
  c.push_back(project(blocks.A, sample(problem.initial, pts), Ab, sample(problem.initial, bpts), sp.lambda, kDelta));
  auto track = [&](const Eigen::VectorXd& d, double t) {
    const Eigen::VectorXd u = blocks.A * d;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      est.max_derivative =
          std::max(est.max_derivative, std::fabs(problem.reaction_du(u[i], pts[static_cast<std::size_t>(i)], t)));
    }
  };
  track(c[0], 0.0);
  for (std::size_t n = 1; n <= coarse_steps; ++n) {
    const double t = static_cast<double>(n) * tau;
    Eigen::VectorXd mem = om[0] * c[0];
    for (std::size_t j = 1; j < n; ++j) mem -= om[n - j] * (c[j] - c[0]);
    const Eigen::VectorXd target = blocks.A * mem;
    const Eigen::VectorXd ub = sample(problem.boundary, bpts, t);
    Eigen::VectorXd d = c.back();
    bool ok = false;
    for (int it = 0; it < 25; ++it) {
      const Eigen::VectorXd u = blocks.A * d;
      Eigen::VectorXd fu(u.size());
      Eigen::VectorXd fv(u.size());
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const Point p = pts[static_cast<std::size_t>(i)];
        fv[i] = problem.reaction(u[i], p, t);
        fu[i] = problem.reaction_du(u[i], p, t);
      }
      const Eigen::VectorXd resid = L * d - ta * fv - target;
      const SpMat DA = fu.asDiagonal() * blocks.A;
      const SpMat J = L - ta * DA;
      LsFactorization f(J, Ab, sp.lambda, kDelta, SolverPath::qr);
      const Eigen::VectorXd step = f.solve(-resid, ub - Ab * d, Eigen::VectorXd::Zero(dm.size())).c;
      d += step;
      if (!d.allFinite()) break;
      if (step.lpNorm<Eigen::Infinity>() <= 1e-10 * std::max(1.0, d.lpNorm<Eigen::Infinity>())) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      est.kappa = fallback_kappa;
      est.fallback = true;
      est.note = "Newton iteration failed at coarse step " + std::to_string(n);
      return est;
    }
    c.push_back(d);
    track(d, t);
  }
  est.kappa = 1.5 * 0.75 * est.max_derivative;
  return est;
}

CoupledResult solve_coupled(const Domain& inner, const Domain& outer, const CoupledProblem& problem,
                            const CoupledParams& params, const CoupledObserver& observer) {
  if (!(params.tau > 0.0) || !(params.T > 0.0)) throw ConfigError("tau and T must be positive");
  if (!(problem.mu > 0.0) || !(problem.nu > 0.0)) throw ConfigError("diffusion coefficients must be positive");
  const auto steps = static_cast<std::size_t>(std::llround(params.T / params.tau));
  if (std::fabs(static_cast<double>(steps) * params.tau - params.T) > 1e-9 * params.T) {
    throw ConfigError("T must be an integer multiple of tau");
  }
  SpaceParams sp = params.space;
  if (!sp.box) sp.box = outer.bounding_box();
  if (sp.method != Method::lsc) throw ConfigError("the coupled solver supports the collocation method only");
  const std::size_t nb = sp.boundary_count();
  const std::size_t nc = params.n_interface > 0 ? params.n_interface : nb;

  CoupledResult res{Discretization::build(inner, sp), Discretization::build(outer, sp), {}, {}, {}, steps,
                    0.0, 0.0, 0.0, 0.0, {}};
  res.inner.points.boundary = inner.sample_boundary(nc);
  res.interface = res.inner.points.boundary;
  res.outer.points.boundary = outer.sample_curve(0, nb);
  const auto& du = res.inner.dofs;
  const auto& dv = res.outer.dofs;
  const auto& pu = res.inner.points.interior;
  const auto& pv = res.outer.points.interior;
  const std::vector<Point> outer_pts = points_of(res.outer.points.boundary);
  const std::vector<Point> iface_pts = points_of(res.interface);
  const Eigen::Index Mu = du.size();
  const Eigen::Index Mv = dv.size();

  const auto bu = assemble_collocation(du, pu);
  const auto bv = assemble_collocation(dv, pv);
  const FractionalScheme su = FractionalScheme::standard(problem.alpha, params.tau, steps, params.m, 0.0);
  const FractionalScheme sv = FractionalScheme::standard(problem.beta, params.tau, steps, params.m_tilde, 0.0);
  const SpMat op_u = su.omega()[0] * bu.A - problem.mu * su.tau_alpha() * bu.S;
  const SpMat op_v = sv.omega()[0] * bv.A - problem.nu * sv.tau_alpha() * bv.S;
  const SpMat op = blockdiag(op_u, op_v);

  const SpMat Abv = assemble_dirichlet(dv, res.outer.points.boundary);
  const SpMat outer_rows = hstack(SpMat(Abv.rows(), Mu), Abv);
  const auto iface = assemble_interface(du, dv, res.interface);
  const SpMat boundary = vstack({&outer_rows, &iface.continuity, &iface.flux});

  const auto t_fact = Clock::now();
  const LsFactorization fac(op, boundary, sp.lambda, params.delta, sp.path);
  res.factor_seconds = seconds_since(t_fact);
  res.warnings = fac.warnings();

  // Initial coefficients: independent projections of the initial data.
  const SpMat Aiu = assemble_rows(du, iface_pts, Deriv::id);
  const Eigen::VectorXd cu0 = project(bu.A, sample(problem.initial_u, pu), Aiu, sample(problem.initial_u, iface_pts),
                                      sp.lambda, params.projection_delta);
  const SpMat Aiv = assemble_rows(dv, iface_pts, Deriv::id);
  const SpMat Bv = vstack({&Abv, &Aiv});
  Eigen::VectorXd bvv(Bv.rows());
  bvv << sample(problem.initial_v, outer_pts), sample(problem.initial_v, iface_pts);
  const Eigen::VectorXd cv0 = project(bv.A, sample(problem.initial_v, pv), Bv, bvv, sp.lambda, params.projection_delta);
  Eigen::VectorXd c0(Mu + Mv);
  c0 << cu0, cv0;

  TimeField fu;
  fu.scheme = &su;
  fu.offset = 0;
  fu.size = Mu;
  fu.lift = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(bu.A * v); };
  fu.reaction = [&](const Eigen::VectorXd&, double t) { return sample(problem.source_u, pu, t); };
  fu.explicit_source = true;
  TimeField fv;
  fv.scheme = &sv;
  fv.offset = Mu;
  fv.size = Mv;
  fv.lift = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(bv.A * v); };
  fv.reaction = [&](const Eigen::VectorXd&, double t) { return sample(problem.source_v, pv, t); };
  fv.explicit_source = true;

  const Eigen::Index n_iface = 2 * static_cast<Eigen::Index>(res.interface.size());
  StepSolve step = [&](const Eigen::VectorXd& rhs, std::size_t n, const Eigen::VectorXd& prev) {
    const double t = static_cast<double>(n) * params.tau;
    Eigen::VectorXd data(boundary.rows());
    data << sample(problem.outer_boundary, outer_pts, t), Eigen::VectorXd::Zero(n_iface);
    return fac.solve(rhs, data, prev).c;
  };
  if (observer) observer(0, 0.0, cu0, cv0);
  Eigen::VectorXd last = c0;
  StepObserver obs = [&](std::size_t n, const Eigen::VectorXd& c) {
    last = c;
    if (observer) observer(n, static_cast<double>(n) * params.tau, c.head(Mu), c.tail(Mv));
  };
  const std::array<TimeField, 2> fields{fu, fv};
  const auto t_steps = Clock::now();
  run_fractional_stepper(fields, c0, step, params.stepper, obs);
  res.step_seconds = steps > 0 ? seconds_since(t_steps) / static_cast<double>(steps) : 0.0;
  res.final_u = last.head(Mu);
  res.final_v = last.tail(Mv);
  for (const auto& s : res.interface) {
    res.interface_jump = std::max(res.interface_jump,
                                  std::fabs(du.eval(res.final_u, s.point, Deriv::id) - dv.eval(res.final_v, s.point, Deriv::id)));
    const double gu = du.row(s.point, Deriv::normal_grad, s.normal).dot(res.final_u);
    const double gv = dv.row(s.point, Deriv::normal_grad, s.normal).dot(res.final_v);
    res.interface_flux_jump = std::max(res.interface_flux_jump, std::fabs(gu - gv));
  }
  return res;
}

}  // namespace fracollo
