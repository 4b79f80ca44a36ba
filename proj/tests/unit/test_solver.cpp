#include "fracollo/harness.hpp"
#include "fracollo/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace fracollo;

TEST_CASE("steady circle problem converges at second order") {
  const Domain d = case_domain(1);
  const auto prob = exponential_problem(0.1);
  std::vector<int> ns{8, 16, 32};
  std::vector<double> errs;
  for (int n : ns) {
    SteadyParams p;
    p.space.nx = p.space.ny = n;
    const auto r = solve_model(d, prob, p);
    errs.push_back(l2_error(r.disc.dofs, r.solution.c, prob.exact, d).l2_abs);
  }
  CHECK(fitted_order(ns, errs) >= 1.8);
}

TEST_CASE("steady solver validates parameters") {
  SteadyParams p;
  p.delta = -1.0;
  CHECK_THROWS_AS(solve_model(case_domain(1), exponential_problem(), p), ConfigError);
}

TEST_CASE("finite-volume limit matches collocation") {
  const Domain d = case_domain(2);
  const auto prob = exponential_problem(0.1);
  SteadyParams p;
  p.space.nx = p.space.ny = 16;
  p.epsilon = 1e-2;
  const auto lsc = solve_model(d, prob, p);
  p.space.method = Method::lsfvm;
  p.space.rho = 1e-4;
  const auto fvm = solve_model(d, prob, p);
  const double a = l2_error(lsc.disc.dofs, lsc.solution.c, prob.exact, d).l2_rel;
  const double b = l2_error(fvm.disc.dofs, fvm.solution.c, prob.exact, d).l2_rel;
  CHECK(std::abs(a - b) <= 1e-3 * a);
}

TEST_CASE("zero data keeps the time-fractional solution at zero") {
  TfpdeProblem z;
  z.alpha = 0.5;
  z.reaction = [](double, Point, double) { return 0.0; };
  z.reaction_du = [](double, Point, double) { return 0.0; };
  z.initial = [](Point) { return 0.0; };
  z.boundary = [](Point, double) { return 0.0; };
  TfpdeParams p;
  p.space.nx = p.space.ny = 4;
  p.tau = 0.125;
  p.T = 1.0;
  const auto r = solve_tfpde(case_domain(0), z, p);
  CHECK(r.steps == 8);
  CHECK(r.final.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("time-fractional manufactured solution on a coarse grid") {
  const auto prob = tfpde_manufactured(0.5);
  const Domain d = case_domain(0);
  TfpdeParams p;
  p.space.nx = p.space.ny = 8;
  p.tau = 1.0 / 64;
  p.T = 1.0;
  const auto r = solve_tfpde(d, prob, p);
  const double e = l2_error(r.disc.dofs, r.final, [&](Point q) { return prob.exact(q, 1.0); }, d).l2_abs;
  CHECK(e < 2e-5);
}

TEST_CASE("kappa estimates") {
  const Domain d = case_domain(0);
  const auto k = estimate_kappa(d, tfpde_oscillating(0.5), 1.0);
  CHECK_FALSE(k.fallback);
  CHECK(k.max_derivative <= 2.0 + 1e-12);
  CHECK(k.kappa <= 2.25 + 1e-12);
  TfpdeProblem z = tfpde_oscillating(0.5);
  z.reaction = [](double, Point, double) { return 0.0; };
  z.reaction_du = [](double, Point, double) { return 0.0; };
  CHECK(estimate_kappa(d, z, 1.0).kappa == 0.0);
}

TEST_CASE("coupled symmetric problem is continuous across the interface") {
  const auto prob = coupled_manufactured(0.5, 0.5);
  CoupledParams p;
  p.space.nx = p.space.ny = 8;
  p.space.box = coupled_box();
  p.tau = 1.0 / 32;
  p.T = 0.5;
  const auto r = solve_coupled(coupled_inner_domain(), coupled_outer_domain(), prob, p);
  const auto eu = l2_error(r.inner.dofs, r.final_u, [&](Point q) { return prob.exact_u(q, 0.5); },
                           coupled_inner_domain());
  CHECK(r.interface_jump <= 1e-6 * eu.exact_norm);
  CHECK(eu.l2_rel < 0.05);
}

TEST_CASE("method and boundary names") {
  CHECK(method_from_string(to_string(Method::lsfvm)) == Method::lsfvm);
  CHECK(boundary_kind_from_string("neumann") == BoundaryKind::neumann);
  CHECK_THROWS_AS(method_from_string("fem"), ConfigError);
  SpaceParams sp;
  sp.nx = 16;
  sp.ny = 24;
  CHECK(sp.boundary_count() == 96);
}
