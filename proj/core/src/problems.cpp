#include "fracollo/problems.hpp"

#include "fracollo/fractional_time.hpp"

#include <array>
#include <cmath>

namespace fracollo {

double ml_decay(double alpha, double t) {
  struct Entry {
    double alpha = -1.0;
    double t = -1.0;
    double value = 0.0;
  };
  thread_local std::array<Entry, 8> cache{};
  thread_local std::size_t next = 0;
  for (const auto& e : cache) {
    if (e.alpha == alpha && e.t == t) return e.value;
  }
  const double v = t == 0.0 ? 1.0 : mittag_leffler(alpha, -std::pow(t, alpha));
  cache[next] = {alpha, t, v};
  next = (next + 1) % cache.size();
  return v;
}

SteadyProblem exponential_problem(double nu) {
  SteadyProblem p;
  p.name = "exp(x+y)";
  p.nu = nu;
  p.exact = [](Point q) { return std::exp(q.x + q.y); };
  p.exact_gradient = [](Point q) {
    const double e = std::exp(q.x + q.y);
    return Point{e, e};
  };
  p.source = [nu](Point q) { return (1.0 - 2.0 * nu) * std::exp(q.x + q.y); };
  return p;
}

TfpdeProblem tfpde_manufactured(double alpha) {
  TfpdeProblem p;
  p.name = "ml-sin-sin";
  p.alpha = alpha;
  p.nu = 1.0;
  auto exact = [alpha](Point q, double t) { return ml_decay(alpha, t) * std::sin(q.x) * std::sin(q.y); };
  // D^a u = -u and Lap u = -2u, so g = -u + 2u - u (1 - u^2) = u^3.
  p.reaction = [exact](double u, Point q, double t) {
    const double e = exact(q, t);
    return u * (1.0 - u * u) + e * e * e;
  };
  p.reaction_du = [](double u, Point, double) { return 1.0 - 3.0 * u * u; };
  p.initial = [exact](Point q) { return exact(q, 0.0); };
  p.boundary = exact;
  p.exact = exact;
  return p;
}

TfpdeProblem tfpde_oscillating(double alpha) {
  TfpdeProblem p;
  p.name = "oscillating";
  p.alpha = alpha;
  p.nu = 1.0;
  p.reaction = [](double u, Point, double) { return u * (1.0 - u * u); };
  p.reaction_du = [](double u, Point, double) { return 1.0 - 3.0 * u * u; };
  p.initial = [](Point q) { return std::sin(M_PI * q.x) * std::sin(M_PI * q.y); };
  p.boundary = [](Point, double) { return 0.0; };
  return p;
}

CoupledProblem coupled_manufactured(double alpha, double beta, double mu, double nu) {
  CoupledProblem p;
  p.name = "ml-sin3-sin3";
  p.alpha = alpha;
  p.beta = beta;
  p.mu = mu;
  p.nu = nu;
  auto shape = [](Point q) { return std::sin(3.0 * q.x) * std::sin(3.0 * q.y); };
  p.exact_u = [alpha, shape](Point q, double t) { return ml_decay(alpha, t) * shape(q); };
  p.exact_v = [beta, shape](Point q, double t) { return ml_decay(beta, t) * shape(q); };
  p.source_u = [alpha, mu, shape](Point q, double t) { return (18.0 * mu - 1.0) * ml_decay(alpha, t) * shape(q); };
  p.source_v = [beta, nu, shape](Point q, double t) { return (18.0 * nu - 1.0) * ml_decay(beta, t) * shape(q); };
  p.initial_u = shape;
  p.initial_v = shape;
  p.outer_boundary = p.exact_v;
  return p;
}

CoupledProblem coupled_oscillating(double alpha, double beta, double mu, double nu) {
  CoupledProblem p;
  p.name = "oscillating";
  p.alpha = alpha;
  p.beta = beta;
  p.mu = mu;
  p.nu = nu;
  auto shape = [](Point q) { return std::sin(2.0 * M_PI * q.x) * std::sin(2.0 * M_PI * q.y); };
  p.source_u = [](Point, double) { return 0.0; };
  p.source_v = [](Point, double) { return 0.0; };
  p.initial_u = shape;
  p.initial_v = shape;
  p.outer_boundary = [](Point, double) { return 0.0; };
  return p;
}

Domain coupled_inner_domain() { return case_domain(3); }

Box coupled_box() { return {-1.5, 1.5, -1.0, 2.0}; }

Domain coupled_outer_domain() { return Domain::difference(Domain::rectangle(coupled_box()), coupled_inner_domain()); }

}  // namespace fracollo
