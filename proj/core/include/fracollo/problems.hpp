#pragma once

#include "fracollo/geometry.hpp"

#include <functional>
#include <string>

namespace fracollo {

using SpaceFn = std::function<double(Point)>;
using SpaceTimeFn = std::function<double(Point, double)>;
/// f(u, p, t)
using ReactionFn = std::function<double(double, Point, double)>;

/// u - nu Lap u = f with Dirichlet data u or Neumann data n . grad u.
struct SteadyProblem {
  std::string name;
  double nu = 0.1;
  SpaceFn source;
  SpaceFn exact;
  std::function<Point(Point)> exact_gradient;
};

/// u = exp(x + y), f = (1 - 2 nu) exp(x + y).
SteadyProblem exponential_problem(double nu = 0.1);

/// D^alpha u = nu Lap u + f(u, x, y, t) with Dirichlet data.
struct TfpdeProblem {
  std::string name;
  double alpha = 0.5;
  double nu = 1.0;
  ReactionFn reaction;
  ReactionFn reaction_du;  ///< partial derivative of f in u
  SpaceFn initial;
  SpaceTimeFn boundary;
  SpaceTimeFn exact;  ///< empty when unknown
};

/// f = u (1 - u^2) + g with u = E_alpha(-t^alpha) sin x sin y.
TfpdeProblem tfpde_manufactured(double alpha);
/// f = u (1 - u^2), u(0) = sin(pi x) sin(pi y), zero boundary data.
TfpdeProblem tfpde_oscillating(double alpha);

/// Two-domain system coupled through continuity of value and normal flux.
struct CoupledProblem {
  std::string name;
  double alpha = 0.5;
  double beta = 0.5;
  double mu = 1.0;
  double nu = 1.0;
  SpaceTimeFn source_u;
  SpaceTimeFn source_v;
  SpaceFn initial_u;
  SpaceFn initial_v;
  SpaceTimeFn outer_boundary;
  SpaceTimeFn exact_u;
  SpaceTimeFn exact_v;
};

/// u = E_alpha(-t^alpha) sin 3x sin 3y, v = E_beta(-t^beta) sin 3x sin 3y.
CoupledProblem coupled_manufactured(double alpha, double beta, double mu = 1.0, double nu = 1.0);
/// Zero sources, u(0) = v(0) = sin(2 pi x) sin(2 pi y), zero outer data.
CoupledProblem coupled_oscillating(double alpha, double beta, double mu = 1.0, double nu = 1.0);

/// Inner domain (Case III shape) and the surrounding box used by the
/// coupled examples.
Domain coupled_inner_domain();
Box coupled_box();
Domain coupled_outer_domain();

/// E_alpha(-t^alpha), cached per thread for repeated calls at equal t.
double ml_decay(double alpha, double t);

}  // namespace fracollo
