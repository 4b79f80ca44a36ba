#pragma once

#include "fracollo/assembly.hpp"
#include "fracollo/collocation.hpp"
#include "fracollo/fractional_time.hpp"
#include "fracollo/lsq.hpp"
#include "fracollo/mesh_basis.hpp"
#include "fracollo/problems.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracollo {

enum class Method { lsc, lsfvm };
enum class BoundaryKind { dirichlet, neumann };

const char* to_string(Method m);
Method method_from_string(const std::string& s);
const char* to_string(BoundaryKind b);
BoundaryKind boundary_kind_from_string(const std::string& s);

/// Spatial discretization and LS solver settings shared by all problems.
struct SpaceParams {
  int nx = 32;
  int ny = 32;
  std::optional<Box> box;  ///< background box, defaults to the bounding box
  int p = 10;
  int q = 10;
  DensityMode mode = DensityMode::nonuniform;
  std::size_t n_boundary = 0;  ///< 0 selects 4 max(N_x, N_y)
  double lambda = 1e5;
  SolverPath path = SolverPath::qr;
  Method method = Method::lsc;
  double rho = 1e-4;
  int flux_nodes = 8;
  FluxRule flux_rule = FluxRule::quadrature;

  std::size_t boundary_count() const;
};

/// Mesh, DOF map and collocation points for one domain.
struct Discretization {
  DofMap dofs;
  CollocationSet points;

  static Discretization build(const Domain& domain, const SpaceParams& params);
};

struct SteadyParams {
  SpaceParams space;
  BoundaryKind bc = BoundaryKind::dirichlet;
  double delta = 0.01;
  double epsilon = 1e-3;
  double delta0 = 1e-6;
  std::uint64_t seed = 1;
  double neumann_weight = 0.0;  ///< 0 selects the mesh default
};

struct SteadyResult {
  Discretization disc;
  LsSolution solution;
  Eigen::VectorXd reference;  ///< d_* actually used
  std::vector<std::size_t> fvm_fallback;
  double seconds = 0.0;
};

/// Assembled blocks of the steady problem, before any reference vector.
LsBlocks steady_blocks(const Discretization& disc, const SteadyProblem& problem, const SteadyParams& params,
                       std::vector<std::size_t>* fvm_fallback = nullptr);

SteadyResult solve_model(const Domain& domain, const SteadyProblem& problem, const SteadyParams& params);

struct TfpdeParams {
  SpaceParams space;
  double tau = 0x1p-10;
  double T = 2.0;
  int m = 3;  ///< m = m_u = m_f with gamma_k = k alpha
  double kappa = 2.0;
  double delta = 0.0;
  int r = 1;  ///< reference d_* = 0 (r = 0) or c^{n-1} (r = 1)
  double projection_delta = 1e-10;
  StepperOptions stepper;
};

using TrajectoryObserver = std::function<void(std::size_t n, double t, const Eigen::VectorXd& c)>;

struct TfpdeResult {
  Discretization disc;
  Eigen::VectorXd initial;
  Eigen::VectorXd final;
  std::size_t steps = 0;
  double factor_seconds = 0.0;
  double step_seconds = 0.0;  ///< mean wall time per step after factorization
  std::vector<std::size_t> fvm_fallback;
  std::vector<std::string> warnings;
};

TfpdeResult solve_tfpde(const Domain& domain, const TfpdeProblem& problem, const TfpdeParams& params,
                        const TrajectoryObserver& observer = {});

struct KappaEstimate {
  double kappa = 0.0;
  double max_derivative = 0.0;
  bool fallback = false;
  std::string note;
};

/// Coarse fully implicit run (Newton per step) to bound |d f / d u| along
/// the trajectory; returns 1.5 * 0.75 * max |f_u|, or `fallback_kappa` when
/// Newton fails.
KappaEstimate estimate_kappa(const Domain& domain, const TfpdeProblem& problem, double T, int n_coarse = 8,
                             std::size_t coarse_steps = 16, double fallback_kappa = 2.0);

struct CoupledParams {
  SpaceParams space;
  double tau = 0x1p-10;
  double T = 2.0;
  int m = 1;
  int m_tilde = 1;
  double delta = 0.01;
  std::size_t n_interface = 0;  ///< 0 selects the inner boundary count
  double projection_delta = 1e-10;
  StepperOptions stepper;
};

struct CoupledResult {
  Discretization inner;
  Discretization outer;
  std::vector<BoundarySample> interface;
  Eigen::VectorXd final_u;
  Eigen::VectorXd final_v;
  std::size_t steps = 0;
  double factor_seconds = 0.0;
  double step_seconds = 0.0;
  double interface_jump = 0.0;  ///< max |U - V| on the interface samples at the final step
  double interface_flux_jump = 0.0;
  std::vector<std::string> warnings;
};

using CoupledObserver =
    std::function<void(std::size_t n, double t, const Eigen::VectorXd& d_u, const Eigen::VectorXd& d_v)>;

/// Inner field u on `inner`, outer field v on `outer`; outer Dirichlet data
/// on the outer curve of `outer`, interface rows on the curve of `inner`.
CoupledResult solve_coupled(const Domain& inner, const Domain& outer, const CoupledProblem& problem,
                            const CoupledParams& params, const CoupledObserver& observer = {});

}  // namespace fracollo
