#pragma once

#include "fracollo/geometry.hpp"
#include "fracollo/problems.hpp"
#include "fracollo/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fracollo {

/// Parsed JSON run description. Every section is optional; missing keys
/// take the defaults documented in the README.
struct RunConfig {
  // domain
  std::optional<int> case_number;  ///< 0 rectangle, 1..4 the model cases
  double Lambda = 0.5;
  DomainSpec domain;
  std::optional<Box> box;
  // mesh / collocation / method / solver
  SpaceParams space;
  // regularization
  std::optional<double> delta;  ///< default depends on the problem and domain
  double epsilon = 1e-3;
  double delta0 = 1e-6;
  std::uint64_t seed = 1;
  int r = 1;
  // problem
  std::string problem = "exp";
  BoundaryKind bc = BoundaryKind::dirichlet;
  double nu = 0.1;
  double mu = 1.0;
  double neumann_weight = 0.0;
  // time
  double alpha = 0.5;
  double beta = 0.5;
  double tau = 0x1p-10;
  double T = 2.0;
  std::optional<int> m;  ///< tfpde default 3, coupled default 1
  int m_tilde = 1;
  double kappa = 2.0;
  bool kappa_auto = false;
  // output
  std::filesystem::path out_dir = "out";
  std::size_t lattice = 201;
  bool export_fields = true;
  std::vector<double> record_times;
  // study
  std::string study_target = "model";  ///< model, tfpde or coupled
  std::vector<int> study_n{8, 16, 32, 64};
  std::size_t svd_count = 32;
};

/// Throws ConfigError on malformed input or unknown keys.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);

Domain make_domain(const RunConfig& cfg);
SteadyProblem make_steady_problem(const RunConfig& cfg);
TfpdeProblem make_tfpde_problem(const RunConfig& cfg);
CoupledProblem make_coupled_problem(const RunConfig& cfg);

SteadyParams steady_params(const RunConfig& cfg);
TfpdeParams tfpde_params(const RunConfig& cfg, const Domain& domain);
CoupledParams coupled_params(const RunConfig& cfg);

}  // namespace fracollo
