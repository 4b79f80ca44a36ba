#pragma once

#include "fracollo/mesh_basis.hpp"
#include "fracollo/problems.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracollo {

/// Masked lattice error: sqrt(h_x h_y sum e_ij^2) with e = 0 off the domain.
struct ErrorReport {
  double l2_abs = 0.0;
  double l2_rel = 0.0;
  double exact_norm = 0.0;
  std::size_t lattice = 201;
};

/// Error of the field Phi^T c against `exact` on a lattice x 201 grid
/// spanning the mesh box.
ErrorReport l2_error(const DofMap& dm, const Eigen::VectorXd& c, const SpaceFn& exact, const Domain& domain,
                     std::size_t lattice = 201);

/// log(e_a / e_b) / log(n_b / n_a).
double observed_order(int n_a, double e_a, int n_b, double e_b);
/// Least-squares slope of -log e against log N.
double fitted_order(std::span<const int> ns, std::span<const double> errors);

struct StudyRow {
  int n = 0;
  double error = 0.0;
  std::optional<double> order;
  double seconds = 0.0;
  std::string failure;  ///< empty on success
};

/// Runs `run(N)` for each N, rows in parallel up to worker_count(), so `run`
/// must be safe to call concurrently. Failures are recorded per row and the
/// study continues; orders are computed between consecutive successful rows.
std::vector<StudyRow> convergence_study(std::span<const int> ns, const std::function<double(int)>& run);

/// Writes x,y,value,inside for an nx by ny lattice over the mesh box,
/// row-major (y outer). Lattice points without basis support report 0.
void export_field(const DofMap& dm, const Eigen::VectorXd& c, const Domain& domain, std::size_t nx,
                  std::size_t ny, const std::filesystem::path& path);

/// CSV of a convergence table.
void write_study(const std::vector<StudyRow>& rows, const std::filesystem::path& path);

}  // namespace fracollo
