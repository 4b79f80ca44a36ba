#pragma once

#include "fracollo/collocation.hpp"
#include "fracollo/mesh_basis.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace fracollo {

using SpMat = Eigen::SparseMatrix<double>;

/// Sparse matrix whose row i is basis row `kind` at pts[i].
SpMat assemble_rows(const DofMap& dm, std::span<const Point> pts, Deriv kind);

struct CollocationBlocks {
  SpMat A;  ///< point values
  SpMat S;  ///< Laplacian
};

CollocationBlocks assemble_collocation(const DofMap& dm, std::span<const Point> pts);

enum class FluxRule {
  quadrature,  ///< trapezoidal rule on the control-circle flux
  expansion,   ///< S + (rho^2/4) d4/dx2dy2, the small-rho expansion
};

struct FvmBlocks {
  SpMat A;                        ///< A + (rho^2/8) S
  SpMat S;                        ///< discrete flux over the control circle
  std::vector<std::size_t> fallback;  ///< rows replaced by plain collocation rows
};

/// Finite-volume blocks on circles of radius rho around each point. A point
/// whose quadrature nodes leave the active mesh falls back to the collocation
/// row (reported in `fallback`) unless strict is set, which throws instead.
FvmBlocks assemble_fvm(const DofMap& dm, std::span<const Point> pts, double rho, int K = 8,
                       FluxRule rule = FluxRule::quadrature, bool strict = false);

SpMat assemble_dirichlet(const DofMap& dm, std::span<const BoundarySample> samples);

/// Default Neumann weight 4 max((b-a) N_x, (d-c) N_y).
double default_neumann_weight(const BackgroundMesh& mesh);

/// Rows id - nu lap - weight (n.grad) at the boundary samples. The matching
/// right-hand side is f - weight * g, see neumann_rhs.
SpMat assemble_neumann(const DofMap& dm, std::span<const BoundarySample> samples, double nu,
                       double weight);
Eigen::VectorXd neumann_rhs(const Eigen::VectorXd& f, const Eigen::VectorXd& g, double weight);

struct InterfaceRows {
  SpMat continuity;  ///< [id_u, -id_v]
  SpMat flux;        ///< [n.grad_u, -n.grad_v]
};

/// Interface rows over the stacked unknown [d_u; d_v].
InterfaceRows assemble_interface(const DofMap& dm_u, const DofMap& dm_v,
                                 std::span<const BoundarySample> samples);

/// Vertical concatenation of sparse blocks with equal column count.
SpMat vstack(std::initializer_list<const SpMat*> blocks);
/// Horizontal placement [left, right] of blocks with equal row count.
SpMat hstack(const SpMat& left, const SpMat& right);
/// Block-diagonal pair.
SpMat blockdiag(const SpMat& a, const SpMat& b);

}  // namespace fracollo
