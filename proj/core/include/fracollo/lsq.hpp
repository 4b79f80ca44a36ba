#pragma once

#include "fracollo/assembly.hpp"
#include "fracollo/errors.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fracollo {

enum class SolverPath { qr, kkt, normal };

const char* to_string(SolverPath p);
SolverPath solver_path_from_string(const std::string& s);

/// Regularized least-squares data:
///   min |op d - rhs|^2 + lambda^2 |boundary d - boundary_data|^2 + delta |d - d_star|^2
struct LsBlocks {
  SpMat op;
  Eigen::VectorXd rhs;
  SpMat boundary;
  Eigen::VectorXd boundary_data;
  double lambda = 1e5;
  double delta = 0.0;
  Eigen::VectorXd d_star;  ///< empty means zero

  Eigen::Index unknowns() const { return op.cols(); }
};

struct LsSolution {
  Eigen::VectorXd c;
  double residual_interior = 0.0;
  double residual_boundary = 0.0;
  Eigen::VectorXd multipliers;  ///< KKT path only
  std::optional<double> sigma_min;
  std::optional<double> sigma_max;
  bool rank_deficient = false;
  std::vector<std::string> warnings;
};

/// Factorization of the matrix part of an LsBlocks, reusable across
/// right-hand sides. Immutable after construction; solve() is reentrant.
///
/// qr:     sparse QR of [op; lambda B; sqrt(delta) I]
/// kkt:    sparse LU of [I -op 0; -op^T -delta I B^T; 0 B 0] (exact constraints)
/// normal: sparse Cholesky of op^T op + lambda^2 B^T B + delta I
class LsFactorization {
 public:
  LsFactorization(const SpMat& op, const SpMat& boundary, double lambda, double delta, SolverPath path);
  ~LsFactorization();
  LsFactorization(LsFactorization&&) noexcept;
  LsFactorization& operator=(LsFactorization&&) noexcept;

  LsSolution solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& boundary_data,
                   const Eigen::VectorXd& d_star) const;

  SolverPath path() const;
  bool rank_deficient() const;
  const std::vector<std::string>& warnings() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LsSolution solve(const LsBlocks& blocks, SolverPath path);
LsSolution solve_penalized(const LsBlocks& blocks);
LsSolution solve_kkt(const LsBlocks& blocks);
LsSolution solve_normal(const LsBlocks& blocks);

/// Stacked matrix [op; lambda B; sqrt(delta) I].
SpMat stacked_matrix(const LsBlocks& blocks);

/// Full singular spectrum of the stacked matrix in ascending order when the
/// problem is small enough for a dense SVD (M <= 5000); otherwise the k
/// smallest and the largest value by inverse and power iteration.
std::vector<double> singular_values(const LsBlocks& blocks, std::size_t k);
/// The k smallest singular values, ascending.
std::vector<double> smallest_singular_values(const LsBlocks& blocks, std::size_t k);
double largest_singular_value(const SpMat& m, int iterations = 60);

/// Deterministic component-wise uniform [0,1) vector.
Eigen::VectorXd uniform_vector(Eigen::Index n, std::uint64_t seed);

/// d * (1 + eps u), u from uniform_vector(seed).
Eigen::VectorXd perturb_reference(const Eigen::VectorXd& d, double eps, std::uint64_t seed);

/// Solution with delta = delta0 and d_star = 0, the bootstrap reference.
Eigen::VectorXd bootstrap_reference(const LsBlocks& blocks, SolverPath path = SolverPath::qr,
                                    double delta0 = 1e-6);

}  // namespace fracollo
