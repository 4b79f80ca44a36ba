#include "fracollo/lsq.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/Dense>
#include <Eigen/SPQRSupport>
#include <Eigen/SVD>
#include <Eigen/UmfPackSupport>

#include <SuiteSparseQR.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fracollo {

const char* to_string(SolverPath p) {
  switch (p) {
    case SolverPath::qr: return "qr";
    case SolverPath::kkt: return "kkt";
    case SolverPath::normal: return "normal";
  }
  return "?";
}

SolverPath solver_path_from_string(const std::string& s) {
  if (s == "qr") return SolverPath::qr;
  if (s == "kkt") return SolverPath::kkt;
  if (s == "normal") return SolverPath::normal;
  throw std::invalid_argument("unknown solver path '" + s + "' (expected qr, kkt or normal)");
}

namespace {

using Triplet = Eigen::Triplet<double>;

// Dense-diagnostics limits.
constexpr Eigen::Index kDenseSvdMaxCols = 5000;
constexpr double kDenseSvdMaxEntries = 1.5e7;

class CholmodCommon {
 public:
  CholmodCommon() { cholmod_l_start(&cc_); }
  ~CholmodCommon() { cholmod_l_finish(&cc_); }
  CholmodCommon(const CholmodCommon&) = delete;
  CholmodCommon& operator=(const CholmodCommon&) = delete;
  cholmod_common* get() { return &cc_; }

 private:
  cholmod_common cc_{};
};

cholmod_sparse* to_cholmod(const SpMat& m, cholmod_common* cc) {
  cholmod_sparse* A = cholmod_l_allocate_sparse(static_cast<std::size_t>(m.rows()),
                                                static_cast<std::size_t>(m.cols()),
                                                static_cast<std::size_t>(m.nonZeros()), 1, 1, 0,
                                                CHOLMOD_REAL, cc);
  if (A == nullptr) throw NumericalError("out of memory converting sparse matrix");
  auto* p = static_cast<SuiteSparse_long*>(A->p);
  auto* i = static_cast<SuiteSparse_long*>(A->i);
  auto* x = static_cast<double*>(A->x);
  SuiteSparse_long nz = 0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    p[k] = nz;
    for (SpMat::InnerIterator it(m, k); it; ++it) {
      i[nz] = it.row();
      x[nz] = it.value();
      ++nz;
    }
  }
  p[m.outerSize()] = nz;
  return A;
}

/// Rank-revealing sparse QR of a (possibly tall) matrix.
class SparseQr {
 public:
  SparseQr(const SpMat& a, double tol) : at_(a.transpose()), cols_(a.cols()) {
    if (tol != SPQR_DEFAULT_TOL) qr_.setPivotThreshold(tol);
    qr_.compute(a);
    if (qr_.info() != Eigen::Success) throw NumericalError("sparse QR factorization failed");
    r_ = qr_.matrixR().topLeftCorner(qr_.rank(), qr_.rank());
    perm_ = qr_.colsPermutation();
  }
  SparseQr(const SparseQr&) = delete;
  SparseQr& operator=(const SparseQr&) = delete;

  Eigen::Index rank() const { return qr_.rank(); }
  Eigen::Index cols() const { return cols_; }

  /// Least-squares solution of A x = b (basic solution when rank deficient).
  Eigen::MatrixXd solve(const Eigen::MatrixXd& b) const {
    Eigen::MatrixXd out(cols_, b.cols());
    for (Eigen::Index c = 0; c < b.cols(); ++c) {
      const Eigen::VectorXd bc = b.col(c);
      out.col(c) = qr_.solve(bc);
    }
    return out;
  }

  /// Corrected semi-normal equations: x = P R^-1 R^-T P^T A^T b followed by
  /// `refinements` residual corrections. Requires full column rank.
  Eigen::VectorXd solve_seminormal(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                                   int refinements) const {
    Eigen::VectorXd x = solve_gram(at_ * b).col(0);
    for (int k = 0; k < refinements; ++k) {
      const Eigen::VectorXd r = b - a * x;
      x += solve_gram(at_ * r).col(0);
    }
    return x;
  }

  /// x = (A^T A)^{-1} b using only R; assumes full column rank.
  Eigen::MatrixXd solve_gram(const Eigen::MatrixXd& b) const {
    const Eigen::Index r = rank();
    const Eigen::MatrixXd pb = perm_.transpose() * b;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(cols_, b.cols());
    const auto R = r_.triangularView<Eigen::Upper>();
    Eigen::MatrixXd z = R.transpose().solve(pb.topRows(r));
    y.topRows(r) = R.solve(z);
    return perm_ * y;
  }

 private:
  Eigen::SPQR<SpMat> qr_;
  SpMat at_;
  Eigen::SPQR<SpMat>::MatrixType r_;
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, SuiteSparse_long> perm_;
  Eigen::Index cols_;
};

double qr_self_check_error() {
  constexpr Eigen::Index m = 150;
  constexpr Eigen::Index n = 50;
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Triplet> t;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (u(gen) > 0.0) t.emplace_back(i, j, u(gen));
    }
  }
  SpMat a(m, n);
  a.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd x(n);
  for (Eigen::Index j = 0; j < n; ++j) x[j] = u(gen);
  const Eigen::VectorXd b = a * x;
  Eigen::SPQR<SpMat> qr(a);
  if (qr.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
  const Eigen::VectorXd y = qr.solve(b);
  return (y - x).norm() / x.norm();
}

void require_sane_backend() {
  static const double err = qr_self_check_error();
  if (!(err < 1e-8)) {
    std::ostringstream msg;
    msg << "sparse QR self-check failed (relative error " << err
        << "): the BLAS/LAPACK backend returns wrong results; configure with FRACOLLO_REFERENCE_BLAS=ON"
        << " or set OPENBLAS_CORETYPE";
    throw NumericalError(msg.str());
  }
}

SpMat identity_scaled(Eigen::Index n, double s) {
  SpMat I(n, n);
  I.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index k = 0; k < n; ++k) I.insert(k, k) = s;
  I.makeCompressed();
  return I;
}

SpMat stacked(const SpMat& op, const SpMat& boundary, double lambda, double delta) {
  const SpMat lb = lambda * boundary;
  if (delta > 0.0) {
    const SpMat reg = identity_scaled(op.cols(), std::sqrt(delta));
    return vstack({&op, &lb, &reg});
  }
  return vstack({&op, &lb});
}

Eigen::VectorXd safe_d_star(const Eigen::VectorXd& d, Eigen::Index n) {
  if (d.size() == 0) return Eigen::VectorXd::Zero(n);
  if (d.size() != n) throw std::invalid_argument("reference vector has wrong length");
  return d;
}

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

struct LsFactorization::Impl {
  SolverPath path;
  SpMat op;
  SpMat boundary;
  double lambda;
  double delta;
  bool rank_deficient = false;
  std::vector<std::string> warnings;

  std::unique_ptr<SparseQr> qr;
  SpMat stacked;
  std::unique_ptr<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>> cod;
  std::unique_ptr<Eigen::UmfPackLU<SpMat>> lu;
  SpMat kkt;
  std::unique_ptr<Eigen::CholmodDecomposition<SpMat>> chol;
};

LsFactorization::LsFactorization(const SpMat& op, const SpMat& boundary, double lambda, double delta,
                                 SolverPath path)
    : impl_(std::make_unique<Impl>()) {
  if (boundary.rows() > 0 && boundary.cols() != op.cols()) {
    throw std::invalid_argument("boundary block and operator block differ in column count");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("boundary weight lambda must be positive");
  if (delta < 0.0) throw std::invalid_argument("regularization delta must be non-negative");
  auto& I = *impl_;
  I.path = path;
  I.op = op;
  I.boundary = boundary.rows() > 0 ? boundary : SpMat(0, op.cols());
  I.lambda = lambda;
  I.delta = delta;
  const Eigen::Index n = op.cols();
  require_sane_backend();

  switch (path) {
    case SolverPath::qr: {
      I.stacked = stacked(I.op, I.boundary, lambda, delta);
      const SpMat& A = I.stacked;
      I.qr = std::make_unique<SparseQr>(A, SPQR_DEFAULT_TOL);
      if (I.qr->rank() < n) {
        I.rank_deficient = true;
        std::ostringstream msg;
        msg << "stacked matrix is rank deficient (rank " << I.qr->rank() << " < " << n << ")";
        if (static_cast<double>(A.rows()) * static_cast<double>(n) <= kDenseSvdMaxEntries &&
            n <= kDenseSvdMaxCols) {
          I.cod = std::make_unique<Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>>(
              Eigen::MatrixXd(A));
          msg << "; minimum-norm solution via dense orthogonal decomposition";
        } else {
          msg << "; returning basic solution";
        }
        I.warnings.push_back(msg.str());
      }
      break;
    }
    case SolverPath::kkt: {
      const Eigen::Index nr = op.rows();
      const Eigen::Index nb = I.boundary.rows();
      std::vector<Triplet> t;
      t.reserve(static_cast<std::size_t>(nr + 2 * op.nonZeros() + 2 * I.boundary.nonZeros() + n));
      for (Eigen::Index k = 0; k < nr; ++k) t.emplace_back(k, k, 1.0);
      for (Eigen::Index k = 0; k < op.outerSize(); ++k) {
        for (SpMat::InnerIterator it(op, k); it; ++it) {
          t.emplace_back(it.row(), nr + it.col(), -it.value());
          t.emplace_back(nr + it.col(), it.row(), -it.value());
        }
      }
      if (delta > 0.0) {
        for (Eigen::Index k = 0; k < n; ++k) t.emplace_back(nr + k, nr + k, -delta);
      }
      for (Eigen::Index k = 0; k < I.boundary.outerSize(); ++k) {
        for (SpMat::InnerIterator it(I.boundary, k); it; ++it) {
          t.emplace_back(nr + it.col(), nr + n + it.row(), it.value());
          t.emplace_back(nr + n + it.row(), nr + it.col(), it.value());
        }
      }
      I.kkt = SpMat(nr + n + nb, nr + n + nb);
      I.kkt.setFromTriplets(t.begin(), t.end());
      I.kkt.makeCompressed();
      I.lu = std::make_unique<Eigen::UmfPackLU<SpMat>>();
      I.lu->compute(I.kkt);
      if (I.lu->info() != Eigen::Success) {
        std::string which = "operator block";
        if (nb > 0) {
          const SpMat bt = I.boundary.transpose();
          SparseQr bq(bt, SPQR_DEFAULT_TOL);
          if (bq.rank() < nb) which = "boundary block (not of full row rank)";
        }
        throw NumericalError("KKT saddle matrix is singular: deficient " + which);
      }
      break;
    }
    case SolverPath::normal: {
      const SpMat opt = op.transpose();
      SpMat N = opt * op;
      if (I.boundary.rows() > 0) {
        const SpMat bt = I.boundary.transpose();
        N += (lambda * lambda) * (bt * I.boundary);
      }
      if (delta > 0.0) N += identity_scaled(n, delta);
      N.makeCompressed();
      I.chol = std::make_unique<Eigen::CholmodDecomposition<SpMat>>();
      I.chol->setMode(Eigen::CholmodSupernodalLLt);
      I.chol->compute(N);
      if (I.chol->info() != Eigen::Success) {
        throw NumericalError("normal equations are numerically singular (Cholesky failed)");
      }
      const double smax = largest_singular_value(stacked(I.op, I.boundary, lambda, 0.0), 40);
      if (delta > 0.0 && smax * smax / delta >= 1e12) {
        std::ostringstream msg;
        msg << "normal equations: sigma_max^2/delta = " << smax * smax / delta
            << " >= 1e12, expect accuracy loss relative to QR";
        I.warnings.push_back(msg.str());
      } else if (delta == 0.0) {
        I.warnings.push_back("normal equations with delta = 0: conditioning is squared");
      }
      break;
    }
  }
}

LsFactorization::~LsFactorization() = default;
LsFactorization::LsFactorization(LsFactorization&&) noexcept = default;
LsFactorization& LsFactorization::operator=(LsFactorization&&) noexcept = default;

SolverPath LsFactorization::path() const { return impl_->path; }
bool LsFactorization::rank_deficient() const { return impl_->rank_deficient; }
const std::vector<std::string>& LsFactorization::warnings() const { return impl_->warnings; }

LsSolution LsFactorization::solve(const Eigen::VectorXd& rhs, const Eigen::VectorXd& boundary_data,
                                  const Eigen::VectorXd& d_star_in) const {
  const auto& I = *impl_;
  const Eigen::Index n = I.op.cols();
  const Eigen::Index nr = I.op.rows();
  const Eigen::Index nb = I.boundary.rows();
  if (rhs.size() != nr) throw std::invalid_argument("right-hand side has wrong length");
  if (boundary_data.size() != nb) throw std::invalid_argument("boundary data has wrong length");
  const Eigen::VectorXd d_star = safe_d_star(d_star_in, n);

  LsSolution sol;
  sol.rank_deficient = I.rank_deficient;
  sol.warnings = I.warnings;
  switch (I.path) {
    case SolverPath::qr: {
      Eigen::VectorXd b(nr + nb + (I.delta > 0.0 ? n : 0));
      b.head(nr) = rhs;
      b.segment(nr, nb) = I.lambda * boundary_data;
      if (I.delta > 0.0) b.tail(n) = std::sqrt(I.delta) * d_star;
      if (I.cod) sol.c = I.cod->solve(b);
      else if (I.rank_deficient) sol.c = I.qr->solve(b).col(0);
      else sol.c = I.qr->solve_seminormal(I.stacked, b, 1);
      break;
    }
    case SolverPath::kkt: {
      Eigen::VectorXd b(nr + n + nb);
      b.head(nr) = -rhs;
      b.segment(nr, n) = -I.delta * d_star;
      b.tail(nb) = boundary_data;
      Eigen::VectorXd x = I.lu->solve(b);
      for (int it = 0; it < 2; ++it) {
        const Eigen::VectorXd r = b - I.kkt * x;
        x += I.lu->solve(r);
      }
      sol.c = x.segment(nr, n);
      sol.multipliers = x.tail(nb);
      break;
    }
    case SolverPath::normal: {
      Eigen::VectorXd b = I.op.transpose() * rhs;
      if (nb > 0) b += (I.lambda * I.lambda) * (I.boundary.transpose() * boundary_data);
      if (I.delta > 0.0) b += I.delta * d_star;
      sol.c = I.chol->solve(b);
      break;
    }
  }
  if (!all_finite(sol.c)) throw NumericalError("least-squares solution is not finite");
  sol.residual_interior = (I.op * sol.c - rhs).norm();
  sol.residual_boundary = nb > 0 ? (I.boundary * sol.c - boundary_data).norm() : 0.0;
  return sol;
}

LsSolution solve(const LsBlocks& b, SolverPath path) {
  LsFactorization f(b.op, b.boundary, b.lambda, b.delta, path);
  return f.solve(b.rhs, b.boundary_data, b.d_star);
}

LsSolution solve_penalized(const LsBlocks& b) { return solve(b, SolverPath::qr); }
LsSolution solve_kkt(const LsBlocks& b) { return solve(b, SolverPath::kkt); }
LsSolution solve_normal(const LsBlocks& b) { return solve(b, SolverPath::normal); }

SpMat stacked_matrix(const LsBlocks& b) {
  const SpMat bd = b.boundary.rows() > 0 ? b.boundary : SpMat(0, b.op.cols());
  return stacked(b.op, bd, b.lambda, b.delta);
}

double largest_singular_value(const SpMat& m, int iterations) {
  if (m.cols() == 0 || m.rows() == 0) return 0.0;
  Eigen::VectorXd v = uniform_vector(m.cols(), 12345) + Eigen::VectorXd::Constant(m.cols(), 0.5);
  v.normalize();
  double s = 0.0;
  for (int it = 0; it < iterations; ++it) {
    const Eigen::VectorXd w = m.transpose() * (m * v);
    const double nw = w.norm();
    if (nw == 0.0) return 0.0;
    const double sn = std::sqrt(nw);
    v = w / nw;
    if (std::abs(sn - s) <= 1e-10 * sn) {
      s = sn;
      break;
    }
    s = sn;
  }
  return (m * v).norm();
}

namespace {

std::vector<double> dense_spectrum(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  std::vector<double> out(sv.data(), sv.data() + sv.size());
  std::sort(out.begin(), out.end());
  return out;
}

// Upper-triangular R (columns permuted) of the stacked matrix, no rank detection.
Eigen::MatrixXd r_factor(const SpMat& a) {
  CholmodCommon cc;
  cholmod_sparse* A = to_cholmod(a, cc.get());
  cholmod_sparse* R = nullptr;
  SuiteSparse_long* E = nullptr;
  const SuiteSparse_long rank = SuiteSparseQR<double>(SPQR_ORDERING_DEFAULT, SPQR_NO_TOL,
                                                      static_cast<SuiteSparse_long>(a.cols()), 0, A,
                                                      nullptr, nullptr, nullptr, nullptr, &R, &E,
                                                      nullptr, nullptr, nullptr, cc.get());
  cholmod_l_free_sparse(&A, cc.get());
  if (rank < 0 || R == nullptr) throw NumericalError("sparse QR for singular values failed");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(R->nrow),
                                              static_cast<Eigen::Index>(R->ncol));
  const auto* p = static_cast<const SuiteSparse_long*>(R->p);
  const auto* i = static_cast<const SuiteSparse_long*>(R->i);
  const auto* x = static_cast<const double*>(R->x);
  for (std::size_t c = 0; c < R->ncol; ++c) {
    for (SuiteSparse_long k = p[c]; k < p[c + 1]; ++k) out(i[k], static_cast<Eigen::Index>(c)) = x[k];
  }
  cholmod_l_free_sparse(&R, cc.get());
  if (E != nullptr) cholmod_l_free(static_cast<std::size_t>(a.cols()), sizeof(SuiteSparse_long), E, cc.get());
  return out;
}

std::vector<double> iterative_smallest(const SpMat& a, std::size_t k) {
  SparseQr qr(a, SPQR_NO_TOL);
  const Eigen::Index n = a.cols();
  const Eigen::Index b = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(k) + 4);
  Eigen::MatrixXd V(n, b);
  for (Eigen::Index c = 0; c < b; ++c) V.col(c) = uniform_vector(n, 777 + static_cast<std::uint64_t>(c));
  for (int it = 0; it < 40; ++it) {
    V = qr.solve_gram(V);
    Eigen::HouseholderQR<Eigen::MatrixXd> h(V);
    V = h.householderQ() * Eigen::MatrixXd::Identity(n, b);
  }
  const Eigen::MatrixXd AV = a * V;
  auto s = dense_spectrum(AV);
  s.resize(std::min(s.size(), k));
  return s;
}

}  // namespace

std::vector<double> singular_values(const LsBlocks& blocks, std::size_t k) {
  const SpMat A = stacked_matrix(blocks);
  const Eigen::Index n = A.cols();
  if (n <= kDenseSvdMaxCols) {
    if (static_cast<double>(A.rows()) * static_cast<double>(n) <= kDenseSvdMaxEntries) {
      return dense_spectrum(Eigen::MatrixXd(A));
    }
    return dense_spectrum(r_factor(A));
  }
  auto s = iterative_smallest(A, k);
  s.push_back(largest_singular_value(A));
  return s;
}

std::vector<double> smallest_singular_values(const LsBlocks& blocks, std::size_t k) {
  auto s = singular_values(blocks, k);
  if (s.size() > k) s.resize(k);
  return s;
}

Eigen::VectorXd uniform_vector(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = static_cast<double>(gen() >> 11) * 0x1.0p-53;
  return v;
}

Eigen::VectorXd perturb_reference(const Eigen::VectorXd& d, double eps, std::uint64_t seed) {
  if (eps == 0.0) return d;
  const Eigen::VectorXd u = uniform_vector(d.size(), seed);
  return d.array() * (1.0 + eps * u.array());
}

Eigen::VectorXd bootstrap_reference(const LsBlocks& blocks, SolverPath path, double delta0) {
  LsBlocks b = blocks;
  b.delta = delta0;
  b.d_star = Eigen::VectorXd::Zero(blocks.unknowns());
  return solve(b, path).c;
}

}  // namespace fracollo
