#include "fracollo/assembly.hpp"

#include "fracollo/parallel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracollo {

namespace {

using Triplet = Eigen::Triplet<double>;

void append(std::vector<Triplet>& t, Eigen::Index r, const BasisRow& row, double scale) {
  for (int k = 0; k < 16; ++k) {
    if (row.values[k] != 0.0) t.emplace_back(r, row.indices[k], scale * row.values[k]);
  }
}

SpMat from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

// Builds one sparse matrix per row generator, parallel over rows.
template <class RowFn>
SpMat build(std::size_t n, Eigen::Index cols, RowFn&& fn) {
  const unsigned chunks = std::max(1u, worker_count());
  std::vector<std::vector<Triplet>> parts(chunks);
  const std::size_t per = (n + chunks - 1) / chunks;
  parallel_for(chunks, [&](std::size_t b, std::size_t e) {
    for (std::size_t c = b; c < e; ++c) {
      const std::size_t lo = c * per;
      const std::size_t hi = std::min(n, lo + per);
      for (std::size_t i = lo; i < hi; ++i) fn(i, parts[c]);
    }
  });
  std::vector<Triplet> all;
  for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
  return from_triplets(static_cast<Eigen::Index>(n), cols, all);
}

}  // namespace

SpMat assemble_rows(const DofMap& dm, std::span<const Point> pts, Deriv kind) {
  return build(pts.size(), dm.size(), [&](std::size_t i, std::vector<Triplet>& t) {
    append(t, static_cast<Eigen::Index>(i), dm.row(pts[i], kind), 1.0);
  });
}

CollocationBlocks assemble_collocation(const DofMap& dm, std::span<const Point> pts) {
  return {assemble_rows(dm, pts, Deriv::id), assemble_rows(dm, pts, Deriv::laplacian)};
}

FvmBlocks assemble_fvm(const DofMap& dm, std::span<const Point> pts, double rho, int K, FluxRule rule,
                       bool strict) {
  if (!(rho > 0.0)) throw std::invalid_argument("control-volume radius must be positive");
  if (K < 6) throw std::invalid_argument("flux quadrature needs at least 6 nodes");
  FvmBlocks out;
  const double a_shift = rho * rho / 8.0;
  out.A = build(pts.size(), dm.size(), [&](std::size_t i, std::vector<Triplet>& t) {
    const auto r = static_cast<Eigen::Index>(i);
    append(t, r, dm.row(pts[i], Deriv::id), 1.0);
    append(t, r, dm.row(pts[i], Deriv::laplacian), a_shift);
  });

  if (rule == FluxRule::expansion) {
    out.S = build(pts.size(), dm.size(), [&](std::size_t i, std::vector<Triplet>& t) {
      const auto r = static_cast<Eigen::Index>(i);
      append(t, r, dm.row(pts[i], Deriv::laplacian), 1.0);
      append(t, r, dm.row(pts[i], Deriv::dxx_dyy), rho * rho / 4.0);
    });
    return out;
  }

  std::vector<double> cs(K);
  std::vector<double> sn(K);
  for (int k = 0; k < K; ++k) {
    const double th = 2.0 * M_PI * (k + 1) / K;
    cs[k] = std::cos(th);
    sn[k] = std::sin(th);
  }
  const double w = 2.0 / (K * rho);
  std::vector<char> fell_back(pts.size(), 0);
  out.S = build(pts.size(), dm.size(), [&](std::size_t i, std::vector<Triplet>& t) {
    const auto r = static_cast<Eigen::Index>(i);
    std::vector<Triplet> local;
    for (int k = 0; k < K; ++k) {
      const Point q{pts[i].x + rho * cs[k], pts[i].y + rho * sn[k]};
      const auto cell = dm.mesh().locate(q);
      if (!cell) {
        if (strict) {
          throw GeometryError("control circle of point " + std::to_string(i) + " leaves the active mesh");
        }
        fell_back[i] = 1;
        append(t, r, dm.row(pts[i], Deriv::laplacian), 1.0);
        return;
      }
      append(local, r, dm.row_in_cell(*cell, q, Deriv::normal_grad, {cs[k], sn[k]}), w);
    }
    t.insert(t.end(), local.begin(), local.end());
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (fell_back[i]) out.fallback.push_back(i);
  }
  if (!out.fallback.empty()) {
    // Fallback rows use the plain collocation id row as well.
    std::vector<Triplet> t;
    for (int k = 0; k < out.A.outerSize(); ++k) {
      for (SpMat::InnerIterator it(out.A, k); it; ++it) {
        if (!fell_back[static_cast<std::size_t>(it.row())]) t.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (std::size_t i : out.fallback) append(t, static_cast<Eigen::Index>(i), dm.row(pts[i], Deriv::id), 1.0);
    out.A = from_triplets(out.A.rows(), out.A.cols(), t);
  }
  return out;
}

SpMat assemble_dirichlet(const DofMap& dm, std::span<const BoundarySample> samples) {
  return build(samples.size(), dm.size(), [&](std::size_t i, std::vector<Triplet>& t) {
    append(t, static_cast<Eigen::Index>(i), dm.row(samples[i].point, Deriv::id), 1.0);
  });
}

double default_neumann_weight(const BackgroundMesh& mesh) {
  const Box b = mesh.box();
  return 4.0 * std::max(b.width() * mesh.nx(), b.height() * mesh.ny());
}

SpMat assemble_neumann(const DofMap& dm, std::span<const BoundarySample> samples, double nu,
                       double weight) {
  return build(samples.size(), dm.size(), [&](std::size_t i, std::vector<Triplet>& t) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto& s = samples[i];
    append(t, r, dm.row(s.point, Deriv::id), 1.0);
    append(t, r, dm.row(s.point, Deriv::laplacian), -nu);
    append(t, r, dm.row(s.point, Deriv::normal_grad, s.normal), -weight);
  });
}

Eigen::VectorXd neumann_rhs(const Eigen::VectorXd& f, const Eigen::VectorXd& g, double weight) {
  return f - weight * g;
}

InterfaceRows assemble_interface(const DofMap& dm_u, const DofMap& dm_v,
                                 std::span<const BoundarySample> samples) {
  const Eigen::Index cols = dm_u.size() + dm_v.size();
  const int off = dm_u.size();
  InterfaceRows out;
  out.continuity = build(samples.size(), cols, [&](std::size_t i, std::vector<Triplet>& t) {
    const auto r = static_cast<Eigen::Index>(i);
    const BasisRow ru = dm_u.row(samples[i].point, Deriv::id);
    BasisRow rv = dm_v.row(samples[i].point, Deriv::id);
    for (auto& idx : rv.indices) idx += off;
    append(t, r, ru, 1.0);
    append(t, r, rv, -1.0);
  });
  out.flux = build(samples.size(), cols, [&](std::size_t i, std::vector<Triplet>& t) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto& s = samples[i];
    const BasisRow ru = dm_u.row(s.point, Deriv::normal_grad, s.normal);
    BasisRow rv = dm_v.row(s.point, Deriv::normal_grad, s.normal);
    for (auto& idx : rv.indices) idx += off;
    append(t, r, ru, 1.0);
    append(t, r, rv, -1.0);
  });
  return out;
}

SpMat vstack(std::initializer_list<const SpMat*> blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = -1;
  std::size_t nnz = 0;
  for (const SpMat* b : blocks) {
    if (cols >= 0 && b->cols() != cols) throw std::invalid_argument("vstack: column mismatch");
    cols = b->cols();
    rows += b->rows();
    nnz += static_cast<std::size_t>(b->nonZeros());
  }
  std::vector<Triplet> t;
  t.reserve(nnz);
  Eigen::Index off = 0;
  for (const SpMat* b : blocks) {
    for (int k = 0; k < b->outerSize(); ++k) {
      for (SpMat::InnerIterator it(*b, k); it; ++it) t.emplace_back(it.row() + off, it.col(), it.value());
    }
    off += b->rows();
  }
  return from_triplets(rows, std::max<Eigen::Index>(cols, 0), t);
}

SpMat hstack(const SpMat& left, const SpMat& right) {
  if (left.rows() != right.rows()) throw std::invalid_argument("hstack: row mismatch");
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(left.nonZeros() + right.nonZeros()));
  for (int k = 0; k < left.outerSize(); ++k) {
    for (SpMat::InnerIterator it(left, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  }
  for (int k = 0; k < right.outerSize(); ++k) {
    for (SpMat::InnerIterator it(right, k); it; ++it) t.emplace_back(it.row(), it.col() + left.cols(), it.value());
  }
  return from_triplets(left.rows(), left.cols() + right.cols(), t);
}

SpMat blockdiag(const SpMat& a, const SpMat& b) {
  SpMat za(a.rows(), b.cols());
  SpMat zb(b.rows(), a.cols());
  const SpMat top = hstack(a, za);
  const SpMat bottom = hstack(zb, b);
  return vstack({&top, &bottom});
}

}  // namespace fracollo
