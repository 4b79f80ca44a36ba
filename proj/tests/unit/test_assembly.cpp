#include "fracollo/assembly.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace fracollo;

namespace {

DofMap square_map(int n) { return DofMap::build(BackgroundMesh::uniform(Domain::rectangle({-1, 1, -1, 1}), n, n)); }

Eigen::VectorXd quadratic(const DofMap& dm) {
  return dm.interpolate([](Point p) { return std::array<double, 4>{p.x * p.x + p.y * p.y, 2 * p.x, 2 * p.y, 0.0}; });
}

Eigen::VectorXd exp_field(const DofMap& dm) {
  return dm.interpolate([](Point p) {
    const double e = std::exp(p.x + p.y);
    return std::array<double, 4>{e, e, e, e};
  });
}

std::vector<Point> random_points(int n, double lo, double hi, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point> out(static_cast<std::size_t>(n));
  for (auto& p : out) p = {u(gen), u(gen)};
  return out;
}

}  // namespace

TEST_CASE("collocation rows reproduce u - nu Lap u on a quadratic") {
  const auto dm = square_map(4);
  const auto pts = random_points(50, -0.95, 0.95, 1);
  const auto b = assemble_collocation(dm, pts);
  const double nu = 0.3;
  const Eigen::VectorXd r = (b.A - nu * b.S) * quadratic(dm);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const double u = pts[k].x * pts[k].x + pts[k].y * pts[k].y;
    CHECK(std::abs(r[static_cast<Eigen::Index>(k)] - (u - 4 * nu)) < 1e-9);
  }
  for (int k = 0; k < b.A.outerSize(); ++k) CHECK(b.A.col(k).nonZeros() >= 0);
  const SpMat rows = b.A;
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm = rows;
  for (Eigen::Index i = 0; i < rm.rows(); ++i) CHECK(rm.row(i).nonZeros() <= 16);
  CHECK(((b.A - nu * b.S) * Eigen::VectorXd::Zero(dm.size())).norm() == 0.0);
}

TEST_CASE("one interior cell gives a dense 25x16 block") {
  const auto dm = square_map(2);
  const auto m = dm.mesh();
  const auto pts = map_to_cell(m, 0, 0, reference_grid(5, 5));
  const auto b = assemble_collocation(dm, pts);
  CHECK(b.A.rows() == 25);
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm = b.A;
  for (Eigen::Index i = 0; i < rm.rows(); ++i) CHECK(rm.row(i).nonZeros() == 16);
}

TEST_CASE("finite-volume flux of a quadratic") {
  const auto dm = square_map(4);
  const auto pts = random_points(40, -0.9, 0.9, 2);
  const Eigen::VectorXd c = quadratic(dm);
  const auto f = assemble_fvm(dm, pts, 1e-2, 8);
  CHECK(f.fallback.empty());
  CHECK((f.S * c - Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pts.size()), 4.0)).cwiseAbs().maxCoeff() < 1e-9);

  const auto col = assemble_collocation(dm, pts);
  const double rho = 1e-2;
  const Eigen::VectorXd e = exp_field(dm);
  const auto fe = assemble_fvm(dm, pts, rho, 8);
  CHECK(std::abs(((fe.A - col.A) * e).norm() - rho * rho / 8 * (col.S * e).norm()) <= 1e-12 * (col.S * e).norm());
}

TEST_CASE("trapezoidal flux is exact for cubic fields with at least six nodes") {
  const auto dm = square_map(2);
  const auto c = dm.interpolate([](Point p) {
    return std::array<double, 4>{p.x * p.x * p.x * p.y, 3 * p.x * p.x * p.y, p.x * p.x * p.x, 3 * p.x * p.x};
  });
  const std::vector<Point> pts{{-0.5, -0.5}, {0.4, 0.6}, {0.3, -0.7}};
  const auto a = assemble_fvm(dm, pts, 0.1, 6);
  const auto b = assemble_fvm(dm, pts, 0.1, 12);
  CHECK(((a.S - b.S) * c).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("dirichlet rows") {
  const Domain d = Domain::circle({0, 0}, 0.8);
  const auto dm = DofMap::build(BackgroundMesh::uniform(d, {-1, 1, -1, 1}, 16, 16));
  const auto s = d.sample_boundary(64);
  const SpMat B = assemble_dirichlet(dm, s);
  CHECK(B.rows() == 64);
  Eigen::SparseMatrix<double, Eigen::RowMajor> rm = B;
  for (Eigen::Index i = 0; i < rm.rows(); ++i) CHECK(rm.row(i).nonZeros() <= 16);
  const Eigen::VectorXd one = dm.interpolate([](Point) { return std::array<double, 4>{1, 0, 0, 0}; });
  CHECK((B * one - Eigen::VectorXd::Ones(64)).cwiseAbs().maxCoeff() < 1e-13);
  const Eigen::VectorXd r = B * exp_field(dm);
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(std::abs(r[static_cast<Eigen::Index>(k)] - std::exp(s[k].point.x + s[k].point.y)) < 1e-5);
  }
}

TEST_CASE("neumann rows") {
  const Domain d = Domain::circle({0, 0}, 1.0);
  const auto dm = DofMap::build(BackgroundMesh::uniform(d, {-1, 1, -1, 1}, 32, 32));
  CHECK(default_neumann_weight(dm.mesh()) == doctest::Approx(256.0));
  const std::vector<BoundarySample> s{{{1, 0}, {1, 0}, 0.0}};
  const SpMat grad = assemble_neumann(dm, s, 0.0, 1.0) - assemble_dirichlet(dm, s);
  CHECK(-(grad * exp_field(dm))[0] == doctest::Approx(std::exp(1.0)).epsilon(1e-6));
  const Eigen::VectorXd one = dm.interpolate([](Point) { return std::array<double, 4>{2.5, 0, 0, 0}; });
  CHECK((assemble_neumann(dm, s, 0.1, 256.0) * one)[0] == doctest::Approx(2.5));
  const Eigen::VectorXd rhs = neumann_rhs(Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 0.5), 4.0);
  CHECK(rhs[0] == doctest::Approx(1.0));
}

TEST_CASE("interface rows") {
  const auto dm = square_map(4);
  const std::vector<BoundarySample> s{{{0.3, 0.1}, {1, 0}, 0}, {{-0.6, 0.4}, {1, 0}, 0}, {{0.8, -0.9}, {1, 0}, 0}};
  const auto rows = assemble_interface(dm, dm, s);
  const Eigen::VectorXd e = exp_field(dm);
  Eigen::VectorXd same(2 * dm.size());
  same << e, e;
  CHECK((rows.continuity * same).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((rows.flux * same).cwiseAbs().maxCoeff() < 1e-14);

  const Eigen::VectorXd x = dm.interpolate([](Point p) { return std::array<double, 4>{p.x, 1, 0, 0}; });
  const Eigen::VectorXd x1 = dm.interpolate([](Point p) { return std::array<double, 4>{p.x + 1, 1, 0, 0}; });
  Eigen::VectorXd shift(2 * dm.size());
  shift << x, x1;
  CHECK((rows.continuity * shift + Eigen::VectorXd::Ones(3)).cwiseAbs().maxCoeff() < 1e-13);

  const Eigen::VectorXd sq = dm.interpolate([](Point p) { return std::array<double, 4>{p.x * p.x, 2 * p.x, 0, 0}; });
  const Eigen::VectorXd lin = dm.interpolate([](Point p) { return std::array<double, 4>{2 * p.x, 2, 0, 0}; });
  Eigen::VectorXd pair(2 * dm.size());
  pair << sq, lin;
  const Eigen::VectorXd fr = rows.flux * pair;
  for (std::size_t k = 0; k < s.size(); ++k) {
    CHECK(std::abs(fr[static_cast<Eigen::Index>(k)] - (2 * s[k].point.x - 2)) < 1e-12);
  }
}

TEST_CASE("block helpers") {
  SpMat a(2, 3), b(1, 3);
  a.insert(0, 0) = 1;
  a.insert(1, 2) = 2;
  b.insert(0, 1) = 3;
  const SpMat v = vstack({&a, &b});
  CHECK(v.rows() == 3);
  CHECK(v.coeff(2, 1) == 3);
  const SpMat h = hstack(a, a);
  CHECK(h.cols() == 6);
  CHECK(h.coeff(1, 5) == 2);
  const SpMat d = blockdiag(a, b);
  CHECK(d.rows() == 3);
  CHECK(d.cols() == 6);
  CHECK(d.coeff(2, 4) == 3);
}
