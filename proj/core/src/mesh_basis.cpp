#include "fracollo/mesh_basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracollo {

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::interior: return "interior";
    case CellClass::edge23: return "edge23";
    case CellClass::corner1: return "corner1";
    case CellClass::outside: return "outside";
  }
  return "?";
}

std::array<double, 4> hermite_shape(double s, double h, int order) {
  const double s2 = s * s;
  const double s3 = s2 * s;
  switch (order) {
    case 0:
      return {2.0 * s3 - 3.0 * s2 + 1.0, h * (s3 - 2.0 * s2 + s), -2.0 * s3 + 3.0 * s2,
              h * (s3 - s2)};
    case 1:
      return {(6.0 * s2 - 6.0 * s) / h, 3.0 * s2 - 4.0 * s + 1.0, (-6.0 * s2 + 6.0 * s) / h,
              3.0 * s2 - 2.0 * s};
    case 2:
      return {(12.0 * s - 6.0) / (h * h), (6.0 * s - 4.0) / h, (-12.0 * s + 6.0) / (h * h),
              (6.0 * s - 2.0) / h};
    default:
      throw std::invalid_argument("hermite_shape: derivative order must be 0, 1 or 2");
  }
}

CellClass classify_cell(const Domain& domain, const Box& cell) {
  const std::array<Point, 4> corners{Point{cell.x_min, cell.y_min}, Point{cell.x_max, cell.y_min},
                                     Point{cell.x_min, cell.y_max}, Point{cell.x_max, cell.y_max}};
  int inside = 0;
  for (const auto& v : corners) inside += domain.contains_closed(v) ? 1 : 0;

  if (inside == 2 || inside == 3) return CellClass::edge23;
  if (inside == 1) return CellClass::corner1;

  const double margin = 1e-10 * std::max(domain.diameter(), cell.diagonal());
  const bool cut = domain.boundary_crosses(cell.shrunk(margin));
  if (inside == 4) {
    if (cut) return CellClass::edge23;
    for (int l = 0; l < 5; ++l) {
      for (int k = 0; k < 5; ++k) {
        const Point p{cell.x_min + (0.1 + 0.2 * k) * cell.width(),
                      cell.y_min + (0.1 + 0.2 * l) * cell.height()};
        if (!domain.contains(p)) return CellClass::edge23;
      }
    }
    return CellClass::interior;
  }
  return cut ? CellClass::corner1 : CellClass::outside;
}

BackgroundMesh::BackgroundMesh(const Domain& domain, std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.size() < 3 || ys_.size() < 3) throw GeometryError("mesh needs at least 2 cells per direction");
  auto increasing = [](const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), [](double a, double b) { return !(b > a); }) == v.end();
  };
  if (!increasing(xs_) || !increasing(ys_)) throw GeometryError("grid lines must be strictly increasing");
  const Box db = domain.bounding_box();
  const double tol = 1e-12 * domain.diameter();
  if (db.x_min < xs_.front() - tol || db.x_max > xs_.back() + tol || db.y_min < ys_.front() - tol ||
      db.y_max > ys_.back() + tol) {
    throw GeometryError("mesh box does not contain the domain");
  }
  classes_.resize(static_cast<std::size_t>(nx()) * ny());
  for (int j = 0; j < ny(); ++j) {
    for (int i = 0; i < nx(); ++i) {
      classes_[static_cast<std::size_t>(j) * nx() + i] = classify_cell(domain, cell_box(i, j));
    }
  }
}

BackgroundMesh BackgroundMesh::uniform(const Domain& domain, int nx, int ny) {
  return uniform(domain, domain.bounding_box(), nx, ny);
}

BackgroundMesh BackgroundMesh::uniform(const Domain& domain, const Box& box, int nx, int ny) {
  if (nx < 2 || ny < 2) throw GeometryError("mesh needs N_x, N_y >= 2");
  std::vector<double> xs(nx + 1);
  std::vector<double> ys(ny + 1);
  for (int i = 0; i <= nx; ++i) xs[i] = box.x_min + box.width() * i / nx;
  for (int j = 0; j <= ny; ++j) ys[j] = box.y_min + box.height() * j / ny;
  xs.back() = box.x_max;
  ys.back() = box.y_max;
  return BackgroundMesh(domain, std::move(xs), std::move(ys));
}

BackgroundMesh BackgroundMesh::from_lines(const Domain& domain, std::vector<double> xs,
                                          std::vector<double> ys) {
  return BackgroundMesh(domain, std::move(xs), std::move(ys));
}

std::size_t BackgroundMesh::count(CellClass c) const {
  return static_cast<std::size_t>(std::count(classes_.begin(), classes_.end(), c));
}

namespace {

// Candidate interval indices for coordinate v: the containing interval plus a
// neighbour when v sits on (or within tol of) a shared line.
int candidates(const std::vector<double>& lines, double v, double tol, std::array<int, 2>& out) {
  const int n = static_cast<int>(lines.size()) - 1;
  if (v < lines.front() - tol || v > lines.back() + tol) return 0;
  auto it = std::upper_bound(lines.begin(), lines.end(), v);
  int i = static_cast<int>(std::distance(lines.begin(), it)) - 1;
  i = std::clamp(i, 0, n - 1);
  int cnt = 0;
  out[cnt++] = i;
  if (i > 0 && v - lines[i] <= tol) out[cnt++] = i - 1;
  else if (i + 1 < n && lines[i + 1] - v <= tol) out[cnt++] = i + 1;
  return cnt;
}

}  // namespace

std::optional<CellIndex> BackgroundMesh::locate(Point p) const {
  const double tol = 1e-12 * box().diagonal();
  std::array<int, 2> ci{};
  std::array<int, 2> cj{};
  const int ni = candidates(xs_, p.x, tol, ci);
  const int nj = candidates(ys_, p.y, tol, cj);
  for (int b = 0; b < nj; ++b) {
    for (int a = 0; a < ni; ++a) {
      if (cell_class(ci[a], cj[b]) != CellClass::outside) return CellIndex{ci[a], cj[b]};
    }
  }
  return std::nullopt;
}

DofMap DofMap::build(const BackgroundMesh& mesh) {
  DofMap dm(mesh);
  const int nx = mesh.nx();
  const int ny = mesh.ny();
  dm.node_.assign(static_cast<std::size_t>(nx + 1) * (ny + 1), -1);
  std::vector<char> active(dm.node_.size(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (mesh.cell_class(i, j) == CellClass::outside) continue;
      for (int b = 0; b < 2; ++b) {
        for (int a = 0; a < 2; ++a) active[static_cast<std::size_t>(j + b) * (nx + 1) + i + a] = 1;
      }
    }
  }
  int next = 0;
  for (std::size_t k = 0; k < active.size(); ++k) {
    if (active[k]) dm.node_[k] = next++;
  }
  dm.M_ = 4 * next;
  return dm;
}

BasisRow DofMap::row(Point p, Deriv kind, Point normal) const {
  const auto cell = mesh_.locate(p);
  if (!cell) {
    throw GeometryError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") lies outside the active mesh");
  }
  return row_in_cell(*cell, p, kind, normal);
}

BasisRow DofMap::row_in_cell(CellIndex cell, Point p, Deriv kind, Point normal) const {
  const auto& xs = mesh_.grid_x();
  const auto& ys = mesh_.grid_y();
  const double hx = xs[cell.i + 1] - xs[cell.i];
  const double hy = ys[cell.j + 1] - ys[cell.j];
  const double sx = (p.x - xs[cell.i]) / hx;
  const double sy = (p.y - ys[cell.j]) / hy;

  std::array<std::array<double, 4>, 3> fx{};
  std::array<std::array<double, 4>, 3> fy{};
  for (int o = 0; o < 3; ++o) {
    fx[o] = hermite_shape(sx, hx, o);
    fy[o] = hermite_shape(sy, hy, o);
  }

  // The operator as a sum of w * (d^ox/dx^ox)(d^oy/dy^oy).
  struct Term {
    int ox, oy;
    double w;
  };
  std::array<Term, 2> terms{};
  int nt = 0;
  switch (kind) {
    case Deriv::id: terms[nt++] = {0, 0, 1.0}; break;
    case Deriv::dx: terms[nt++] = {1, 0, 1.0}; break;
    case Deriv::dy: terms[nt++] = {0, 1, 1.0}; break;
    case Deriv::dxx: terms[nt++] = {2, 0, 1.0}; break;
    case Deriv::dyy: terms[nt++] = {0, 2, 1.0}; break;
    case Deriv::dxy: terms[nt++] = {1, 1, 1.0}; break;
    case Deriv::laplacian:
      terms[nt++] = {2, 0, 1.0};
      terms[nt++] = {0, 2, 1.0};
      break;
    case Deriv::dxx_dyy: terms[nt++] = {2, 2, 1.0}; break;
    case Deriv::normal_grad:
      terms[nt++] = {1, 0, normal.x};
      terms[nt++] = {0, 1, normal.y};
      break;
  }
  BasisRow r;
  int k = 0;
  for (int b = 0; b < 2; ++b) {
    for (int a = 0; a < 2; ++a) {
      const int base = 4 * node(cell.i + a, cell.j + b);
      for (int dk = 0; dk < 4; ++dk) {
        const int xk = 2 * a + (dk & 1);         // value or slope in x
        const int yk = 2 * b + ((dk >> 1) & 1);  // value or slope in y
        double v = 0.0;
        for (int t = 0; t < nt; ++t) {
          const auto& tm = terms[t];
          v += tm.w * fx[tm.ox][xk] * fy[tm.oy][yk];
        }
        r.indices[k] = base + dk;
        r.values[k] = v;
        ++k;
      }
    }
  }
  return r;
}

double DofMap::eval(const Eigen::VectorXd& c, Point p, Deriv kind) const {
  return row(p, kind).dot(c);
}

Eigen::VectorXd DofMap::eval(const Eigen::VectorXd& c, std::span<const Point> pts, Deriv kind) const {
  if (c.size() != M_) throw std::invalid_argument("coefficient vector has wrong length");
  Eigen::VectorXd out(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out[static_cast<Eigen::Index>(i)] = row(pts[i], kind).dot(c);
  return out;
}

Eigen::VectorXd DofMap::interpolate(const std::function<std::array<double, 4>(Point)>& data) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(M_);
  const auto& xs = mesh_.grid_x();
  const auto& ys = mesh_.grid_y();
  for (int j = 0; j < static_cast<int>(ys.size()); ++j) {
    for (int i = 0; i < static_cast<int>(xs.size()); ++i) {
      const int n = node(i, j);
      if (n < 0) continue;
      const auto d = data({xs[i], ys[j]});
      for (int k = 0; k < 4; ++k) c[4 * n + k] = d[k];
    }
  }
  return c;
}

}  // namespace fracollo
