#include "fracollo/collocation.hpp"

#include <stdexcept>

namespace fracollo {

std::vector<Point> reference_grid(int p, int q) {
  if (p < 1 || q < 1) throw std::invalid_argument("reference_grid: p and q must be positive");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(p) * q);
  for (int l = 1; l <= q; ++l) {
    for (int k = 1; k <= p; ++k) {
      pts.push_back({(2.0 * k - 1.0) / (2.0 * p), (2.0 * l - 1.0) / (2.0 * q)});
    }
  }
  return pts;
}

std::vector<Point> map_to_cell(const BackgroundMesh& mesh, int i, int j, std::span<const Point> pts) {
  const Box c = mesh.cell_box(i, j);
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const auto& r : pts) out.push_back({c.width() * r.x + c.x_min, c.height() * r.y + c.y_min});
  return out;
}

std::vector<Point> CollocationSet::boundary_points() const {
  std::vector<Point> out;
  out.reserve(boundary.size());
  for (const auto& b : boundary) out.push_back(b.point);
  return out;
}

CollocationSet build_collocation_set(const BackgroundMesh& mesh, const Domain& domain, int p, int q,
                                     DensityMode mode, std::size_t n_boundary) {
  CollocationSet set;
  set.p = p;
  set.q = q;
  set.mode = mode;
  const auto g55 = reference_grid(5, 5);
  const auto gpq = reference_grid(p, q);
  const auto g2p2q = reference_grid(2 * p, 2 * q);
  set.per_cell.assign(static_cast<std::size_t>(mesh.nx()) * mesh.ny(), 0);

  for (int j = 0; j < mesh.ny(); ++j) {
    for (int i = 0; i < mesh.nx(); ++i) {
      const CellClass cls = mesh.cell_class(i, j);
      if (cls == CellClass::outside) continue;
      const std::vector<Point>* ref = &gpq;
      if (mode == DensityMode::nonuniform) {
        if (cls == CellClass::interior) ref = &g55;
        else if (cls == CellClass::corner1) ref = &g2p2q;
      }
      int kept = 0;
      for (const auto& pt : map_to_cell(mesh, i, j, *ref)) {
        if (cls == CellClass::interior || domain.contains(pt)) {
          set.interior.push_back(pt);
          ++kept;
        }
      }
      set.per_cell[static_cast<std::size_t>(j) * mesh.nx() + i] = kept;
    }
  }
  if (set.interior.empty()) throw GeometryError("no interior collocation points: mesh and domain do not overlap");
  if (n_boundary > 0) {
    if (n_boundary < 4) throw GeometryError("at least 4 boundary collocation points required");
    set.boundary = domain.sample_boundary(n_boundary);
  }
  return set;
}

}  // namespace fracollo
