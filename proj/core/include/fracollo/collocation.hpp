#pragma once

#include "fracollo/geometry.hpp"
#include "fracollo/mesh_basis.hpp"

#include <span>
#include <vector>

namespace fracollo {

enum class DensityMode { nonuniform, uniform };

/// Midpoint lattice ((2k-1)/2p, (2l-1)/2q), l outer and k inner.
std::vector<Point> reference_grid(int p, int q);

/// Affine image of reference points in cell (i, j).
std::vector<Point> map_to_cell(const BackgroundMesh& mesh, int i, int j, std::span<const Point> pts);

struct CollocationSet {
  std::vector<Point> interior;
  std::vector<BoundarySample> boundary;
  int p = 10;
  int q = 10;
  DensityMode mode = DensityMode::nonuniform;
  /// Interior point count per cell, row-major (j outer).
  std::vector<int> per_cell;

  std::vector<Point> boundary_points() const;
};

/// Interior and boundary collocation points. Cells are visited j outer, i
/// inner; points inside a cell follow reference_grid order.
CollocationSet build_collocation_set(const BackgroundMesh& mesh, const Domain& domain, int p, int q,
                                     DensityMode mode, std::size_t n_boundary);

}  // namespace fracollo
