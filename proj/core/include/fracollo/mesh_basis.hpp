#pragma once

#include "fracollo/geometry.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fracollo {

enum class CellClass : std::uint8_t { interior, edge23, corner1, outside };

const char* to_string(CellClass c);

enum class Deriv : std::uint8_t { id, dx, dy, dxx, dyy, dxy, laplacian, dxx_dyy, normal_grad };

/// Sparse row over the global DOF vector: one cell footprint, 16 entries.
struct BasisRow {
  std::array<int, 16> indices{};
  std::array<double, 16> values{};

  double dot(const Eigen::VectorXd& c) const {
    double s = 0.0;
    for (int k = 0; k < 16; ++k) s += values[k] * c[indices[k]];
    return s;
  }
};

struct CellIndex {
  int i = 0;
  int j = 0;
};

/// Classifies cell [x0,x1]x[y0,y1] against the domain.
///
/// Vertices on the boundary count as inside. A cell is interior when its
/// four vertices, a 5x5 probe grid and the whole open cell are inside. Two or
/// three inside vertices give edge23, as does a cut cell with four. One inside
/// vertex gives corner1, as does a cut cell with none.
CellClass classify_cell(const Domain& domain, const Box& cell);

/// Rectangular background grid over a box containing the domain.
class BackgroundMesh {
 public:
  /// Uniform N_x by N_y grid over the bounding box of the domain.
  static BackgroundMesh uniform(const Domain& domain, int nx, int ny);
  /// Uniform grid over an explicit box (which must contain the domain).
  static BackgroundMesh uniform(const Domain& domain, const Box& box, int nx, int ny);
  /// Arbitrary strictly increasing grid lines.
  static BackgroundMesh from_lines(const Domain& domain, std::vector<double> xs,
                                   std::vector<double> ys);

  int nx() const { return static_cast<int>(xs_.size()) - 1; }
  int ny() const { return static_cast<int>(ys_.size()) - 1; }
  const std::vector<double>& grid_x() const { return xs_; }
  const std::vector<double>& grid_y() const { return ys_; }
  Box box() const { return {xs_.front(), xs_.back(), ys_.front(), ys_.back()}; }
  Box cell_box(int i, int j) const { return {xs_[i], xs_[i + 1], ys_[j], ys_[j + 1]}; }
  CellClass cell_class(int i, int j) const { return classes_[static_cast<std::size_t>(j) * nx() + i]; }
  std::size_t count(CellClass c) const;
  std::size_t active_cell_count() const { return classes_.size() - count(CellClass::outside); }

  /// A non-outside cell containing p (closed cells, small tolerance), if any.
  std::optional<CellIndex> locate(Point p) const;

 private:
  BackgroundMesh(const Domain& domain, std::vector<double> xs, std::vector<double> ys);

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<CellClass> classes_;
};

/// Coefficient layout of the C^1 bicubic Hermite space on the active cells.
///
/// Nodes are numbered lexicographically (i fastest) over active nodes only;
/// node k owns DOFs 4k..4k+3 = (value, d/dx, d/dy, d2/dxdy).
class DofMap {
 public:
  static DofMap build(const BackgroundMesh& mesh);

  const BackgroundMesh& mesh() const { return mesh_; }
  int size() const { return M_; }
  int active_nodes() const { return M_ / 4; }
  /// Node number or -1 for inactive nodes.
  int node(int i, int j) const { return node_[static_cast<std::size_t>(j) * (mesh_.nx() + 1) + i]; }
  int dof(int i, int j, int kind) const { return 4 * node(i, j) + kind; }

  /// Row r with r . c = D^k (Phi^T c)(p). Throws if p has no basis support.
  BasisRow row(Point p, Deriv kind, Point normal = {}) const;
  BasisRow row_in_cell(CellIndex cell, Point p, Deriv kind, Point normal = {}) const;

  Eigen::VectorXd eval(const Eigen::VectorXd& c, std::span<const Point> pts, Deriv kind) const;
  double eval(const Eigen::VectorXd& c, Point p, Deriv kind) const;

  /// Coefficients from nodal data {u, u_x, u_y, u_xy}.
  Eigen::VectorXd interpolate(const std::function<std::array<double, 4>(Point)>& data) const;

 private:
  explicit DofMap(BackgroundMesh mesh) : mesh_(std::move(mesh)) {}

  BackgroundMesh mesh_;
  std::vector<int> node_;
  int M_ = 0;
};

/// 1D Hermite shape functions on a cell of width h at local coordinate s in
/// [0,1]: entries (value left, slope left, value right, slope right) of the
/// requested derivative order (0, 1 or 2).
std::array<double, 4> hermite_shape(double s, double h, int order);

}  // namespace fracollo
