#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracollo {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

/// Axis-aligned rectangle [x_min, x_max] x [y_min, y_max].
struct Box {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double diagonal() const { return std::hypot(width(), height()); }
  bool contains(Point p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }
  Box shrunk(double margin) const {
    return {x_min + margin, x_max - margin, y_min + margin, y_max - margin};
  }
};

/// Thrown for malformed or degenerate geometry descriptions.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundarySample {
  Point point;
  Point normal;  ///< unit, pointing out of the domain
  double arclength = 0.0;
};

/// A closed parametric curve. Orientation is part of the curve: the domain
/// lies to the left of the direction of travel, so the outward normal is the
/// unit tangent rotated by -90 degrees.
class Curve {
 public:
  virtual ~Curve() = default;

  virtual Point point(double t) const = 0;
  virtual Point derivative(double t) const = 0;
  virtual double t_begin() const = 0;
  virtual double t_end() const = 0;

  /// Signed number of crossings of the ray {p + (s, 0), s > 0}.
  virtual int winding_contribution(Point p) const = 0;
  /// True if the curve passes through the open box.
  virtual bool crosses(const Box& open_box) const = 0;
  virtual double distance(Point p) const = 0;
  /// Equivalent to distance(p) <= tol, but prunes far pieces.
  virtual bool within(Point p, double tol) const = 0;
  virtual Box bounds() const = 0;
  virtual double length() const = 0;
  /// Parameter at which the arclength measured from t_begin() equals s.
  virtual double param_at_arclength(double s) const = 0;
  /// Enclosed area, positive for counter-clockwise orientation.
  virtual double signed_area() const = 0;
  /// Whether the tangent direction is continuous everywhere.
  virtual bool smooth() const = 0;

  Point outward_normal(double t) const;
};

/// Full circle, counter-clockwise, parametrised by angle.
class CircleCurve final : public Curve {
 public:
  CircleCurve(Point center, double radius, bool reversed = false);

  Point point(double t) const override;
  Point derivative(double t) const override;
  double t_begin() const override { return 0.0; }
  double t_end() const override { return 2.0 * M_PI; }
  int winding_contribution(Point p) const override;
  bool crosses(const Box& open_box) const override;
  double distance(Point p) const override;
  bool within(Point p, double tol) const override { return distance(p) <= tol; }
  Box bounds() const override;
  double length() const override { return 2.0 * M_PI * radius_; }
  double param_at_arclength(double s) const override { return s / radius_; }
  double signed_area() const override;
  bool smooth() const override { return true; }

  Point center() const { return center_; }
  double radius() const { return radius_; }

 private:
  Point center_;
  double radius_;
  double sign_;
};

/// Closed chain of parametric cubic pieces. Polylines are chains of linear
/// pieces; spline boundaries are C^2 cubic interpolants of control data.
class CubicChain final : public Curve {
 public:
  struct Piece {
    double t0 = 0.0;
    double h = 1.0;
    // P(u) = a + b u + c u^2 + d u^3, u = (t - t0) / h in [0, 1]
    Point a, b, c, d;
    Box box;
    double length = 0.0;
  };

  CubicChain(std::vector<Piece> pieces, bool smooth_joints);

  static CubicChain polyline(std::span<const Point> vertices);
  /// Complete cubic spline with prescribed end slopes (derivatives w.r.t. the
  /// parameter), the default when control data carries two extra columns.
  static CubicChain clamped_spline(std::span<const double> knots, std::span<const Point> values,
                                   Point start_slope, Point end_slope);
  /// Periodic cubic spline; values.front() must equal values.back().
  static CubicChain periodic_spline(std::span<const double> knots, std::span<const Point> values);

  Point point(double t) const override;
  Point derivative(double t) const override;
  double t_begin() const override { return pieces_.front().t0; }
  double t_end() const override { return pieces_.back().t0 + pieces_.back().h; }
  int winding_contribution(Point p) const override;
  bool crosses(const Box& open_box) const override;
  double distance(Point p) const override;
  bool within(Point p, double tol) const override;
  Box bounds() const override { return bounds_; }
  double length() const override { return length_; }
  double param_at_arclength(double s) const override;
  double signed_area() const override;
  bool smooth() const override { return smooth_joints_; }

  CubicChain reversed() const;
  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  std::size_t piece_index(double t) const;

  std::vector<Piece> pieces_;
  bool smooth_joints_;
  Box bounds_{};
  double length_ = 0.0;
};

/// Description of a domain as read from configuration.
struct DomainSpec {
  enum class Kind { rectangle, circle, spline_boundary, polyline_boundary };
  Kind kind = Kind::rectangle;
  Box rectangle{-1.0, 1.0, -1.0, 1.0};
  Point center{};
  double radius = 1.0;
  std::vector<double> knots;
  std::vector<Point> control;  ///< knots.size() or knots.size() + 2 columns
  std::vector<Point> vertices;
};

/// Closed planar region bounded by one outer curve and optional holes.
/// Immutable after construction.
class Domain {
 public:
  enum class Kind { rectangle, circle, spline_boundary, polyline_boundary, difference };

  static Domain build(const DomainSpec& spec);
  static Domain rectangle(Box box);
  static Domain circle(Point center, double radius);
  static Domain spline(std::vector<double> knots, std::vector<Point> control);
  static Domain polyline(std::vector<Point> vertices);
  /// outer \ closure(hole); the hole must lie strictly inside outer.
  static Domain difference(const Domain& outer, const Domain& hole);

  Kind kind() const { return kind_; }

  /// Strict inside test; within band() of the boundary either answer may result.
  bool contains(Point p) const;
  /// Inside or within band() of the boundary.
  bool contains_closed(Point p) const;
  double distance_to_boundary(Point p) const;

  /// n samples approximately equispaced in arclength along the whole boundary.
  std::vector<BoundarySample> sample_boundary(std::size_t n) const;
  /// Samples on one boundary component (0 = outer curve).
  std::vector<BoundarySample> sample_curve(std::size_t curve, std::size_t n) const;

  Box bounding_box() const { return box_; }
  double area() const;
  double diameter() const { return box_.diagonal(); }
  double band() const { return 1e-12 * diameter(); }
  double perimeter() const;

  /// True if some boundary curve passes through the open box.
  bool boundary_crosses(const Box& open_box) const;

  std::size_t curve_count() const { return curves_.size(); }
  const Curve& curve(std::size_t i) const { return *curves_.at(i); }

 private:
  Domain(Kind kind, std::vector<std::shared_ptr<const Curve>> curves);

  Kind kind_;
  std::vector<std::shared_ptr<const Curve>> curves_;
  Box box_{};
  Box rect_{};  // rectangle fast path
};

/// The boundary shapes of the model-problem test cases I-IV.
Domain case_domain(int case_number, double Lambda = 0.5);
DomainSpec case_domain_spec(int case_number, double Lambda = 0.5);

}  // namespace fracollo
