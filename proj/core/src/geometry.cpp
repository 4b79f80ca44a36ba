#include "fracollo/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace fracollo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 10-point Gauss-Legendre rule on [0, 1].
constexpr std::array<double, 10> kGlNodes = {
    0.013046735741414139961, 0.067468316655507744633, 0.160295215850487796883,
    0.283302302935376404600, 0.425562830509184394558, 0.574437169490815605442,
    0.716697697064623595400, 0.839704784149512203117, 0.932531683344492255367,
    0.986953264258585860039};
constexpr std::array<double, 10> kGlWeights = {
    0.033335672154344068797, 0.074725674575290296572, 0.109543181257991021998,
    0.134633359654998177546, 0.147762112357376435087, 0.147762112357376435087,
    0.134633359654998177546, 0.109543181257991021998, 0.074725674575290296572,
    0.033335672154344068797};

constexpr int kLengthSubintervals = 8;

Point eval(const CubicChain::Piece& pc, double u) {
  return pc.a + u * (pc.b + u * (pc.c + u * pc.d));
}

Point eval_du(const CubicChain::Piece& pc, double u) {
  return pc.b + u * (2.0 * pc.c + 3.0 * u * pc.d);
}

Point eval_du2(const CubicChain::Piece& pc, double u) {
  return 2.0 * pc.c + 6.0 * u * pc.d;
}

// Roots in (0, 1) of b + 2 c u + 3 d u^2, sorted.
std::vector<double> critical_points(double b, double c, double d) {
  std::vector<double> out;
  const double A = 3.0 * d;
  const double B = 2.0 * c;
  const double C = b;
  const double scale = std::abs(A) + std::abs(B) + std::abs(C);
  if (scale == 0.0) return out;
  auto push = [&](double u) {
    if (u > 0.0 && u < 1.0) out.push_back(u);
  };
  if (std::abs(A) <= 1e-14 * scale) {
    if (std::abs(B) > 1e-14 * scale) push(-C / B);
  } else {
    const double disc = B * B - 4.0 * A * C;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (B + std::copysign(sq, B));
      if (q != 0.0) {
        push(q / A);
        push(C / q);
      } else {
        push(0.0);
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Root of the monotone cubic g on [u0, u1] with g(u0), g(u1) of opposite sign
// (or zero at one end).
template <class G>
double bisect(G&& g, double u0, double u1, double g0) {
  for (int it = 0; it < 200 && u1 - u0 > 4.0 * std::numeric_limits<double>::epsilon(); ++it) {
    const double um = 0.5 * (u0 + u1);
    const double gm = g(um);
    if ((gm < 0.0) == (g0 < 0.0) && gm != 0.0) {
      u0 = um;
      g0 = gm;
    } else {
      u1 = um;
    }
  }
  return 0.5 * (u0 + u1);
}

double cubic_coord(const CubicChain::Piece& pc, double u, bool ycoord) {
  return ycoord ? pc.a.y + u * (pc.b.y + u * (pc.c.y + u * pc.d.y))
                : pc.a.x + u * (pc.b.x + u * (pc.c.x + u * pc.d.x));
}

// All parameters u in [0, 1] where the chosen coordinate equals v.
std::vector<double> level_crossings(const CubicChain::Piece& pc, bool ycoord, double v) {
  std::vector<double> breaks{0.0};
  const auto crit = ycoord ? critical_points(pc.b.y, pc.c.y, pc.d.y)
                           : critical_points(pc.b.x, pc.c.x, pc.d.x);
  breaks.insert(breaks.end(), crit.begin(), crit.end());
  breaks.push_back(1.0);
  std::vector<double> roots;
  auto g = [&](double u) { return cubic_coord(pc, u, ycoord) - v; };
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    const double g0 = g(breaks[k]);
    const double g1 = g(breaks[k + 1]);
    if (g0 == 0.0) {
      roots.push_back(breaks[k]);
    } else if (g1 == 0.0) {
      roots.push_back(breaks[k + 1]);
    } else if ((g0 < 0.0) != (g1 < 0.0)) {
      roots.push_back(bisect(g, breaks[k], breaks[k + 1], g0));
    }
  }
  return roots;
}

Box piece_box(const CubicChain::Piece& pc) {
  Box b{std::min(pc.a.x, eval(pc, 1.0).x), std::max(pc.a.x, eval(pc, 1.0).x),
        std::min(pc.a.y, eval(pc, 1.0).y), std::max(pc.a.y, eval(pc, 1.0).y)};
  for (double u : critical_points(pc.b.x, pc.c.x, pc.d.x)) {
    const double x = eval(pc, u).x;
    b.x_min = std::min(b.x_min, x);
    b.x_max = std::max(b.x_max, x);
  }
  for (double u : critical_points(pc.b.y, pc.c.y, pc.d.y)) {
    const double y = eval(pc, u).y;
    b.y_min = std::min(b.y_min, y);
    b.y_max = std::max(b.y_max, y);
  }
  return b;
}

double box_distance(const Box& b, Point p) {
  const double dx = std::max({b.x_min - p.x, 0.0, p.x - b.x_max});
  const double dy = std::max({b.y_min - p.y, 0.0, p.y - b.y_max});
  return std::hypot(dx, dy);
}

// Arclength of piece over [0, u].
double piece_arclength(const CubicChain::Piece& pc, double u) {
  double s = 0.0;
  const double w = u / kLengthSubintervals;
  for (int k = 0; k < kLengthSubintervals; ++k) {
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
      s += w * kGlWeights[q] * norm(eval_du(pc, (k + kGlNodes[q]) * w));
    }
  }
  return s;
}

double piece_distance(const CubicChain::Piece& pc, Point p) {
  constexpr int kSamples = 16;
  double best_u = 0.0;
  double best = kInf;
  for (int k = 0; k <= kSamples; ++k) {
    const double u = static_cast<double>(k) / kSamples;
    const double d = norm(eval(pc, u) - p);
    if (d < best) {
      best = d;
      best_u = u;
    }
  }
  double u = best_u;
  for (int it = 0; it < 30; ++it) {
    const Point r = eval(pc, u) - p;
    const Point t = eval_du(pc, u);
    const double g = dot(r, t);
    const double h = dot(t, t) + dot(r, eval_du2(pc, u));
    if (h <= 0.0) break;
    const double un = std::clamp(u - g / h, 0.0, 1.0);
    if (std::abs(un - u) < 1e-15) {
      u = un;
      break;
    }
    u = un;
  }
  return std::min(best, norm(eval(pc, u) - p));
}

void require_increasing(std::span<const double> knots) {
  if (knots.size() < 3) throw GeometryError("spline boundary needs at least 3 knots");
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    if (!(knots[i + 1] > knots[i])) throw GeometryError("spline knots must be strictly increasing");
  }
}

// Builds the cubic pieces from node values and node derivatives (w.r.t. t).
std::vector<CubicChain::Piece> hermite_pieces(std::span<const double> knots,
                                              std::span<const Point> values,
                                              const std::vector<Point>& slopes) {
  std::vector<CubicChain::Piece> pieces;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double h = knots[i + 1] - knots[i];
    const Point p0 = values[i];
    const Point p1 = values[i + 1];
    const Point m0 = h * slopes[i];
    const Point m1 = h * slopes[i + 1];
    CubicChain::Piece pc;
    pc.t0 = knots[i];
    pc.h = h;
    pc.a = p0;
    pc.b = m0;
    pc.c = 3.0 * (p1 - p0) - 2.0 * m0 - m1;
    pc.d = 2.0 * (p0 - p1) + m0 + m1;
    pieces.push_back(pc);
  }
  return pieces;
}

}  // namespace

Point Curve::outward_normal(double t) const {
  const Point d = derivative(t);
  const double n = norm(d);
  if (n == 0.0) throw GeometryError("degenerate tangent on boundary curve");
  return {d.y / n, -d.x / n};
}

// ---------------------------------------------------------------- circle

CircleCurve::CircleCurve(Point center, double radius, bool reversed)
    : center_(center), radius_(radius), sign_(reversed ? -1.0 : 1.0) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw GeometryError("circle radius must be positive");
}

Point CircleCurve::point(double t) const {
  return {center_.x + radius_ * std::cos(t), center_.y + sign_ * radius_ * std::sin(t)};
}

Point CircleCurve::derivative(double t) const {
  return {-radius_ * std::sin(t), sign_ * radius_ * std::cos(t)};
}

int CircleCurve::winding_contribution(Point p) const {
  return norm(p - center_) < radius_ ? static_cast<int>(sign_) : 0;
}

bool CircleCurve::crosses(const Box& b) const {
  if (b.x_min >= b.x_max || b.y_min >= b.y_max) return false;
  const double near = box_distance(b, center_);
  double far = 0.0;
  for (double x : {b.x_min, b.x_max}) {
    for (double y : {b.y_min, b.y_max}) far = std::max(far, norm(Point{x, y} - center_));
  }
  return near < radius_ && radius_ < far;
}

double CircleCurve::distance(Point p) const { return std::abs(norm(p - center_) - radius_); }

Box CircleCurve::bounds() const {
  return {center_.x - radius_, center_.x + radius_, center_.y - radius_, center_.y + radius_};
}

double CircleCurve::signed_area() const { return sign_ * M_PI * radius_ * radius_; }

// ---------------------------------------------------------------- cubic chain

CubicChain::CubicChain(std::vector<Piece> pieces, bool smooth_joints)
    : pieces_(std::move(pieces)), smooth_joints_(smooth_joints) {
  if (pieces_.empty()) throw GeometryError("empty boundary curve");
  bounds_ = {kInf, -kInf, kInf, -kInf};
  for (auto& pc : pieces_) {
    pc.box = piece_box(pc);
    pc.length = piece_arclength(pc, 1.0);
    bounds_.x_min = std::min(bounds_.x_min, pc.box.x_min);
    bounds_.x_max = std::max(bounds_.x_max, pc.box.x_max);
    bounds_.y_min = std::min(bounds_.y_min, pc.box.y_min);
    bounds_.y_max = std::max(bounds_.y_max, pc.box.y_max);
    length_ += pc.length;
  }
  const double diam = bounds_.diagonal();
  const Point gap = eval(pieces_.back(), 1.0) - pieces_.front().a;
  if (norm(gap) > 1e-12 * std::max(diam, 1.0)) throw GeometryError("boundary curve is not closed");
}

CubicChain CubicChain::polyline(std::span<const Point> vertices) {
  std::vector<Point> v(vertices.begin(), vertices.end());
  if (v.size() >= 2 && norm(v.back() - v.front()) == 0.0) v.pop_back();
  if (v.size() < 3) throw GeometryError("polyline boundary needs at least 3 vertices");
  std::vector<Piece> pieces;
  double t = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point p0 = v[i];
    const Point p1 = v[(i + 1) % v.size()];
    const double len = norm(p1 - p0);
    if (len == 0.0) throw GeometryError("polyline has repeated consecutive vertices");
    Piece pc;
    pc.t0 = t;
    pc.h = len;
    pc.a = p0;
    pc.b = p1 - p0;
    pieces.push_back(pc);
    t += len;
  }
  return CubicChain(std::move(pieces), false);
}

CubicChain CubicChain::clamped_spline(std::span<const double> knots, std::span<const Point> values,
                                      Point start_slope, Point end_slope) {
  require_increasing(knots);
  if (values.size() != knots.size()) throw GeometryError("spline values and knots differ in length");
  const std::size_t n = knots.size();
  // Unknown interior slopes s_1..s_{n-2}; continuity of the second derivative.
  std::vector<Point> slopes(n);
  slopes.front() = start_slope;
  slopes.back() = end_slope;
  if (n > 2) {
    const std::size_t k = n - 2;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k, 2);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = knots[i] - knots[i - 1];
      const double hr = knots[i + 1] - knots[i];
      const std::size_t r = i - 1;
      A(r, r) = 2.0 * (1.0 / hl + 1.0 / hr);
      const Point g = 3.0 * ((1.0 / (hl * hl)) * (values[i] - values[i - 1]) +
                             (1.0 / (hr * hr)) * (values[i + 1] - values[i]));
      rhs(r, 0) = g.x;
      rhs(r, 1) = g.y;
      if (i == 1) {
        rhs(r, 0) -= start_slope.x / hl;
        rhs(r, 1) -= start_slope.y / hl;
      } else {
        A(r, r - 1) = 1.0 / hl;
      }
      if (i + 2 == n) {
        rhs(r, 0) -= end_slope.x / hr;
        rhs(r, 1) -= end_slope.y / hr;
      } else {
        A(r, r + 1) = 1.0 / hr;
      }
    }
    const Eigen::MatrixXd s = A.partialPivLu().solve(rhs);
    for (std::size_t r = 0; r < k; ++r) slopes[r + 1] = {s(r, 0), s(r, 1)};
  }
  auto pieces = hermite_pieces(knots, values, slopes);
  const Point ds = start_slope;
  const Point de = end_slope;
  const bool smooth = std::abs(cross(ds, de)) <= 1e-12 * norm(ds) * norm(de) && dot(ds, de) > 0.0;
  return CubicChain(std::move(pieces), smooth);
}

CubicChain CubicChain::periodic_spline(std::span<const double> knots, std::span<const Point> values) {
  require_increasing(knots);
  if (values.size() != knots.size()) throw GeometryError("spline values and knots differ in length");
  const std::size_t n = knots.size();
  const std::size_t k = n - 1;  // unknown slopes s_0..s_{n-2}, s_{n-1} = s_0
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(k, 2);
  auto h = [&](std::size_t i) { return knots[i + 1] - knots[i]; };
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t il = (i + k - 1) % k;
    const double hl = h(il);
    const double hr = h(i);
    const Point pl = values[il];
    const Point pc = values[i];
    const Point pr = values[i + 1];
    A(i, i) += 2.0 * (1.0 / hl + 1.0 / hr);
    A(i, il) += 1.0 / hl;
    A(i, (i + 1) % k) += 1.0 / hr;
    const Point g = 3.0 * ((1.0 / (hl * hl)) * (pc - pl) + (1.0 / (hr * hr)) * (pr - pc));
    rhs(i, 0) = g.x;
    rhs(i, 1) = g.y;
  }
  const Eigen::MatrixXd s = A.partialPivLu().solve(rhs);
  std::vector<Point> slopes(n);
  for (std::size_t i = 0; i < k; ++i) slopes[i] = {s(i, 0), s(i, 1)};
  slopes[k] = slopes[0];
  return CubicChain(hermite_pieces(knots, values, slopes), true);
}

std::size_t CubicChain::piece_index(double t) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const Piece& pc) { return v < pc.t0; });
  if (it == pieces_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(pieces_.begin(), it) - 1);
}

Point CubicChain::point(double t) const {
  const auto& pc = pieces_[piece_index(t)];
  return eval(pc, (t - pc.t0) / pc.h);
}

Point CubicChain::derivative(double t) const {
  const auto& pc = pieces_[piece_index(t)];
  return (1.0 / pc.h) * eval_du(pc, (t - pc.t0) / pc.h);
}

int CubicChain::winding_contribution(Point p) const {
  int w = 0;
  const std::size_t np = pieces_.size();
  for (std::size_t i = 0; i < np; ++i) {
    const auto& pc = pieces_[i];
    if (p.y < pc.box.y_min || p.y > pc.box.y_max || pc.box.x_max <= p.x) continue;
    std::vector<double> breaks{0.0};
    const auto crit = critical_points(pc.b.y, pc.c.y, pc.d.y);
    breaks.insert(breaks.end(), crit.begin(), crit.end());
    breaks.push_back(1.0);
    // The end of a piece is evaluated as the start of the next so the half-open
    // rule sees identical joint values from both sides.
    const double y_end = pieces_[(i + 1) % np].a.y;
    auto yat = [&](std::size_t k) {
      if (k == 0) return pc.a.y;
      if (k + 1 == breaks.size()) return y_end;
      return cubic_coord(pc, breaks[k], true);
    };
    auto g = [&](double u) { return cubic_coord(pc, u, true) - p.y; };
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
      const double ya = yat(k);
      const double yb = yat(k + 1);
      int dir = 0;
      if (ya <= p.y && p.y < yb) dir = 1;
      else if (yb <= p.y && p.y < ya) dir = -1;
      if (dir == 0) continue;
      double u;
      if (ya == p.y) {
        u = breaks[k];
      } else {
        u = bisect(g, breaks[k], breaks[k + 1], ya - p.y);
      }
      if (cubic_coord(pc, u, false) > p.x) w += dir;
    }
  }
  return w;
}

bool CubicChain::crosses(const Box& b) const {
  if (b.x_min >= b.x_max || b.y_min >= b.y_max) return false;
  auto strictly_in = [&](Point q) {
    return q.x > b.x_min && q.x < b.x_max && q.y > b.y_min && q.y < b.y_max;
  };
  for (const auto& pc : pieces_) {
    if (pc.box.x_max <= b.x_min || pc.box.x_min >= b.x_max || pc.box.y_max <= b.y_min ||
        pc.box.y_min >= b.y_max) {
      continue;
    }
    if (strictly_in(pc.a) || strictly_in(eval(pc, 1.0))) return true;
    for (double X : {b.x_min, b.x_max}) {
      for (double u : level_crossings(pc, false, X)) {
        const double y = eval(pc, u).y;
        if (y > b.y_min && y < b.y_max) return true;
      }
    }
    for (double Y : {b.y_min, b.y_max}) {
      for (double u : level_crossings(pc, true, Y)) {
        const double x = eval(pc, u).x;
        if (x > b.x_min && x < b.x_max) return true;
      }
    }
  }
  return false;
}

double CubicChain::distance(Point p) const {
  double best = kInf;
  for (const auto& pc : pieces_) {
    if (box_distance(pc.box, p) >= best) continue;
    best = std::min(best, piece_distance(pc, p));
  }
  return best;
}

bool CubicChain::within(Point p, double tol) const {
  for (const auto& pc : pieces_) {
    if (box_distance(pc.box, p) > tol) continue;
    if (piece_distance(pc, p) <= tol) return true;
  }
  return false;
}

double CubicChain::param_at_arclength(double s) const {
  s = std::clamp(s, 0.0, length_);
  std::size_t i = 0;
  while (i + 1 < pieces_.size() && s > pieces_[i].length) {
    s -= pieces_[i].length;
    ++i;
  }
  const auto& pc = pieces_[i];
  s = std::min(s, pc.length);
  double lo = 0.0;
  double hi = 1.0;
  double u = pc.length > 0.0 ? s / pc.length : 0.0;
  for (int it = 0; it < 60; ++it) {
    const double f = piece_arclength(pc, u) - s;
    if (std::abs(f) <= 1e-14 * std::max(1.0, pc.length)) break;
    if (f > 0.0) hi = u;
    else lo = u;
    const double sp = norm(eval_du(pc, u));
    double un = sp > 0.0 ? u - f / sp : 0.5 * (lo + hi);
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    u = un;
  }
  return pc.t0 + u * pc.h;
}

double CubicChain::signed_area() const {
  double area = 0.0;
  for (const auto& pc : pieces_) {
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
      const double u = kGlNodes[q];
      area += 0.5 * kGlWeights[q] * cross(eval(pc, u), eval_du(pc, u));
    }
  }
  return area;
}

CubicChain CubicChain::reversed() const {
  std::vector<Piece> out;
  out.reserve(pieces_.size());
  double t = 0.0;
  for (auto it = pieces_.rbegin(); it != pieces_.rend(); ++it) {
    // Q(v) = P(1 - v)
    const Piece& pc = *it;
    Piece q;
    q.t0 = t;
    q.h = pc.h;
    q.a = pc.a + pc.b + pc.c + pc.d;
    q.b = -1.0 * (pc.b + 2.0 * pc.c + 3.0 * pc.d);
    q.c = pc.c + 3.0 * pc.d;
    q.d = -1.0 * pc.d;
    out.push_back(q);
    t += pc.h;
  }
  // Snap joints so the reversed chain closes exactly.
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::size_t src = pieces_.size() - 1 - i;
    out[i].a = pieces_[(src + 1) % pieces_.size()].a;
  }
  return CubicChain(std::move(out), smooth_joints_);
}

// ---------------------------------------------------------------- domain

Domain::Domain(Kind kind, std::vector<std::shared_ptr<const Curve>> curves)
    : kind_(kind), curves_(std::move(curves)) {
  box_ = curves_.front()->bounds();
  if (!(area() > 1e-14 * box_.width() * box_.height()) || !(area() > 0.0)) {
    throw GeometryError("domain has zero or negative area");
  }
}

namespace {

std::shared_ptr<const Curve> oriented(CubicChain chain, bool ccw) {
  const bool is_ccw = chain.signed_area() > 0.0;
  if (is_ccw != ccw) chain = chain.reversed();
  return std::make_shared<CubicChain>(std::move(chain));
}

}  // namespace

Domain Domain::rectangle(Box box) {
  if (!(box.x_max > box.x_min) || !(box.y_max > box.y_min)) {
    throw GeometryError("rectangle must have positive width and height");
  }
  const std::array<Point, 4> v{Point{box.x_min, box.y_min}, Point{box.x_max, box.y_min},
                               Point{box.x_max, box.y_max}, Point{box.x_min, box.y_max}};
  Domain d(Kind::rectangle, {oriented(CubicChain::polyline(v), true)});
  d.rect_ = box;
  d.box_ = box;
  return d;
}

Domain Domain::circle(Point center, double radius) {
  return Domain(Kind::circle, {std::make_shared<CircleCurve>(center, radius)});
}

Domain Domain::spline(std::vector<double> knots, std::vector<Point> control) {
  require_increasing(knots);
  const std::size_t n = knots.size();
  if (control.size() == n + 2) {
    std::span<const Point> values(control.data() + 1, n);
    if (norm(values.front() - values.back()) > 1e-12 * std::max(1.0, norm(values.front()))) {
      throw GeometryError("spline control data does not describe a closed curve");
    }
    std::vector<Point> vals(values.begin(), values.end());
    vals.back() = vals.front();
    auto chain = CubicChain::clamped_spline(knots, vals, control.front(), control.back());
    return Domain(Kind::spline_boundary, {oriented(std::move(chain), true)});
  }
  if (control.size() == n) {
    if (norm(control.front() - control.back()) > 1e-12 * std::max(1.0, norm(control.front()))) {
      throw GeometryError("periodic spline requires the first and last control points to coincide");
    }
    control.back() = control.front();
    auto chain = CubicChain::periodic_spline(knots, control);
    return Domain(Kind::spline_boundary, {oriented(std::move(chain), true)});
  }
  throw GeometryError("spline control data must have as many columns as knots, or two more");
}

Domain Domain::polyline(std::vector<Point> vertices) {
  auto chain = CubicChain::polyline(vertices);
  return Domain(Kind::polyline_boundary, {oriented(std::move(chain), true)});
}

Domain Domain::difference(const Domain& outer, const Domain& hole) {
  if (outer.curve_count() != 1 || hole.curve_count() != 1) {
    throw GeometryError("difference expects simply connected operands");
  }
  const Box hb = hole.bounding_box();
  const Box ob = outer.bounding_box();
  if (!(hb.x_min > ob.x_min && hb.x_max < ob.x_max && hb.y_min > ob.y_min && hb.y_max < ob.y_max)) {
    throw GeometryError("hole must lie strictly inside the outer domain");
  }
  std::vector<std::shared_ptr<const Curve>> curves{outer.curves_.front()};
  const Curve& hc = hole.curve(0);
  if (auto* circ = dynamic_cast<const CircleCurve*>(&hc)) {
    curves.push_back(std::make_shared<CircleCurve>(circ->center(), circ->radius(), true));
  } else {
    curves.push_back(oriented(*dynamic_cast<const CubicChain*>(&hc), false));
  }
  Domain d(Kind::difference, std::move(curves));
  d.box_ = ob;
  return d;
}

Domain Domain::build(const DomainSpec& spec) {
  switch (spec.kind) {
    case DomainSpec::Kind::rectangle:
      return rectangle(spec.rectangle);
    case DomainSpec::Kind::circle:
      return circle(spec.center, spec.radius);
    case DomainSpec::Kind::spline_boundary:
      return spline(spec.knots, spec.control);
    case DomainSpec::Kind::polyline_boundary:
      return polyline(spec.vertices);
  }
  throw GeometryError("unknown domain kind");
}

bool Domain::contains(Point p) const {
  if (kind_ == Kind::rectangle) {
    return p.x > rect_.x_min && p.x < rect_.x_max && p.y > rect_.y_min && p.y < rect_.y_max;
  }
  if (!box_.contains(p)) return false;
  int w = 0;
  for (const auto& c : curves_) w += c->winding_contribution(p);
  return w != 0;
}

bool Domain::contains_closed(Point p) const {
  if (kind_ == Kind::rectangle) return rect_.contains(p);
  if (contains(p)) return true;
  const double tol = band();
  for (const auto& c : curves_) {
    if (c->within(p, tol)) return true;
  }
  return false;
}

double Domain::distance_to_boundary(Point p) const {
  double d = kInf;
  for (const auto& c : curves_) d = std::min(d, c->distance(p));
  return d;
}

std::vector<BoundarySample> Domain::sample_curve(std::size_t curve, std::size_t n) const {
  const Curve& c = *curves_.at(curve);
  if (n == 0) return {};
  const double L = c.length();
  const bool midpoints = !c.smooth();
  std::vector<BoundarySample> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    double s = (static_cast<double>(k) + (midpoints ? 0.5 : 0.0)) * L / static_cast<double>(n);
    double t = c.param_at_arclength(s);
    if (auto* chain = dynamic_cast<const CubicChain*>(&c); chain != nullptr && midpoints) {
      // Nudge off joints, where the normal is undefined.
      for (const auto& pc : chain->pieces()) {
        if (std::abs(t - pc.t0) <= 1e-12 * pc.h) {
          s += 1e-9 * L;
          t = c.param_at_arclength(s);
          break;
        }
      }
    }
    out.push_back({c.point(t), c.outward_normal(t), s});
  }
  return out;
}

std::vector<BoundarySample> Domain::sample_boundary(std::size_t n) const {
  if (curves_.size() == 1) return sample_curve(0, n);
  const double total = perimeter();
  std::vector<BoundarySample> out;
  std::size_t used = 0;
  double offset = 0.0;
  for (std::size_t i = 0; i < curves_.size(); ++i) {
    const double L = curves_[i]->length();
    std::size_t ni = i + 1 == curves_.size()
                         ? n - used
                         : static_cast<std::size_t>(std::llround(static_cast<double>(n) * L / total));
    ni = std::max<std::size_t>(ni, 4);
    used += ni;
    for (auto s : sample_curve(i, ni)) {
      s.arclength += offset;
      out.push_back(s);
    }
    offset += L;
  }
  return out;
}

double Domain::area() const {
  double a = 0.0;
  for (const auto& c : curves_) a += c->signed_area();
  return a;
}

double Domain::perimeter() const {
  double l = 0.0;
  for (const auto& c : curves_) l += c->length();
  return l;
}

bool Domain::boundary_crosses(const Box& open_box) const {
  return std::any_of(curves_.begin(), curves_.end(),
                     [&](const auto& c) { return c->crosses(open_box); });
}

// ---------------------------------------------------------------- cases

DomainSpec case_domain_spec(int case_number, double Lambda) {
  DomainSpec s;
  switch (case_number) {
    case 0:
      s.kind = DomainSpec::Kind::rectangle;
      s.rectangle = {-1.0, 1.0, -1.0, 1.0};
      return s;
    case 1:
      s.kind = DomainSpec::Kind::circle;
      s.center = {0.0, 0.0};
      s.radius = 1.0;
      return s;
    case 2:
      s.kind = DomainSpec::Kind::spline_boundary;
      for (int k = 0; k <= 4; ++k) s.knots.push_back(k * M_PI / 2.0);
      s.control = {{0.0, 1.7}, {1.0, 0.9}, {0.0, 1.8}, {-1.0, 0.5},
                   {0.0, -0.7}, {1.0, 0.9}, {0.0, 1.7}};
      return s;
    case 3:
      s.kind = DomainSpec::Kind::spline_boundary;
      for (int k = 0; k <= 7; ++k) s.knots.push_back(2.0 * M_PI * k / 7.0);
      s.control = {{0.0, 1.7},   {1.0, 0.9},     {0.5, 1.051}, {0.0, 1.708}, {-0.5, 0.791},
                   {-1.0, 0.511}, {-0.4, -0.107}, {0.0, 0.296}, {1.0, 0.9},   {0.0, 1.7}};
      return s;
    case 4:
      s.kind = DomainSpec::Kind::polyline_boundary;
      s.vertices = {{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0},
                    {0.5, -0.5}, {1.0, 0.0}, {0.0, Lambda}};
      return s;
    default:
      throw GeometryError("unknown test case " + std::to_string(case_number));
  }
}

Domain case_domain(int case_number, double Lambda) {
  return Domain::build(case_domain_spec(case_number, Lambda));
}

}  // namespace fracollo
