#include "dpotts/geometry/region.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dpotts::geometry {
namespace {

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

}  // namespace

ConvexPolygon::ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  double twice_area = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i], b = vertices_[(i + 1) % n], c = vertices_[(i + 2) % n];
    if (!is_finite(a)) throw std::invalid_argument("polygon vertex not finite");
    if (cross(b - a, c - b) < 0.0) throw std::invalid_argument("polygon not convex or not ccw");
    twice_area += cross(a, b);
  }
  if (!(twice_area > 0.0)) throw std::invalid_argument("polygon has no area");
  bounds_ = {vertices_[0], vertices_[0]};
  for (const Point2& v : vertices_) {
    bounds_.lo = {std::min(bounds_.lo.x, v.x), std::min(bounds_.lo.y, v.y)};
    bounds_.hi = {std::max(bounds_.hi.x, v.x), std::max(bounds_.hi.y, v.y)};
  }
}

ConvexPolygon ConvexPolygon::rectangle(Point2 lo, Point2 hi) {
  return ConvexPolygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
}

ConvexPolygon ConvexPolygon::parallelogram(Point2 origin, Point2 u, Point2 v) {
  if (cross(u, v) < 0.0) std::swap(u, v);
  return ConvexPolygon({origin, origin + u, origin + u + v, origin + v});
}

double ConvexPolygon::area() const {
  double twice = 0.0;
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    twice += cross(vertices_[i], vertices_[(i + 1) % vertices_.size()]);
  }
  return 0.5 * twice;
}

bool ConvexPolygon::contains(Point2 p) const {
  if (vertices_.empty()) return false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = vertices_[i], b = vertices_[(i + 1) % n];
    if (cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

double ConvexPolygon::distance(Point2 p) const {
  if (contains(p)) return 0.0;
  double best = INFINITY;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0; i < n; ++i) {
    best = std::min(best, segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
  }
  return best;
}

double ConvexPolygon::max_distance(Point2 p) const {
  double best = 0.0;
  for (const Point2& v : vertices_) best = std::max(best, geometry::distance(p, v));
  return best;
}

Point2 ConvexPolygon::sample(CounterRng& rng) const {
  const Point2 span = bounds_.hi - bounds_.lo;
  for (;;) {
    const Point2 p{bounds_.lo.x + span.x * rng.uniform(), bounds_.lo.y + span.y * rng.uniform()};
    if (contains(p)) return p;
  }
}

}  // namespace dpotts::geometry
