#pragma once

#include <span>
#include <vector>

#include "dpotts/geometry/point.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::geometry {

struct BoundingBox {
  Point2 lo;
  Point2 hi;
};

/// Convex polygon with counter-clockwise vertices. Windows, cells, subcells
/// and central bands are all of this shape.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;
  /// Vertices in counter-clockwise order; at least 3, strictly convex or with
  /// collinear runs. Throws std::invalid_argument otherwise.
  explicit ConvexPolygon(std::vector<Point2> vertices);

  static ConvexPolygon rectangle(Point2 lo, Point2 hi);
  /// The parallelogram origin + s*u + t*v for s,t in [0,1].
  static ConvexPolygon parallelogram(Point2 origin, Point2 u, Point2 v);

  std::span<const Point2> vertices() const { return vertices_; }
  bool empty() const { return vertices_.empty(); }
  double area() const;
  BoundingBox bounds() const { return bounds_; }

  /// Closed containment.
  bool contains(Point2 p) const;
  /// Euclidean distance from p to the polygon; 0 when p is inside.
  double distance(Point2 p) const;
  /// Largest distance from p to any point of the polygon.
  double max_distance(Point2 p) const;

  /// True iff the circle of radius r about c meets the polygon: the polygon
  /// reaches the closed disc and is not strictly inside the open disc.
  bool circle_meets(Point2 c, double r) const {
    return distance(c) <= r && max_distance(c) >= r;
  }
  /// True iff the closed disc of radius r about c meets the polygon.
  bool disc_meets(Point2 c, double r) const { return distance(c) <= r; }

  /// Uniform sample by bounding-box rejection.
  Point2 sample(CounterRng& rng) const;

 private:
  std::vector<Point2> vertices_;
  BoundingBox bounds_{};
};

}  // namespace dpotts::geometry
