#pragma once

// Small random instances for the exhaustive oracles.

#include <vector>

#include "dpotts/geometry/region.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::testsupport {

/// Unit-square window inside a large frame triangle.
inline geometry::ConvexPolygon unit_window() {
  return geometry::ConvexPolygon::rectangle({0, 0}, {1, 1});
}

inline std::vector<geometry::Point2> triangle_frame() {
  return {{-2.0, -1.5}, {3.0, -1.5}, {0.5, 3.0}};
}

/// n points uniform in the unit square, pairwise at least min_gap apart.
inline std::vector<geometry::Point2> spaced_points(CounterRng& rng, int n, double min_gap) {
  const auto window = unit_window();
  std::vector<geometry::Point2> pts;
  while (static_cast<int>(pts.size()) < n) {
    const auto p = window.sample(rng);
    bool ok = true;
    for (const auto& o : pts) ok = ok && geometry::distance(o, p) >= min_gap;
    if (ok) pts.push_back(p);
  }
  return pts;
}

inline geometry::Triangulation small_instance(CounterRng& rng, int n, double min_gap) {
  return geometry::Triangulation::build(spaced_points(rng, n, min_gap), triangle_frame());
}

}  // namespace dpotts::testsupport
