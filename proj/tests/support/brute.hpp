#pragma once

// Slow reference computations shared by the unit tests.

#include <algorithm>
#include <array>
#include <vector>

#include "dpotts/geometry/predicates.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::testsupport {

using geometry::Point2;
using geometry::VertexId;

using Triple = std::array<VertexId, 3>;

/// Every ccw triple whose circumcircle holds no other point under the same
/// symbolic tie-break. Quartic in the worst case, cubic with early exits.
inline std::vector<Triple> brute_delaunay(const std::vector<std::pair<VertexId, Point2>>& pts) {
  std::vector<Triple> out;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        auto a = pts[i], b = pts[j], c = pts[k];
        const int o = geometry::orient(a.second, b.second, c.second);
        if (o == 0) continue;
        if (o < 0) std::swap(b, c);
        bool empty = true;
        for (std::size_t l = 0; l < n && empty; ++l) {
          if (l == i || l == j || l == k) continue;
          empty = geometry::incircle_perturbed(a.second, b.second, c.second, pts[l].second,
                                               a.first, b.first, c.first, pts[l].first) < 0;
        }
        if (empty) {
          Triple t{pts[i].first, pts[j].first, pts[k].first};
          std::sort(t.begin(), t.end());
          out.push_back(t);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Triple> brute_delaunay(const geometry::Triangulation& tri) {
  std::vector<std::pair<VertexId, Point2>> pts;
  for (VertexId v : tri.live_vertices()) pts.emplace_back(v, tri.point(v));
  return brute_delaunay(pts);
}

inline std::vector<Triple> tile_ids(const std::vector<geometry::Tile>& tiles) {
  std::vector<Triple> out;
  out.reserve(tiles.size());
  for (const auto& t : tiles) out.push_back(t.vertices);
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Triple> tile_ids(const geometry::Triangulation& tri) {
  return tile_ids(tri.tiles());
}

/// Tiles as sorted coordinate triples, for comparing triangulations whose ids
/// differ.
inline std::vector<std::array<Point2, 3>> tile_points(const geometry::Triangulation& tri) {
  std::vector<std::array<Point2, 3>> out;
  for (const auto& t : tri.tiles()) {
    std::array<Point2, 3> p{tri.point(t.vertices[0]), tri.point(t.vertices[1]),
                            tri.point(t.vertices[2])};
    std::sort(p.begin(), p.end());
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<Point2> uniform_points(CounterRng& rng, std::size_t n, Point2 lo = {0, 0},
                                          Point2 hi = {1, 1}) {
  std::vector<Point2> out(n);
  for (auto& p : out) {
    p = {lo.x + (hi.x - lo.x) * rng.uniform(), lo.y + (hi.y - lo.y) * rng.uniform()};
  }
  return out;
}

/// Corners of a square big enough to enclose [lo,hi]^2, so any point inside
/// can be inserted.
inline std::vector<Point2> enclosing_square(double lo, double hi) {
  const double pad = (hi - lo);
  return {{lo - pad, lo - pad}, {hi + pad, lo - pad}, {hi + pad, hi + pad}, {lo - pad, hi + pad}};
}

}  // namespace dpotts::testsupport
