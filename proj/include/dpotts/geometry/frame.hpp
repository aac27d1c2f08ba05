#pragma once

#include <vector>

#include "dpotts/geometry/region.hpp"

namespace dpotts::geometry {

/// Fixed boundary points: a hexagonal lattice of spacing 1.5 delta0, each
/// site nudged by a deterministic jitter of at most 1% of the spacing, kept
/// where 0 < dist(x, window) <= 3 delta0. The jitter removes the lattice's
/// cocircular quadruples; neighbouring frame points stay at least delta0
/// apart.
std::vector<Point2> hex_frame(const ConvexPolygon& window, double delta0);

}  // namespace dpotts::geometry
