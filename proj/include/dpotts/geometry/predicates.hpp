#pragma once

#include <cstdint>

#include "dpotts/geometry/point.hpp"

namespace dpotts::geometry {

/// Sign of the orientation determinant: +1 if a,b,c turn counter-clockwise,
/// -1 if clockwise, 0 if collinear. Exact: a floating-point filter with a
/// certified error bound, falling back to rational arithmetic.
int orient(Point2 a, Point2 b, Point2 c);

/// Sign of the in-circle determinant: for counter-clockwise a,b,c it is +1
/// when d lies strictly inside their circumcircle, -1 strictly outside and 0
/// on it. Exact, same scheme as orient().
int incircle(Point2 a, Point2 b, Point2 c, Point2 d);

/// In-circle test made total by a symbolic perturbation of the lifted
/// coordinates |p|^2 + eps^(rank(id)): the vertex with the larger id gets the
/// dominant perturbation. Returns 0 only when no perturbation can separate the
/// points (coincident input). Subject to the testing fault below.
int incircle_perturbed(Point2 a, Point2 b, Point2 c, Point2 d, std::int64_t ida,
                       std::int64_t idb, std::int64_t idc, std::int64_t idd);

namespace testing {
/// Negative-control hook: while a positive tolerance is set,
/// incircle_perturbed() reports "outside" whenever |det| <= tolerance *
/// permanent. orient() and incircle() are never affected.
void set_incircle_fault(double tolerance);
double incircle_fault();
}  // namespace testing

}  // namespace dpotts::geometry
