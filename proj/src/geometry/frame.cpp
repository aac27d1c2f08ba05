#include "dpotts/geometry/frame.hpp"

#include <cmath>
#include <stdexcept>

#include "dpotts/rng.hpp"

namespace dpotts::geometry {

std::vector<Point2> hex_frame(const ConvexPolygon& window, double delta0) {
  if (!(delta0 > 0.0)) throw std::invalid_argument("delta0 must be > 0");
  const double a = 1.5 * delta0;
  const double h = a * std::sqrt(3.0) / 2.0;
  const double width = 3.0 * delta0;
  const BoundingBox box = window.bounds();
  const double x0 = box.lo.x - width - a, x1 = box.hi.x + width + a;
  const double y0 = box.lo.y - width - h, y1 = box.hi.y + width + h;

  std::vector<Point2> out;
  const auto rows = static_cast<long>(std::ceil((y1 - y0) / h));
  const auto cols = static_cast<long>(std::ceil((x1 - x0) / a)) + 1;
  for (long j = 0; j <= rows; ++j) {
    for (long i = 0; i <= cols; ++i) {
      const std::uint64_t key = hash_combine(static_cast<std::uint64_t>(j),
                                             static_cast<std::uint64_t>(i));
      const double jx = (to_unit(mix64(key)) - 0.5) * 0.02 * a;
      const double jy = (to_unit(mix64(key ^ 0x5bd1e995ULL)) - 0.5) * 0.02 * a;
      const Point2 p{x0 + (static_cast<double>(i) + 0.5 * static_cast<double>(j % 2)) * a + jx,
                     y0 + static_cast<double>(j) * h + jy};
      if (window.contains(p)) continue;
      if (window.distance(p) <= width) out.push_back(p);
    }
  }
  return out;
}

}  // namespace dpotts::geometry
