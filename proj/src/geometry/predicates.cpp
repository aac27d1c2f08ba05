#include "dpotts/geometry/predicates.hpp"

#include <gmpxx.h>

#include <array>
#include <atomic>
#include <cmath>
#include <utility>

namespace dpotts::geometry {
namespace {

constexpr double kEps = 0x1.0p-53;
constexpr double kCcwBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIccBound = (10.0 + 96.0 * kEps) * kEps;

std::atomic<double> g_incircle_fault{0.0};

int sign_of(const mpq_class& v) { return sgn(v); }

int orient_exact(Point2 a, Point2 b, Point2 c) {
  const mpq_class acx = mpq_class(a.x) - c.x, bcx = mpq_class(b.x) - c.x;
  const mpq_class acy = mpq_class(a.y) - c.y, bcy = mpq_class(b.y) - c.y;
  return sign_of(acx * bcy - acy * bcx);
}

int incircle_exact(Point2 a, Point2 b, Point2 c, Point2 d) {
  const mpq_class adx = mpq_class(a.x) - d.x, ady = mpq_class(a.y) - d.y;
  const mpq_class bdx = mpq_class(b.x) - d.x, bdy = mpq_class(b.y) - d.y;
  const mpq_class cdx = mpq_class(c.x) - d.x, cdy = mpq_class(c.y) - d.y;
  const mpq_class alift = adx * adx + ady * ady;
  const mpq_class blift = bdx * bdx + bdy * bdy;
  const mpq_class clift = cdx * cdx + cdy * cdy;
  const mpq_class det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                        clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}

struct IncircleEstimate {
  double det;
  double permanent;
};

IncircleEstimate incircle_float(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double alift = adx * adx + ady * ady;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double blift = bdx * bdx + bdy * bdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) +
                     clift * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  return {det, permanent};
}

}  // namespace

int orient(Point2 a, Point2 b, Point2 c) {
  const double detleft = (a.x - c.x) * (b.y - c.y);
  const double detright = (a.y - c.y) * (b.x - c.x);
  const double det = detleft - detright;
  const double errbound = kCcwBound * (std::fabs(detleft) + std::fabs(detright));
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  if (detleft == 0.0 && detright == 0.0) return 0;
  return orient_exact(a, b, c);
}

int incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
  const auto [det, permanent] = incircle_float(a, b, c, d);
  const double errbound = kIccBound * permanent;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  if (permanent == 0.0) return 0;
  return incircle_exact(a, b, c, d);
}

int incircle_perturbed(Point2 a, Point2 b, Point2 c, Point2 d, std::int64_t ida,
                       std::int64_t idb, std::int64_t idc, std::int64_t idd) {
  const double fault = g_incircle_fault.load(std::memory_order_relaxed);
  if (fault > 0.0) {
    const auto [det, permanent] = incircle_float(a, b, c, d);
    if (std::fabs(det) <= fault * permanent) return -1;
  }

  const int s = incircle(a, b, c, d);
  if (s != 0) return s;

  // Expand the 4x4 lifted determinant in its lift column. Raising the lift of
  // row r by a tiny positive amount changes the determinant by that amount
  // times the cofactor of r; the largest id dominates.
  std::array<std::pair<std::int64_t, int>, 4> terms = {{
      {ida, orient(b, c, d)},
      {idb, -orient(a, c, d)},
      {idc, orient(a, b, d)},
      {idd, -orient(a, b, c)},
  }};
  for (int pass = 0; pass < 4; ++pass) {
    int best = -1;
    for (int i = 0; i < 4; ++i) {
      if (terms[static_cast<std::size_t>(i)].second == 2) continue;  // consumed
      if (best < 0 || terms[static_cast<std::size_t>(i)].first >
                          terms[static_cast<std::size_t>(best)].first) {
        best = i;
      }
    }
    auto& t = terms[static_cast<std::size_t>(best)];
    if (t.second != 0) return t.second;
    t.second = 2;
  }
  return 0;
}

namespace testing {
void set_incircle_fault(double tolerance) {
  g_incircle_fault.store(tolerance > 0.0 ? tolerance : 0.0, std::memory_order_relaxed);
}
double incircle_fault() { return g_incircle_fault.load(std::memory_order_relaxed); }
}  // namespace testing

}  // namespace dpotts::geometry
