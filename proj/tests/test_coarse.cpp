#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dpotts/coarse/coarse.hpp"
#include "dpotts/errors.hpp"
#include "dpotts/model/thresholds.hpp"

using namespace dpotts;
using namespace dpotts::coarse;
using model::ModelKind;

namespace {

// Closed membership in the parallelogram o + s u + t v, s, t in [0, 1],
// decided by signed areas against its four sides.
bool in_parallelogram(Point2 p, const ConvexPolygon& poly) {
  const auto v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 a = v[i], b = v[(i + 1) % v.size()];
    if (geometry::cross(b - a, p - a) < 0.0) return false;
  }
  return true;
}

double segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 d = b - a;
  const double t = std::clamp(geometry::dot(p - a, d) / geometry::dot(d, d), 0.0, 1.0);
  return geometry::distance(p, a + t * d);
}

// Disc meets polygon: centre inside, or some side within r.
bool disc_meets_oracle(Point2 c, double r, const ConvexPolygon& poly) {
  if (in_parallelogram(c, poly)) return true;
  const auto v = poly.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (segment_distance(c, v[i], v[(i + 1) % v.size()]) <= r) return true;
  }
  return false;
}

InteractionModel make(ModelKind kind, double beta, double delta0) {
  InteractionModel m;
  m.kind = kind;
  m.beta = beta;
  m.delta0 = delta0;
  m.alpha0 = 0.1;
  return m;
}

}  // namespace

TEST_CASE("cell lattice") {
  const auto p = make_partition(1.9, 2);
  CHECK(p.locate({0, 0}) == CellIndex{0, 0, 4, 4});
  const Point2 m1 = p.to_plane(1, 0), m2 = p.to_plane(0, 1);
  CHECK(p.locate(m1) == CellIndex{1, 0, 4, 4});
  CHECK(p.locate(m2) == CellIndex{0, 1, 4, 4});
  CHECK(p.locate(p.to_plane(-2, 1)) == CellIndex{-2, 1, 4, 4});
  CHECK(geometry::norm(m1) == doctest::Approx(1.9));
  CHECK(geometry::norm(m2) == doctest::Approx(1.9));
  CHECK(std::acos(geometry::dot(m1, m2) / (1.9 * 1.9)) == doctest::Approx(std::numbers::pi / 3));
  CHECK(p.cell(0, 0).area() == doctest::Approx(std::sqrt(3.0) / 2 * 1.9 * 1.9).epsilon(1e-12));
  CHECK(!p.locate_in_window(p.to_plane(3, 0)).has_value());
  CHECK(p.locate_in_window(p.to_plane(2, -2)).has_value());
  CHECK_THROWS_AS(make_partition(0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_partition(1.0, 0), std::invalid_argument);
}

TEST_CASE("cells and subcells tile the window") {
  const auto p = make_partition(1.3, 1);
  double cells = 0.0, subcells = 0.0;
  for (int l = -1; l <= 1; ++l) {
    for (int k = -1; k <= 1; ++k) {
      cells += p.cell(k, l).area();
      for (int j = 0; j < 9; ++j) {
        for (int i = 0; i < 9; ++i) subcells += p.subcell(k, l, i, j).area();
      }
    }
  }
  CHECK(std::abs(cells - p.window().area()) <= 1e-9 * p.window().area());
  CHECK(std::abs(subcells - p.window().area()) <= 1e-9 * p.window().area());

  // Membership by inverse map vs a scan over every subcell polygon.
  CounterRng rng(19);
  const auto box = p.window().bounds();
  int inside = 0;
  for (int n = 0; n < 10000; ++n) {
    const Point2 x{box.lo.x + (box.hi.x - box.lo.x) * rng.uniform(),
                   box.lo.y + (box.hi.y - box.lo.y) * rng.uniform()};
    std::vector<CellIndex> hits;
    for (int l = -1; l <= 1; ++l) {
      for (int k = -1; k <= 1; ++k) {
        for (int j = 0; j < 9; ++j) {
          for (int i = 0; i < 9; ++i) {
            if (in_parallelogram(x, p.subcell(k, l, i, j))) hits.push_back({k, l, i, j});
          }
        }
      }
    }
    const auto got = p.locate_in_window(x);
    REQUIRE(hits.size() <= 1);
    if (hits.empty()) {
      CHECK(!got.has_value());
    } else {
      ++inside;
      REQUIRE(got.has_value());
      CHECK(*got == hits.front());
    }
  }
  CHECK(inside > 3000);
}

TEST_CASE("half-open boundaries") {
  const auto p = make_partition(9.0, 1);
  // Lower-left corner of cell (0,0) belongs to it; the upper-right one does not.
  CHECK(p.locate(p.to_plane(-0.5, -0.5)) == CellIndex{0, 0, 0, 0});
  CHECK(p.locate(p.to_plane(0.5, 0.5)) == CellIndex{1, 1, 0, 0});
}

TEST_CASE("occupancy events") {
  const auto p = make_partition(1.9, 1);
  CHECK(!occupancy_event({}, p, 0, 0));
  std::vector<Point2> centroids;
  for (int j = 0; j < 9; ++j) {
    for (int i = 0; i < 9; ++i) centroids.push_back(p.to_plane(-0.5 + (i + 0.5) / 9, -0.5 + (j + 0.5) / 9));
  }
  CHECK(occupancy_event(centroids, p, 0, 0));
  CHECK(!occupancy_event(centroids, p, 1, 0));
  centroids.erase(centroids.begin() + 40);
  CHECK(!occupancy_event(centroids, p, 0, 0));

  // Dense Poisson-like samples against per-subcell polygon counting.
  CounterRng rng(5);
  const auto window = p.window();
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Point2> pts;
    const int n = 600 + static_cast<int>(rng.below(600));
    for (int i = 0; i < n; ++i) pts.push_back(window.sample(rng));
    const SubcellCounts counts(p, pts);
    for (int l = -1; l <= 1; ++l) {
      for (int k = -1; k <= 1; ++k) {
        bool all = true;
        for (int j = 0; j < 9; ++j) {
          for (int i = 0; i < 9; ++i) {
            int c = 0;
            const auto sub = p.subcell(k, l, i, j);
            for (const auto& x : pts) c += in_parallelogram(x, sub);
            CHECK(counts.count(k, l, i, j) == c);
            all = all && c > 0;
          }
        }
        CHECK(counts.occupied(k, l) == all);
      }
    }
  }
}

TEST_CASE("central bands") {
  const auto p = make_partition(1.9, 1);
  const double sub = p.subcell(0, 0, 0, 0).area();
  for (auto o : {Orientation::Horizontal, Orientation::Vertical}) {
    const auto band = p.band(0, 0, o);
    CHECK(band.area() == doctest::Approx(10 * sub).epsilon(1e-12));
    int members = 0;
    for (int l = -1; l <= 1; ++l) {
      for (int k = -1; k <= 1; ++k) {
        for (int j = 0; j < 9; ++j) {
          for (int i = 0; i < 9; ++i) {
            const Point2 c = p.to_plane(k - 0.5 + (i + 0.5) / 9, l - 0.5 + (j + 0.5) / 9);
            bool expected;
            if (o == Orientation::Horizontal) {
              expected = l == 0 && j == 4 && ((k == 0 && i >= 4) || (k == 1 && i <= 4));
            } else {
              expected = k == 0 && i == 4 && ((l == 0 && j >= 4) || (l == 1 && j <= 4));
            }
            CHECK(band.contains(c) == expected);
            members += expected;
          }
        }
      }
    }
    CHECK(members == 10);
    // Joins the two cell centres.
    CHECK(band.contains(p.to_plane(0, 0)));
    CHECK(band.contains(o == Orientation::Horizontal ? p.to_plane(1, 0) : p.to_plane(0, 1)));
  }
}

TEST_CASE("band tiles against a disc-parallelogram oracle") {
  const auto p = make_partition(1.9, 1);
  CounterRng rng(77);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<Point2> pts;
    for (int i = 0; i < 80; ++i) pts.push_back(p.window().sample(rng));
    const auto tri = Triangulation::build(pts);
    for (auto o : {Orientation::Horizontal, Orientation::Vertical}) {
      const auto band = p.band(0, 0, o);
      std::vector<Tile> expected;
      for (const auto& t : tri.tiles()) {
        if (disc_meets_oracle(t.circumcenter, t.circumradius, band)) expected.push_back(t);
      }
      auto got = band_tiles(tri, p, 0, 0, o);
      std::sort(got.begin(), got.end());
      std::sort(expected.begin(), expected.end());
      CHECK(got == expected);
    }
  }
  // A tile centred in the band is included, a far one is not.
  const std::vector<Point2> tiny{p.to_plane(0.5, 0) + Point2{-0.01, -0.01},
                                 p.to_plane(0.5, 0) + Point2{0.01, -0.01},
                                 p.to_plane(0.5, 0) + Point2{0.0, 0.012}};
  CHECK(band_tiles(Triangulation::build(tiny), p, 0, 0, Orientation::Horizontal).size() == 1);
  CHECK(band_tiles(Triangulation::build(tiny), p, -1, -1, Orientation::Horizontal).empty());
}

TEST_CASE("occupied configurations") {
  const double delta0 = 0.1, ell = 1.9;
  const auto p = make_partition(ell, 1);
  CounterRng rng(3);
  const std::vector<std::pair<int, int>> cells{{0, 0}, {1, 0}};
  const auto pts = occupied_configuration(p, cells, delta0, 200, rng);
  const SubcellCounts counts(p, pts);
  CHECK(counts.occupied(0, 0));
  CHECK(counts.occupied(1, 0));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) CHECK(geometry::distance(pts[i], pts[j]) >= delta0);
  }
  CHECK(pts.size() > 162);
}

TEST_CASE("CGR chain on occupied neighbours") {
  CHECK(model::cgr_angle_floor(19.0) == doctest::Approx(0.17903).epsilon(1e-5));
  const double delta0 = 0.1, m = 19.0, ell = 19.0 * delta0;
  const auto p = make_partition(ell, 1);
  CounterRng rng(1234);
  std::size_t tiles = 0, pairs = 0;
  for (int rep = 0; rep < 150; ++rep) {
    const int k = -1 + static_cast<int>(rng.below(2));
    const int l = -1 + static_cast<int>(rng.below(3));
    const bool vertical = rng.below(2) == 1;
    std::vector<std::pair<int, int>> cells{{k, l}};
    if (vertical) {
      cells.push_back({k, std::min(l + 1, 1)});
      if (l == 1) cells.front().second = 0;
    } else {
      cells.push_back({k + 1, l});
    }
    const auto pts = occupied_configuration(p, cells, delta0, rng.below(400), rng);
    const auto tri = Triangulation::build(pts);
    for (auto kind : {ModelKind::TriangleI, ModelKind::TriangleII, ModelKind::Edge}) {
      const auto report = verify_cgr(tri, p, make(kind, 0.5 + 10 * rng.uniform(), delta0), m);
      CHECK(report.violations.empty());
      CHECK(report.pairs_checked >= 1);
      tiles += report.tiles_checked;
      pairs += report.pairs_checked;
    }
  }
  CHECK(tiles > 1000);

  // No fully occupied neighbours: nothing to check.
  std::vector<Point2> sparse;
  for (int i = 0; i < 50; ++i) sparse.push_back(p.window().sample(rng));
  const auto r = verify_cgr(Triangulation::build(sparse), p, make(ModelKind::TriangleII, 2.0, delta0), m);
  CHECK(r.pairs_checked == 0);
  CHECK(r.violations.empty());

  // Scale outside (18 delta0, m delta0].
  CHECK_THROWS_AS(verify_cgr(Triangulation::build(sparse), make_partition(1.7, 1),
                             make(ModelKind::TriangleII, 2.0, delta0), m),
                  ScaleViolation);
}

TEST_CASE("the chain detects a hard-core breach") {
  // A second point right next to a band point makes a sliver band tile.
  const double delta0 = 0.1, m = 19.0;
  const auto p = make_partition(19 * delta0, 1);
  CounterRng rng(9);
  const std::vector<std::pair<int, int>> cells{{0, 0}, {1, 0}};
  auto pts = occupied_configuration(p, cells, delta0, 0, rng);
  const Point2 c = p.to_plane(0.5, 0.0);
  const Point2 near = *std::min_element(pts.begin(), pts.end(), [&](Point2 a, Point2 b) {
    return geometry::distance(a, c) < geometry::distance(b, c);
  });
  pts.push_back(near + Point2{0.003, 0.0005});
  const auto tri = Triangulation::build(pts);
  const auto report = verify_cgr(tri, p, make(ModelKind::TriangleII, 2.0, delta0), m);
  bool angle = false;
  for (const auto& v : report.violations) angle = angle || v.failure == CgrFailure::Angle;
  CHECK(report.pairs_checked >= 1);
  CHECK(angle);
}

TEST_CASE("good cells") {
  const double delta0 = 0.1, ell = 1.9;
  const auto p = make_partition(ell, 1);
  const auto m0 = make(ModelKind::TriangleII, 0.0, delta0);
  CounterRng rng(44);
  const std::vector<std::pair<int, int>> cells{{0, 0}, {-1, 1}};
  std::vector<std::vector<CellState>> snaps;
  for (int rep = 0; rep < 20; ++rep) {
    const auto pts = occupied_configuration(p, cells, delta0, 300, rng);
    const auto tri = Triangulation::build(pts);
    std::vector<Mark> marks(pts.size(), Mark(1));
    // Flip one point of cell (0,0) in half the snapshots.
    if (rep % 2 == 1) {
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto c = p.locate(pts[i]);
        if (c.k == 0 && c.l == 0) {
          marks[i] = Mark(2);
          break;
        }
      }
    }
    const auto state = classify_cells(tri, marks, p, m0, 0.0);
    for (int l = -1; l <= 1; ++l) {
      for (int k = -1; k <= 1; ++k) {
        const auto& s = state[p.cell_slot(k, l)];
        // No coupling: every point spans a tile, so Del1* is everything.
        CHECK(s.del1_points == s.points);
        CHECK(s.occupied == SubcellCounts(p, pts).occupied(k, l));
        bool all_one = true;
        for (std::size_t i = 0; i < pts.size(); ++i) {
          const auto c = p.locate(pts[i]);
          if (c.k == k && c.l == l) all_one = all_one && marks[i] == Mark(1);
        }
        CHECK(s.good == (s.occupied && all_one));
      }
    }
    CHECK(state[p.cell_slot(-1, 1)].good);
    CHECK(state[p.cell_slot(0, 0)].good == (rep % 2 == 0));
    snaps.push_back(state);
  }
  const auto stats = good_cell_stats(snaps, p, m0, 2, 0.0, model::kSiteThresholdZ2);
  CHECK(stats.good_frequency[p.cell_slot(0, 0)] == doctest::Approx(0.5));
  CHECK(stats.good_frequency[p.cell_slot(-1, 1)] == doctest::Approx(1.0));
  CHECK(stats.occupied_frequency[p.cell_slot(-1, 1)] == doctest::Approx(1.0));
  CHECK(stats.M == doctest::Approx(441 / std::numbers::pi).epsilon(1e-12));
  CHECK(std::abs(stats.M - 140.374) < 1e-3);
  CHECK(stats.epsilon == doctest::Approx(0.203627).epsilon(1e-9));
  CHECK(stats.p_tilde == 0.0);
  CHECK(!stats.exceeds_threshold);

  // Strong coupling: only steep tiles enter Del1*.
  const auto mb = make(ModelKind::Edge, 5.0, delta0);
  const double g = model::cgr_bound(mb, ell, 19.0);
  const auto pts = occupied_configuration(p, cells, delta0, 300, rng);
  const auto tri = Triangulation::build(pts);
  const auto state = classify_cells(tri, std::vector<Mark>(pts.size(), Mark(1)), p, mb, g);
  std::size_t starred = 0;
  for (const auto& e : tri.edges()) starred += model::phi(mb, e) >= g;
  CHECK(starred > 0);
  CHECK(state[p.cell_slot(0, 0)].good);
}
