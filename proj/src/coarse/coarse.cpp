#include "dpotts/coarse/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpotts/model/thresholds.hpp"

namespace dpotts::coarse {
namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kSqrt7 = std::sqrt(7.0);

// floor(u) and the subcell of the fractional part, kept in [0, 8].
std::pair<int, int> split_coordinate(double u) {
  const double c = std::floor(u);
  int s = static_cast<int>(std::floor((u - c) * kSubdivisions));
  s = std::clamp(s, 0, kSubdivisions - 1);
  return {static_cast<int>(c), s};
}

}  // namespace

CellPartition::CellPartition(double ell, int k_min, int k_max, int l_min, int l_max)
    : ell_(ell), k_min_(k_min), k_max_(k_max), l_min_(l_min), l_max_(l_max) {
  if (!(ell > 0.0) || !std::isfinite(ell)) throw std::invalid_argument("cell scale must be positive");
  if (k_max < k_min || l_max < l_min) throw std::invalid_argument("empty cell range");
}

CellPartition make_partition(double ell, int n) {
  if (n < 1) throw std::invalid_argument("partition half-width must be >= 1");
  return CellPartition(ell, -n, n, -n, n);
}

std::size_t CellPartition::cell_slot(int k, int l) const {
  return static_cast<std::size_t>(l - l_min_) * static_cast<std::size_t>(cells_k()) +
         static_cast<std::size_t>(k - k_min_);
}

Point2 CellPartition::to_plane(double x1, double x2) const {
  return {ell_ * (x1 + 0.5 * x2), ell_ * kSqrt3 / 2.0 * x2};
}

Point2 CellPartition::to_lattice(Point2 p) const {
  const double x2 = p.y / (ell_ * kSqrt3 / 2.0);
  return {p.x / ell_ - 0.5 * x2, x2};
}

CellIndex CellPartition::locate(Point2 p) const {
  const Point2 x = to_lattice(p);
  const auto [k, i] = split_coordinate(x.x + 0.5);
  const auto [l, j] = split_coordinate(x.y + 0.5);
  return {k, l, i, j};
}

std::optional<CellIndex> CellPartition::locate_in_window(Point2 p) const {
  const CellIndex c = locate(p);
  if (!has_cell(c.k, c.l)) return std::nullopt;
  return c;
}

ConvexPolygon CellPartition::window() const {
  return ConvexPolygon::parallelogram(to_plane(k_min_ - 0.5, l_min_ - 0.5),
                                      to_plane(cells_k(), 0), to_plane(0, cells_l()));
}

ConvexPolygon CellPartition::cell(int k, int l) const {
  return ConvexPolygon::parallelogram(to_plane(k - 0.5, l - 0.5), to_plane(1, 0), to_plane(0, 1));
}

ConvexPolygon CellPartition::subcell(int k, int l, int i, int j) const {
  const double s = 1.0 / kSubdivisions;
  return ConvexPolygon::parallelogram(to_plane(k - 0.5 + i * s, l - 0.5 + j * s),
                                      to_plane(s, 0), to_plane(0, s));
}

ConvexPolygon CellPartition::band(int k, int l, Orientation o) const {
  // Subcells (4..8, 4) of (k, l) and (0..4, 4) of the neighbour; transposed
  // for the vertical case.
  const double s = 1.0 / kSubdivisions;
  const Point2 origin = to_plane(k - 0.5 + 4 * s, l - 0.5 + 4 * s);
  if (o == Orientation::Horizontal) {
    return ConvexPolygon::parallelogram(origin, to_plane(10 * s, 0), to_plane(0, s));
  }
  return ConvexPolygon::parallelogram(origin, to_plane(s, 0), to_plane(0, 10 * s));
}

SubcellCounts::SubcellCounts(const CellPartition& partition, std::span<const Point2> points)
    : partition_(&partition), counts_(partition.cell_count() * kSubdivisions * kSubdivisions, 0) {
  for (const Point2& p : points) add(p);
}

SubcellCounts::SubcellCounts(const CellPartition& partition, const Triangulation& tri)
    : partition_(&partition), counts_(partition.cell_count() * kSubdivisions * kSubdivisions, 0) {
  for (auto v : tri.live_vertices()) add(tri.point(v));
}

void SubcellCounts::add(Point2 p) {
  const auto c = partition_->locate_in_window(p);
  if (!c) return;
  ++counts_[partition_->cell_slot(c->k, c->l) * kSubdivisions * kSubdivisions +
            static_cast<std::size_t>(c->j * kSubdivisions + c->i)];
}

int SubcellCounts::count(int k, int l, int i, int j) const {
  if (!partition_->has_cell(k, l)) return 0;
  return counts_[partition_->cell_slot(k, l) * kSubdivisions * kSubdivisions +
                 static_cast<std::size_t>(j * kSubdivisions + i)];
}

bool SubcellCounts::occupied(int k, int l) const {
  if (!partition_->has_cell(k, l)) return false;
  const auto begin = counts_.begin() + static_cast<std::ptrdiff_t>(
                                           partition_->cell_slot(k, l) * kSubdivisions * kSubdivisions);
  return std::all_of(begin, begin + kSubdivisions * kSubdivisions, [](int c) { return c > 0; });
}

bool occupancy_event(std::span<const Point2> points, const CellPartition& partition, int k, int l) {
  return SubcellCounts(partition, points).occupied(k, l);
}

std::vector<Point2> occupied_configuration(const CellPartition& partition,
                                           std::span<const std::pair<int, int>> cells,
                                           double delta0, std::size_t background,
                                           CounterRng& rng) {
  auto free_of = [delta0](const std::vector<Point2>& pts, Point2 p) {
    return std::all_of(pts.begin(), pts.end(), [&](Point2 o) {
      return geometry::distance_squared(o, p) >= delta0 * delta0;
    });
  };
  const double s = 1.0 / kSubdivisions;
  for (int restart = 0; restart < 1000; ++restart) {
    std::vector<Point2> pts;
    bool stuck = false;
    for (const auto& [k, l] : cells) {
      for (int j = 0; j < kSubdivisions && !stuck; ++j) {
        for (int i = 0; i < kSubdivisions && !stuck; ++i) {
          int tries = 0;
          for (; tries < 1000; ++tries) {
            const Point2 p = partition.to_plane(k - 0.5 + (i + rng.uniform()) * s,
                                                l - 0.5 + (j + rng.uniform()) * s);
            if (free_of(pts, p)) {
              pts.push_back(p);
              break;
            }
          }
          stuck = tries == 1000;
        }
      }
    }
    if (stuck) continue;
    const double x0 = partition.k_min() - 0.5, y0 = partition.l_min() - 0.5;
    for (std::size_t b = 0; b < background; ++b) {
      const Point2 p = partition.to_plane(x0 + partition.cells_k() * rng.uniform(),
                                          y0 + partition.cells_l() * rng.uniform());
      if (free_of(pts, p)) pts.push_back(p);
    }
    return pts;
  }
  throw std::runtime_error("could not place an occupied configuration");
}

std::vector<Tile> band_tiles(const Triangulation& tri, const CellPartition& partition, int k,
                             int l, Orientation o) {
  const ConvexPolygon band = partition.band(k, l, o);
  std::vector<Tile> out;
  tri.for_each_tile([&](const Tile& t) {
    if (band.disc_meets(t.circumcenter, t.circumradius)) out.push_back(t);
  });
  return out;
}

CgrReport verify_cgr(const Triangulation& tri, const CellPartition& partition,
                     const InteractionModel& model, double m) {
  CgrReport report;
  report.g = model::cgr_bound(model, partition.ell(), m);
  const double radius_limit = kSqrt7 * partition.ell() / 18.0;
  const double angle_limit = 9.0 * model.delta0 / (kSqrt7 * partition.ell());
  const SubcellCounts counts(partition, tri);

  auto check = [&](int k, int l, Orientation o) {
    ++report.pairs_checked;
    for (const Tile& t : band_tiles(tri, partition, k, l, o)) {
      ++report.tiles_checked;
      auto fail = [&](CgrFailure f, double value, double limit) {
        report.violations.push_back({k, l, o, t, f, value, limit});
      };
      if (!(t.circumradius < radius_limit)) fail(CgrFailure::Radius, t.circumradius, radius_limit);
      if (!(t.min_angle >= angle_limit)) fail(CgrFailure::Angle, t.min_angle, angle_limit);
      if (model.uses_edges()) {
        for (int e = 0; e < 3; ++e) {
          const auto a = t.vertices[static_cast<std::size_t>(e)];
          const auto b = t.vertices[static_cast<std::size_t>((e + 1) % 3)];
          const double w = model::phi_length(model, geometry::distance(tri.point(a), tri.point(b)));
          if (!(w >= report.g)) fail(CgrFailure::Potential, w, report.g);
        }
      } else {
        const double w = model::phi(model, t);
        if (!(w >= report.g)) fail(CgrFailure::Potential, w, report.g);
      }
    }
  };

  for (int l = partition.l_min(); l <= partition.l_max(); ++l) {
    for (int k = partition.k_min(); k <= partition.k_max(); ++k) {
      if (!counts.occupied(k, l)) continue;
      if (counts.occupied(k + 1, l)) check(k, l, Orientation::Horizontal);
      if (counts.occupied(k, l + 1)) check(k, l, Orientation::Vertical);
    }
  }
  return report;
}

std::vector<CellState> classify_cells(const Triangulation& tri, std::span<const Mark> marks,
                                      const CellPartition& partition,
                                      const InteractionModel& model, double g) {
  std::vector<char> starred(static_cast<std::size_t>(tri.id_bound()), 0);
  if (model.uses_edges()) {
    for (const auto& e : tri.edges()) {
      if (model::phi(model, e) >= g) {
        for (auto v : e.vertices) starred[static_cast<std::size_t>(v)] = 1;
      }
    }
  } else {
    tri.for_each_tile([&](const Tile& t) {
      if (model::phi(model, t) >= g) {
        for (auto v : t.vertices) starred[static_cast<std::size_t>(v)] = 1;
      }
    });
  }

  const SubcellCounts counts(partition, tri);
  std::vector<CellState> cells(partition.cell_count());
  std::vector<char> wrong_mark(cells.size(), 0);
  for (int l = partition.l_min(); l <= partition.l_max(); ++l) {
    for (int k = partition.k_min(); k <= partition.k_max(); ++k) {
      cells[partition.cell_slot(k, l)].occupied = counts.occupied(k, l);
    }
  }
  for (auto v : tri.live_vertices()) {
    const auto c = partition.locate_in_window(tri.point(v));
    if (!c) continue;
    const std::size_t slot = partition.cell_slot(c->k, c->l);
    ++cells[slot].points;
    if (!starred[static_cast<std::size_t>(v)]) continue;
    ++cells[slot].del1_points;
    if (marks[static_cast<std::size_t>(v)] != Mark(1)) wrong_mark[slot] = 1;
  }
  for (std::size_t s = 0; s < cells.size(); ++s) {
    cells[s].good = cells[s].occupied && !wrong_mark[s];
  }
  return cells;
}

GoodCellStats good_cell_stats(std::span<const std::vector<CellState>> snapshots,
                              const CellPartition& partition, const InteractionModel& model,
                              int q, double g, double p_c) {
  GoodCellStats s;
  const std::size_t n = partition.cell_count();
  s.snapshots = snapshots.size();
  s.occupied_frequency.assign(n, 0.0);
  s.good_frequency.assign(n, 0.0);
  for (const auto& snap : snapshots) {
    if (snap.size() != n) throw std::invalid_argument("snapshot does not match the partition");
    for (std::size_t c = 0; c < n; ++c) {
      s.occupied_frequency[c] += snap[c].occupied;
      s.good_frequency[c] += snap[c].good;
    }
  }
  if (!snapshots.empty()) {
    const double total = static_cast<double>(snapshots.size());
    for (std::size_t c = 0; c < n; ++c) {
      s.occupied_frequency[c] /= total;
      s.good_frequency[c] /= total;
      s.mean_occupied += s.occupied_frequency[c];
      s.mean_good += s.good_frequency[c];
    }
    s.mean_occupied /= static_cast<double>(n);
    s.mean_good /= static_cast<double>(n);
  }
  s.g = g;
  s.M = model::point_bound_M(partition.ell(), model.delta0);
  s.epsilon = model::epsilon_from_pc(p_c);
  s.p_tilde = model::p_tilde(g, q);
  s.p_tilde_pow_M = std::pow(s.p_tilde, s.M);
  s.p_c = p_c;
  s.exceeds_threshold = s.mean_good > p_c;
  return s;
}

}  // namespace dpotts::coarse
