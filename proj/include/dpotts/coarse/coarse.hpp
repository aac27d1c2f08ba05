#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dpotts/geometry/region.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/model/model.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::coarse {

using geometry::ConvexPolygon;
using geometry::Point2;
using geometry::Tile;
using geometry::Triangulation;
using model::InteractionModel;
using model::Mark;

inline constexpr int kSubdivisions = 9;

/// Cell (k, l) and subcell (i, j) of a point.
struct CellIndex {
  int k = 0, l = 0;
  int i = 0, j = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

enum class Orientation { Horizontal, Vertical };

/// Periodic partition of the plane into the half-open parallelotopes
/// M x with x - (k, l) in [-1/2, 1/2)^2, where M has columns (ell, 0) and
/// (ell/2, sqrt(3) ell / 2). Each cell splits into 9 x 9 subcells of side
/// ell/9; subcell (4, 4) holds the cell centre. Only cells with k in
/// [k_min, k_max] and l in [l_min, l_max] belong to the window.
class CellPartition {
 public:
  CellPartition(double ell, int k_min, int k_max, int l_min, int l_max);

  double ell() const { return ell_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  int l_min() const { return l_min_; }
  int l_max() const { return l_max_; }
  int cells_k() const { return k_max_ - k_min_ + 1; }
  int cells_l() const { return l_max_ - l_min_ + 1; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(cells_k()) * static_cast<std::size_t>(cells_l());
  }
  bool has_cell(int k, int l) const {
    return k >= k_min_ && k <= k_max_ && l >= l_min_ && l <= l_max_;
  }
  /// Row-major index of an in-range cell, k fastest.
  std::size_t cell_slot(int k, int l) const;

  /// M x and its inverse.
  Point2 to_plane(double x1, double x2) const;
  Point2 to_lattice(Point2 p) const;

  /// Cell and subcell of any point of the plane.
  CellIndex locate(Point2 p) const;
  /// locate() restricted to the window.
  std::optional<CellIndex> locate_in_window(Point2 p) const;

  ConvexPolygon window() const;
  ConvexPolygon cell(int k, int l) const;
  ConvexPolygon subcell(int k, int l, int i, int j) const;
  /// Ten subcells joining the centre of (k, l) to the centre of its right
  /// (Horizontal) or upper (Vertical) neighbour.
  ConvexPolygon band(int k, int l, Orientation o) const;

 private:
  double ell_;
  int k_min_, k_max_, l_min_, l_max_;
};

/// Cells {-n..n}^2 at scale ell. Throws std::invalid_argument unless ell > 0
/// and n >= 1.
CellPartition make_partition(double ell, int n);

/// Points per subcell over the window, indexed cell_slot * 81 + 9 j + i.
class SubcellCounts {
 public:
  SubcellCounts(const CellPartition& partition, std::span<const Point2> points);
  /// Counts the live vertices of tri, frame included.
  SubcellCounts(const CellPartition& partition, const Triangulation& tri);

  int count(int k, int l, int i, int j) const;
  /// Every subcell of (k, l) holds a point.
  bool occupied(int k, int l) const;

 private:
  void add(Point2 p);
  const CellPartition* partition_;
  std::vector<int> counts_;
};

bool occupancy_event(std::span<const Point2> points, const CellPartition& partition, int k, int l);

/// Hard-core configuration (pairwise distance >= delta0) with a point in every
/// subcell of the listed cells, plus up to `background` further points thrown
/// uniformly over the window and dropped on conflict.
std::vector<Point2> occupied_configuration(const CellPartition& partition,
                                           std::span<const std::pair<int, int>> cells,
                                           double delta0, std::size_t background,
                                           CounterRng& rng);

/// Tiles whose closed circumdisc meets the band of (k, l).
std::vector<Tile> band_tiles(const Triangulation& tri, const CellPartition& partition, int k,
                             int l, Orientation o);

enum class CgrFailure { Radius, Angle, Potential };

struct CgrViolation {
  int k = 0, l = 0;
  Orientation orientation = Orientation::Horizontal;
  Tile tile;
  CgrFailure failure = CgrFailure::Radius;
  double value = 0.0;  // offending radius, angle or potential
  double limit = 0.0;
};

struct CgrReport {
  std::size_t pairs_checked = 0;
  std::size_t tiles_checked = 0;
  double g = 0.0;
  std::vector<CgrViolation> violations;
};

/// For every pair of neighbouring window cells that are both fully occupied,
/// checks each band tile for circumradius < sqrt(7) ell / 18, minimal angle
/// >= 9 delta0 / (sqrt(7) ell), and type potential >= cgr_bound(model, ell, m)
/// (on each of its edges for the edge model). Throws ScaleViolation when ell
/// is outside (18 delta0, m delta0].
CgrReport verify_cgr(const Triangulation& tri, const CellPartition& partition,
                     const InteractionModel& model, double m);

/// Status of one cell in one configuration.
struct CellState {
  bool occupied = false;
  bool good = false;            // occupied and mark 1 on all of its Del1* points
  std::size_t del1_points = 0;  // points of the cell spanning a tile (edge) with phi >= g
  std::size_t points = 0;
};

/// Per-cell states (cell_slot order). Del1* is computed over the whole
/// triangulation; marks are indexed by vertex id.
std::vector<CellState> classify_cells(const Triangulation& tri, std::span<const Mark> marks,
                                      const CellPartition& partition,
                                      const InteractionModel& model, double g);

struct GoodCellStats {
  std::size_t snapshots = 0;
  std::vector<double> occupied_frequency;  // by cell_slot
  std::vector<double> good_frequency;
  double mean_occupied = 0.0;
  double mean_good = 0.0;
  double g = 0.0;
  double M = 0.0;
  double epsilon = 0.0;
  double p_tilde = 0.0;
  double p_tilde_pow_M = 0.0;
  double p_c = 0.0;
  bool exceeds_threshold = false;  // mean_good > p_c
};

/// Aggregates classify_cells() output over equilibrium snapshots.
GoodCellStats good_cell_stats(std::span<const std::vector<CellState>> snapshots,
                              const CellPartition& partition, const InteractionModel& model,
                              int q, double g, double p_c);

}  // namespace dpotts::coarse
