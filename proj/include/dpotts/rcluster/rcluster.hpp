#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dpotts/geometry/region.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/model/model.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::rcluster {

using geometry::ConvexPolygon;
using geometry::Point2;
using geometry::Triangulation;
using geometry::VertexId;
using model::InteractionModel;
using model::Mark;

/// A Delaunay triangle (size 3) or edge (size 2, vertices[2] unused), with
/// sorted vertex ids.
struct Hyperedge {
  std::array<VertexId, 3> vertices{geometry::kNoVertex, geometry::kNoVertex, geometry::kNoVertex};
  int size = 3;

  std::span<const VertexId> ids() const {
    return {vertices.data(), static_cast<std::size_t>(size)};
  }
  friend bool operator==(const Hyperedge&, const Hyperedge&) = default;
  friend auto operator<=>(const Hyperedge&, const Hyperedge&) = default;
};

Hyperedge as_hyperedge(const geometry::Tile& t);
Hyperedge as_hyperedge(const geometry::Edge& e);

/// Open hyperedges of one draw. Hyperedges made only of frame vertices are
/// always open and are not listed: the frame counts as one pre-merged
/// boundary cluster.
struct TileConfiguration {
  int hyperedge_size = 3;
  std::vector<Hyperedge> open;
};

/// Hyperedges with at least one non-frame vertex: the ones whose state is
/// random. Tiles for the triangle models, edges for the edge model.
std::vector<Hyperedge> variable_hyperedges(const Triangulation& tri, const InteractionModel& m);

/// Type potential of a hyperedge given by ids in `tri`.
double hyperedge_phi(const Triangulation& tri, const InteractionModel& m, const Hyperedge& h);

/// 1 - e^{-phi}.
double opening_probability(double phi);

/// Independent opening with probability 1 - e^{-phi} of every variable tile.
/// One output of `rng` keys the draw; each tile's uniform is then a hash of
/// that key and the tile's ids, so the result does not depend on iteration
/// order. Throws WrongArgumentKind for the edge model.
TileConfiguration draw_tiles(const Triangulation& tri, const InteractionModel& m, CounterRng& rng);
/// Edge variant for the edge model.
TileConfiguration draw_edges(const Triangulation& tri, const InteractionModel& m, CounterRng& rng);
/// Dispatches on the model kind.
TileConfiguration draw_hyperedges(const Triangulation& tri, const InteractionModel& m,
                                  CounterRng& rng);
/// The draw conditioned on the marks: bichromatic hyperedges stay closed,
/// monochromatic ones open with their usual probability.
TileConfiguration draw_given_marks(const Triangulation& tri, const InteractionModel& m,
                                   std::span<const Mark> marks, CounterRng& rng);

/// Comparison measure: hyperedges with phi >= g open independently with
/// probability p_tilde(g, q), all others closed. Tiles for the triangle
/// models, edges for the edge model.
TileConfiguration draw_tiles_tilde(const Triangulation& tri, const InteractionModel& m, double g,
                                   int q, CounterRng& rng);

/// Union-find over vertex ids with union by rank and path halving.
class ClusterState {
 public:
  ClusterState() = default;
  /// Every live vertex of `tri` is a singleton; frame vertices are merged
  /// into one boundary cluster.
  explicit ClusterState(const Triangulation& tri);

  VertexId find(VertexId v);
  /// Returns true when two clusters were merged.
  bool unite(VertexId a, VertexId b);
  void add(const Hyperedge& h);

  /// Number of clusters among live vertices.
  std::size_t components() const { return components_; }
  bool touches_boundary(VertexId v) { return boundary_[static_cast<std::size_t>(find(v))] != 0; }
  /// Size of the cluster of v, counting non-frame vertices only.
  std::size_t interior_size(VertexId v) { return interior_size_[static_cast<std::size_t>(find(v))]; }

 private:
  std::vector<VertexId> parent_;
  std::vector<std::uint8_t> rank_;
  std::vector<std::uint8_t> boundary_;
  std::vector<std::uint32_t> interior_size_;
  std::size_t components_ = 0;
};

struct ClusterCount {
  std::size_t K = 0;
  ClusterState state;
};

/// K(zeta, T): clusters of the hypergraph on all live vertices, frame merged.
ClusterCount count_clusters(const Triangulation& tri, const TileConfiguration& T);

/// Non-frame vertices inside `delta` whose cluster reaches the frame.
std::size_t n_delta_boundary(const Triangulation& tri, const TileConfiguration& T,
                             const ConvexPolygon& delta);

/// Fraction of non-frame vertices in the largest cluster; 0 when there are none.
double largest_cluster_fraction(const Triangulation& tri, const TileConfiguration& T);

struct KChangeReport {
  long point_add_delta = 0;   // K(zeta + x0, T) - K(zeta, T)
  long min_tile_delta = 0;    // over single added tiles
  long max_tile_delta = 0;
  std::size_t tiles_checked = 0;
};

/// Recounts K after adding x0 with T fixed, and after adding each closed
/// Delaunay tile of zeta to T on its own. Throws ViolationFound unless the
/// first change is exactly +1 and every tile change lies in [-2, 0].
KChangeReport k_change_audit(const Triangulation& tri, const TileConfiguration& T, Point2 x0);

}  // namespace dpotts::rcluster
