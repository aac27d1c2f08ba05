#include "dpotts/rcluster/rcluster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpotts/errors.hpp"
#include "dpotts/model/thresholds.hpp"

namespace dpotts::rcluster {
namespace {

bool has_interior_vertex(const Triangulation& tri, std::span<const VertexId> ids) {
  return std::any_of(ids.begin(), ids.end(), [&](VertexId v) { return !tri.is_frame(v); });
}

std::uint64_t hyperedge_key(const Hyperedge& h) {
  if (h.size == 2) return geometry::edge_key(h.vertices[0], h.vertices[1]);
  return geometry::tile_key(h.vertices);
}

double uniform_for(std::uint64_t draw_key, const Hyperedge& h) {
  return to_unit(hash_combine(draw_key, hyperedge_key(h)));
}

template <class Keep>
TileConfiguration draw_with(const Triangulation& tri, const InteractionModel& m, CounterRng& rng,
                            Keep&& keep) {
  const std::uint64_t key = rng();
  TileConfiguration T;
  T.hyperedge_size = m.uses_edges() ? 2 : 3;
  for (const Hyperedge& h : variable_hyperedges(tri, m)) {
    if (!keep(h)) continue;
    const double p = opening_probability(hyperedge_phi(tri, m, h));
    if (p > 0.0 && uniform_for(key, h) < p) T.open.push_back(h);
  }
  return T;
}

}  // namespace

Hyperedge as_hyperedge(const geometry::Tile& t) { return {t.vertices, 3}; }

Hyperedge as_hyperedge(const geometry::Edge& e) {
  return {{e.vertices[0], e.vertices[1], geometry::kNoVertex}, 2};
}

std::vector<Hyperedge> variable_hyperedges(const Triangulation& tri, const InteractionModel& m) {
  std::vector<Hyperedge> out;
  if (m.uses_edges()) {
    for (const auto& e : tri.edges()) {
      if (has_interior_vertex(tri, e.vertices)) out.push_back(as_hyperedge(e));
    }
  } else {
    for (const auto& t : tri.tiles()) {
      if (has_interior_vertex(tri, t.vertices)) out.push_back(as_hyperedge(t));
    }
  }
  return out;
}

double hyperedge_phi(const Triangulation& tri, const InteractionModel& m, const Hyperedge& h) {
  if (h.size == 2) {
    return model::phi_length(m, geometry::distance(tri.point(h.vertices[0]),
                                                   tri.point(h.vertices[1])));
  }
  const auto& v = h.vertices;
  return model::phi(m, geometry::make_tile(v[0], v[1], v[2], tri.point(v[0]), tri.point(v[1]),
                                           tri.point(v[2])));
}

double opening_probability(double phi) {
  if (std::isinf(phi)) return 1.0;
  return -std::expm1(-phi);
}

TileConfiguration draw_tiles(const Triangulation& tri, const InteractionModel& m, CounterRng& rng) {
  if (m.uses_edges()) throw WrongArgumentKind("draw_tiles needs a triangle model");
  return draw_with(tri, m, rng, [](const Hyperedge&) { return true; });
}

TileConfiguration draw_edges(const Triangulation& tri, const InteractionModel& m, CounterRng& rng) {
  if (!m.uses_edges()) throw WrongArgumentKind("draw_edges needs the edge model");
  return draw_with(tri, m, rng, [](const Hyperedge&) { return true; });
}

TileConfiguration draw_hyperedges(const Triangulation& tri, const InteractionModel& m,
                                  CounterRng& rng) {
  return draw_with(tri, m, rng, [](const Hyperedge&) { return true; });
}

TileConfiguration draw_given_marks(const Triangulation& tri, const InteractionModel& m,
                                   std::span<const Mark> marks, CounterRng& rng) {
  return draw_with(tri, m, rng, [&](const Hyperedge& h) {
    const Mark first = marks[static_cast<std::size_t>(h.vertices[0])];
    for (VertexId v : h.ids()) {
      if (marks[static_cast<std::size_t>(v)] != first) return false;
    }
    return true;
  });
}

TileConfiguration draw_tiles_tilde(const Triangulation& tri, const InteractionModel& m, double g,
                                   int q, CounterRng& rng) {
  const double pt = model::p_tilde(g, q);
  const std::uint64_t key = rng();
  TileConfiguration T;
  T.hyperedge_size = m.uses_edges() ? 2 : 3;
  std::vector<Hyperedge> all;
  if (m.uses_edges()) {
    for (const auto& e : tri.edges()) all.push_back(as_hyperedge(e));
  } else {
    for (const auto& t : tri.tiles()) all.push_back(as_hyperedge(t));
  }
  for (const Hyperedge& h : all) {
    if (hyperedge_phi(tri, m, h) < g) continue;
    if (uniform_for(key, h) < pt) T.open.push_back(h);
  }
  return T;
}

// ---------------------------------------------------------------------------

ClusterState::ClusterState(const Triangulation& tri) {
  const auto n = static_cast<std::size_t>(tri.id_bound());
  parent_.resize(n);
  rank_.assign(n, 0);
  boundary_.assign(n, 0);
  interior_size_.assign(n, 0);
  VertexId frame_root = geometry::kNoVertex;
  for (VertexId v = 0; v < tri.id_bound(); ++v) {
    const auto i = static_cast<std::size_t>(v);
    parent_[i] = v;
    if (!tri.is_live(v)) continue;
    if (tri.is_frame(v)) {
      if (frame_root == geometry::kNoVertex) {
        frame_root = v;
        boundary_[i] = 1;
        rank_[i] = 1;
        ++components_;
      } else {
        parent_[i] = frame_root;
      }
    } else {
      interior_size_[i] = 1;
      ++components_;
    }
  }
}

VertexId ClusterState::find(VertexId v) {
  auto i = static_cast<std::size_t>(v);
  while (parent_[i] != static_cast<VertexId>(i)) {
    const auto p = static_cast<std::size_t>(parent_[i]);
    parent_[i] = parent_[p];
    i = static_cast<std::size_t>(parent_[i]);
  }
  return static_cast<VertexId>(i);
}

bool ClusterState::unite(VertexId a, VertexId b) {
  auto ra = static_cast<std::size_t>(find(a));
  auto rb = static_cast<std::size_t>(find(b));
  if (ra == rb) return false;
  if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
  parent_[rb] = static_cast<VertexId>(ra);
  if (rank_[ra] == rank_[rb]) ++rank_[ra];
  boundary_[ra] |= boundary_[rb];
  interior_size_[ra] += interior_size_[rb];
  --components_;
  return true;
}

void ClusterState::add(const Hyperedge& h) {
  // Pairs (v0,v1),(v0,v2) connect the whole hyperedge.
  for (int i = 1; i < h.size; ++i) unite(h.vertices[0], h.vertices[static_cast<std::size_t>(i)]);
}

ClusterCount count_clusters(const Triangulation& tri, const TileConfiguration& T) {
  ClusterCount out{0, ClusterState(tri)};
  for (const Hyperedge& h : T.open) out.state.add(h);
  out.K = out.state.components();
  return out;
}

std::size_t n_delta_boundary(const Triangulation& tri, const TileConfiguration& T,
                             const ConvexPolygon& delta) {
  ClusterCount cc = count_clusters(tri, T);
  std::size_t n = 0;
  for (VertexId v : tri.live_vertices()) {
    if (tri.is_frame(v) || !delta.contains(tri.point(v))) continue;
    if (cc.state.touches_boundary(v)) ++n;
  }
  return n;
}

double largest_cluster_fraction(const Triangulation& tri, const TileConfiguration& T) {
  ClusterCount cc = count_clusters(tri, T);
  std::size_t interior = 0, best = 0;
  for (VertexId v : tri.live_vertices()) {
    if (tri.is_frame(v)) continue;
    ++interior;
    best = std::max(best, cc.state.interior_size(v));
  }
  return interior == 0 ? 0.0 : static_cast<double>(best) / static_cast<double>(interior);
}

KChangeReport k_change_audit(const Triangulation& tri, const TileConfiguration& T, Point2 x0) {
  KChangeReport r;
  const auto base = static_cast<long>(count_clusters(tri, T).K);

  Triangulation grown = tri;
  grown.insert(x0);
  r.point_add_delta = static_cast<long>(count_clusters(grown, T).K) - base;

  std::vector<Hyperedge> open = T.open;
  std::sort(open.begin(), open.end());
  r.min_tile_delta = 0;
  r.max_tile_delta = 0;
  bool first = true;
  for (const auto& tile : tri.tiles()) {
    const Hyperedge h = as_hyperedge(tile);
    if (std::binary_search(open.begin(), open.end(), h)) continue;
    TileConfiguration plus = T;
    plus.open.push_back(h);
    const long d = static_cast<long>(count_clusters(tri, plus).K) - base;
    r.min_tile_delta = first ? d : std::min(r.min_tile_delta, d);
    r.max_tile_delta = first ? d : std::max(r.max_tile_delta, d);
    first = false;
    ++r.tiles_checked;
  }
  if (r.point_add_delta != 1 || r.min_tile_delta < -2 || r.max_tile_delta > 0) {
    std::ostringstream msg;
    msg << "cluster-count change out of bounds: point " << r.point_add_delta << ", tiles ["
        << r.min_tile_delta << ", " << r.max_tile_delta << "]";
    throw ViolationFound(msg.str());
  }
  return r;
}

}  // namespace dpotts::rcluster
