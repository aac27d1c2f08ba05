#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpotts/geometry/point.hpp"
#include "dpotts/geometry/region.hpp"

namespace dpotts::geometry {

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

/// A Delaunay triangle. Vertex ids are sorted ascending so that two tiles
/// compare equal iff they span the same vertices.
struct Tile {
  std::array<VertexId, 3> vertices{};
  Point2 circumcenter;
  double circumradius = 0.0;
  double min_angle = 0.0;  // radians, in (0, pi/3]

  friend bool operator==(const Tile& a, const Tile& b) { return a.vertices == b.vertices; }
  friend auto operator<=>(const Tile& a, const Tile& b) { return a.vertices <=> b.vertices; }
};

struct Edge {
  std::array<VertexId, 2> vertices{};  // sorted
  double length = 0.0;

  friend bool operator==(const Edge& a, const Edge& b) { return a.vertices == b.vertices; }
  friend auto operator<=>(const Edge& a, const Edge& b) { return a.vertices <=> b.vertices; }
};

/// Tiles created and destroyed by one insertion or removal. The tiles that
/// survive are everything else.
struct TileDiff {
  std::vector<Tile> created;
  std::vector<Tile> destroyed;
  VertexId pivot = kNoVertex;
};

/// Geometry of the triangle (a,b,c), vertices sorted into the result.
Tile make_tile(VertexId a, VertexId b, VertexId c, Point2 pa, Point2 pb, Point2 pc);
std::uint64_t tile_key(const std::array<VertexId, 3>& sorted_vertices);
std::uint64_t edge_key(VertexId a, VertexId b);

/// Planar Delaunay triangulation with incremental insertion and removal.
///
/// Faces are stored with neighbour links; every hull edge is closed off by a
/// ghost face through a vertex at infinity, so the structure is a
/// triangulation of the sphere and insertion outside the hull needs no
/// special casing. Topology is decided by exact predicates; exact
/// cocircularity is broken by a symbolic perturbation ordered by vertex id.
///
/// Vertex ids are stable. A removed id goes on a LIFO free list and is handed
/// to the next insertion, so remove followed by insert at the same point
/// restores the original tile set exactly.
class Triangulation {
 public:
  Triangulation() = default;

  /// Points get ids 0..n-1, frame points n..n+f-1. Frame vertices cannot be
  /// removed. Throws DegeneratePosition on duplicates, fewer than 3 points or
  /// an all-collinear input.
  static Triangulation build(std::span<const Point2> points, std::span<const Point2> frame = {});

  /// Inserts p, which must lie strictly inside the current hull. `hint` is a
  /// live vertex near p used to start point location.
  TileDiff insert(Point2 p, VertexId hint = kNoVertex);

  /// Removes a non-frame vertex.
  TileDiff remove(VertexId v);

  /// A from-scratch triangulation of the same live vertices with the same ids.
  Triangulation rebuilt() const;

  std::size_t vertex_count() const { return live_count_; }
  /// All ids ever used are below this bound.
  VertexId id_bound() const { return static_cast<VertexId>(points_.size()); }
  bool is_live(VertexId v) const {
    return v >= 0 && v < id_bound() && live_[static_cast<std::size_t>(v)];
  }
  bool is_frame(VertexId v) const { return frame_[static_cast<std::size_t>(v)]; }
  Point2 point(VertexId v) const { return points_[static_cast<std::size_t>(v)]; }
  std::vector<VertexId> live_vertices() const;

  std::size_t tile_count() const { return finite_faces_; }
  /// Finite tiles sorted by vertex triple.
  std::vector<Tile> tiles() const;
  /// Delaunay edges (Del_2 derived from Del_3), sorted.
  std::vector<Edge> edges() const;
  /// Hull vertices in counter-clockwise order, collinear ones included.
  std::vector<VertexId> hull() const;
  /// Delaunay neighbours of v in counter-clockwise order.
  std::vector<VertexId> neighbors(VertexId v) const;
  /// Finite tiles incident to v.
  std::vector<Tile> tiles_around(VertexId v) const;
  /// The one or two finite tiles containing edge {a,b}; empty if no such edge.
  std::vector<Tile> tiles_containing_edge(VertexId a, VertexId b) const;

  template <class F>
  void for_each_tile(F&& f) const {
    for (const Face& face : faces_) {
      if (face.alive && !face.ghost()) f(face.tile);
    }
  }

  /// Exhaustive consistency check: neighbour symmetry, orientation, the
  /// empty-circumdisc property against every live vertex, and the Euler count.
  /// Quadratic; meant for tests. Returns a description of the first problem.
  std::optional<std::string> validate() const;

 private:
  using FaceId = std::int32_t;
  static constexpr FaceId kNoFace = -1;

  struct Face {
    std::array<VertexId, 3> v{};  // counter-clockwise; kNoVertex is infinity
    std::array<FaceId, 3> n{};    // n[i] is opposite v[i]
    bool alive = false;
    Tile tile;                    // finite faces only
    bool ghost() const { return v[0] < 0 || v[1] < 0 || v[2] < 0; }
    int index_of(VertexId x) const { return v[0] == x ? 0 : (v[1] == x ? 1 : 2); }
  };

  VertexId add_vertex(Point2 p, bool frame);
  void build_from(std::span<const VertexId> order);
  FaceId new_face(VertexId a, VertexId b, VertexId c);
  void free_face(FaceId f);
  FaceId locate(Point2 p, FaceId start) const;
  bool in_conflict(const Face& f, Point2 p, VertexId id) const;
  TileDiff insert_at(VertexId id, FaceId seed);
  TileDiff remove_interior(VertexId v, const std::vector<FaceId>& star);
  TileDiff remove_by_rebuild(VertexId v);
  FaceId any_face_of(VertexId v) const { return vface_[static_cast<std::size_t>(v)]; }
  std::vector<FaceId> star_of(VertexId v) const;

  std::vector<Point2> points_;
  std::vector<char> live_;
  std::vector<char> frame_;
  std::vector<FaceId> vface_;
  std::vector<VertexId> free_ids_;
  std::size_t live_count_ = 0;

  std::vector<Face> faces_;
  std::vector<FaceId> free_faces_;
  std::size_t finite_faces_ = 0;
  FaceId hint_ = kNoFace;

  // Scratch for conflict searches.
  mutable std::vector<std::uint32_t> stamp_;
  mutable std::uint32_t stamp_value_ = 0;
};

/// Tiles whose circumcircle meets the region (Del_{3,Λ}).
std::vector<Tile> local_tiles(const Triangulation& tri, const ConvexPolygon& region);
/// Edges of local tiles (Del_{2,Λ}), sorted.
std::vector<Edge> local_edges(const Triangulation& tri, const ConvexPolygon& region);

struct GeneralPositionReport {
  bool general = true;
  /// Indices of a collinear triple or cocircular quadruple when not general.
  std::vector<std::size_t> witness;
};

/// Exact check that no three points are collinear and no four cocircular.
GeneralPositionReport is_general_position(std::span<const Point2> points);

}  // namespace dpotts::geometry
