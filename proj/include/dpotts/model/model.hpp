#pragma once

#include <compare>
#include <span>
#include <string_view>
#include <vector>

#include "dpotts/geometry/region.hpp"
#include "dpotts/geometry/triangulation.hpp"

namespace dpotts::model {

using geometry::ConvexPolygon;
using geometry::Edge;
using geometry::Point2;
using geometry::Tile;
using geometry::TileDiff;
using geometry::Triangulation;
using geometry::VertexId;

/// A colour in {1..q}. Frame points always carry mark 1.
struct Mark {
  int value = 1;
  constexpr Mark() = default;
  constexpr explicit Mark(int v) : value(v) {}
  friend constexpr bool operator==(Mark, Mark) = default;
  friend constexpr auto operator<=>(Mark, Mark) = default;
};

enum class ModelKind { TriangleI, TriangleII, Edge };

std::string_view to_string(ModelKind kind);
/// Accepts "triangle1"/"triangle-i", "triangle2"/"triangle-ii", "edge" (any case).
ModelKind parse_model_kind(std::string_view text);

/// Hard-core range delta0 plus the type potential. alpha0 is read only by
/// TriangleI. beta may be +inf, in which case every type potential is +inf.
struct InteractionModel {
  ModelKind kind = ModelKind::TriangleII;
  double delta0 = 1.0;
  double alpha0 = 0.3;
  double beta = 1.0;

  /// Throws std::invalid_argument when a parameter is out of range.
  void validate() const;
  /// Triangles for the two triangle models, edges for the edge model.
  bool uses_edges() const { return kind == ModelKind::Edge; }
};

/// Type potential of a triangle with minimal angle theta (triangle models).
double phi_angle(const InteractionModel& m, double theta);
/// Type potential of an edge of the given length (edge model).
double phi_length(const InteractionModel& m, double length);
/// Throw WrongArgumentKind when the hyperedge does not match the model.
double phi(const InteractionModel& m, const Tile& tile);
double phi(const InteractionModel& m, const Edge& edge);

/// Hard-core pair potential: 0 at distance >= delta0, +inf below.
double psi(const InteractionModel& m, double distance);

/// 1 when all marks agree.
int delta_sigma(std::span<const Mark> marks);

/// Positions inside the window with their marks, plus the fixed frame outside
/// it. Triangulating gives points ids 0..n-1 and frame points n..n+f-1.
struct MarkedConfiguration {
  std::vector<Point2> points;
  std::vector<Mark> marks;
  std::vector<Point2> frame;
  ConvexPolygon window;

  Triangulation triangulate() const;
  /// Marks indexed by the vertex ids of triangulate().
  std::vector<Mark> marks_by_vertex() const;
};

/// H over the Λ-local hyperedges of `tri`: hard-core on local edges plus the
/// type potential on bichromatic local tiles (triangle models) or local edges
/// (edge model). `marks` is indexed by vertex id.
double hamiltonian(const InteractionModel& m, const ConvexPolygon& window,
                   const Triangulation& tri, std::span<const Mark> marks);
double hamiltonian(const InteractionModel& m, const MarkedConfiguration& config);

/// H(after) - H(before) from the hyperedges touched by one insertion or
/// removal. `tri` is the triangulation after the operation and `marks` must
/// still hold the pivot's mark. The state before must have finite energy;
/// the result is +inf when the new state violates the hard core.
double delta_hamiltonian(const InteractionModel& m, const ConvexPolygon& window,
                         const Triangulation& tri, const TileDiff& diff,
                         std::span<const Mark> marks);

}  // namespace dpotts::model
