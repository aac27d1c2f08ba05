#include "dpotts/model/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dpotts/errors.hpp"

namespace dpotts::model {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool tile_local(const ConvexPolygon& window, const Tile& t) {
  return window.circle_meets(t.circumcenter, t.circumradius);
}

Mark mark_of(std::span<const Mark> marks, VertexId v) {
  return marks[static_cast<std::size_t>(v)];
}

bool monochrome(std::span<const Mark> marks, const Tile& t) {
  const Mark a = mark_of(marks, t.vertices[0]);
  return a == mark_of(marks, t.vertices[1]) && a == mark_of(marks, t.vertices[2]);
}

bool contains(const Tile& t, VertexId v) {
  return t.vertices[0] == v || t.vertices[1] == v || t.vertices[2] == v;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::TriangleI: return "triangle1";
    case ModelKind::TriangleII: return "triangle2";
    case ModelKind::Edge: return "edge";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "triangle1" || s == "triangle-i" || s == "trianglei") return ModelKind::TriangleI;
  if (s == "triangle2" || s == "triangle-ii" || s == "triangleii") return ModelKind::TriangleII;
  if (s == "edge" || s == "edgemodel") return ModelKind::Edge;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

void InteractionModel::validate() const {
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) throw std::invalid_argument("delta0 must be > 0");
  if (!(beta >= 0.0)) throw std::invalid_argument("beta must be >= 0");
  if (kind == ModelKind::TriangleI && !(alpha0 > 0.0 && alpha0 < std::numbers::pi / 3.0)) {
    throw std::invalid_argument("alpha0 must lie in (0, pi/3)");
  }
}

double phi_angle(const InteractionModel& m, double theta) {
  switch (m.kind) {
    case ModelKind::TriangleI: return theta >= m.alpha0 ? m.beta : 0.0;
    case ModelKind::TriangleII:
      if (m.beta == 0.0) return 0.0;
      return std::log1p(m.beta * theta * theta * theta);
    case ModelKind::Edge: break;
  }
  throw WrongArgumentKind("the edge model takes edge lengths, not angles");
}

double phi_length(const InteractionModel& m, double length) {
  if (m.kind != ModelKind::Edge) {
    throw WrongArgumentKind("triangle models take minimal angles, not edge lengths");
  }
  if (m.beta == 0.0) return 0.0;
  const double r = m.delta0 / length;
  return std::log1p(m.beta * r * r * r);
}

double phi(const InteractionModel& m, const Tile& tile) { return phi_angle(m, tile.min_angle); }
double phi(const InteractionModel& m, const Edge& edge) { return phi_length(m, edge.length); }

double psi(const InteractionModel& m, double distance) {
  return distance >= m.delta0 ? 0.0 : kInf;
}

int delta_sigma(std::span<const Mark> marks) {
  for (const Mark& s : marks) {
    if (s != marks.front()) return 0;
  }
  return 1;
}

Triangulation MarkedConfiguration::triangulate() const {
  return Triangulation::build(points, frame);
}

std::vector<Mark> MarkedConfiguration::marks_by_vertex() const {
  std::vector<Mark> out(marks);
  out.resize(points.size() + frame.size(), Mark{1});
  return out;
}

double hamiltonian(const InteractionModel& m, const ConvexPolygon& window,
                   const Triangulation& tri, std::span<const Mark> marks) {
  const std::vector<Tile> local = geometry::local_tiles(tri, window);
  double h = 0.0;
  for (const Edge& e : geometry::local_edges(tri, window)) {
    if (e.length < m.delta0) return kInf;
    if (m.uses_edges()) {
      const std::array<Mark, 2> em{mark_of(marks, e.vertices[0]), mark_of(marks, e.vertices[1])};
      if (!delta_sigma(em)) h += phi(m, e);
    }
  }
  if (!m.uses_edges()) {
    for (const Tile& t : local) {
      if (!monochrome(marks, t)) h += phi(m, t);
    }
  }
  return h;
}

double hamiltonian(const InteractionModel& m, const MarkedConfiguration& config) {
  const Triangulation tri = config.triangulate();
  const std::vector<Mark> marks = config.marks_by_vertex();
  return hamiltonian(m, config.window, tri, marks);
}

double delta_hamiltonian(const InteractionModel& m, const ConvexPolygon& window,
                         const Triangulation& tri, const TileDiff& diff,
                         std::span<const Mark> marks) {
  // Only edges of created tiles can become local, so they carry the whole
  // hard-core check.
  for (const Tile& t : diff.created) {
    if (!tile_local(window, t)) continue;
    for (int i = 0; i < 3; ++i) {
      const VertexId a = t.vertices[static_cast<std::size_t>(i)];
      const VertexId b = t.vertices[static_cast<std::size_t>((i + 1) % 3)];
      if (geometry::distance(tri.point(a), tri.point(b)) < m.delta0) return kInf;
    }
  }

  double dh = 0.0;
  if (!m.uses_edges()) {
    for (const Tile& t : diff.created) {
      if (tile_local(window, t) && !monochrome(marks, t)) dh += phi(m, t);
    }
    for (const Tile& t : diff.destroyed) {
      if (tile_local(window, t) && !monochrome(marks, t)) dh -= phi(m, t);
    }
    return dh;
  }

  // Edge model: an edge is local when any tile holding it is local, so every
  // edge of a touched tile is re-evaluated before and after.
  std::vector<std::array<VertexId, 2>> touched;
  for (const auto* set : {&diff.created, &diff.destroyed}) {
    for (const Tile& t : *set) {
      const auto& v = t.vertices;
      touched.push_back({v[0], v[1]});
      touched.push_back({v[0], v[2]});
      touched.push_back({v[1], v[2]});
    }
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());

  for (const auto& [a, b] : touched) {
    const std::vector<Tile> after = tri.tiles_containing_edge(a, b);
    bool local_after = false;
    bool local_before = false;
    for (const Tile& t : after) {
      const bool local = tile_local(window, t);
      local_after = local_after || local;
      const bool is_new = std::any_of(diff.created.begin(), diff.created.end(),
                                      [&](const Tile& c) { return c.vertices == t.vertices; });
      if (!is_new) local_before = local_before || local;
    }
    for (const Tile& t : diff.destroyed) {
      if (contains(t, a) && contains(t, b)) local_before = local_before || tile_local(window, t);
    }
    if (local_after == local_before) continue;
    if (mark_of(marks, a) == mark_of(marks, b)) continue;
    const double w = phi_length(m, geometry::distance(tri.point(a), tri.point(b)));
    dh += local_after ? w : -w;
  }
  return dh;
}

}  // namespace dpotts::model
