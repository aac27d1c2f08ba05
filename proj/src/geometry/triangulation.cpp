#include "dpotts/geometry/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "dpotts/errors.hpp"
#include "dpotts/geometry/predicates.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::geometry {
namespace {

constexpr int next(int i) { return i == 2 ? 0 : i + 1; }
constexpr int prev(int i) { return i == 0 ? 2 : i - 1; }

// Hilbert index on a 2^16 grid over the bounding box, for spatially coherent
// insertion order.
std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t n = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

std::vector<VertexId> hilbert_order(const std::vector<Point2>& pts, std::vector<VertexId> ids) {
  if (ids.empty()) return ids;
  Point2 lo = pts[static_cast<std::size_t>(ids[0])], hi = lo;
  for (VertexId id : ids) {
    const Point2 p = pts[static_cast<std::size_t>(id)];
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-300});
  std::vector<std::pair<std::uint64_t, VertexId>> keyed;
  keyed.reserve(ids.size());
  for (VertexId id : ids) {
    const Point2 p = pts[static_cast<std::size_t>(id)];
    const auto gx = static_cast<std::uint32_t>(std::min(65535.0, (p.x - lo.x) / span * 65535.0));
    const auto gy = static_cast<std::uint32_t>(std::min(65535.0, (p.y - lo.y) / span * 65535.0));
    keyed.emplace_back(hilbert_index(gx, gy), id);
  }
  std::sort(keyed.begin(), keyed.end());
  for (std::size_t i = 0; i < keyed.size(); ++i) ids[i] = keyed[i].second;
  return ids;
}

double angle_at(Point2 apex, Point2 u, Point2 v) {
  const Point2 a = u - apex, b = v - apex;
  return std::atan2(std::fabs(cross(a, b)), dot(a, b));
}

// p strictly inside segment ab, given that the three are collinear.
bool strictly_between(Point2 a, Point2 b, Point2 p) {
  if (a.x != b.x) return (a.x < p.x && p.x < b.x) || (b.x < p.x && p.x < a.x);
  return (a.y < p.y && p.y < b.y) || (b.y < p.y && p.y < a.y);
}

}  // namespace

Tile make_tile(VertexId a, VertexId b, VertexId c, Point2 pa, Point2 pb, Point2 pc) {
  Tile t;
  std::array<std::pair<VertexId, Point2>, 3> vs = {{{a, pa}, {b, pb}, {c, pc}}};
  std::sort(vs.begin(), vs.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  t.vertices = {vs[0].first, vs[1].first, vs[2].first};

  // Circumcentre relative to the first vertex for accuracy.
  const Point2 o = vs[0].second;
  const Point2 b1 = vs[1].second - o, c1 = vs[2].second - o;
  const double d = 2.0 * cross(b1, c1);
  const double bb = dot(b1, b1), cc = dot(c1, c1);
  const Point2 rel{(c1.y * bb - b1.y * cc) / d, (b1.x * cc - c1.x * bb) / d};
  t.circumcenter = o + rel;
  t.circumradius = norm(rel);

  const double alpha = angle_at(pa, pb, pc);
  const double beta = angle_at(pb, pc, pa);
  const double gamma = angle_at(pc, pa, pb);
  t.min_angle = std::min({alpha, beta, gamma, std::numbers::pi / 3.0});
  return t;
}

std::uint64_t tile_key(const std::array<VertexId, 3>& v) {
  return hash_combine(hash_combine(mix64(static_cast<std::uint64_t>(v[0])),
                                   static_cast<std::uint64_t>(v[1])),
                      static_cast<std::uint64_t>(v[2]));
}

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return hash_combine(mix64(static_cast<std::uint64_t>(a) ^ 0x5bd1e995ULL),
                      static_cast<std::uint64_t>(b));
}

// ---------------------------------------------------------------------------
// Construction

Triangulation Triangulation::build(std::span<const Point2> points, std::span<const Point2> frame) {
  Triangulation t;
  const std::size_t total = points.size() + frame.size();
  if (total < 3) throw DegeneratePosition("need at least 3 points");
  t.points_.reserve(total);
  for (Point2 p : points) t.add_vertex(p, false);
  for (Point2 p : frame) t.add_vertex(p, true);
  for (const Point2& p : t.points_) {
    if (!is_finite(p)) throw DegeneratePosition("non-finite coordinate");
  }

  std::vector<VertexId> ids(total);
  for (std::size_t i = 0; i < total; ++i) ids[i] = static_cast<VertexId>(i);
  {
    std::vector<VertexId> by_pos = ids;
    std::sort(by_pos.begin(), by_pos.end(), [&](VertexId a, VertexId b) {
      return t.point(a) < t.point(b);
    });
    for (std::size_t i = 1; i < by_pos.size(); ++i) {
      if (t.point(by_pos[i]) == t.point(by_pos[i - 1])) {
        throw DegeneratePosition("duplicate point");
      }
    }
  }
  t.build_from(hilbert_order(t.points_, std::move(ids)));
  return t;
}

VertexId Triangulation::add_vertex(Point2 p, bool frame) {
  VertexId id;
  if (!free_ids_.empty()) {
    id = free_ids_.back();
    free_ids_.pop_back();
    points_[static_cast<std::size_t>(id)] = p;
    live_[static_cast<std::size_t>(id)] = 1;
    frame_[static_cast<std::size_t>(id)] = frame ? 1 : 0;
    vface_[static_cast<std::size_t>(id)] = kNoFace;
  } else {
    id = static_cast<VertexId>(points_.size());
    points_.push_back(p);
    live_.push_back(1);
    frame_.push_back(frame ? 1 : 0);
    vface_.push_back(kNoFace);
  }
  ++live_count_;
  return id;
}

Triangulation::FaceId Triangulation::new_face(VertexId a, VertexId b, VertexId c) {
  FaceId f;
  if (!free_faces_.empty()) {
    f = free_faces_.back();
    free_faces_.pop_back();
  } else {
    f = static_cast<FaceId>(faces_.size());
    faces_.emplace_back();
  }
  Face& face = faces_[static_cast<std::size_t>(f)];
  face.v = {a, b, c};
  face.n = {kNoFace, kNoFace, kNoFace};
  face.alive = true;
  if (!face.ghost()) {
    face.tile = make_tile(a, b, c, point(a), point(b), point(c));
    ++finite_faces_;
  }
  return f;
}

void Triangulation::free_face(FaceId f) {
  Face& face = faces_[static_cast<std::size_t>(f)];
  if (!face.ghost()) --finite_faces_;
  face.alive = false;
  free_faces_.push_back(f);
}

void Triangulation::build_from(std::span<const VertexId> order) {
  faces_.clear();
  free_faces_.clear();
  finite_faces_ = 0;
  hint_ = kNoFace;

  const VertexId a = order[0];
  std::size_t ib = 1;
  while (ib < order.size() && point(order[ib]) == point(a)) ++ib;
  std::size_t ic = ib + 1;
  while (ic < order.size() && orient(point(a), point(order[ib]), point(order[ic])) == 0) ++ic;
  if (ic >= order.size()) throw DegeneratePosition("all points collinear");
  VertexId b = order[ib], c = order[ic];
  if (orient(point(a), point(b), point(c)) < 0) std::swap(b, c);

  std::vector<FaceId> fs = {new_face(a, b, c), new_face(b, a, kNoVertex),
                            new_face(c, b, kNoVertex), new_face(a, c, kNoVertex)};
  // Pair up the directed edges of the four faces.
  for (FaceId f : fs) {
    Face& face = faces_[static_cast<std::size_t>(f)];
    for (int i = 0; i < 3; ++i) {
      const VertexId x = face.v[static_cast<std::size_t>(next(i))];
      const VertexId y = face.v[static_cast<std::size_t>(prev(i))];
      for (FaceId g : fs) {
        if (g == f) continue;
        const Face& other = faces_[static_cast<std::size_t>(g)];
        for (int j = 0; j < 3; ++j) {
          if (other.v[static_cast<std::size_t>(next(j))] == y &&
              other.v[static_cast<std::size_t>(prev(j))] == x) {
            face.n[static_cast<std::size_t>(i)] = g;
          }
        }
      }
    }
  }
  vface_[static_cast<std::size_t>(a)] = fs[0];
  vface_[static_cast<std::size_t>(b)] = fs[0];
  vface_[static_cast<std::size_t>(c)] = fs[0];
  hint_ = fs[0];

  for (VertexId v : order) {
    if (v == a || v == b || v == c) continue;
    const FaceId f = locate(point(v), hint_);
    const Face& face = faces_[static_cast<std::size_t>(f)];
    for (VertexId u : face.v) {
      if (u >= 0 && point(u) == point(v)) throw DegeneratePosition("duplicate point");
    }
    insert_at(v, f);
  }
}

// ---------------------------------------------------------------------------
// Point location and conflicts

Triangulation::FaceId Triangulation::locate(Point2 p, FaceId start) const {
  if (start == kNoFace || !faces_[static_cast<std::size_t>(start)].alive) {
    start = kNoFace;
    for (std::size_t i = 0; i < faces_.size(); ++i) {
      if (faces_[i].alive) {
        start = static_cast<FaceId>(i);
        break;
      }
    }
  }
  FaceId f = start;
  {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    if (face.ghost()) f = face.n[static_cast<std::size_t>(face.index_of(kNoVertex))];
  }

  // Stochastic visibility walk; the step cap only matters on a corrupted mesh.
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  const std::size_t cap = 4 * faces_.size() + 16;
  for (std::size_t step = 0; step < cap; ++step) {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    if (face.ghost()) return f;
    state = mix64(state);
    const int r = static_cast<int>(state % 3);
    bool moved = false;
    for (int t = 0; t < 3; ++t) {
      const int i = (r + t) % 3;
      const Point2 u = point(face.v[static_cast<std::size_t>(next(i))]);
      const Point2 w = point(face.v[static_cast<std::size_t>(prev(i))]);
      if (orient(u, w, p) < 0) {
        f = face.n[static_cast<std::size_t>(i)];
        moved = true;
        break;
      }
    }
    if (!moved) return f;
  }

  // Exhaustive fallback.
  FaceId ghost_hit = kNoFace;
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    const Face& face = faces_[i];
    if (!face.alive) continue;
    if (face.ghost()) {
      if (ghost_hit == kNoFace && in_conflict(face, p, kNoVertex)) ghost_hit = static_cast<FaceId>(i);
      continue;
    }
    bool inside = true;
    for (int k = 0; k < 3 && inside; ++k) {
      inside = orient(point(face.v[static_cast<std::size_t>(next(k))]),
                      point(face.v[static_cast<std::size_t>(prev(k))]), p) >= 0;
    }
    if (inside) return static_cast<FaceId>(i);
  }
  if (ghost_hit == kNoFace) throw Error("point location failed: triangulation corrupted");
  return ghost_hit;
}

bool Triangulation::in_conflict(const Face& f, Point2 p, VertexId id) const {
  if (f.ghost()) {
    const int i = f.index_of(kNoVertex);
    const Point2 a = point(f.v[static_cast<std::size_t>(next(i))]);
    const Point2 b = point(f.v[static_cast<std::size_t>(prev(i))]);
    const int o = orient(a, b, p);
    return o > 0 || (o == 0 && strictly_between(a, b, p));
  }
  return incircle_perturbed(point(f.v[0]), point(f.v[1]), point(f.v[2]), p, f.v[0], f.v[1],
                            f.v[2], id) > 0;
}

// ---------------------------------------------------------------------------
// Insertion

TileDiff Triangulation::insert(Point2 p, VertexId hint) {
  if (!is_finite(p)) throw DegeneratePosition("non-finite coordinate");
  FaceId start = hint_;
  if (is_live(hint) && vface_[static_cast<std::size_t>(hint)] != kNoFace) start = any_face_of(hint);
  const FaceId f = locate(p, start);
  const Face& face = faces_[static_cast<std::size_t>(f)];
  if (face.ghost()) throw OutsideHull("point outside the triangulated hull");
  for (VertexId u : face.v) {
    if (point(u) == p) throw DegeneratePosition("point coincides with an existing vertex");
  }
  const VertexId id = add_vertex(p, false);
  return insert_at(id, f);
}

TileDiff Triangulation::insert_at(VertexId id, FaceId seed) {
  const Point2 p = point(id);
  TileDiff diff;
  diff.pivot = id;

  if (stamp_.size() < faces_.size()) stamp_.resize(faces_.size(), 0);
  if (++stamp_value_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0);
    stamp_value_ = 1;
  }
  const std::uint32_t mark = stamp_value_;

  // Cavity: faces in conflict with p, grown from the located face.
  std::vector<FaceId> cavity{seed};
  stamp_[static_cast<std::size_t>(seed)] = mark;
  struct Boundary {
    VertexId from;
    VertexId to;
    FaceId outside;
  };
  std::vector<Boundary> boundary;
  for (std::size_t k = 0; k < cavity.size(); ++k) {
    const Face& face = faces_[static_cast<std::size_t>(cavity[k])];
    for (int i = 0; i < 3; ++i) {
      const FaceId g = face.n[static_cast<std::size_t>(i)];
      if (stamp_[static_cast<std::size_t>(g)] == mark) continue;
      if (in_conflict(faces_[static_cast<std::size_t>(g)], p, id)) {
        stamp_[static_cast<std::size_t>(g)] = mark;
        cavity.push_back(g);
      }
    }
  }
  for (FaceId c : cavity) {
    const Face& face = faces_[static_cast<std::size_t>(c)];
    for (int i = 0; i < 3; ++i) {
      const FaceId g = face.n[static_cast<std::size_t>(i)];
      if (stamp_[static_cast<std::size_t>(g)] == mark) continue;
      boundary.push_back({face.v[static_cast<std::size_t>(next(i))],
                          face.v[static_cast<std::size_t>(prev(i))], g});
    }
  }

  for (FaceId c : cavity) {
    const Face& face = faces_[static_cast<std::size_t>(c)];
    if (!face.ghost()) diff.destroyed.push_back(face.tile);
  }

  // Star the cavity boundary from p. New face (from, to, p): n[2] is the
  // outside face, n[0] the new face starting at `to`, n[1] the one ending at
  // `from`.
  std::vector<std::pair<VertexId, FaceId>> by_from;
  by_from.reserve(boundary.size());
  for (const Boundary& e : boundary) {
    const FaceId nf = new_face(e.from, e.to, id);
    Face& outside = faces_[static_cast<std::size_t>(e.outside)];
    for (int j = 0; j < 3; ++j) {
      const VertexId x = outside.v[static_cast<std::size_t>(next(j))];
      const VertexId y = outside.v[static_cast<std::size_t>(prev(j))];
      if (x == e.to && y == e.from) outside.n[static_cast<std::size_t>(j)] = nf;
    }
    faces_[static_cast<std::size_t>(nf)].n[2] = e.outside;
    by_from.emplace_back(e.from, nf);
  }
  std::sort(by_from.begin(), by_from.end());
  auto find_from = [&](VertexId v) {
    const auto it = std::lower_bound(by_from.begin(), by_from.end(), std::make_pair(v, kNoFace));
    if (it == by_from.end() || it->first != v) {
      throw Error("cavity boundary is not a simple cycle: triangulation corrupted");
    }
    return it->second;
  };
  for (const auto& [from, nf] : by_from) {
    Face& face = faces_[static_cast<std::size_t>(nf)];
    const FaceId after = find_from(face.v[1]);
    face.n[0] = after;
    faces_[static_cast<std::size_t>(after)].n[1] = nf;
    if (from >= 0) vface_[static_cast<std::size_t>(from)] = nf;
    if (!face.ghost()) diff.created.push_back(face.tile);
  }
  vface_[static_cast<std::size_t>(id)] = by_from.front().second;
  hint_ = by_from.front().second;

  for (FaceId c : cavity) free_face(c);
  return diff;
}

// ---------------------------------------------------------------------------
// Removal

std::vector<Triangulation::FaceId> Triangulation::star_of(VertexId v) const {
  std::vector<FaceId> star;
  const FaceId start = any_face_of(v);
  FaceId f = start;
  const std::size_t cap = faces_.size() + 1;
  do {
    star.push_back(f);
    const Face& face = faces_[static_cast<std::size_t>(f)];
    const int i = face.index_of(v);
    if (face.v[static_cast<std::size_t>(i)] != v) throw Error("vertex star corrupted");
    f = face.n[static_cast<std::size_t>(next(i))];
    if (star.size() > cap) throw Error("vertex star does not close: triangulation corrupted");
  } while (f != start);
  return star;
}

TileDiff Triangulation::remove(VertexId v) {
  if (!is_live(v)) throw std::out_of_range("remove: vertex is not live");
  if (is_frame(v)) throw FrameVertexRemoval("frame vertices cannot be removed");
  const std::vector<FaceId> star = star_of(v);
  const bool on_hull = std::any_of(star.begin(), star.end(), [&](FaceId f) {
    return faces_[static_cast<std::size_t>(f)].ghost();
  });
  if (on_hull) return remove_by_rebuild(v);
  return remove_interior(v, star);
}

TileDiff Triangulation::remove_interior(VertexId v, const std::vector<FaceId>& star) {
  TileDiff diff;
  diff.pivot = v;

  // Link polygon a_0..a_{k-1}, counter-clockwise; edge a_j -> a_{j+1} borders
  // outside[j].
  const std::size_t k = star.size();
  std::vector<VertexId> link(k);
  std::vector<FaceId> outside(k);
  for (std::size_t j = 0; j < k; ++j) {
    const Face& face = faces_[static_cast<std::size_t>(star[j])];
    const int i = face.index_of(v);
    link[j] = face.v[static_cast<std::size_t>(next(i))];
    outside[j] = face.n[static_cast<std::size_t>(i)];
    diff.destroyed.push_back(face.tile);
  }

  // Gift-wrap the hole: the triangle on the inner side of each base edge is
  // the candidate whose circumcircle holds no other candidate.
  std::vector<std::array<VertexId, 3>> triangles;
  triangles.reserve(k - 2);
  std::vector<std::vector<VertexId>> work;
  work.push_back(link);
  while (!work.empty()) {
    std::vector<VertexId> poly = std::move(work.back());
    work.pop_back();
    const VertexId a = poly[0], b = poly[1];
    const Point2 pa = point(a), pb = point(b);
    std::size_t best = 0;
    for (std::size_t j = 2; j < poly.size(); ++j) {
      const Point2 px = point(poly[j]);
      if (orient(pa, pb, px) <= 0) continue;
      if (best == 0 || incircle_perturbed(pa, pb, point(poly[best]), px, a, b, poly[best],
                                          poly[j]) > 0) {
        best = j;
      }
    }
    if (best == 0) throw Error("star polygon retriangulation failed: triangulation corrupted");
    triangles.push_back({a, b, poly[best]});
    if (best >= 3) {
      std::vector<VertexId> left{poly[best]};
      left.insert(left.end(), poly.begin() + 1, poly.begin() + static_cast<std::ptrdiff_t>(best));
      work.push_back(std::move(left));
    }
    if (poly.size() - best >= 2) {
      std::vector<VertexId> right{a};
      right.insert(right.end(), poly.begin() + static_cast<std::ptrdiff_t>(best), poly.end());
      work.push_back(std::move(right));
    }
  }

  // Free the star first so its slots are reused.
  for (FaceId f : star) free_face(f);

  std::vector<FaceId> created;
  created.reserve(triangles.size());
  for (const auto& t : triangles) created.push_back(new_face(t[0], t[1], t[2]));

  for (FaceId f : created) {
    Face& face = faces_[static_cast<std::size_t>(f)];
    for (int i = 0; i < 3; ++i) {
      const VertexId x = face.v[static_cast<std::size_t>(next(i))];
      const VertexId y = face.v[static_cast<std::size_t>(prev(i))];
      FaceId twin = kNoFace;
      for (FaceId g : created) {
        if (g == f) continue;
        const Face& other = faces_[static_cast<std::size_t>(g)];
        for (int j = 0; j < 3; ++j) {
          if (other.v[static_cast<std::size_t>(next(j))] == y &&
              other.v[static_cast<std::size_t>(prev(j))] == x) {
            twin = g;
          }
        }
      }
      if (twin == kNoFace) {
        for (std::size_t j = 0; j < k; ++j) {
          if (link[j] == x && link[(j + 1) % k] == y) {
            twin = outside[j];
            Face& out = faces_[static_cast<std::size_t>(twin)];
            for (int m = 0; m < 3; ++m) {
              if (out.v[static_cast<std::size_t>(next(m))] == y &&
                  out.v[static_cast<std::size_t>(prev(m))] == x) {
                out.n[static_cast<std::size_t>(m)] = f;
              }
            }
            break;
          }
        }
      }
      if (twin == kNoFace) throw Error("hole edge without partner: triangulation corrupted");
      face.n[static_cast<std::size_t>(i)] = twin;
      vface_[static_cast<std::size_t>(x)] = f;
    }
    diff.created.push_back(face.tile);
  }
  if (!created.empty()) hint_ = created.front();

  live_[static_cast<std::size_t>(v)] = 0;
  vface_[static_cast<std::size_t>(v)] = kNoFace;
  free_ids_.push_back(v);
  --live_count_;
  return diff;
}

TileDiff Triangulation::remove_by_rebuild(VertexId v) {
  std::vector<VertexId> rest;
  rest.reserve(live_count_);
  for (VertexId u = 0; u < id_bound(); ++u) {
    if (u != v && is_live(u)) rest.push_back(u);
  }
  bool spread = false;
  if (rest.size() >= 3) {
    for (std::size_t i = 2; i < rest.size() && !spread; ++i) {
      spread = orient(point(rest[0]), point(rest[1]), point(rest[i])) != 0;
    }
  }
  if (!spread) throw DegeneratePosition("removal would leave a degenerate point set");

  std::vector<Tile> before = tiles();
  live_[static_cast<std::size_t>(v)] = 0;
  vface_[static_cast<std::size_t>(v)] = kNoFace;
  free_ids_.push_back(v);
  --live_count_;
  build_from(hilbert_order(points_, std::move(rest)));
  std::vector<Tile> after = tiles();

  TileDiff diff;
  diff.pivot = v;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(),
                      std::back_inserter(diff.created));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(),
                      std::back_inserter(diff.destroyed));
  return diff;
}

Triangulation Triangulation::rebuilt() const {
  Triangulation t;
  t.points_ = points_;
  t.live_ = live_;
  t.frame_ = frame_;
  t.free_ids_ = free_ids_;
  t.live_count_ = live_count_;
  t.vface_.assign(points_.size(), kNoFace);
  t.build_from(hilbert_order(t.points_, live_vertices()));
  return t;
}

// ---------------------------------------------------------------------------
// Queries

std::vector<VertexId> Triangulation::live_vertices() const {
  std::vector<VertexId> out;
  out.reserve(live_count_);
  for (VertexId v = 0; v < id_bound(); ++v) {
    if (live_[static_cast<std::size_t>(v)]) out.push_back(v);
  }
  return out;
}

std::vector<Tile> Triangulation::tiles() const {
  std::vector<Tile> out;
  out.reserve(finite_faces_);
  for_each_tile([&](const Tile& t) { out.push_back(t); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> Triangulation::edges() const {
  std::vector<Edge> out;
  out.reserve(3 * finite_faces_);
  for (const Face& face : faces_) {
    if (!face.alive || face.ghost()) continue;
    for (int i = 0; i < 3; ++i) {
      VertexId a = face.v[static_cast<std::size_t>(next(i))];
      VertexId b = face.v[static_cast<std::size_t>(prev(i))];
      if (a > b) std::swap(a, b);
      out.push_back({{a, b}, distance(point(a), point(b))});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<VertexId> Triangulation::hull() const {
  FaceId start = kNoFace;
  for (std::size_t i = 0; i < faces_.size(); ++i) {
    if (faces_[i].alive && faces_[i].ghost()) {
      start = static_cast<FaceId>(i);
      break;
    }
  }
  std::vector<VertexId> out;
  if (start == kNoFace) return out;
  FaceId f = start;
  do {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    const int i = face.index_of(kNoVertex);
    // Ghost (a, b, inf) runs along the hull edge b -> a.
    out.push_back(face.v[static_cast<std::size_t>(prev(i))]);
    f = face.n[static_cast<std::size_t>(prev(i))];
  } while (f != start && out.size() <= faces_.size());
  return out;
}

std::vector<VertexId> Triangulation::neighbors(VertexId v) const {
  std::vector<VertexId> out;
  for (FaceId f : star_of(v)) {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    const VertexId u = face.v[static_cast<std::size_t>(next(face.index_of(v)))];
    if (u >= 0) out.push_back(u);
  }
  return out;
}

std::vector<Tile> Triangulation::tiles_around(VertexId v) const {
  std::vector<Tile> out;
  for (FaceId f : star_of(v)) {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    if (!face.ghost()) out.push_back(face.tile);
  }
  return out;
}

std::vector<Tile> Triangulation::tiles_containing_edge(VertexId a, VertexId b) const {
  std::vector<Tile> out;
  if (!is_live(a) || !is_live(b)) return out;
  for (FaceId f : star_of(a)) {
    const Face& face = faces_[static_cast<std::size_t>(f)];
    if (face.ghost()) continue;
    if (face.v[0] == b || face.v[1] == b || face.v[2] == b) out.push_back(face.tile);
  }
  return out;
}

std::optional<std::string> Triangulation::validate() const {
  std::ostringstream err;
  const std::vector<VertexId> verts = live_vertices();
  for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
    const Face& face = faces_[fi];
    if (!face.alive) continue;
    for (int i = 0; i < 3; ++i) {
      const FaceId g = face.n[static_cast<std::size_t>(i)];
      if (g < 0 || !faces_[static_cast<std::size_t>(g)].alive) {
        err << "face " << fi << " has a dead neighbour";
        return err.str();
      }
      const Face& other = faces_[static_cast<std::size_t>(g)];
      const VertexId x = face.v[static_cast<std::size_t>(next(i))];
      const VertexId y = face.v[static_cast<std::size_t>(prev(i))];
      bool back = false;
      for (int j = 0; j < 3; ++j) {
        back = back || (other.n[static_cast<std::size_t>(j)] == static_cast<FaceId>(fi) &&
                        other.v[static_cast<std::size_t>(next(j))] == y &&
                        other.v[static_cast<std::size_t>(prev(j))] == x);
      }
      if (!back) {
        err << "faces " << fi << " and " << g << " are not mutual neighbours";
        return err.str();
      }
    }
    for (VertexId u : face.v) {
      if (u >= 0 && !is_live(u)) {
        err << "face " << fi << " references dead vertex " << u;
        return err.str();
      }
    }
    if (face.ghost()) continue;
    const Point2 a = point(face.v[0]), b = point(face.v[1]), c = point(face.v[2]);
    if (orient(a, b, c) <= 0) {
      err << "face " << fi << " is not counter-clockwise";
      return err.str();
    }
    for (VertexId u : verts) {
      if (u == face.v[0] || u == face.v[1] || u == face.v[2]) continue;
      if (incircle(a, b, c, point(u)) > 0) {
        err << "vertex " << u << " lies inside the circumdisc of tile (" << face.tile.vertices[0]
            << "," << face.tile.vertices[1] << "," << face.tile.vertices[2] << ")";
        return err.str();
      }
    }
  }
  for (VertexId u : verts) {
    const FaceId f = vface_[static_cast<std::size_t>(u)];
    if (f < 0 || !faces_[static_cast<std::size_t>(f)].alive ||
        faces_[static_cast<std::size_t>(f)].v[static_cast<std::size_t>(
            faces_[static_cast<std::size_t>(f)].index_of(u))] != u) {
      err << "vertex " << u << " has a stale face pointer";
      return err.str();
    }
  }
  const std::size_t h = hull().size();
  const std::size_t n = verts.size();
  if (finite_faces_ != 2 * n - 2 - h) {
    err << "Euler count violated: " << finite_faces_ << " tiles, expected " << 2 * n - 2 - h;
    return err.str();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Free functions

std::vector<Tile> local_tiles(const Triangulation& tri, const ConvexPolygon& region) {
  std::vector<Tile> out;
  tri.for_each_tile([&](const Tile& t) {
    if (region.circle_meets(t.circumcenter, t.circumradius)) out.push_back(t);
  });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Edge> local_edges(const Triangulation& tri, const ConvexPolygon& region) {
  std::vector<Edge> out;
  for (const Tile& t : local_tiles(tri, region)) {
    for (int i = 0; i < 3; ++i) {
      const VertexId a = t.vertices[static_cast<std::size_t>(i)];
      const VertexId b = t.vertices[static_cast<std::size_t>(next(i))];
      out.push_back({{std::min(a, b), std::max(a, b)}, distance(tri.point(a), tri.point(b))});
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

GeneralPositionReport is_general_position(std::span<const Point2> pts) {
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        if (orient(pts[i], pts[j], pts[k]) == 0) return {false, {i, j, k}};
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        for (std::size_t l = k + 1; l < n; ++l) {
          if (incircle(pts[i], pts[j], pts[k], pts[l]) == 0) return {false, {i, j, k, l}};
        }
      }
    }
  }
  return {true, {}};
}

}  // namespace dpotts::geometry
