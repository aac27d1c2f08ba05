#include "dpotts/verify/verify.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <json.hpp>
#include <numeric>

#include "dpotts/coarse/coarse.hpp"
#include "dpotts/errors.hpp"
#include "dpotts/oracle/oracle.hpp"
#include "dpotts/rcluster/rcluster.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::verify {
namespace {

using geometry::ConvexPolygon;
using geometry::Point2;
using geometry::Triangulation;
using geometry::VertexId;
using model::InteractionModel;
using model::ModelKind;
using nlohmann::json;

constexpr std::array<ModelKind, 3> kModels{ModelKind::TriangleI, ModelKind::TriangleII,
                                           ModelKind::Edge};

json dump_points(std::span<const Point2> pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back({p.x, p.y});
  return out;
}

json dump_tri(const Triangulation& tri) {
  json out;
  json pts = json::array(), frame = json::array();
  for (VertexId v : tri.live_vertices()) {
    const auto p = tri.point(v);
    (tri.is_frame(v) ? frame : pts).push_back({{"id", v}, {"x", p.x}, {"y", p.y}});
  }
  out["points"] = pts;
  out["frame"] = frame;
  return out;
}

std::vector<Point2> frame_triangle() { return {{-2.0, -1.5}, {3.0, -1.5}, {0.5, 3.0}}; }

std::vector<Point2> spaced_points(CounterRng& rng, int n, double gap) {
  const auto window = ConvexPolygon::rectangle({0, 0}, {1, 1});
  std::vector<Point2> pts;
  while (static_cast<int>(pts.size()) < n) {
    const Point2 p = window.sample(rng);
    if (std::all_of(pts.begin(), pts.end(), [&](Point2 o) { return geometry::distance(o, p) >= gap; })) {
      pts.push_back(p);
    }
  }
  return pts;
}

InteractionModel random_model(ModelKind kind, CounterRng& rng, double delta0) {
  InteractionModel m;
  m.kind = kind;
  m.delta0 = delta0;
  m.alpha0 = 0.35;
  m.beta = 0.3 + 4.0 * rng.uniform();
  return m;
}

class Recorder {
 public:
  Recorder(std::string suite, std::string name) {
    r_.suite = std::move(suite);
    r_.name = std::move(name);
  }
  // Runs one case; exceptions count as failures.
  void run(const std::function<std::string()>& body, const std::function<json()>& instance) {
    ++r_.cases;
    std::string why;
    try {
      why = body();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    if (!why.empty() && r_.passed) {
      r_.passed = false;
      r_.detail = why;
      try {
        r_.instance = instance().dump();
      } catch (const std::exception&) {
        r_.instance = "{}";
      }
    }
  }
  CheckResult result() const { return r_; }

 private:
  CheckResult r_;
};

std::string tile_set_mismatch(const Triangulation& tri) {
  auto a = tri.tiles();
  auto b = tri.rebuilt().tiles();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b ? std::string{} : "incremental tile set differs from a fresh build";
}

void geometry_suite(std::uint64_t seed, std::size_t effort, std::vector<CheckResult>& out) {
  Recorder rebuild("geometry", "incremental_vs_rebuild");
  Recorder valid("geometry", "euler_and_empty_circumdisc");
  CounterRng rng(seed, 1);
  const auto window = ConvexPolygon::rectangle({0, 0}, {1, 1});
  for (std::size_t inst = 0; inst < 20 * effort; ++inst) {
    const bool framed = inst % 2 == 0;
    std::vector<Point2> history;
    Triangulation tri;
    bool alive = true;
    try {
      history = spaced_points(rng, 6, 0.0);
      tri = Triangulation::build(history, framed ? frame_triangle() : std::vector<Point2>{});
    } catch (const std::exception& e) {
      rebuild.run([&] { return std::string("exception: ") + e.what(); }, [&] { return json{{"points", dump_points(history)}}; });
      continue;
    }
    for (int op = 0; op < 50 && alive; ++op) {
      std::vector<VertexId> interior;
      for (VertexId v : tri.live_vertices()) {
        if (!tri.is_frame(v)) interior.push_back(v);
      }
      const bool remove = interior.size() > 4 && rng.uniform() < 0.4;
      json step;
      const json before = dump_tri(tri);
      auto instance = [&] { return json{{"before", before}, {"operation", step}}; };
      rebuild.run(
          [&]() -> std::string {
            if (remove) {
              const VertexId v = interior[rng.below(interior.size())];
              step = {{"remove", v}};
              tri.remove(v);
            } else {
              Point2 p = window.sample(rng);
              if (!framed) {
                // Without a frame the hull is fixed by the data; stay inside it.
                const auto tiles = tri.tiles();
                const auto& t = tiles[rng.below(tiles.size())];
                const double a = rng.uniform() + 1e-3, b = rng.uniform() + 1e-3,
                             c = rng.uniform() + 1e-3;
                p = (a / (a + b + c)) * tri.point(t.vertices[0]) +
                    (b / (a + b + c)) * tri.point(t.vertices[1]) +
                    (c / (a + b + c)) * tri.point(t.vertices[2]);
              }
              step = {{"insert", {p.x, p.y}}};
              tri.insert(p);
            }
            return tile_set_mismatch(tri);
          },
          instance);
      valid.run(
          [&]() -> std::string {
            const auto problem = tri.validate();
            return problem ? *problem : std::string{};
          },
          instance);
      alive = rebuild.result().passed && valid.result().passed;
    }
  }
  out.push_back(rebuild.result());
  out.push_back(valid.result());
}

// Breadth-first search over open hyperedges with every frame vertex joined
// to a single hub.
std::size_t bfs_clusters(const Triangulation& tri, const rcluster::TileConfiguration& T) {
  const auto n = static_cast<std::size_t>(tri.id_bound());
  std::vector<std::vector<std::size_t>> adj(n + 1);
  auto link = [&](std::size_t a, std::size_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  bool any_frame = false;
  for (VertexId v : tri.live_vertices()) {
    if (tri.is_frame(v)) {
      link(static_cast<std::size_t>(v), n);
      any_frame = true;
    }
  }
  for (const auto& h : T.open) {
    const auto ids = h.ids();
    for (std::size_t i = 1; i < ids.size(); ++i) {
      link(static_cast<std::size_t>(ids[0]), static_cast<std::size_t>(ids[i]));
    }
  }
  std::vector<char> seen(n + 1, 0);
  std::size_t count = 0;
  auto visit = [&](std::size_t s) {
    std::vector<std::size_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (auto y : adj[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          stack.push_back(y);
        }
      }
    }
  };
  if (any_frame) {
    visit(n);
    ++count;
  }
  for (VertexId v : tri.live_vertices()) {
    if (!seen[static_cast<std::size_t>(v)]) {
      visit(static_cast<std::size_t>(v));
      ++count;
    }
  }
  return count;
}

void rcluster_suite(std::uint64_t seed, std::size_t effort, std::vector<CheckResult>& out) {
  Recorder count("rcluster", "cluster_count_vs_bfs");
  Recorder change("rcluster", "cluster_count_change_bounds");
  CounterRng rng(seed, 2);
  for (std::size_t inst = 0; inst < 60 * effort; ++inst) {
    const auto kind = kModels[inst % 3];
    const auto pts = spaced_points(rng, 5 + static_cast<int>(rng.below(20)), 0.03);
    const auto tri = Triangulation::build(pts, frame_triangle());
    const auto m = random_model(kind, rng, 0.03);
    const auto T = rcluster::draw_hyperedges(tri, m, rng);
    auto instance = [&] { return json{{"configuration", dump_tri(tri)}, {"open", T.open.size()}}; };
    count.run(
        [&]() -> std::string {
          const auto k = rcluster::count_clusters(tri, T).K;
          const auto b = bfs_clusters(tri, T);
          if (k == b) return {};
          return "union-find K=" + std::to_string(k) + ", BFS K=" + std::to_string(b);
        },
        instance);
    // An insertion site inside a random tile so it stays within the hull.
    const auto tiles = tri.tiles();
    const auto& t = tiles[rng.below(tiles.size())];
    double w0 = rng.uniform() + 1e-3, w1 = rng.uniform() + 1e-3, w2 = rng.uniform() + 1e-3;
    const double sum = w0 + w1 + w2;
    const Point2 x0 = (w0 / sum) * tri.point(t.vertices[0]) + (w1 / sum) * tri.point(t.vertices[1]) +
                      (w2 / sum) * tri.point(t.vertices[2]);
    change.run(
        [&]() -> std::string {
          rcluster::k_change_audit(tri, T, x0);
          return {};
        },
        [&] { return json{{"configuration", dump_tri(tri)}, {"x0", {x0.x, x0.y}}}; });
  }
  out.push_back(count.result());
  out.push_back(change.result());
}

void oracle_suite(std::uint64_t seed, std::size_t effort, std::vector<CheckResult>& out) {
  Recorder es("oracle", "edwards_sokal_marginals");
  Recorder sym("oracle", "boundary_connection_identity");
  CounterRng rng(seed, 3);
  const auto window = ConvexPolygon::rectangle({0, 0}, {1, 1});
  const auto delta = ConvexPolygon::rectangle({0.0, 0.0}, {0.6, 1.0});
  for (std::size_t inst = 0; inst < 12 * effort; ++inst) {
    const auto kind = kModels[inst % 3];
    const int q = 2 + static_cast<int>(rng.below(2));
    const auto pts = spaced_points(rng, 3 + static_cast<int>(rng.below(3)), 0.08);
    const auto tri = Triangulation::build(pts, frame_triangle());
    const auto m = random_model(kind, rng, 0.08);
    auto instance = [&] {
      return json{{"configuration", dump_tri(tri)}, {"q", q}, {"beta", m.beta},
                  {"model", std::string(model::to_string(kind))}};
    };
    es.run(
        [&]() -> std::string {
          const auto table = oracle::enumerate_joint(tri, m, q);
          const double d = oracle::edwards_sokal_discrepancy(tri, table);
          if (!(d < 1e-12)) return "tile-weight ratio varies by " + std::to_string(d);
          const auto exact = oracle::conditional_mark_distribution(tri, window, m, q);
          for (std::size_t s = 0; s < exact.size(); ++s) {
            const double p = table.mark_weight[s] / table.normalization;
            if (std::abs(p - exact[s]) > 1e-10 * std::max(exact[s], 1e-300)) {
              return "mark marginal differs at pattern " + std::to_string(s);
            }
          }
          return {};
        },
        instance);
    sym.run(
        [&]() -> std::string {
          const auto r = oracle::verify_prop_sym(tri, delta, m, q);
          const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-300});
          if (r.difference / scale < 1e-10 || r.difference < 1e-14) return {};
          return "lhs " + std::to_string(r.lhs) + " vs rhs " + std::to_string(r.rhs);
        },
        instance);
  }
  out.push_back(es.result());
  out.push_back(sym.result());
}

void coarse_suite(std::uint64_t seed, std::size_t effort, std::vector<CheckResult>& out) {
  Recorder member("coarse", "partition_membership");
  Recorder cgr("coarse", "cgr_geometric_chain");
  CounterRng rng(seed, 4);
  const double delta0 = 0.1, m = 19.0;
  const auto p = coarse::make_partition(19.0 * delta0, 1);
  const auto box = p.window().bounds();
  for (std::size_t n = 0; n < 500 * effort; ++n) {
    const Point2 x{box.lo.x + (box.hi.x - box.lo.x) * rng.uniform(),
                   box.lo.y + (box.hi.y - box.lo.y) * rng.uniform()};
    member.run(
        [&]() -> std::string {
          std::size_t hits = 0;
          coarse::CellIndex found;
          for (int l = -1; l <= 1; ++l) {
            for (int k = -1; k <= 1; ++k) {
              for (int j = 0; j < 9; ++j) {
                for (int i = 0; i < 9; ++i) {
                  if (p.subcell(k, l, i, j).contains(x)) {
                    ++hits;
                    found = {k, l, i, j};
                  }
                }
              }
            }
          }
          const auto got = p.locate_in_window(x);
          if (hits > 1) return {};  // on a shared boundary: closed polygons overlap
          if (hits == 0) return got ? "located outside every subcell" : std::string{};
          return got && *got == found ? std::string{} : "inverse map disagrees with polygon scan";
        },
        [&] { return json{{"point", {x.x, x.y}}}; });
  }
  for (std::size_t rep = 0; rep < 20 * effort; ++rep) {
    const int k = -1 + static_cast<int>(rng.below(2));
    const int l = -1 + static_cast<int>(rng.below(2));
    const bool vertical = rng.below(2) == 1;
    const std::vector<std::pair<int, int>> cells{{k, l}, vertical ? std::pair{k, l + 1} : std::pair{k + 1, l}};
    const auto pts = coarse::occupied_configuration(p, cells, delta0, rng.below(300), rng);
    const auto tri = Triangulation::build(pts);
    const auto model = random_model(kModels[rep % 3], rng, delta0);
    cgr.run(
        [&]() -> std::string {
          auto mm = model;
          mm.alpha0 = 0.1;
          const auto r = coarse::verify_cgr(tri, p, mm, m);
          if (r.pairs_checked == 0) return "no occupied pair was checked";
          if (r.violations.empty()) return {};
          const auto& v = r.violations.front();
          return "band tile violates the chain: value " + std::to_string(v.value) + " limit " +
                 std::to_string(v.limit);
        },
        [&] { return json{{"points", dump_points(pts)}}; });
  }
  out.push_back(member.result());
  out.push_back(cgr.result());
}

}  // namespace

std::vector<OracleRow> oracle_rows(std::uint64_t seed, std::size_t instances) {
  CounterRng rng(seed, 5);
  const auto window = ConvexPolygon::rectangle({0, 0}, {1, 1});
  const auto delta = ConvexPolygon::rectangle({0.0, 0.0}, {0.6, 1.0});
  std::vector<OracleRow> rows;
  for (std::size_t inst = 0; inst < instances; ++inst) {
    const auto kind = kModels[inst % 3];
    OracleRow row;
    row.model = std::string(model::to_string(kind));
    row.q = 2 + static_cast<int>((inst / 3) % 2);
    row.points = 3 + rng.below(4);
    const auto pts = spaced_points(rng, static_cast<int>(row.points), 0.08);
    const auto tri = Triangulation::build(pts, frame_triangle());
    auto m = random_model(kind, rng, 0.08);
    row.beta = m.beta;
    const auto table = oracle::enumerate_joint(tri, m, row.q);
    row.hyperedges = table.hyperedges.size();
    row.edwards_sokal_error = oracle::edwards_sokal_discrepancy(tri, table);
    const auto exact = oracle::conditional_mark_distribution(tri, window, m, row.q);
    for (std::size_t s = 0; s < exact.size(); ++s) {
      const double p = table.mark_weight[s] / table.normalization;
      row.marginal_error = std::max(row.marginal_error, std::abs(p - exact[s]) / std::max(exact[s], 1e-300));
    }
    const auto r = oracle::verify_prop_sym(tri, delta, m, row.q);
    const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-300});
    row.identity_error = r.difference < 1e-14 ? 0.0 : r.difference / scale;
    row.passed = row.marginal_error <= kMarginalTolerance &&
                 row.edwards_sokal_error <= kEdwardsSokalTolerance &&
                 row.identity_error <= kIdentityTolerance;
    rows.push_back(row);
  }
  return rows;
}

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verify(std::string_view selector, std::uint64_t seed, std::size_t effort) {
  const bool all = selector == "all";
  if (!all && std::find(kSuites.begin(), kSuites.end(), selector) == kSuites.end()) {
    throw ConfigError("unknown verification suite: " + std::string(selector));
  }
  effort = std::max<std::size_t>(effort, 1);
  VerifyReport report;
  if (all || selector == "geometry") geometry_suite(seed, effort, report.checks);
  if (all || selector == "rcluster") rcluster_suite(seed, effort, report.checks);
  if (all || selector == "oracle") oracle_suite(seed, effort, report.checks);
  if (all || selector == "coarse") coarse_suite(seed, effort, report.checks);
  return report;
}

}  // namespace dpotts::verify
