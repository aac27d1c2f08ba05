#include "dpotts/sampler/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dpotts/errors.hpp"
#include "dpotts/geometry/frame.hpp"
#include "dpotts/rcluster/rcluster.hpp"

namespace dpotts::sampler {
namespace {

bool accept(double log_ratio, CounterRng& rng) {
  if (log_ratio >= 0.0) return true;
  if (std::isinf(log_ratio)) return false;
  return rng.uniform() < std::exp(log_ratio);
}

void ensure_marks(ChainState& s) {
  const auto n = static_cast<std::size_t>(s.tri.id_bound());
  if (s.marks.size() < n) s.marks.resize(n, Mark(1));
  if (s.slot.size() < n) s.slot.resize(n, -1);
}

void add_interior(ChainState& s, VertexId v) {
  s.slot[static_cast<std::size_t>(v)] = static_cast<std::int64_t>(s.interior.size());
  s.interior.push_back(v);
}

void drop_interior(ChainState& s, VertexId v) {
  const auto i = static_cast<std::size_t>(s.slot[static_cast<std::size_t>(v)]);
  const VertexId last = s.interior.back();
  s.interior[i] = last;
  s.slot[static_cast<std::size_t>(last)] = static_cast<std::int64_t>(i);
  s.interior.pop_back();
  s.slot[static_cast<std::size_t>(v)] = -1;
}

Mark random_mark(int q, CounterRng& rng) {
  return Mark(1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(q))));
}

}  // namespace

void ChainConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(z > 0.0) || !std::isfinite(z)) fail("z must be a positive number");
  if (q < 2) fail("q must be >= 2");
  try {
    model.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (window.empty()) fail("window must be set");
  if (frame) {
    for (const auto& p : *frame) {
      if (window.contains(p)) fail("frame points must lie outside the window");
    }
  }
  const double parts[] = {mix.birth, mix.death, mix.move, mix.cluster};
  double total = 0.0;
  for (double p : parts) {
    if (!(p >= 0.0)) fail("move probabilities must be nonnegative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) fail("move probabilities must sum to 1");
  if ((mix.birth > 0.0) != (mix.death > 0.0)) fail("birth and death must both be enabled or both off");
}

// ---------------------------------------------------------------------------

HardCoreGrid::HardCoreGrid(geometry::BoundingBox box, double delta0) : box_(box), size_(delta0) {
  nx_ = std::max(1L, static_cast<long>(std::ceil((box.hi.x - box.lo.x) / size_)));
  ny_ = std::max(1L, static_cast<long>(std::ceil((box.hi.y - box.lo.y) / size_)));
  cells_.resize(static_cast<std::size_t>(nx_ * ny_));
}

std::size_t HardCoreGrid::cell_of(Point2 p) const {
  const long i = std::clamp(static_cast<long>(std::floor((p.x - box_.lo.x) / size_)), 0L, nx_ - 1);
  const long j = std::clamp(static_cast<long>(std::floor((p.y - box_.lo.y) / size_)), 0L, ny_ - 1);
  return static_cast<std::size_t>(j * nx_ + i);
}

void HardCoreGrid::add(VertexId id, Point2 p) { cells_[cell_of(p)].push_back(id); }

void HardCoreGrid::remove(VertexId id, Point2 p) {
  auto& c = cells_[cell_of(p)];
  c.erase(std::find(c.begin(), c.end(), id));
}

bool HardCoreGrid::conflicts(Point2 p, const Triangulation& tri, VertexId skip) const {
  const long ci = std::clamp(static_cast<long>(std::floor((p.x - box_.lo.x) / size_)), 0L, nx_ - 1);
  const long cj = std::clamp(static_cast<long>(std::floor((p.y - box_.lo.y) / size_)), 0L, ny_ - 1);
  for (long j = std::max(0L, cj - 1); j <= std::min(ny_ - 1, cj + 1); ++j) {
    for (long i = std::max(0L, ci - 1); i <= std::min(nx_ - 1, ci + 1); ++i) {
      for (VertexId v : cells_[static_cast<std::size_t>(j * nx_ + i)]) {
        if (v != skip && geometry::distance(p, tri.point(v)) < size_) return true;
      }
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

model::MarkedConfiguration ChainState::configuration(const ConvexPolygon& window) const {
  model::MarkedConfiguration cfg;
  cfg.window = window;
  std::vector<VertexId> ids = interior;
  std::sort(ids.begin(), ids.end());
  for (VertexId v : ids) {
    cfg.points.push_back(tri.point(v));
    cfg.marks.push_back(marks[static_cast<std::size_t>(v)]);
  }
  for (VertexId v : tri.live_vertices()) {
    if (tri.is_frame(v)) cfg.frame.push_back(tri.point(v));
  }
  return cfg;
}

ChainState init_chain(const ChainConfig& cfg) { return make_state(cfg, {}, {}); }

ChainState make_state(const ChainConfig& cfg, std::span<const Point2> points,
                      std::span<const Mark> marks) {
  cfg.validate();
  if (marks.size() != points.size()) throw std::invalid_argument("one mark per point");
  for (const auto& p : points) {
    if (!cfg.window.contains(p)) throw std::invalid_argument("point outside the window");
  }
  ChainState s;
  const auto frame = cfg.frame ? *cfg.frame : geometry::hex_frame(cfg.window, cfg.model.delta0);
  s.tri = Triangulation::build(points, frame);
  s.rng = CounterRng(cfg.seed, cfg.chain_id);
  ensure_marks(s);

  geometry::BoundingBox box = cfg.window.bounds();
  for (const auto& p : frame) {
    box.lo.x = std::min(box.lo.x, p.x);
    box.lo.y = std::min(box.lo.y, p.y);
    box.hi.x = std::max(box.hi.x, p.x);
    box.hi.y = std::max(box.hi.y, p.y);
  }
  s.grid = HardCoreGrid(box, cfg.model.delta0);
  for (VertexId v : s.tri.live_vertices()) {
    if (s.grid.conflicts(s.tri.point(v), s.tri)) {
      throw std::invalid_argument("points closer than the hard-core range");
    }
    s.grid.add(v, s.tri.point(v));
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto v = static_cast<VertexId>(i);
    s.marks[i] = marks[i];
    add_interior(s, v);
  }
  s.energy = recompute_energy(cfg, s);
  return s;
}

double recompute_energy(const ChainConfig& cfg, const ChainState& state) {
  return model::hamiltonian(cfg.model, cfg.window, state.tri, state.marks);
}

bool birth_step(const ChainConfig& cfg, ChainState& s, CounterRng& rng) {
  const Point2 x = cfg.window.sample(rng);
  const Mark mark = random_mark(cfg.q, rng);
  const double u = rng.uniform();
  // Any point closer than delta0 is joined to x by a local Delaunay edge
  // (its nearest neighbour is a Delaunay neighbour), so H would be infinite.
  if (s.grid.conflicts(x, s.tri)) return false;

  auto diff = s.tri.insert(x);
  const VertexId v = diff.pivot;
  ensure_marks(s);
  s.marks[static_cast<std::size_t>(v)] = mark;
  const double dh = model::delta_hamiltonian(cfg.model, cfg.window, s.tri, diff, s.marks);
  const double n1 = static_cast<double>(s.interior.size() + 1);
  // The death/birth proposal ratio is 1 for the default mix.
  const double log_ratio = std::log(cfg.z * cfg.window.area() / n1) - dh +
                           std::log(cfg.mix.death / cfg.mix.birth);
  if (!std::isinf(dh) && (log_ratio >= 0.0 || u < std::exp(log_ratio))) {
    add_interior(s, v);
    s.grid.add(v, x);
    s.energy += dh;
    return true;
  }
  s.tri.remove(v);
  s.marks[static_cast<std::size_t>(v)] = Mark(1);
  return false;
}

bool death_step(const ChainConfig& cfg, ChainState& s, CounterRng& rng) {
  if (s.interior.empty()) return false;
  const std::size_t n = s.interior.size();
  const VertexId v = s.interior[rng.below(n)];
  const Point2 x = s.tri.point(v);
  const Mark mark = s.marks[static_cast<std::size_t>(v)];

  auto diff = s.tri.remove(v);
  const double dh = model::delta_hamiltonian(cfg.model, cfg.window, s.tri, diff, s.marks);
  const double log_ratio = std::log(static_cast<double>(n) / (cfg.z * cfg.window.area())) - dh +
                           std::log(cfg.mix.birth / cfg.mix.death);
  if (accept(log_ratio, rng)) {
    drop_interior(s, v);
    s.grid.remove(v, x);
    s.marks[static_cast<std::size_t>(v)] = Mark(1);
    s.energy += dh;
    return true;
  }
  const auto back = s.tri.insert(x);
  if (back.pivot != v) throw std::logic_error("vertex id not restored");
  s.marks[static_cast<std::size_t>(v)] = mark;
  return false;
}

bool move_step(const ChainConfig& cfg, ChainState& s, CounterRng& rng) {
  if (s.interior.empty()) return false;
  const VertexId v = s.interior[rng.below(s.interior.size())];
  const Point2 from = s.tri.point(v);
  const double r = cfg.model.delta0;
  Point2 d;
  do {
    d = {(2.0 * rng.uniform() - 1.0) * r, (2.0 * rng.uniform() - 1.0) * r};
  } while (d.x * d.x + d.y * d.y > r * r);
  const Point2 to = from + d;
  const double u = rng.uniform();
  if (!cfg.window.contains(to) || s.grid.conflicts(to, s.tri, v)) return false;

  auto out = s.tri.remove(v);
  const double dh_out = model::delta_hamiltonian(cfg.model, cfg.window, s.tri, out, s.marks);
  auto in = s.tri.insert(to);
  if (in.pivot != v) throw std::logic_error("vertex id not reused");
  const double dh_in = model::delta_hamiltonian(cfg.model, cfg.window, s.tri, in, s.marks);
  const double dh = dh_out + dh_in;
  if (!std::isinf(dh) && (dh <= 0.0 || u < std::exp(-dh))) {
    s.grid.remove(v, from);
    s.grid.add(v, to);
    s.energy += dh;
    return true;
  }
  s.tri.remove(v);
  s.tri.insert(from);
  return false;
}

void cluster_mark_update(const ChainConfig& cfg, ChainState& s, CounterRng& rng) {
  const auto T = rcluster::draw_given_marks(s.tri, cfg.model, s.marks, rng);
  auto cc = rcluster::count_clusters(s.tri, T);
  std::vector<VertexId> ids = s.interior;
  std::sort(ids.begin(), ids.end());
  std::vector<int> root_mark(static_cast<std::size_t>(s.tri.id_bound()), 0);
  for (VertexId v : ids) {
    const auto r = static_cast<std::size_t>(cc.state.find(v));
    if (root_mark[r] == 0) {
      root_mark[r] = cc.state.touches_boundary(v) ? 1 : random_mark(cfg.q, rng).value;
    }
    s.marks[static_cast<std::size_t>(v)] = Mark(root_mark[r]);
  }
  s.energy = recompute_energy(cfg, s);
}

StepResult mh_step(const ChainConfig& cfg, ChainState& s, CounterRng& rng) {
  const double u = rng.uniform();
  StepResult r;
  const auto& m = cfg.mix;
  if (u < m.birth) {
    r.kind = MoveKind::Birth;
    r.accepted = birth_step(cfg, s, rng);
  } else if (u < m.birth + m.death) {
    r.kind = MoveKind::Death;
    r.accepted = death_step(cfg, s, rng);
  } else if (u < m.birth + m.death + m.move) {
    r.kind = MoveKind::Move;
    r.accepted = move_step(cfg, s, rng);
  } else {
    r.kind = MoveKind::Cluster;
    cluster_mark_update(cfg, s, rng);
    r.accepted = true;
  }
  ++s.steps;
  return r;
}

void sweep(const ChainConfig& cfg, ChainState& s) {
  const std::size_t n = s.interior.size() + 1;
  for (std::size_t i = 0; i < n; ++i) mh_step(cfg, s, s.rng);
}

TraceRow observe(const ChainConfig& cfg, const ChainState& s, std::size_t sweep_index,
                 CounterRng& rng) {
  TraceRow row;
  row.sweep = sweep_index;
  row.N = s.interior.size();
  row.n_delta.assign(static_cast<std::size_t>(cfg.q), 0);
  const auto& delta = cfg.observation_region();
  for (VertexId v : s.interior) {
    if (!delta.contains(s.tri.point(v))) continue;
    ++row.n_delta[static_cast<std::size_t>(s.marks[static_cast<std::size_t>(v)].value - 1)];
  }
  std::size_t total = 0;
  for (auto c : row.n_delta) total += c;
  if (total > 0) {
    row.order_param = (cfg.q * static_cast<double>(row.n_delta[0]) - static_cast<double>(total)) /
                      static_cast<double>(total);
  }
  row.energy = s.energy;
  const auto open = rcluster::draw_given_marks(s.tri, cfg.model, s.marks, rng);
  row.K = rcluster::count_clusters(s.tri, open).K;
  row.largest_cluster = rcluster::largest_cluster_fraction(s.tri, open);
  return row;
}

ObservableTrace run_chain(const ChainConfig& cfg, const Observer& observer) {
  ObservableTrace trace;
  trace.seed = cfg.seed;
  trace.chain_id = cfg.chain_id;
  if (cfg.sweeps == 0) {
    cfg.validate();
    return trace;
  }
  ChainState s = init_chain(cfg);
  // Observation draws use their own stream so recording leaves the
  // trajectory unchanged.
  CounterRng obs = s.rng.split(0x0b5e);
  for (std::size_t i = 0; i < cfg.burn_in; ++i) sweep(cfg, s);
  for (std::size_t i = 0; i < cfg.sweeps; ++i) {
    sweep(cfg, s);
    trace.rows.push_back(observe(cfg, s, i, obs));
    if (observer) observer(s, trace.rows.back());
  }
  return trace;
}

}  // namespace dpotts::sampler
