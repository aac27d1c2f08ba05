// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status 1
// if any criterion fails.

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "dpotts/cli/config.hpp"
#include "dpotts/coarse/coarse.hpp"
#include "dpotts/errors.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/model/thresholds.hpp"
#include "dpotts/oracle/oracle.hpp"
#include "dpotts/rcluster/rcluster.hpp"
#include "dpotts/sampler/sampler.hpp"
#include "dpotts/stats.hpp"
#include "support/brute.hpp"
#include "support/instances.hpp"

using namespace dpotts;
using geometry::Point2;
using geometry::Triangulation;
using geometry::VertexId;
using model::InteractionModel;
using model::Mark;
using model::ModelKind;

namespace {

using Clock = std::chrono::steady_clock;
using Big = boost::multiprecision::cpp_dec_float_50;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

InteractionModel make(ModelKind k, double beta, double delta0, double alpha0 = 0.35) {
  InteractionModel m;
  m.kind = k;
  m.beta = beta;
  m.delta0 = delta0;
  m.alpha0 = alpha0;
  return m;
}

double chi2_pvalue(const std::vector<double>& observed, const std::vector<double>& probs) {
  double n = 0.0;
  for (double o : observed) n += o;
  double stat = 0.0;
  int df = -1;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    const double e = n * probs[i];
    stat += (observed[i] - e) * (observed[i] - e) / e;
    ++df;
  }
  boost::math::chi_squared dist(df);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Recorded positions of every sampled state, scanned after the runs.
struct RecordedState {
  std::string source;
  double delta0;
  std::vector<Point2> points;
};
std::vector<RecordedState> recorded;

std::vector<Point2> live_points(const Triangulation& tri) {
  std::vector<Point2> out;
  for (VertexId v : tri.live_vertices()) out.push_back(tri.point(v));
  return out;
}

// ---------------------------------------------------------------------------

struct OracleInstance {
  ModelKind kind;
  int q;
  double beta;
  Triangulation tri;
};

std::vector<OracleInstance> oracle_instances() {
  CounterRng rng(20261015);
  std::vector<OracleInstance> out;
  for (auto kind : {ModelKind::TriangleI, ModelKind::TriangleII, ModelKind::Edge}) {
    for (int q : {2, 3}) {
      for (int rep = 0; rep < 2; ++rep) {
        const int n = 3 + static_cast<int>(rng.below(4));
        out.push_back({kind, q, 0.5 + 3.0 * rng.uniform(), testsupport::small_instance(rng, n, 0.08)});
      }
    }
  }
  return out;
}

void criterion_1(const std::vector<OracleInstance>& instances) {
  const auto t0 = Clock::now();
  const auto window = testsupport::unit_window();
  double worst = 0.0;
  std::size_t max_points = 0;
  std::set<ModelKind> kinds;
  std::set<int> qs;
  for (const auto& inst : instances) {
    const auto m = make(inst.kind, inst.beta, 0.08);
    const auto table = oracle::enumerate_joint(inst.tri, m, inst.q);
    const auto exact = oracle::conditional_mark_distribution(inst.tri, window, m, inst.q);
    for (std::size_t i = 0; i < exact.size(); ++i) {
      const double got = table.mark_weight[i] / table.normalization;
      worst = std::max(worst, std::abs(got - exact[i]) / std::max(exact[i], 1e-300));
    }
    max_points = std::max(max_points, table.interior.size());
    kinds.insert(inst.kind);
    qs.insert(inst.q);
  }
  const double secs = seconds_since(t0);
  const bool ok = instances.size() >= 10 && max_points <= 6 && kinds.size() == 3 &&
                  qs == std::set<int>{2, 3} && worst < 1e-10 && secs < 60.0;
  report(1, ok,
         fmt("%zu instances, <= %zu points, max relative error %.3g (< 1e-10), %.1f s (< 60 s)",
             instances.size(), max_points, worst, secs));
}

void criterion_2(const std::vector<OracleInstance>& instances) {
  const auto delta = geometry::ConvexPolygon::rectangle({0.0, 0.0}, {0.6, 1.0});
  double worst = 0.0;
  for (const auto& inst : instances) {
    const auto r = oracle::verify_prop_sym(inst.tri, delta, make(inst.kind, inst.beta, 0.08), inst.q);
    const double scale = std::max({std::abs(r.lhs), std::abs(r.rhs), 1e-300});
    worst = std::max(worst, std::abs(r.lhs - r.rhs) / scale);
  }
  report(2, worst < 1e-10,
         fmt("%zu instances, max relative lhs/rhs gap %.3g (< 1e-10)", instances.size(), worst));
}

void criterion_3() {
  sampler::ChainConfig cfg;
  cfg.model = make(ModelKind::TriangleII, 3.0, 0.1);
  cfg.q = 2;
  cfg.window = testsupport::unit_window();
  cfg.frame = testsupport::triangle_frame();
  cfg.seed = 3;
  const std::vector<Point2> pts{{0.2, 0.3}, {0.7, 0.2}, {0.5, 0.6}, {0.25, 0.8}, {0.8, 0.75}};
  auto s = sampler::make_state(cfg, pts, std::vector<Mark>(5, Mark(2)));
  const auto exact = oracle::conditional_mark_distribution(s.tri, cfg.window, cfg.model, 2);

  std::vector<VertexId> ids = s.interior;
  std::sort(ids.begin(), ids.end());
  std::vector<double> counts(exact.size(), 0.0);
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    sampler::cluster_mark_update(cfg, s, s.rng);
    std::size_t idx = 0, mul = 1;
    for (VertexId v : ids) {
      idx += static_cast<std::size_t>(s.marks[static_cast<std::size_t>(v)].value - 1) * mul;
      mul *= 2;
    }
    counts[idx] += 1.0;
  }
  recorded.push_back({"fixed five-point configuration", cfg.model.delta0, live_points(s.tri)});
  double tv = 0.0;
  for (std::size_t k = 0; k < exact.size(); ++k) tv += std::abs(counts[k] / n - exact[k]);
  tv /= 2.0;
  const double p = chi2_pvalue(counts, exact);
  report(3, tv < 0.01 && p > 0.001,
         fmt("%d updates, TV %.3g (< 0.01), chi-square p %.3g (> 0.001)", n, tv, p));
}

void criterion_4() {
  CounterRng rng(4);
  auto t = Triangulation::build(testsupport::uniform_points(rng, 30),
                                testsupport::enclosing_square(0.0, 1.0));
  std::vector<VertexId> interior;
  for (VertexId v = 0; v < 30; ++v) interior.push_back(v);
  int bad = 0, ops = 0;
  std::string first;
  for (int op = 0; op < 1000; ++op, ++ops) {
    if (interior.size() < 5 || rng.uniform() < 0.5) {
      interior.push_back(t.insert({rng.uniform(), rng.uniform()}).pivot);
    } else {
      const std::size_t i = rng.below(interior.size());
      t.remove(interior[i]);
      interior.erase(interior.begin() + static_cast<std::ptrdiff_t>(i));
    }
    const auto now = testsupport::tile_ids(t);
    std::string why;
    if (now != testsupport::tile_ids(t.rebuilt())) why = "differs from rebuild";
    else if (now != testsupport::brute_delaunay(t)) why = "differs from brute-force Delaunay";
    else if (auto v = t.validate()) why = *v;
    if (!why.empty()) {
      if (first.empty()) first = fmt(" (first at op %d: %s)", op, why.c_str());
      ++bad;
    }
  }
  report(4, bad == 0 && ops == 1000, fmt("%d operations, %d failures%s", ops, bad, first.c_str()));
}

void criterion_5() {
  CounterRng rng(5);
  int violations = 0, audits = 0;
  for (; audits < 10000; ++audits) {
    const std::size_t n = 3 + rng.below(20);
    const bool framed = audits % 2 == 0;
    const auto pts = testsupport::uniform_points(rng, n);
    const auto t = framed ? Triangulation::build(pts, testsupport::triangle_frame())
                          : Triangulation::build(pts);
    rcluster::TileConfiguration T;
    const double p = rng.uniform();
    for (const auto& tile : t.tiles()) {
      if (rng.uniform() < p) T.open.push_back(rcluster::as_hyperedge(tile));
    }
    const auto tl = t.tiles();
    const auto& pick = tl[rng.below(tl.size())];
    double u = rng.uniform(), w = rng.uniform();
    if (u + w > 1) u = 1 - u, w = 1 - w;
    const Point2 a = t.point(pick.vertices[0]), b = t.point(pick.vertices[1]),
                 c = t.point(pick.vertices[2]);
    try {
      const auto r = rcluster::k_change_audit(t, T, a + u * (b - a) + w * (c - a));
      if (r.point_add_delta != 1 || r.min_tile_delta < -2 || r.max_tile_delta > 0) ++violations;
    } catch (const ViolationFound&) {
      ++violations;
    }
  }
  report(5, violations == 0, fmt("%d audits, %d violations", audits, violations));
}

void criterion_6() {
  const auto t0 = Clock::now();
  const double delta0 = 0.1, m = 19.0, ell = 19.0 * delta0;
  const auto p = coarse::make_partition(ell, 1);
  CounterRng rng(6);
  std::size_t violations = 0, tiles = 0, configs = 0, unchecked = 0;
  std::size_t radius = 0, angle = 0;
  const double rmax = std::sqrt(7.0) * ell / 18.0, amin = 9.0 / (19.0 * std::sqrt(7.0));
  for (; configs < 1000; ++configs) {
    const int k = -1 + static_cast<int>(rng.below(2));
    const int l = -1 + static_cast<int>(rng.below(3));
    std::vector<std::pair<int, int>> cells{{k, l}};
    if (rng.below(2) == 1) {
      cells.front() = {k, std::min(l, 0)};
      cells.push_back({k, std::min(l, 0) + 1});
    } else {
      cells.push_back({k + 1, l});
    }
    const auto pts = coarse::occupied_configuration(p, cells, delta0, rng.below(400), rng);
    const auto tri = Triangulation::build(pts);
    const auto kind = static_cast<ModelKind>(configs % 3);
    const auto r = coarse::verify_cgr(tri, p, make(kind, 0.5 + 10.0 * rng.uniform(), delta0, 0.1), m);
    if (r.pairs_checked == 0) ++unchecked;
    violations += r.violations.size();
    tiles += r.tiles_checked;
    // Independent recheck of the two geometric bounds on every band tile.
    const auto o = cells[0].first != cells[1].first ? coarse::Orientation::Horizontal
                                                    : coarse::Orientation::Vertical;
    for (const auto& tile : coarse::band_tiles(tri, p, cells[0].first, cells[0].second, o)) {
      radius += tile.circumradius >= rmax;
      angle += tile.min_angle < amin;
    }
  }
  const double secs = seconds_since(t0);
  const bool ok = violations == 0 && radius == 0 && angle == 0 && unchecked == 0 && secs < 300.0;
  report(6, ok,
         fmt("%zu configurations, %zu band tiles, %zu violations (radius %zu, angle %zu), %.1f s",
             configs, tiles, violations, radius, angle, secs));
}

void criterion_7() {
  CounterRng rng(7);
  const auto window = testsupport::unit_window();
  std::size_t sites = 0, over = 0;
  double worst_margin = -1e300;
  for (auto kind : {ModelKind::TriangleII, ModelKind::Edge, ModelKind::TriangleI}) {
    for (double beta : {0.5, 1.0, 5.0}) {
      const auto m = make(kind, beta, 0.05);
      for (int rep = 0; rep < 100; ++rep, ++sites) {
        const auto pts = testsupport::spaced_points(rng, 12, 0.05);
        const auto tri = Triangulation::build(pts, testsupport::triangle_frame());
        const auto r = oracle::expected_new_tiles_mc(tri, window.sample(rng), m, 2000, rng);
        const double margin = r.estimate + 5.0 * r.standard_error - r.bound;
        worst_margin = std::max(worst_margin, margin);
        if (margin > 0.0) ++over;
      }
    }
  }
  report(7, over == 0,
         fmt("%zu insertion sites, %zu estimates above bound - 5 se, largest estimate + 5 se - bound %.3g",
             sites, over, worst_margin));
}

bool same12(double got, const Big& want) {
  const Big diff = abs(Big(got) - want);
  return diff <= Big("1e-12") * (abs(want) > 1 ? abs(want) : Big(1));
}

void criterion_8() {
  const Big pi = boost::math::constants::pi<Big>();
  const Big s7 = sqrt(Big(7));
  std::size_t checked = 0, bad = 0;
  auto check = [&](double got, const Big& want) {
    ++checked;
    if (!same12(got, want)) ++bad;
  };
  for (double beta : {0.0, 0.5, 1.0, 3.0, 20.0}) {
    const Big B(beta);
    for (double d0 : {0.1, 1.0}) {
      for (double alpha0 : {0.1, 0.3}) {
        for (double rho0 : {0.1, 0.25, 0.4}) {
          const Big D(d0), R(rho0), A(alpha0);
          const Big denom = pi * R * R * (18 * D) * (18 * D);
          const auto r1 = model::regime_thresholds(make(ModelKind::TriangleI, beta, d0, alpha0), rho0);
          check(r1.c_r, 2 * B);
          check(r1.z0, exp(2 * B) / denom);
          const auto r2 = model::regime_thresholds(make(ModelKind::TriangleII, beta, d0, alpha0), rho0);
          const Big a = 1 + B * pow(pi / 3, 3);
          check(r2.c_r, 2 * log(a));
          check(r2.z0, a * a / denom);
          const auto r3 = model::regime_thresholds(make(ModelKind::Edge, beta, d0, alpha0), rho0);
          const Big e = 1 + B / pow(18 * (1 - 2 * R), 3);
          check(r3.c_r, 3 * log(e));
          check(r3.z0, e * e * e / denom);
        }
        check(model::bpi_exponent(make(ModelKind::TriangleI, beta, d0, alpha0)), 4 * pi / Big(alpha0));
        check(model::bpi_exponent(make(ModelKind::TriangleII, beta, d0)), 4 * pi * (1 + B * pi * pi / 3));
        check(model::bpi_exponent(make(ModelKind::Edge, beta, d0)), 4 * (9 + B * pi * pi / 6));
      }
    }
    for (double m : {19.0, 25.0, 40.0}) {
      const Big M(m), floor = 9 / (s7 * M);
      const double ell = 19.0 * 0.1;
      check(model::cgr_bound(make(ModelKind::TriangleI, beta, 0.1, 0.05), ell, m), B);
      check(model::cgr_bound(make(ModelKind::TriangleII, beta, 0.1), ell, m),
            log(1 + B * floor * floor * floor));
      check(model::cgr_bound(make(ModelKind::Edge, beta, 0.1), ell, m),
            log(1 + B / pow(9 * s7 * M, 3)));
    }
  }
  for (double g : {0.1, 1.0, 2.0, 5.0, 12.0}) {
    for (int q : {2, 3, 5}) {
      const Big e = exp(-Big(g));
      check(model::p_tilde(g, q), (1 - e) / (1 + (q - 1) * e));
    }
  }
  for (double ell : {1.9, 2.5, 4.0}) {
    for (double d0 : {0.1, 0.05}) {
      const Big L(ell), D(d0);
      check(model::point_bound_M(ell, d0), (L + 2 * D) * (L + 2 * D) / (pi * D * D));
    }
  }
  for (double pc : {0.592746, 0.5, 0.7}) check(model::epsilon_from_pc(pc), (1 - Big(pc)) / 2);

  const double tanh1 = model::p_tilde(2.0, 2);
  const bool anchor = std::abs(tanh1 - 0.761594) < 5e-7;
  report(8, bad == 0 && anchor,
         fmt("%zu values, %zu off by more than 12 digits; p_tilde(g=2, q=2) = %.9f", checked, bad, tanh1));
}

void criterion_9() {
  const auto t0 = Clock::now();
  cli::ExperimentConfig cfg;
  cfg.kind = ModelKind::Edge;
  cfg.q = 2;
  cfg.delta0 = 0.1;
  cfg.cells = 10;
  cfg.ell = 1.9;
  cfg.zs = {300.0};
  cfg.betas = {0.0, 1.0, 5.0, 20.0};
  cfg.burn_in = 60;
  cfg.sweeps = 40;
  cfg.seed = 9;
  cfg.mix = {0.4, 0.4, 0.1995, 0.0005};
  cfg.validate();

  const std::size_t chains = cfg.betas.size();
  std::vector<sampler::ObservableTrace> traces(chains);
  std::vector<std::vector<std::vector<Point2>>> states(chains);
  std::vector<std::thread> workers;
  for (std::size_t ib = 0; ib < chains; ++ib) {
    workers.emplace_back([&, ib] {
      traces[ib] = sampler::run_chain(cfg.chain(0, ib, 0), [&](const sampler::ChainState& s, const sampler::TraceRow&) {
        states[ib].push_back(live_points(s.tri));
      });
    });
  }
  for (auto& w : workers) w.join();
  for (std::size_t ib = 0; ib < chains; ++ib) {
    for (auto& pts : states[ib]) {
      recorded.push_back({fmt("symmetry chain beta=%g", cfg.betas[ib]), cfg.delta0, std::move(pts)});
    }
  }

  std::vector<stats::MeanError> op;
  std::string detail;
  for (std::size_t ib = 0; ib < chains; ++ib) {
    std::vector<double> v;
    for (const auto& r : traces[ib].rows) v.push_back(r.order_param / (cfg.q - 1));
    op.push_back(stats::batch_means(v));
    detail += fmt("beta=%g: %.4f +- %.4f; ", cfg.betas[ib], op.back().mean, op.back().standard_error);
  }
  bool monotone = true;
  for (std::size_t i = 1; i < op.size(); ++i) monotone = monotone && op[i].mean > op[i - 1].mean;
  const bool null_ok = std::abs(op.front().mean) <= 3.0 * op.front().standard_error;
  const bool ordered = op.back().mean > 0.5;
  const double secs = seconds_since(t0);
  // "Well above" the empty-cell activity: at least ten times it, at every beta.
  double z_empty = 0.0;
  for (double beta : cfg.betas) {
    z_empty = std::max(z_empty, model::empty_cell_activity(cfg.model(beta), cfg.q, cfg.ell, cfg.p_c));
  }
  const bool activity_ok = cfg.zs[0] >= 10.0 * z_empty;
  report(9, activity_ok && null_ok && ordered && monotone && secs < 1800.0,
         detail + fmt("null %s, ordered %s, monotone %s, %.0f s; z = %g vs 10 x empty-cell "
                               "activity %g (subcell core area %g): %s",
                      null_ok ? "yes" : "no", ordered ? "yes" : "no", monotone ? "yes" : "no", secs,
                      cfg.zs[0], 10.0 * z_empty, model::subcell_core_area(cfg.ell, cfg.delta0),
                      activity_ok ? "met" : "not met"));
}

// Exhaustive scan: every pair closer than delta0 shares a bucket of side
// delta0 or sits in neighbouring buckets.
void criterion_10() {
  std::size_t states = 0, points = 0, close = 0;
  std::string first;
  for (const auto& st : recorded) {
    ++states;
    points += st.points.size();
    std::unordered_map<long long, std::vector<std::size_t>> buckets;
    auto key = [&](long long i, long long j) { return i * 2000003LL + j; };
    std::vector<std::pair<long long, long long>> cell(st.points.size());
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      cell[i] = {static_cast<long long>(std::floor(st.points[i].x / st.delta0)),
                 static_cast<long long>(std::floor(st.points[i].y / st.delta0))};
      buckets[key(cell[i].first, cell[i].second)].push_back(i);
    }
    for (std::size_t i = 0; i < st.points.size(); ++i) {
      for (long long di = -1; di <= 1; ++di) {
        for (long long dj = -1; dj <= 1; ++dj) {
          auto it = buckets.find(key(cell[i].first + di, cell[i].second + dj));
          if (it == buckets.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            if (geometry::distance(st.points[i], st.points[j]) < st.delta0) {
              if (first.empty()) first = " (first in " + st.source + ")";
              ++close;
            }
          }
        }
      }
    }
  }
  report(10, close == 0 && states > 0,
         fmt("%zu recorded states, %zu points, %zu pairs closer than delta0%s", states, points, close,
             first.c_str()));
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  const auto instances = oracle_instances();
  auto guarded = [](int id, auto&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what());
    }
  };
  guarded(1, [&] { criterion_1(instances); });
  guarded(2, [&] { criterion_2(instances); });
  guarded(3, criterion_3);
  guarded(4, criterion_4);
  guarded(5, criterion_5);
  guarded(6, criterion_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  guarded(9, criterion_9);
  guarded(10, criterion_10);
  std::printf("%d of 10 criteria failed, %.0f s\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
