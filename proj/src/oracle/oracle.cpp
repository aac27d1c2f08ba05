#include "dpotts/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dpotts/errors.hpp"
#include "dpotts/model/thresholds.hpp"

namespace dpotts::oracle {
namespace {

std::vector<VertexId> interior_vertices(const Triangulation& tri) {
  std::vector<VertexId> out;
  for (VertexId v : tri.live_vertices()) {
    if (!tri.is_frame(v)) out.push_back(v);
  }
  return out;
}

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

std::vector<Mark> JointTable::pattern(std::size_t index, std::size_t id_bound) const {
  std::vector<Mark> marks(id_bound, Mark(1));
  for (VertexId v : interior) {
    marks[static_cast<std::size_t>(v)] = Mark(1 + static_cast<int>(index % static_cast<std::size_t>(q)));
    index /= static_cast<std::size_t>(q);
  }
  return marks;
}

rcluster::TileConfiguration JointTable::subset(std::size_t mask) const {
  rcluster::TileConfiguration T;
  T.hyperedge_size = hyperedges.empty() ? 3 : hyperedges.front().size;
  for (std::size_t j = 0; j < hyperedges.size(); ++j) {
    if (mask >> j & 1U) T.open.push_back(hyperedges[j]);
  }
  return T;
}

JointTable enumerate_joint(const Triangulation& tri, const InteractionModel& m, int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  JointTable t;
  t.q = q;
  t.interior = interior_vertices(tri);
  t.hyperedges = rcluster::variable_hyperedges(tri, m);
  if (t.interior.size() > kMaxJointPoints || t.hyperedges.size() > kMaxJointHyperedges) {
    throw TooLarge("joint enumeration limited to 8 points and 20 hyperedges");
  }
  for (const auto& h : t.hyperedges) {
    t.open_probability.push_back(rcluster::opening_probability(rcluster::hyperedge_phi(tri, m, h)));
  }
  const std::size_t E = t.hyperedges.size();
  const std::size_t patterns = ipow(static_cast<std::size_t>(q), t.interior.size());
  const std::size_t subsets = std::size_t{1} << E;
  const auto id_bound = static_cast<std::size_t>(tri.id_bound());

  // Bitmask of monochromatic hyperedges for every pattern.
  std::vector<std::uint32_t> mono(patterns, 0);
  for (std::size_t s = 0; s < patterns; ++s) {
    const auto marks = t.pattern(s, id_bound);
    for (std::size_t j = 0; j < E; ++j) {
      const auto& h = t.hyperedges[j];
      bool same = true;
      for (VertexId v : h.ids()) same = same && marks[static_cast<std::size_t>(v)] == marks[static_cast<std::size_t>(h.vertices[0])];
      if (same) mono[s] |= std::uint32_t{1} << j;
    }
  }

  std::vector<CompensatedSum> by_pattern(patterns);
  std::vector<CompensatedSum> by_subset(subsets);
  for (std::size_t T = 0; T < subsets; ++T) {
    double w = 1.0;
    for (std::size_t j = 0; j < E; ++j) {
      w *= (T >> j & 1U) ? t.open_probability[j] : 1.0 - t.open_probability[j];
    }
    if (w == 0.0) continue;
    const auto open = static_cast<std::uint32_t>(T);
    for (std::size_t s = 0; s < patterns; ++s) {
      if ((open & ~mono[s]) != 0) continue;  // a bichromatic open hyperedge
      by_pattern[s].add(w);
      by_subset[T].add(w);
    }
  }

  CompensatedSum z_marks, z_tiles;
  t.mark_weight.resize(patterns);
  t.tile_weight.resize(subsets);
  for (std::size_t s = 0; s < patterns; ++s) {
    t.mark_weight[s] = by_pattern[s].value();
    z_marks.add(t.mark_weight[s]);
  }
  for (std::size_t T = 0; T < subsets; ++T) {
    t.tile_weight[T] = by_subset[T].value();
    z_tiles.add(t.tile_weight[T]);
  }
  t.normalization = z_marks.value();
  t.normalization_by_tiles = z_tiles.value();
  return t;
}

double edwards_sokal_discrepancy(const Triangulation& tri, const JointTable& table) {
  const std::size_t subsets = table.tile_weight.size();
  std::vector<double> ratio;
  for (std::size_t T = 0; T < subsets; ++T) {
    double w = 1.0;
    for (std::size_t j = 0; j < table.hyperedges.size(); ++j) {
      w *= (T >> j & 1U) ? table.open_probability[j] : 1.0 - table.open_probability[j];
    }
    if (w == 0.0) {
      if (table.tile_weight[T] != 0.0) return 1.0;
      continue;
    }
    const auto K = rcluster::count_clusters(tri, table.subset(T)).K;
    const double expected = std::pow(static_cast<double>(table.q), static_cast<double>(K)) * w;
    ratio.push_back(table.tile_weight[T] / expected);
  }
  if (ratio.empty()) return 0.0;
  const double c = ratio.front();
  double worst = 0.0;
  for (double r : ratio) worst = std::max(worst, std::abs(r - c) / std::abs(c));
  return worst;
}

std::vector<double> conditional_mark_distribution(const Triangulation& tri,
                                                  const ConvexPolygon& window,
                                                  const InteractionModel& m, int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const auto interior = interior_vertices(tri);
  if (interior.size() > kMaxConditionalPoints) {
    throw TooLarge("conditional mark enumeration limited to 6 points");
  }
  JointTable indexer;
  indexer.q = q;
  indexer.interior = interior;
  const std::size_t patterns = ipow(static_cast<std::size_t>(q), interior.size());
  const auto id_bound = static_cast<std::size_t>(tri.id_bound());

  std::vector<double> energy(patterns);
  for (std::size_t s = 0; s < patterns; ++s) {
    energy[s] = model::hamiltonian(m, window, tri, indexer.pattern(s, id_bound));
  }
  const double ground = *std::min_element(energy.begin(), energy.end());
  if (std::isinf(ground)) throw std::invalid_argument("positions violate the hard core");
  std::vector<double> out(patterns);
  CompensatedSum z;
  for (std::size_t s = 0; s < patterns; ++s) {
    out[s] = std::exp(-(energy[s] - ground));
    z.add(out[s]);
  }
  for (double& p : out) p /= z.value();
  return out;
}

SymmetryCheck verify_prop_sym(const Triangulation& tri, const ConvexPolygon& delta,
                              const InteractionModel& m, int q) {
  const JointTable t = enumerate_joint(tri, m, q);
  const auto id_bound = static_cast<std::size_t>(tri.id_bound());
  std::vector<VertexId> in_delta;
  for (VertexId v : t.interior) {
    if (delta.contains(tri.point(v))) in_delta.push_back(v);
  }

  CompensatedSum lhs;
  for (std::size_t s = 0; s < t.pattern_count(); ++s) {
    if (t.mark_weight[s] == 0.0) continue;
    const auto marks = t.pattern(s, id_bound);
    double ones = 0.0;
    for (VertexId v : in_delta) ones += marks[static_cast<std::size_t>(v)] == Mark(1);
    const double f = q * ones - static_cast<double>(in_delta.size());
    lhs.add(t.mark_weight[s] / t.normalization * f);
  }

  CompensatedSum rhs;
  for (std::size_t T = 0; T < t.tile_weight.size(); ++T) {
    if (t.tile_weight[T] == 0.0) continue;
    const auto n = rcluster::n_delta_boundary(tri, t.subset(T), delta);
    rhs.add(t.tile_weight[T] / t.normalization_by_tiles * static_cast<double>(n));
  }
  SymmetryCheck r;
  r.lhs = lhs.value();
  r.rhs = (q - 1) * rhs.value();
  r.difference = std::abs(r.lhs - r.rhs);
  return r;
}

CreatedEstimate expected_new_tiles_mc(const Triangulation& tri, Point2 x0,
                                      const InteractionModel& m, std::size_t draws,
                                      CounterRng& rng) {
  Triangulation after = tri;
  const auto diff = after.insert(x0);
  std::vector<double> p;
  if (m.uses_edges()) {
    for (VertexId w : after.neighbors(diff.pivot)) {
      if (w == geometry::kNoVertex) continue;
      const double len = geometry::distance(x0, after.point(w));
      p.push_back(rcluster::opening_probability(model::phi_length(m, len)));
    }
  } else {
    for (const auto& t : diff.created) {
      p.push_back(rcluster::opening_probability(model::phi(m, t)));
    }
  }

  CreatedEstimate r;
  r.created = p.size();
  r.bound = model::expected_created_bound(m);
  for (double x : p) r.exact += x;
  if (draws == 0) return r;
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    double count = 0.0;
    for (double x : p) count += rng.uniform() < x;
    sum += count;
    sum2 += count * count;
  }
  const double n = static_cast<double>(draws);
  r.estimate = sum / n;
  const double var = draws > 1 ? std::max(0.0, (sum2 - n * r.estimate * r.estimate) / (n - 1)) : 0.0;
  r.standard_error = std::sqrt(var / n);
  return r;
}

}  // namespace dpotts::oracle
