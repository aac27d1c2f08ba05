#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "dpotts/geometry/region.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/model/model.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::sampler {

using geometry::ConvexPolygon;
using geometry::Point2;
using geometry::Triangulation;
using geometry::VertexId;
using model::InteractionModel;
using model::Mark;

/// Probabilities of the four elementary updates.
struct MoveMix {
  double birth = 0.35;
  double death = 0.35;
  double move = 0.2;
  double cluster = 0.1;
};

/// z is the total activity: the reference process is Poisson with intensity
/// z per unit area, each point carrying a uniform mark in {1..q}.
struct ChainConfig {
  double z = 1.0;
  int q = 2;
  InteractionModel model;
  ConvexPolygon window = ConvexPolygon::rectangle({0, 0}, {1, 1});
  std::optional<ConvexPolygon> observe;  // region for N_{delta,s}; the window if unset
  std::optional<std::vector<Point2>> frame;  // geometry::hex_frame(window, delta0) if unset
  std::uint64_t seed = 1;
  std::uint64_t chain_id = 0;
  std::size_t sweeps = 100;  // recorded sweeps, after burn_in unrecorded ones
  std::size_t burn_in = 10;
  MoveMix mix;

  /// Throws ConfigError.
  void validate() const;
  const ConvexPolygon& observation_region() const { return observe ? *observe : window; }
};

/// Uniform bucket grid of cell size delta0 for exact hard-core queries.
class HardCoreGrid {
 public:
  HardCoreGrid() = default;
  HardCoreGrid(geometry::BoundingBox box, double delta0);

  void add(VertexId id, Point2 p);
  void remove(VertexId id, Point2 p);
  /// True when some stored point other than `skip` lies closer than delta0.
  bool conflicts(Point2 p, const Triangulation& tri, VertexId skip = geometry::kNoVertex) const;

 private:
  std::size_t cell_of(Point2 p) const;
  geometry::BoundingBox box_{};
  double size_ = 1.0;
  long nx_ = 0, ny_ = 0;
  std::vector<std::vector<VertexId>> cells_;
};

struct ChainState {
  Triangulation tri;
  std::vector<Mark> marks;          // by vertex id; frame points carry 1
  std::vector<VertexId> interior;   // live non-frame vertices
  std::vector<std::int64_t> slot;   // index into interior by vertex id, -1 if absent
  HardCoreGrid grid;
  double energy = 0.0;
  std::uint64_t steps = 0;
  CounterRng rng{0};

  std::size_t interior_count() const { return interior.size(); }
  /// Interior positions and marks as a configuration, ids renumbered.
  model::MarkedConfiguration configuration(const ConvexPolygon& window) const;
};

/// Frame-only state with energy 0; deterministic in (seed, chain_id).
ChainState init_chain(const ChainConfig& cfg);

/// State with the given interior points and marks (ids 0..n-1 in order).
/// Throws std::invalid_argument when a point lies outside the window or the
/// hard core is violated.
ChainState make_state(const ChainConfig& cfg, std::span<const Point2> points,
                      std::span<const Mark> marks);

enum class MoveKind { Birth, Death, Move, Cluster };

struct StepResult {
  MoveKind kind = MoveKind::Birth;
  bool accepted = false;
};

/// One elementary update chosen by the move mix.
StepResult mh_step(const ChainConfig& cfg, ChainState& state, CounterRng& rng);

bool birth_step(const ChainConfig& cfg, ChainState& state, CounterRng& rng);
bool death_step(const ChainConfig& cfg, ChainState& state, CounterRng& rng);
bool move_step(const ChainConfig& cfg, ChainState& state, CounterRng& rng);

/// Resamples all marks given the positions: opens monochromatic hyperedges
/// with probability 1 - e^{-phi}, then gives every cluster a uniform mark,
/// mark 1 for clusters reaching the frame.
void cluster_mark_update(const ChainConfig& cfg, ChainState& state, CounterRng& rng);

/// Full Hamiltonian of the current state.
double recompute_energy(const ChainConfig& cfg, const ChainState& state);

/// N + 1 elementary updates, N the interior count at the start of the sweep.
void sweep(const ChainConfig& cfg, ChainState& state);

struct TraceRow {
  std::size_t sweep = 0;
  std::size_t N = 0;                   // interior points
  std::vector<std::size_t> n_delta;    // N_{delta,s}, s = 1..q
  double order_param = 0.0;            // (q N_{delta,1} - N_delta) / N_delta, 0 if empty
  double energy = 0.0;
  std::size_t K = 0;                   // clusters of a fresh mark-conditioned draw
  double largest_cluster = 0.0;        // largest-cluster fraction in the same draw
};

struct ObservableTrace {
  std::uint64_t seed = 0;
  std::uint64_t chain_id = 0;
  std::vector<TraceRow> rows;
};

/// Observables of the current state. The tile draw uses `rng` only.
TraceRow observe(const ChainConfig& cfg, const ChainState& state, std::size_t sweep,
                 CounterRng& rng);

using Observer = std::function<void(const ChainState&, const TraceRow&)>;

/// burn_in unrecorded sweeps then `sweeps` recorded ones.
ObservableTrace run_chain(const ChainConfig& cfg, const Observer& observer = {});

}  // namespace dpotts::sampler
