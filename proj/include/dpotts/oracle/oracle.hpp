#pragma once

#include <cstddef>
#include <vector>

#include "dpotts/geometry/region.hpp"
#include "dpotts/geometry/triangulation.hpp"
#include "dpotts/model/model.hpp"
#include "dpotts/rcluster/rcluster.hpp"
#include "dpotts/rng.hpp"

namespace dpotts::oracle {

using geometry::ConvexPolygon;
using geometry::Point2;
using geometry::Triangulation;
using geometry::VertexId;
using model::InteractionModel;
using model::Mark;
using rcluster::Hyperedge;

/// Compensated (Neumaier) running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Marginals of the joint law of (marks, open hyperedges) on fixed positions,
/// obtained by visiting every pair. Frame vertices carry mark 1 and their
/// all-frame hyperedges are open; only the variable ones are enumerated.
struct JointTable {
  int q = 2;
  std::vector<VertexId> interior;        // pattern digit i is the mark of interior[i]
  std::vector<Hyperedge> hyperedges;     // bit j of a subset is hyperedges[j]
  std::vector<double> open_probability;  // p per hyperedge
  std::vector<double> mark_weight;       // unnormalized, by pattern index
  std::vector<double> tile_weight;       // unnormalized, by subset bitmask
  double normalization = 0.0;            // summed marks first
  double normalization_by_tiles = 0.0;   // summed subsets first

  std::size_t pattern_count() const { return mark_weight.size(); }
  /// Marks indexed by vertex id (frame and dead ids get mark 1).
  std::vector<Mark> pattern(std::size_t index, std::size_t id_bound) const;
  rcluster::TileConfiguration subset(std::size_t mask) const;
};

/// Limits of the exhaustive routines.
inline constexpr std::size_t kMaxJointPoints = 8;
inline constexpr std::size_t kMaxJointHyperedges = 20;
inline constexpr std::size_t kMaxConditionalPoints = 6;

/// Throws TooLarge beyond kMaxJointPoints interior points or
/// kMaxJointHyperedges variable hyperedges.
JointTable enumerate_joint(const Triangulation& tri, const InteractionModel& m, int q);

/// Largest relative deviation, over subsets, of the mark-summed joint weight
/// from q^{K(T)} prod p prod (1-p), after fitting the single global constant.
double edwards_sokal_discrepancy(const Triangulation& tri, const JointTable& table);

/// Exact conditional mark law given positions, proportional to e^{-H} with H
/// the window Hamiltonian; indexed like JointTable patterns. Throws TooLarge
/// beyond kMaxConditionalPoints interior points and std::invalid_argument
/// when the positions violate the hard core.
std::vector<double> conditional_mark_distribution(const Triangulation& tri,
                                                  const ConvexPolygon& window,
                                                  const InteractionModel& m, int q);

struct SymmetryCheck {
  double lhs = 0.0;  // E_gamma[q N_{delta,1} - N_delta]
  double rhs = 0.0;  // (q-1) E_C[N_{delta <-> frame}]
  double difference = 0.0;
};

/// Both sides of the boundary-connection identity on fixed positions.
SymmetryCheck verify_prop_sym(const Triangulation& tri, const ConvexPolygon& delta,
                              const InteractionModel& m, int q);

struct CreatedEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  double exact = 0.0;   // sum of opening probabilities of the created hyperedges
  double bound = 0.0;   // model::expected_created_bound
  std::size_t created = 0;
};

/// Monte Carlo mean of the number of open created hyperedges (tiles, or the
/// new edges at x0 for the edge model) when x0 is inserted.
CreatedEstimate expected_new_tiles_mc(const Triangulation& tri, Point2 x0,
                                      const InteractionModel& m, std::size_t draws,
                                      CounterRng& rng);

}  // namespace dpotts::oracle
