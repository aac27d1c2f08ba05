#pragma once

#include "dpotts/model/model.hpp"

namespace dpotts::model {

/// Literature value of the site percolation threshold on the square lattice.
inline constexpr double kSiteThresholdZ2 = 0.592746;

struct RegimeThresholds {
  double c_r = 0.0;  // uniform summability constant
  double z0 = 0.0;   // activity above which strong rigidity holds
};

/// c_r and z0 = e^{c_r} / (pi rho0^2 (18 delta0)^2); rho0 in (0, 1/2).
RegimeThresholds regime_thresholds(const InteractionModel& m, double rho0);

/// Exponent delta of the lower bound q^{-delta} on the conditional intensity
/// ratio of the random-cluster point marginal.
double bpi_exponent(const InteractionModel& m);

/// Lower bound g(beta) on the type potential of every tile (edge) meeting a
/// central band between two fully occupied cells, for cell scale ell with
/// 18 delta0 < ell <= m delta0. Throws ScaleViolation outside that range, or
/// for TriangleI when alpha0 >= 9/(sqrt(7) m).
double cgr_bound(const InteractionModel& model, double ell, double m);

/// The geometric angle floor 9/(sqrt(7) m) shared by all band tiles.
double cgr_angle_floor(double m);

/// Opening probability (1 - e^{-g}) / (1 + (q-1) e^{-g}) of the comparison
/// tile measure.
double p_tilde(double g, int q);

/// Hard-core bound (ell + 2 delta0)^2 / (pi delta0^2) on the points of a cell.
double point_bound_M(double ell, double delta0);

/// epsilon = (1 - p_c) / 2.
double epsilon_from_pc(double p_c = kSiteThresholdZ2);

/// Area of a subcell of side ell/9 with its boundary layer of width delta0
/// removed; 0 when nothing is left (ell <= 9 * 4 delta0 / sqrt(3)).
double subcell_core_area(double ell, double delta0);

/// Activity above which every subcell is empty with probability below
/// epsilon/81: 81 q^delta / (epsilon |core|), delta = bpi_exponent(m).
/// Infinite when the subcell core is empty.
double empty_cell_activity(const InteractionModel& m, int q, double ell,
                           double p_c = kSiteThresholdZ2);

/// Upper bound on the expected number of open created hyperedges when one
/// point is inserted: 2 pi / alpha0 (TriangleI, a sure bound),
/// 2 pi (1 + beta pi^2 / 3) (TriangleII), 4 (9 + beta pi^2 / 6) (edges).
double expected_created_bound(const InteractionModel& m);

}  // namespace dpotts::model
