#include "dpotts/model/thresholds.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dpotts/errors.hpp"

namespace dpotts::model {

using std::numbers::pi;

RegimeThresholds regime_thresholds(const InteractionModel& m, double rho0) {
  if (!(rho0 > 0.0 && rho0 < 0.5)) throw std::invalid_argument("rho0 must lie in (0, 1/2)");
  RegimeThresholds r;
  switch (m.kind) {
    case ModelKind::TriangleI: r.c_r = 2.0 * m.beta; break;
    case ModelKind::TriangleII: {
      const double a = pi / 3.0;
      r.c_r = 2.0 * std::log1p(m.beta * a * a * a);
      break;
    }
    case ModelKind::Edge: {
      const double s = 18.0 * (1.0 - 2.0 * rho0);
      r.c_r = 3.0 * std::log1p(m.beta / (s * s * s));
      break;
    }
  }
  const double scale = 18.0 * m.delta0;
  r.z0 = std::exp(r.c_r) / (pi * rho0 * rho0 * scale * scale);
  return r;
}

double bpi_exponent(const InteractionModel& m) {
  switch (m.kind) {
    case ModelKind::TriangleI: return 4.0 * pi / m.alpha0;
    case ModelKind::TriangleII: return 4.0 * pi * (1.0 + m.beta * pi * pi / 3.0);
    case ModelKind::Edge: return 4.0 * (9.0 + m.beta * pi * pi / 6.0);
  }
  return 0.0;
}

double cgr_angle_floor(double m) { return 9.0 / (std::sqrt(7.0) * m); }

double cgr_bound(const InteractionModel& model, double ell, double m) {
  if (!(m > 18.0)) throw ScaleViolation("scale multiple m must exceed 18");
  if (!(ell > 18.0 * model.delta0)) throw ScaleViolation("cell scale must exceed 18 delta0");
  if (ell > m * model.delta0 * (1.0 + 1e-12)) {
    throw ScaleViolation("cell scale must not exceed m delta0");
  }
  const double floor = cgr_angle_floor(m);
  switch (model.kind) {
    case ModelKind::TriangleI:
      if (!(model.alpha0 < floor)) {
        throw ScaleViolation("alpha0 must be below 9/(sqrt(7) m)");
      }
      return model.beta;
    case ModelKind::TriangleII:
      return std::log1p(model.beta * floor * floor * floor);
    case ModelKind::Edge: {
      const double d = 9.0 * std::sqrt(7.0) * m;
      return std::log1p(model.beta / (d * d * d));
    }
  }
  return 0.0;
}

double p_tilde(double g, int q) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  if (std::isinf(g)) return 1.0;
  const double e = std::exp(-g);
  return -std::expm1(-g) / (1.0 + (q - 1) * e);
}

double point_bound_M(double ell, double delta0) {
  const double s = ell + 2.0 * delta0;
  return s * s / (pi * delta0 * delta0);
}

double epsilon_from_pc(double p_c) { return 0.5 * (1.0 - p_c); }

double subcell_core_area(double ell, double delta0) {
  // Rhombus of side ell/9 and angle pi/3; both heights shrink by 2 delta0.
  const double h = ell / 9.0 * std::sqrt(3.0) / 2.0 - 2.0 * delta0;
  return h > 0.0 ? h * h * 2.0 / std::sqrt(3.0) : 0.0;
}

double empty_cell_activity(const InteractionModel& m, int q, double ell, double p_c) {
  if (q < 2) throw std::invalid_argument("q must be >= 2");
  const double core = subcell_core_area(ell, m.delta0);
  if (core <= 0.0) return std::numeric_limits<double>::infinity();
  return 81.0 * std::pow(static_cast<double>(q), bpi_exponent(m)) / (epsilon_from_pc(p_c) * core);
}

double expected_created_bound(const InteractionModel& m) {
  switch (m.kind) {
    case ModelKind::TriangleI: return 2.0 * pi / m.alpha0;
    case ModelKind::TriangleII: return 2.0 * pi * (1.0 + m.beta * pi * pi / 3.0);
    case ModelKind::Edge: return 4.0 * (9.0 + m.beta * pi * pi / 6.0);
  }
  return 0.0;
}

}  // namespace dpotts::model
