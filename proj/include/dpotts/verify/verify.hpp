#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dpotts::verify {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = true;
  std::size_t cases = 0;
  std::string detail;    // first failure
  std::string instance;  // JSON dump of the first failing instance
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool passed() const;
};

inline constexpr std::array<std::string_view, 4> kSuites{"geometry", "rcluster", "oracle",
                                                         "coarse"};

/// One exhaustive-enumeration instance: relative discrepancies of the joint
/// measure's mark marginal against direct Potts weights, of the tile-weight
/// ratio against q^K times the Bernoulli weights, and of the boundary
/// connection identity.
struct OracleRow {
  std::string model;
  int q = 2;
  std::size_t points = 0;
  std::size_t hyperedges = 0;
  double beta = 0.0;
  double marginal_error = 0.0;
  double edwards_sokal_error = 0.0;
  double identity_error = 0.0;
  bool passed = true;
};

inline constexpr double kMarginalTolerance = 1e-10;
inline constexpr double kEdwardsSokalTolerance = 1e-12;
inline constexpr double kIdentityTolerance = 1e-10;

/// `instances` random instances (3 to 6 points), cycling through the three
/// models and q in {2, 3}.
std::vector<OracleRow> oracle_rows(std::uint64_t seed, std::size_t instances);

/// Randomized property suites. `selector` is a suite name or "all"; unknown
/// names throw ConfigError. `effort` multiplies the number of cases.
VerifyReport run_verify(std::string_view selector, std::uint64_t seed, std::size_t effort = 1);

}  // namespace dpotts::verify
