#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "dpotts/coarse/coarse.hpp"
#include "dpotts/model/model.hpp"
#include "dpotts/sampler/sampler.hpp"

namespace dpotts::cli {

/// Everything a run needs. Loaded from an INI file with sections [model],
/// [chain], [window], [coarse], [output] and [run]; see README for keys.
struct ExperimentConfig {
  model::ModelKind kind = model::ModelKind::TriangleII;
  double delta0 = 0.1;
  double alpha0 = 0.1;
  std::vector<double> betas{1.0};
  std::vector<double> zs{100.0};
  int q = 2;

  int cells = 2;  // the window is cells x cells coarse cells
  double ell = 1.9;

  std::size_t sweeps = 100;
  std::size_t burn_in = 10;
  std::size_t replicates = 1;
  std::uint64_t seed = 1;
  sampler::MoveMix mix;

  bool coarse = false;
  double m = 19.0;
  double p_c = 0.592746;
  double rho0 = 0.25;

  std::string out = "dpotts-out";
  std::size_t threads = 1;

  /// Throws ConfigError.
  void validate() const;

  model::InteractionModel model(double beta) const;
  coarse::CellPartition partition() const;
  std::size_t chain_count() const { return zs.size() * betas.size() * replicates; }
  /// Chain index of grid point (iz, ib), replicate r: grid-major, r fastest.
  std::size_t chain_index(std::size_t iz, std::size_t ib, std::size_t r) const {
    return (iz * betas.size() + ib) * replicates + r;
  }
  sampler::ChainConfig chain(std::size_t iz, std::size_t ib, std::size_t r) const;

  nlohmann::json to_json() const;
};

/// Defaults, then the file (if `path` is non-empty), then `overrides` of the
/// form "section.key=value". Unknown sections or keys and malformed values
/// throw ConfigError; an unreadable file throws IoError.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// Comma-separated numbers; "inf" is accepted.
std::vector<double> parse_list(const std::string& text);

}  // namespace dpotts::cli
