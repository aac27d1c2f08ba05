#pragma once

#include <iosfwd>
#include <vector>

#include "dpotts/cli/config.hpp"
#include "dpotts/coarse/coarse.hpp"
#include "dpotts/sampler/sampler.hpp"

namespace dpotts::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kBadConfig = 2, kIoFailure = 3 };

struct ChainRun {
  sampler::ObservableTrace trace;
  std::vector<std::vector<coarse::CellState>> cells;  // per recorded sweep, coarse runs only
};

/// Runs every chain of the grid on up to `threads` workers. Results are in
/// chain_index order whatever the completion order.
std::vector<ChainRun> run_grid(const ExperimentConfig& cfg, std::size_t threads);

/// Entry point of the dpotts executable; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dpotts::cli
