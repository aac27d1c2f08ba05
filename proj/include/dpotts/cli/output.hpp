#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dpotts/sampler/sampler.hpp"
#include "dpotts/stats.hpp"

namespace dpotts::cli {

inline constexpr int kSchemaVersion = 1;

/// Shortest round-trip decimal ("%.17g"); "inf", "-inf", "nan" otherwise.
std::string format_number(double x);

/// Columns: sweep, N, N_delta_1 .. N_delta_q, order_param, energy, K.
std::vector<std::string> trace_columns(int q);
void write_trace_csv(std::ostream& out, const sampler::ObservableTrace& trace, int q);

/// Per grid point statistics over all its chains. The order parameter is
/// normalized, (q N_1 - N) / ((q - 1) N). Standard errors come from
/// replicate means when there are several chains, from batch means otherwise.
struct GridSummary {
  std::size_t z_index = 0, beta_index = 0;
  double z = 0.0, beta = 0.0;
  std::size_t chains = 0;
  stats::MeanError order_param;
  stats::MeanError largest_cluster;
  double mean_points = 0.0;
};

GridSummary summarize(std::span<const sampler::ObservableTrace> traces, int q);

void write_summary_csv(std::ostream& out, std::span<const GridSummary> rows);

/// Self-contained SVG of the order parameter against beta, one line per z.
std::string order_parameter_svg(std::span<const GridSummary> rows);

/// Writes `text` to `path`, throwing IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& text);
/// Creates the directory tree, throwing IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

}  // namespace dpotts::cli
