#include "dpotts/cli/commands.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "dpotts/cli/output.hpp"
#include "dpotts/errors.hpp"
#include "dpotts/geometry/predicates.hpp"
#include "dpotts/model/thresholds.hpp"
#include "dpotts/verify/verify.hpp"

#ifndef DPOTTS_GIT_DESCRIBE
#define DPOTTS_GIT_DESCRIBE "unknown"
#endif

namespace dpotts::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Common {
  std::string config;
  std::vector<std::string> set;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "INI configuration file");
  cmd->add_option("--set", c.set, "override, section.key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "master seed");
  cmd->add_option("--threads", c.threads, "worker threads (default: DPOTTS_THREADS, then config)");
  cmd->add_option("--out", c.out, "output directory");
}

ExperimentConfig resolve(const Common& c) {
  ExperimentConfig cfg = load_config(c.config, c.set);
  if (c.seed) cfg.seed = *c.seed;
  if (c.out) cfg.out = *c.out;
  if (c.threads) {
    cfg.threads = *c.threads;
  } else if (const char* env = std::getenv("DPOTTS_THREADS"); env && *env) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v == 0) throw ConfigError("DPOTTS_THREADS must be a positive integer");
    cfg.threads = v;
  }
  cfg.validate();
  if (cfg.coarse) {
    for (double b : cfg.betas) {
      try {
        model::cgr_bound(cfg.model(b), cfg.ell, cfg.m);
      } catch (const ScaleViolation& e) {
        throw ConfigError(std::string("coarse diagnostics: ") + e.what());
      }
    }
  }
  return cfg;
}

std::string chain_file(std::size_t iz, std::size_t ib, std::size_t r) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "chain_z%03zu_b%03zu_r%03zu.csv", iz, ib, r);
  return buf;
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

json manifest_base(const std::string& command, const ExperimentConfig& cfg, double seconds) {
  return {{"schema_version", kSchemaVersion},
          {"command", command},
          {"config", cfg.to_json()},
          {"seed", cfg.seed},
          {"git_describe", DPOTTS_GIT_DESCRIBE},
          {"wall_time_seconds", seconds},
          {"threads", cfg.threads}};
}

json chain_entries(const ExperimentConfig& cfg, bool with_files) {
  json chains = json::array();
  for (std::size_t iz = 0; iz < cfg.zs.size(); ++iz) {
    for (std::size_t ib = 0; ib < cfg.betas.size(); ++ib) {
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto id = cfg.chain_index(iz, ib, r);
        json e{{"z_index", iz},
               {"beta_index", ib},
               {"replicate", r},
               {"z", cfg.zs[iz]},
               {"beta", number(cfg.betas[ib])},
               {"seed", cfg.seed},
               {"chain_id", id},
               {"rng_key", CounterRng(cfg.seed, id).key()}};
        if (with_files) e["file"] = chain_file(iz, ib, r);
        chains.push_back(e);
      }
    }
  }
  return chains;
}

json coarse_entries(const ExperimentConfig& cfg, const std::vector<ChainRun>& runs) {
  json out = json::array();
  const auto partition = cfg.partition();
  for (std::size_t iz = 0; iz < cfg.zs.size(); ++iz) {
    for (std::size_t ib = 0; ib < cfg.betas.size(); ++ib) {
      std::vector<std::vector<coarse::CellState>> snaps;
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const auto& c = runs[cfg.chain_index(iz, ib, r)].cells;
        snaps.insert(snaps.end(), c.begin(), c.end());
      }
      const auto m = cfg.model(cfg.betas[ib]);
      const double g = model::cgr_bound(m, cfg.ell, cfg.m);
      const auto s = coarse::good_cell_stats(snaps, partition, m, cfg.q, g, cfg.p_c);
      out.push_back({{"z_index", iz},
                     {"beta_index", ib},
                     {"snapshots", s.snapshots},
                     {"mean_occupied", s.mean_occupied},
                     {"mean_good", s.mean_good},
                     {"good_frequency", s.good_frequency},
                     {"g", number(s.g)},
                     {"M", s.M},
                     {"epsilon", s.epsilon},
                     {"p_tilde", s.p_tilde},
                     {"p_tilde_pow_M", s.p_tilde_pow_M},
                     {"p_c", s.p_c},
                     {"exceeds_threshold", s.exceeds_threshold}});
    }
  }
  return out;
}

std::vector<GridSummary> grid_summaries(const ExperimentConfig& cfg, const std::vector<ChainRun>& runs) {
  std::vector<GridSummary> rows;
  for (std::size_t iz = 0; iz < cfg.zs.size(); ++iz) {
    for (std::size_t ib = 0; ib < cfg.betas.size(); ++ib) {
      std::vector<sampler::ObservableTrace> traces;
      for (std::size_t r = 0; r < cfg.replicates; ++r) traces.push_back(runs[cfg.chain_index(iz, ib, r)].trace);
      GridSummary g = summarize(traces, cfg.q);
      g.z_index = iz;
      g.beta_index = ib;
      g.z = cfg.zs[iz];
      g.beta = cfg.betas[ib];
      rows.push_back(g);
    }
  }
  return rows;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void write_traces(const ExperimentConfig& cfg, const std::vector<ChainRun>& runs, const fs::path& dir) {
  for (std::size_t iz = 0; iz < cfg.zs.size(); ++iz) {
    for (std::size_t ib = 0; ib < cfg.betas.size(); ++ib) {
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        std::ostringstream csv;
        write_trace_csv(csv, runs[cfg.chain_index(iz, ib, r)].trace, cfg.q);
        write_file(dir / chain_file(iz, ib, r), csv.str());
      }
    }
  }
}

int cmd_sample(const Common& c, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir(cfg.out);
  ensure_directory(dir);
  const auto runs = run_grid(cfg, cfg.threads);
  write_traces(cfg, runs, dir);
  json manifest = manifest_base("sample", cfg, seconds_since(t0));
  manifest["csv_columns"] = trace_columns(cfg.q);
  manifest["chains"] = chain_entries(cfg, true);
  if (cfg.coarse) manifest["coarse"] = coarse_entries(cfg, runs);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << "wrote " << runs.size() << " chain trace(s) to " << dir.string() << "\n";
  return kOk;
}

int cmd_sweep(const Common& c, bool traces, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = resolve(c);
  const fs::path dir(cfg.out);
  ensure_directory(dir);
  const auto runs = run_grid(cfg, cfg.threads);
  if (traces) write_traces(cfg, runs, dir);
  const auto rows = grid_summaries(cfg, runs);
  std::ostringstream csv;
  write_summary_csv(csv, rows);
  write_file(dir / "summary.csv", csv.str());
  write_file(dir / "order_param.svg", order_parameter_svg(rows));
  json manifest = manifest_base("sweep", cfg, seconds_since(t0));
  manifest["summary_file"] = "summary.csv";
  manifest["plot_file"] = "order_param.svg";
  manifest["chains"] = chain_entries(cfg, traces);
  if (traces) manifest["csv_columns"] = trace_columns(cfg.q);
  if (cfg.coarse) manifest["coarse"] = coarse_entries(cfg, runs);
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  out << csv.str();
  return kOk;
}

int cmd_verify(const Common& c, const std::string& suite, std::size_t effort,
               std::optional<double> fault, std::ostream& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentConfig cfg = load_config(c.config, c.set);
  const std::uint64_t seed = c.seed.value_or(cfg.seed);
  if (fault) geometry::testing::set_incircle_fault(*fault);
  verify::VerifyReport report;
  try {
    report = verify::run_verify(suite, seed, effort);
  } catch (...) {
    geometry::testing::set_incircle_fault(0.0);
    throw;
  }
  geometry::testing::set_incircle_fault(0.0);

  json checks = json::array();
  for (const auto& r : report.checks) {
    json e{{"suite", r.suite}, {"name", r.name}, {"passed", r.passed}, {"cases", r.cases}};
    if (!r.passed) {
      e["detail"] = r.detail;
      e["instance"] = json::parse(r.instance.empty() ? "{}" : r.instance);
    }
    checks.push_back(e);
  }
  json doc{{"schema_version", kSchemaVersion},
           {"suite", suite},
           {"seed", seed},
           {"passed", report.passed()},
           {"checks", checks},
           {"git_describe", DPOTTS_GIT_DESCRIBE},
           {"wall_time_seconds", seconds_since(t0)}};
  if (c.out) {
    ensure_directory(*c.out);
    write_file(fs::path(*c.out) / "verify.json", doc.dump(2) + "\n");
  }
  out << doc.dump(2) << "\n";
  return report.passed() ? kOk : kCheckFailed;
}

int cmd_thresholds(const Common& c, std::ostream& out) {
  const ExperimentConfig cfg = resolve(c);
  json rows = json::array();
  std::ostringstream table;
  char line[512];
  std::snprintf(line, sizeof line,
                "model %s, q = %d, delta0 = %g, alpha0 = %g, ell = %g, m = %g, rho0 = %g, p_c = %g\n",
                std::string(model::to_string(cfg.kind)).c_str(), cfg.q, cfg.delta0, cfg.alpha0,
                cfg.ell, cfg.m, cfg.rho0, cfg.p_c);
  table << line;
  std::snprintf(line, sizeof line, "%-10s %-14s %-14s %-14s %-14s %-14s %-14s %-14s %-14s\n", "beta",
                "c_r", "z0", "g", "p_tilde", "bpi_delta", "M", "epsilon", "z_empty_cell");
  table << line;
  for (double beta : cfg.betas) {
    const auto m = cfg.model(beta);
    double g;
    try {
      g = model::cgr_bound(m, cfg.ell, cfg.m);
    } catch (const ScaleViolation& e) {
      throw ConfigError(e.what());
    }
    const auto rt = model::regime_thresholds(m, cfg.rho0);
    const double pt = model::p_tilde(g, cfg.q);
    const double bpi = model::bpi_exponent(m);
    const double M = model::point_bound_M(cfg.ell, cfg.delta0);
    const double eps = model::epsilon_from_pc(cfg.p_c);
    const double z_empty = model::empty_cell_activity(m, cfg.q, cfg.ell, cfg.p_c);
    std::snprintf(line, sizeof line,
                  "%-10.6g %-14.8g %-14.8g %-14.8g %-14.8g %-14.8g %-14.8g %-14.8g %-14.8g\n", beta,
                  rt.c_r, rt.z0, g, pt, bpi, M, eps, z_empty);
    table << line;
    rows.push_back({{"beta", number(beta)}, {"c_r", number(rt.c_r)}, {"z0", number(rt.z0)},
                    {"g", number(g)}, {"p_tilde", pt}, {"bpi_delta", number(bpi)}, {"M", M},
                    {"epsilon", eps}, {"z_empty_cell", number(z_empty)}});
  }
  if (c.out) {
    ensure_directory(*c.out);
    json doc{{"schema_version", kSchemaVersion}, {"config", cfg.to_json()}, {"rows", rows}};
    write_file(fs::path(*c.out) / "thresholds.json", doc.dump(2) + "\n");
  }
  out << table.str();
  return kOk;
}

int cmd_oracle_check(const Common& c, std::size_t instances, std::ostream& out) {
  const ExperimentConfig cfg = load_config(c.config, c.set);
  const std::uint64_t seed = c.seed.value_or(cfg.seed);
  const auto rows = verify::oracle_rows(seed, instances);
  json arr = json::array();
  bool ok = true;
  for (const auto& r : rows) {
    ok = ok && r.passed;
    arr.push_back({{"model", r.model}, {"q", r.q}, {"points", r.points}, {"hyperedges", r.hyperedges},
                   {"beta", r.beta}, {"marginal_error", r.marginal_error},
                   {"edwards_sokal_error", r.edwards_sokal_error},
                   {"identity_error", r.identity_error}, {"passed", r.passed}});
  }
  json doc{{"schema_version", kSchemaVersion},
           {"seed", seed},
           {"tolerances",
            {{"marginal", verify::kMarginalTolerance},
             {"edwards_sokal", verify::kEdwardsSokalTolerance},
             {"identity", verify::kIdentityTolerance}}},
           {"passed", ok},
           {"instances", arr}};
  if (c.out) {
    ensure_directory(*c.out);
    write_file(fs::path(*c.out) / "oracle_check.json", doc.dump(2) + "\n");
  }
  out << doc.dump(2) << "\n";
  return ok ? kOk : kCheckFailed;
}

}  // namespace

std::vector<ChainRun> run_grid(const ExperimentConfig& cfg, std::size_t threads) {
  const std::size_t n = cfg.chain_count();
  std::vector<ChainRun> runs(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto partition = cfg.partition();

  auto work = [&] {
    for (std::size_t job = next++; job < n; job = next++) {
      const std::size_t r = job % cfg.replicates;
      const std::size_t grid = job / cfg.replicates;
      const std::size_t ib = grid % cfg.betas.size();
      const std::size_t iz = grid / cfg.betas.size();
      try {
        const auto chain = cfg.chain(iz, ib, r);
        sampler::Observer observer;
        if (cfg.coarse) {
          const double g = model::cgr_bound(chain.model, cfg.ell, cfg.m);
          observer = [&, g, job](const sampler::ChainState& s, const sampler::TraceRow&) {
            runs[job].cells.push_back(coarse::classify_cells(s.tri, s.marks, partition, chain.model, g));
          };
        }
        runs[job].trace = sampler::run_chain(chain, observer);
      } catch (...) {
        errors[job] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return runs;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Delaunay Potts models: sampling, sweeps, verification and thresholds"};
  app.require_subcommand(1);
  Common common;

  auto* sample = app.add_subcommand("sample", "run chains and write one CSV trace per chain");
  add_common(sample, common);

  auto* sweep = app.add_subcommand("sweep", "run a (z, beta) grid and summarize the order parameter");
  add_common(sweep, common);
  bool traces = false;
  sweep->add_flag("--traces", traces, "also write the per-chain CSV traces");

  auto* verify_cmd = app.add_subcommand("verify", "run randomized property suites");
  add_common(verify_cmd, common);
  std::string suite = "all";
  std::size_t effort = 1;
  std::optional<double> fault;
  verify_cmd->add_option("--suite", suite, "geometry, rcluster, oracle, coarse or all");
  verify_cmd->add_option("--effort", effort, "case-count multiplier");
  verify_cmd->add_option("--inject-fault", fault)->group("");

  auto* thresholds = app.add_subcommand("thresholds", "print the closed-form constants");
  add_common(thresholds, common);

  auto* oracle_cmd = app.add_subcommand("oracle-check", "exhaustive enumeration on random small instances");
  add_common(oracle_cmd, common);
  std::size_t instances = 12;
  oracle_cmd->add_option("--instances", instances, "number of instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadConfig;
  }

  try {
    if (*sample) return cmd_sample(common, out);
    if (*sweep) return cmd_sweep(common, traces, out);
    if (*verify_cmd) return cmd_verify(common, suite, effort, fault, out);
    if (*thresholds) return cmd_thresholds(common, out);
    if (*oracle_cmd) return cmd_oracle_check(common, instances, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kBadConfig;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kBadConfig;
}

}  // namespace dpotts::cli
