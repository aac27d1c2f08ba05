#include "dpotts/cli/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <set>

#include "dpotts/errors.hpp"
#include "dpotts/geometry/frame.hpp"

namespace dpotts::cli {
namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"model", {"kind", "delta0", "alpha0", "beta"}},
      {"chain", {"z", "q", "sweeps", "burn_in", "replicates", "seed", "birth", "death", "move", "cluster"}},
      {"window", {"cells", "ell"}},
      {"coarse", {"enabled", "m", "p_c", "rho0"}},
      {"output", {"dir"}},
      {"run", {"threads"}},
  };
  return keys;
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  if (boost::algorithm::iequals(t, "inf")) return std::numeric_limits<double>::infinity();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || std::isnan(v)) {
    throw ConfigError(key + ": not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::trim_copy(text);
  errno = 0;
  char* end = nullptr;
  if (t.empty() || t.front() == '-') throw ConfigError(key + ": not a nonnegative integer: '" + text + "'");
  const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size() || errno == ERANGE) {
    throw ConfigError(key + ": not a nonnegative integer: '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(key + ": not a boolean: '" + text + "'");
}

void apply(ExperimentConfig& c, const std::string& section, const std::string& key,
           const std::string& value) {
  const auto sec = known_keys().find(section);
  if (sec == known_keys().end()) throw ConfigError("unknown section [" + section + "]");
  if (!sec->second.contains(key)) throw ConfigError("unknown key " + section + "." + key);
  const std::string name = section + "." + key;
  auto list = [&] {
    try {
      return parse_list(value);
    } catch (const ConfigError& e) {
      throw ConfigError(name + ": " + e.what());
    }
  };
  if (section == "model") {
    if (key == "kind") {
      try {
        c.kind = model::parse_model_kind(boost::algorithm::trim_copy(value));
      } catch (const std::exception& e) {
        throw ConfigError(name + ": " + e.what());
      }
    } else if (key == "delta0") {
      c.delta0 = parse_double(name, value);
    } else if (key == "alpha0") {
      c.alpha0 = parse_double(name, value);
    } else if (key == "beta") {
      c.betas = list();
    }
  } else if (section == "chain") {
    if (key == "z") c.zs = list();
    else if (key == "q") c.q = static_cast<int>(std::min<std::uint64_t>(parse_unsigned(name, value), 1u << 20));
    else if (key == "sweeps") c.sweeps = parse_unsigned(name, value);
    else if (key == "burn_in") c.burn_in = parse_unsigned(name, value);
    else if (key == "replicates") c.replicates = parse_unsigned(name, value);
    else if (key == "seed") c.seed = parse_unsigned(name, value);
    else if (key == "birth") c.mix.birth = parse_double(name, value);
    else if (key == "death") c.mix.death = parse_double(name, value);
    else if (key == "move") c.mix.move = parse_double(name, value);
    else if (key == "cluster") c.mix.cluster = parse_double(name, value);
  } else if (section == "window") {
    if (key == "cells") c.cells = static_cast<int>(std::min<std::uint64_t>(parse_unsigned(name, value), 1u << 20));
    else if (key == "ell") c.ell = parse_double(name, value);
  } else if (section == "coarse") {
    if (key == "enabled") c.coarse = parse_bool(name, value);
    else if (key == "m") c.m = parse_double(name, value);
    else if (key == "p_c") c.p_c = parse_double(name, value);
    else if (key == "rho0") c.rho0 = parse_double(name, value);
  } else if (section == "output") {
    c.out = boost::algorithm::trim_copy(value);
  } else if (section == "run") {
    c.threads = parse_unsigned(name, value);
  }
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<double> out;
  for (const auto& p : parts) out.push_back(parse_double("list", p));
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (!(delta0 > 0.0) || !std::isfinite(delta0)) fail("model.delta0 must be positive");
  if (!(alpha0 > 0.0 && alpha0 <= std::numbers::pi / 3)) fail("model.alpha0 must lie in (0, pi/3]");
  if (betas.empty()) fail("model.beta grid is empty");
  for (double b : betas) {
    if (!(b >= 0.0)) fail("model.beta values must be >= 0");
  }
  if (zs.empty()) fail("chain.z grid is empty");
  for (double z : zs) {
    if (!(z > 0.0) || !std::isfinite(z)) fail("chain.z values must be positive and finite");
  }
  if (q < 2 || q > 64) fail("chain.q must lie in [2, 64]");
  if (cells < 1 || cells > 200) fail("window.cells must lie in [1, 200]");
  if (!(ell > 0.0) || !std::isfinite(ell)) fail("window.ell must be positive");
  if (!(ell > 2.0 * delta0)) fail("window.ell must exceed 2 delta0");
  if (replicates < 1 || replicates > 10000) fail("chain.replicates must lie in [1, 10000]");
  if (sweeps > 100000000 || burn_in > 100000000) fail("chain.sweeps and chain.burn_in must be <= 1e8");
  if (!(m > 18.0)) fail("coarse.m must exceed 18");
  if (!(p_c > 0.0 && p_c < 1.0)) fail("coarse.p_c must lie in (0, 1)");
  if (!(rho0 > 0.0 && rho0 < 0.5)) fail("coarse.rho0 must lie in (0, 1/2)");
  if (coarse) {
    if (!(ell > 18.0 * delta0)) fail("coarse diagnostics need window.ell > 18 delta0");
    if (ell > m * delta0 * (1.0 + 1e-12)) fail("coarse diagnostics need window.ell <= m delta0");
  }
  if (threads < 1 || threads > 1024) fail("threads must lie in [1, 1024]");
  if (out.empty()) fail("output.dir must not be empty");
  // The sampler checks the move mix and the model parameters.
  chain(0, 0, 0).validate();
}

model::InteractionModel ExperimentConfig::model(double beta) const {
  model::InteractionModel m_;
  m_.kind = kind;
  m_.delta0 = delta0;
  m_.alpha0 = alpha0;
  m_.beta = beta;
  return m_;
}

coarse::CellPartition ExperimentConfig::partition() const {
  return coarse::CellPartition(ell, 0, cells - 1, 0, cells - 1);
}

sampler::ChainConfig ExperimentConfig::chain(std::size_t iz, std::size_t ib, std::size_t r) const {
  sampler::ChainConfig c;
  c.z = zs.at(iz);
  c.q = q;
  c.model = model(betas.at(ib));
  c.window = partition().window();
  c.frame = geometry::hex_frame(c.window, delta0);
  c.seed = seed;
  c.chain_id = chain_index(iz, ib, r);
  c.sweeps = sweeps;
  c.burn_in = burn_in;
  c.mix = mix;
  return c;
}

nlohmann::json ExperimentConfig::to_json() const {
  // Infinite beta is written as the string "inf".
  nlohmann::json b = nlohmann::json::array();
  for (double x : betas) {
    if (std::isinf(x)) b.push_back("inf");
    else b.push_back(x);
  }
  return {
      {"model", {{"kind", std::string(model::to_string(kind))}, {"delta0", delta0}, {"alpha0", alpha0}, {"beta", b}}},
      {"chain",
       {{"z", zs},
        {"q", q},
        {"sweeps", sweeps},
        {"burn_in", burn_in},
        {"replicates", replicates},
        {"seed", seed},
        {"birth", mix.birth},
        {"death", mix.death},
        {"move", mix.move},
        {"cluster", mix.cluster}}},
      {"window", {{"cells", cells}, {"ell", ell}}},
      {"coarse", {{"enabled", coarse}, {"m", m}, {"p_c", p_c}, {"rho0", rho0}}},
      {"output", {{"dir", out}}},
      {"run", {{"threads", threads}}},
  };
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig c;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read configuration file " + path);
    pt::ptree tree;
    try {
      pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
      throw ConfigError(std::string("malformed configuration: ") + e.what());
    }
    for (const auto& [section, body] : tree) {
      if (body.empty() && !body.data().empty()) {
        throw ConfigError("key outside a section: " + section);
      }
      for (const auto& [key, value] : body) {
        // Trailing "; ..." or "# ..." is a comment.
        const std::string& v = value.data();
        apply(c, section, key, v.substr(0, v.find_first_of(";#")));
      }
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override must look like section.key=value: " + o);
    }
    apply(c, boost::algorithm::trim_copy(o.substr(0, dot)),
          boost::algorithm::trim_copy(o.substr(dot + 1, eq - dot - 1)), o.substr(eq + 1));
  }
  return c;
}

}  // namespace dpotts::cli
