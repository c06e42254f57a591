#include "pnqs/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "pnqs/errors.hpp"

namespace pnqs {
namespace {

// Every key the engine understands, across all subcommands.  One config file
// can drive several of them, so validation is global.
const char* const kKnownKeys[] = {
    "lattice.L",
    "model.arch",
    "model.k1",
    "model.k2",
    "hamiltonian.J",
    "hamiltonian.gamma_x",
    "sampling.ns",
    "sampling.nc",
    "sampling.n_eval",
    "sampling.burn_in",
    "sampling.sweeps_per_sample",
    "sampling.beta",
    "optimizer.n_iter",
    "optimizer.profile",
    "optimizer.eta_max",
    "optimizer.eta_min",
    "optimizer.lambda0",
    "optimizer.b0",
    "optimizer.lambda_min",
    "optimizer.cg_tol",
    "optimizer.cg_max_iter",
    "quantization.enabled",
    "quantization.quantize_fields",
    "evaluation.bins",
    "run.seed",
    "run.out_dir",
    "partition.P",
    "partition.tau",
    "partition.sweeps",
    "partition.burn_in",
    "oracle.n",
    "oracle.J",
    "oracle.gamma",
};

bool known_key(const std::string& key) {
  for (const char* k : kKnownKeys)
    if (key == k) return true;
  return false;
}

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw config_error("config key '" + key + "': expected " + expected +
                     ", got '" + value + "'");
}

std::int64_t parse_int64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(value.c_str(), &end, 10);
  if (errno != 0 || end == value.c_str() || *end != '\0')
    bad_value(key, value, "an integer");
  return v;
}

double parse_real(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  double v = std::strtod(value.c_str(), &end);
  if (errno != 0 || end == value.c_str() || *end != '\0')
    bad_value(key, value, "a number");
  return v;
}

}  // namespace

int ConfigMap::get_int(const std::string& key, int fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  auto v = parse_int64(key, it->second);
  if (v < INT32_MIN || v > INT32_MAX) bad_value(key, it->second, "a 32-bit integer");
  return static_cast<int>(v);
}

std::int64_t ConfigMap::get_int64(const std::string& key, std::int64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_int64(key, it->second);
}

std::uint64_t ConfigMap::get_uint64(const std::string& key, std::uint64_t fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  errno = 0;
  char* end = nullptr;
  unsigned long long v = std::strtoull(it->second.c_str(), &end, 10);
  if (errno != 0 || end == it->second.c_str() || *end != '\0' ||
      it->second.find('-') != std::string::npos)
    bad_value(key, it->second, "an unsigned integer");
  return v;
}

double ConfigMap::get_real(const std::string& key, double fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  return parse_real(key, it->second);
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, it->second, "a boolean");
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

ConfigMap parse_config(std::istream& is, const std::string& origin) {
  ConfigMap cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(origin + ":" + std::to_string(lineno) +
                         ": expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw config_error(origin + ":" + std::to_string(lineno) + ": empty key");
    if (!known_key(key))
      throw config_error(origin + ":" + std::to_string(lineno) +
                         ": unknown key '" + key + "'");
    if (cfg.values.count(key))
      throw config_error(origin + ":" + std::to_string(lineno) +
                         ": duplicate key '" + key + "'");
    cfg.values[key] = value;
  }
  return cfg;
}

ConfigMap parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw config_error("config '" + path + "': cannot open");
  return parse_config(is, path);
}

ConfigMap parse_config_text(const std::string& text) {
  std::istringstream is(text);
  return parse_config(is, "<inline>");
}

TrainingConfig training_config_from(const ConfigMap& cfg) {
  TrainingConfig tc;
  if (!cfg.has("lattice.L"))
    throw config_error("missing required key 'lattice.L'");
  tc.L = cfg.get_int("lattice.L", 0);
  if (tc.L < 3) throw config_error("config key 'lattice.L': must be >= 3");

  std::string arch = cfg.get_string("model.arch", "frbm");
  if (arch == "frbm")
    tc.arch = Arch::frbm;
  else if (arch == "dbm")
    tc.arch = Arch::dbm;
  else
    throw config_error("config key 'model.arch': expected frbm or dbm, got '" +
                       arch + "'");

  tc.k1 = cfg.get_real("model.k1", tc.arch == Arch::dbm ? 1.0 : 2.0);
  tc.k2 = cfg.get_real("model.k2", 1.0);
  if (tc.k1 <= 0) throw config_error("config key 'model.k1': must be > 0");
  if (tc.arch == Arch::dbm && tc.k2 <= 0)
    throw config_error("config key 'model.k2': must be > 0");

  tc.J = cfg.get_real("hamiltonian.J", 1.0);
  tc.gamma_x = cfg.get_real("hamiltonian.gamma_x", 3.044);

  tc.n_samples = static_cast<std::size_t>(cfg.get_int64("sampling.ns", 10000));
  tc.n_inner = static_cast<std::size_t>(cfg.get_int64("sampling.nc", 1000));
  tc.n_eval = static_cast<std::size_t>(cfg.get_int64("sampling.n_eval", 1000000));
  tc.burn_in = cfg.get_int("sampling.burn_in", -1);
  tc.sweeps_per_sample = cfg.get_int("sampling.sweeps_per_sample", 1);
  tc.beta = cfg.get_real("sampling.beta", 1.0);
  if (tc.n_samples < 2) throw config_error("config key 'sampling.ns': must be >= 2");
  if (tc.n_inner < 1) throw config_error("config key 'sampling.nc': must be >= 1");
  if (tc.sweeps_per_sample < 1)
    throw config_error("config key 'sampling.sweeps_per_sample': must be >= 1");

  tc.sched.n_iter = cfg.get_int("optimizer.n_iter", 1000);
  if (tc.sched.n_iter < 1)
    throw config_error("config key 'optimizer.n_iter': must be >= 1");
  std::string profile = cfg.get_string("optimizer.profile", "algorithmic");
  if (profile == "algorithmic") {
    tc.sched.eta_max = 0.1;
    tc.sched.eta_min = 1e-5;
  } else if (profile == "hardware") {
    tc.sched.eta_max = 0.05;
    tc.sched.eta_min = 0.01;
  } else {
    throw config_error(
        "config key 'optimizer.profile': expected algorithmic or hardware, got '" +
        profile + "'");
  }
  tc.sched.eta_max = cfg.get_real("optimizer.eta_max", tc.sched.eta_max);
  tc.sched.eta_min = cfg.get_real("optimizer.eta_min", tc.sched.eta_min);
  tc.sched.lambda0 = cfg.get_real("optimizer.lambda0", tc.sched.lambda0);
  tc.sched.b0 = cfg.get_real("optimizer.b0", tc.sched.b0);
  tc.sched.lambda_min = cfg.get_real("optimizer.lambda_min", tc.sched.lambda_min);
  tc.sched.cg_tol = cfg.get_real("optimizer.cg_tol", tc.sched.cg_tol);
  tc.sched.cg_max_iter = cfg.get_int("optimizer.cg_max_iter", tc.sched.cg_max_iter);

  tc.quantize_sampler = cfg.get_bool("quantization.enabled", false);
  tc.quantize_fields = cfg.get_bool("quantization.quantize_fields", false);
  tc.blocking_bins = cfg.get_int("evaluation.bins", 50);
  tc.seed = cfg.get_uint64("run.seed", 1);
  return tc;
}

RunOptions run_options_from(const ConfigMap& cfg) {
  RunOptions opt;
  opt.seed = cfg.get_uint64("run.seed", 1);
  opt.out_dir = cfg.get_string("run.out_dir", "");
  return opt;
}

PartitionOptions partition_options_from(const ConfigMap& cfg) {
  PartitionOptions opt;
  opt.parts = cfg.get_int("partition.P", 2);
  if (opt.parts < 1) throw config_error("config key 'partition.P': must be >= 1");
  opt.n_samples = cfg.get_int64("partition.sweeps", opt.n_samples);
  if (opt.n_samples < 2)
    throw config_error("config key 'partition.sweeps': must be >= 2");
  opt.burn_in = cfg.get_int("partition.burn_in", opt.burn_in);
  if (cfg.has("partition.tau")) {
    opt.taus.clear();
    std::stringstream ss(cfg.get_string("partition.tau", ""));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      auto tau = parse_int64("partition.tau", item);
      if (tau < 1) throw config_error("config key 'partition.tau': entries must be >= 1");
      opt.taus.push_back(static_cast<int>(tau));
    }
    if (opt.taus.empty())
      throw config_error("config key 'partition.tau': expected a comma list of integers");
  }
  return opt;
}

OracleOptions oracle_options_from(const ConfigMap& cfg) {
  OracleOptions opt;
  opt.extra_n = cfg.get_int("oracle.n", 0);
  opt.extra_j = cfg.get_real("oracle.J", 1.0);
  opt.extra_gamma = cfg.get_real("oracle.gamma", 0.0);
  return opt;
}

}  // namespace pnqs
