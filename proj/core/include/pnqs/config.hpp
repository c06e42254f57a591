#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pnqs/trainer.hpp"

namespace pnqs {

// Flat key=value config.  '#' starts a comment, keys are dotted lowercase
// paths, unknown keys are rejected at parse time so typos fail loudly.
struct ConfigMap {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  // Typed getters; the default is returned when the key is absent.
  int get_int(const std::string& key, int fallback) const;
  std::int64_t get_int64(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  double get_real(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
};

ConfigMap parse_config(std::istream& is, const std::string& origin);
ConfigMap parse_config_file(const std::string& path);
ConfigMap parse_config_text(const std::string& text);

// Training/evaluation settings.  Requires lattice.L; everything else has the
// defaults documented in TrainingConfig.
TrainingConfig training_config_from(const ConfigMap& cfg);

struct RunOptions {
  std::uint64_t seed = 1;
  std::string out_dir;
};
RunOptions run_options_from(const ConfigMap& cfg);

struct PartitionOptions {
  int parts = 2;
  std::vector<int> taus = {1, 2, 5, 10, 20};
  std::int64_t n_samples = 20000;
  int burn_in = 2000;
};
PartitionOptions partition_options_from(const ConfigMap& cfg);

struct OracleOptions {
  int extra_n = 0;  // 0: builtin cases only
  double extra_j = 1.0;
  double extra_gamma = 0.0;
};
OracleOptions oracle_options_from(const ConfigMap& cfg);

}  // namespace pnqs
