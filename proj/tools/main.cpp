// Command-line front end: wires config files to the training, evaluation,
// sampling, partition and reference-data machinery.  All file output goes
// into the run's --out directory.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "pnqs/checkpoint.hpp"
#include "pnqs/config.hpp"
#include "pnqs/errors.hpp"
#include "pnqs/exact.hpp"
#include "pnqs/model.hpp"
#include "pnqs/partition.hpp"
#include "pnqs/sampler.hpp"
#include "pnqs/trainer.hpp"
#include "pnqs/version.hpp"

namespace fs = std::filesystem;
using namespace pnqs;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Normalized dump: sorted "key = value" lines.  Reparsing it reproduces the
// run, so the copy written next to the outputs is self-describing.
std::string dump_config(const ConfigMap& cfg) {
  std::string text;
  for (const auto& [key, value] : cfg.values) text += key + " = " + value + "\n";
  return text;
}

ConfigMap load_with_overrides(const std::string& path, std::uint64_t* seed,
                              const std::string* out_dir) {
  ConfigMap cfg = parse_config_file(path);
  if (seed) cfg.values["run.seed"] = std::to_string(*seed);
  if (out_dir && !out_dir->empty()) cfg.values["run.out_dir"] = *out_dir;
  return cfg;
}

fs::path require_out_dir(const RunOptions& run) {
  if (run.out_dir.empty())
    throw config_error("missing output directory: set run.out_dir or pass --out");
  fs::create_directories(run.out_dir);
  return fs::path(run.out_dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw config_error("cannot write '" + path.string() + "'");
  os << text;
}

void write_manifest(const fs::path& dir, const ConfigMap& cfg, std::uint64_t seed) {
  const std::string dump = dump_config(cfg);
  write_text(dir / "config.cfg", dump);
  char line[128];
  std::string manifest = "version=" + std::string(kVersion) + "\n";
  std::snprintf(line, sizeof(line), "seed=%" PRIu64 "\n", seed);
  manifest += line;
  std::snprintf(line, sizeof(line), "config_hash=%016" PRIx64 "\n", fnv1a(dump));
  manifest += line;
  write_text(dir / "manifest.txt", manifest);
}

// Loads model parameters: from a checkpoint when given, otherwise a fresh
// seeded initialization for the configured topology.
std::pair<Topology, ModelParameters> load_model(const TrainingConfig& tc,
                                                const std::string& ckpt) {
  if (ckpt.empty()) {
    Topology topo = build_topology(tc.arch, tc.L, tc.k1, tc.k2);
    ModelParameters params =
        init_params(topo, make_stream(tc.seed, streams::kParamInit, 0));
    return {std::move(topo), std::move(params)};
  }
  Checkpoint ck = load_checkpoint(ckpt);
  Topology topo = build_topology(ck.arch, ck.L, ck.k1, ck.k2);
  const ParamLayout lay = ParamLayout::from(topo);
  if (to_flat(ck.params).size() != lay.total)
    throw config_error("checkpoint '" + ckpt + "': parameter arrays do not match topology");
  return {std::move(topo), std::move(ck.params)};
}

int cmd_train(const std::string& config_path, std::uint64_t* seed,
              const std::string& out_override) {
  ConfigMap cfg = load_with_overrides(config_path, seed, &out_override);
  TrainingConfig tc = training_config_from(cfg);
  const RunOptions run = run_options_from(cfg);
  const fs::path dir = require_out_dir(run);
  write_manifest(dir, cfg, tc.seed);

  std::ofstream metrics(dir / "metrics.csv", std::ios::binary | std::ios::trunc);
  if (!metrics) throw config_error("cannot write metrics.csv");
  write_metrics_header(metrics);
  const MetricsSink sink = [&](const IterationMetrics& m) {
    write_metrics_row(metrics, m);
    metrics.flush();
  };

  TrainResult result = train(tc, sink);
  save_checkpoint((dir / "final.ckpt").string(), result.topo, result.params, tc.seed);

  const IterationMetrics& last = result.history.back();
  std::printf("final E/N = %.10f +/- %.10f after %d iterations\n",
              last.energy_per_spin, last.std_err, last.iter);
  return 0;
}

int cmd_evaluate(const std::string& config_path, const std::string& ckpt_path,
                 std::uint64_t* seed) {
  ConfigMap cfg = load_with_overrides(config_path, seed, nullptr);
  TrainingConfig tc = training_config_from(cfg);
  auto [topo, params] = load_model(tc, ckpt_path);
  // The checkpoint owns the model shape; the config supplies the physics
  // and measurement budgets.
  tc.arch = topo.arch;
  tc.L = topo.L;
  tc.k1 = topo.k1;
  tc.k2 = topo.k2;
  const EvalResult ev = evaluate(tc, topo, params);
  std::printf("E/N = %.10f +/- %.10f  (samples = %zu)\n", ev.energy_per_spin,
              ev.std_err, ev.n_samples);
  return 0;
}

int cmd_sample(const std::string& config_path, const std::string& ckpt_path,
               std::uint64_t* seed, const std::string& out_override) {
  ConfigMap cfg = load_with_overrides(config_path, seed, &out_override);
  TrainingConfig tc = training_config_from(cfg);
  const RunOptions run = run_options_from(cfg);
  const fs::path dir = require_out_dir(run);
  write_manifest(dir, cfg, tc.seed);

  auto [topo, params] = load_model(tc, ckpt_path);
  const ModelParameters sampler_params =
      tc.quantize_sampler ? quantize(params, tc.fmt) : params;
  const PbitNetwork net(topo, make_sampler_weights(topo, sampler_params), tc.beta);
  const SampleBatch batch =
      sample_visible(net, topo.n_visible, tc.n_samples, tc.effective_burn_in(),
                     tc.sweeps_per_sample, make_stream(tc.seed, streams::kEvalChain, 0));

  std::ofstream os(dir / "samples.txt", std::ios::binary | std::ios::trunc);
  if (!os) throw config_error("cannot write samples.txt");
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto v = batch.visible(s);
    for (std::size_t i = 0; i < v.size(); ++i)
      os << (i ? " " : "") << static_cast<int>(v[i]);
    os << "\n";
  }
  std::printf("wrote %zu samples of %d spins\n", batch.size(), topo.n_visible);
  return 0;
}

int cmd_oracle(const std::string& config_path, const std::string& out_override) {
  ConfigMap cfg = load_with_overrides(config_path, nullptr, &out_override);
  const OracleOptions oo = oracle_options_from(cfg);
  const RunOptions run = run_options_from(cfg);
  const fs::path dir = require_out_dir(run);

  const auto cases = golden_cases(oo.extra_n, oo.extra_j, oo.extra_gamma);
  std::ofstream os(dir / "golden_ed.csv", std::ios::binary | std::ios::trunc);
  if (!os) throw config_error("cannot write golden_ed.csv");
  write_golden_csv(cases, os);
  std::printf("wrote %zu reference energies\n", cases.size());
  return 0;
}

int cmd_param_count(const std::string& arch_name, int L, double k1, double k2) {
  Arch arch;
  if (arch_name == "rbm" || arch_name == "frbm")
    arch = Arch::frbm;
  else if (arch_name == "dbm")
    arch = Arch::dbm;
  else
    throw config_error("unknown architecture '" + arch_name + "' (rbm or dbm)");
  if (arch == Arch::dbm && k2 <= 0.0)
    throw config_error("dbm parameter count needs k2 > 0");
  std::printf("%lld\n", param_count(arch, L, k1, k2));
  return 0;
}

int cmd_partition_scan(const std::string& config_path, const std::string& ckpt_path,
                       std::uint64_t* seed, const std::string& out_override) {
  ConfigMap cfg = load_with_overrides(config_path, seed, &out_override);
  TrainingConfig tc = training_config_from(cfg);
  const PartitionOptions po = partition_options_from(cfg);
  const RunOptions run = run_options_from(cfg);
  const fs::path dir = require_out_dir(run);
  write_manifest(dir, cfg, tc.seed);

  auto [topo, params] = load_model(tc, ckpt_path);
  if (topo.arch != Arch::frbm)
    throw config_error("partition-scan works on single-hidden-layer models");

  const GraphPartition split = partition_graph(topo.graph, po.parts, tc.seed);
  StalenessScanOptions so;
  so.taus = po.taus;
  so.n_samples = static_cast<std::size_t>(po.n_samples);
  so.burn_in = po.burn_in;
  so.sweeps_per_sample = tc.sweeps_per_sample;
  so.J = tc.J;
  so.gamma_x = tc.gamma_x;
  so.beta = tc.beta;
  so.blocking_bins = tc.blocking_bins;
  so.seed = tc.seed;
  const auto rows = staleness_energy_scan(topo, params, po.parts, so);

  std::ofstream os(dir / "scan.csv", std::ios::binary | std::ios::trunc);
  if (!os) throw config_error("cannot write scan.csv");
  os << "tau,energy_per_spin,std_err,deviation\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%d,%.12g,%.12g,%.12g\n", r.tau,
                  r.energy_per_spin, r.std_err, r.deviation);
    os << line;
  }
  std::ofstream ps(dir / "partition.txt", std::ios::binary | std::ios::trunc);
  if (!ps) throw config_error("cannot write partition.txt");
  for (std::size_t v = 0; v < split.part_of.size(); ++v)
    ps << v << ' ' << split.part_of[v] << '\n';

  std::uint64_t boundary = 0;
  for (const auto& b : split.boundary_nodes) boundary += b.size();
  std::printf("P = %d  cut fraction = %.4f  boundary spins per exchange = %" PRIu64 "\n",
              split.parts, split.cut_fraction, boundary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Neural quantum state optimizer on an emulated p-bit sampler"};
  app.require_subcommand(1);

  std::string config_path, ckpt_path, out_dir, arch_name;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int L = 0;
  double k1 = 0.0, k2 = 0.0;

  const auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", seed, "Override run.seed")->each([&](const std::string&) {
      seed_given = true;
    });
  };

  auto* train_cmd = app.add_subcommand("train", "Optimize a model from a config");
  train_cmd->add_option("--config", config_path, "Config file")->required();
  train_cmd->add_option("--out", out_dir, "Output directory");
  add_seed(train_cmd);

  auto* eval_cmd = app.add_subcommand("evaluate", "Energy of a checkpointed model");
  eval_cmd->add_option("--config", config_path, "Config file")->required();
  eval_cmd->add_option("--checkpoint", ckpt_path, "Checkpoint file")->required();
  add_seed(eval_cmd);

  auto* sample_cmd = app.add_subcommand("sample", "Draw visible configurations");
  sample_cmd->add_option("--config", config_path, "Config file")->required();
  sample_cmd->add_option("--checkpoint", ckpt_path, "Checkpoint file");
  sample_cmd->add_option("--out", out_dir, "Output directory");
  add_seed(sample_cmd);

  auto* oracle_cmd = app.add_subcommand("oracle", "Regenerate reference energies");
  oracle_cmd->add_option("--config", config_path, "Config file")->required();
  oracle_cmd->add_option("--out", out_dir, "Output directory");

  auto* pc_cmd = app.add_subcommand("param-count", "Print the trainable parameter count");
  pc_cmd->add_option("arch", arch_name, "rbm or dbm")->required();
  pc_cmd->add_option("L", L, "Lattice side")->required();
  pc_cmd->add_option("k1", k1, "Visible-hidden mask radius")->required();
  pc_cmd->add_option("k2", k2, "Hidden-deep mask radius (dbm)");

  auto* scan_cmd = app.add_subcommand("partition-scan", "Staleness sweep of a partitioned sampler");
  scan_cmd->add_option("--config", config_path, "Config file")->required();
  scan_cmd->add_option("--checkpoint", ckpt_path, "Checkpoint file");
  scan_cmd->add_option("--out", out_dir, "Output directory");
  add_seed(scan_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::uint64_t* seed_ptr = seed_given ? &seed : nullptr;
  try {
    if (*train_cmd) return cmd_train(config_path, seed_ptr, out_dir);
    if (*eval_cmd) return cmd_evaluate(config_path, ckpt_path, seed_ptr);
    if (*sample_cmd) return cmd_sample(config_path, ckpt_path, seed_ptr, out_dir);
    if (*oracle_cmd) return cmd_oracle(config_path, out_dir);
    if (*pc_cmd) return cmd_param_count(arch_name, L, k1, k2);
    if (*scan_cmd) return cmd_partition_scan(config_path, ckpt_path, seed_ptr, out_dir);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const numerical_error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
