#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

std::string binary() {
  const char* bin = std::getenv("PNQS_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "PNQS_BIN must point at the CLI binary");
  return bin;
}

std::string data_dir() {
  const char* dir = std::getenv("PNQS_DATA");
  REQUIRE_MESSAGE(dir != nullptr, "PNQS_DATA must point at the fixture directory");
  return dir;
}

RunResult run(const std::string& args) {
  const std::string cmd = binary() + " " + args + " 2>&1";
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult res;
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) res.output += buf.data();
  const int status = ::pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pnqs_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE_MESSAGE(is.good(), "cannot open ", path.string());
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  os << text;
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

// Timing column is the only legitimately nondeterministic field.
std::string strip_last_column(const std::string& csv) {
  std::string out;
  std::istringstream is(csv);
  std::string line;
  while (std::getline(is, line)) {
    const auto comma = line.rfind(',');
    out += line.substr(0, comma);
    out += '\n';
  }
  return out;
}

const char* kTinyTrain =
    "lattice.L = 3\n"
    "model.arch = frbm\n"
    "model.k1 = 1\n"
    "sampling.ns = 60\n"
    "sampling.burn_in = 20\n"
    "sampling.n_eval = 2000\n"
    "optimizer.n_iter = 3\n"
    "optimizer.cg_max_iter = 40\n"
    "run.seed = 5\n";

}  // namespace

TEST_CASE("parameter counts for the reference geometries") {
  CHECK(run("param-count rbm 10 1").output == "700\n");
  CHECK(run("param-count rbm 10 2").output == "1500\n");
  CHECK(run("param-count rbm 10 3").output == "3100\n");
  CHECK(run("param-count dbm 10 1 1").output == "1300\n");
  CHECK(run("param-count dbm 10 2 1").output == "2100\n");
  CHECK(run("param-count dbm 10 2 2").output == "2900\n");
  CHECK(run("param-count dbm 35 2 2").output == "35525\n");
  CHECK(run("param-count dbm 10 1").exit_code == 2);     // k2 missing
  CHECK(run("param-count ising 10 1").exit_code == 2);   // unknown arch
}

TEST_CASE("bare invocations ask for a subcommand") {
  CHECK(run("").exit_code == 2);
  CHECK(run("train").exit_code == 2);            // --config required
  CHECK(run("frobnicate").exit_code == 2);
  CHECK(run("--help").exit_code == 0);
}

TEST_CASE("training runs are reproducible end to end") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "train.cfg";
  write_file(cfg, kTinyTrain);

  const RunResult first =
      run("train --config " + cfg.string() + " --out " + (tmp.path / "run1").string());
  CHECK(first.exit_code == 0);
  CHECK(first.output.find("final E/N = ") != std::string::npos);
  CHECK(first.output.find("after 3 iterations") != std::string::npos);

  const std::string metrics = slurp(tmp.path / "run1" / "metrics.csv");
  CHECK(count_lines(metrics) == 4);  // header + one row per iteration
  CHECK(metrics.rfind("iter,energy_per_spin,std_err,lr,lambda,cg_iters,cg_flag,wall_ms\n",
                      0) == 0);

  const std::string manifest = slurp(tmp.path / "run1" / "manifest.txt");
  CHECK(manifest.find("version=") != std::string::npos);
  CHECK(manifest.find("seed=5") != std::string::npos);
  CHECK(manifest.find("config_hash=") != std::string::npos);

  // The normalized config copy reparses to the same run.
  const std::string copy = slurp(tmp.path / "run1" / "config.cfg");
  CHECK(copy.find("lattice.L = 3\n") != std::string::npos);

  const RunResult second =
      run("train --config " + cfg.string() + " --out " + (tmp.path / "run2").string());
  CHECK(second.exit_code == 0);
  CHECK(strip_last_column(slurp(tmp.path / "run2" / "metrics.csv")) ==
        strip_last_column(metrics));
  CHECK(slurp(tmp.path / "run2" / "final.ckpt") == slurp(tmp.path / "run1" / "final.ckpt"));

  // A different seed changes the trajectory.
  const RunResult third = run("train --config " + cfg.string() + " --out " +
                              (tmp.path / "run3").string() + " --seed 6");
  CHECK(third.exit_code == 0);
  CHECK(strip_last_column(slurp(tmp.path / "run3" / "metrics.csv")) !=
        strip_last_column(metrics));
  CHECK(slurp(tmp.path / "run3" / "manifest.txt").find("seed=6") != std::string::npos);
}

TEST_CASE("evaluate and sample consume a trained checkpoint") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "train.cfg";
  write_file(cfg, kTinyTrain);
  REQUIRE(run("train --config " + cfg.string() + " --out " + (tmp.path / "run").string())
              .exit_code == 0);
  const std::string ckpt = (tmp.path / "run" / "final.ckpt").string();

  const RunResult ev = run("evaluate --config " + cfg.string() + " --checkpoint " + ckpt);
  CHECK(ev.exit_code == 0);
  CHECK(ev.output.find("E/N = -") != std::string::npos);
  CHECK(ev.output.find("samples = 2000") != std::string::npos);

  const RunResult sm = run("sample --config " + cfg.string() + " --checkpoint " + ckpt +
                           " --out " + (tmp.path / "draws").string());
  CHECK(sm.exit_code == 0);
  const std::string samples = slurp(tmp.path / "draws" / "samples.txt");
  CHECK(count_lines(samples) == 60);
  // Rows are nine +-1 entries.
  std::istringstream is(samples);
  std::string line;
  std::getline(is, line);
  std::istringstream row(line);
  int value, n = 0;
  while (row >> value) {
    CHECK((value == 1 || value == -1));
    ++n;
  }
  CHECK(n == 9);

  const RunResult missing =
      run("evaluate --config " + cfg.string() + " --checkpoint /nonexistent.ckpt");
  CHECK(missing.exit_code == 2);
  CHECK(missing.output.find("config error:") != std::string::npos);
}

TEST_CASE("config mistakes exit with status 2 and name the problem") {
  TempDir tmp;
  const fs::path incomplete = tmp.path / "incomplete.cfg";
  write_file(incomplete, "model.arch = frbm\n");
  const RunResult r1 = run("train --config " + incomplete.string() + " --out " +
                           (tmp.path / "x").string());
  CHECK(r1.exit_code == 2);
  CHECK(r1.output.find("lattice.L") != std::string::npos);

  const fs::path typo = tmp.path / "typo.cfg";
  write_file(typo, "lattice.L = 3\nmodel.archh = frbm\n");
  const RunResult r2 = run("train --config " + typo.string() + " --out " +
                           (tmp.path / "y").string());
  CHECK(r2.exit_code == 2);
  CHECK(r2.output.find("unknown key 'model.archh'") != std::string::npos);

  const fs::path noout = tmp.path / "noout.cfg";
  write_file(noout, "lattice.L = 3\n");
  const RunResult r3 = run("train --config " + noout.string());
  CHECK(r3.exit_code == 2);
  CHECK(r3.output.find("output directory") != std::string::npos);
}

TEST_CASE("reference energies match the committed fixture") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "oracle.cfg";
  write_file(cfg, "run.out_dir = " + (tmp.path / "ref").string() + "\n");
  const RunResult r = run("oracle --config " + cfg.string());
  CHECK(r.exit_code == 0);
  CHECK(slurp(tmp.path / "ref" / "golden_ed.csv") ==
        slurp(fs::path(data_dir()) / "golden_ed.csv"));

  const fs::path big = tmp.path / "big.cfg";
  write_file(big, "oracle.n = 30\n");
  CHECK(run("oracle --config " + big.string() + " --out " + (tmp.path / "z").string())
            .exit_code == 2);
}

TEST_CASE("partition scan writes one row per exchange interval plus baseline") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "scan.cfg";
  write_file(cfg,
             "lattice.L = 3\n"
             "model.arch = frbm\n"
             "model.k1 = 1\n"
             "partition.P = 2\n"
             "partition.tau = 1,5\n"
             "partition.sweeps = 1500\n"
             "partition.burn_in = 150\n"
             "run.seed = 11\n");
  const RunResult r =
      run("partition-scan --config " + cfg.string() + " --out " + (tmp.path / "scan").string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("P = 2") != std::string::npos);
  CHECK(r.output.find("cut fraction = ") != std::string::npos);

  const std::string csv = slurp(tmp.path / "scan" / "scan.csv");
  CHECK(count_lines(csv) == 4);  // header, baseline, tau=1, tau=5
  CHECK(csv.rfind("tau,energy_per_spin,std_err,deviation\n", 0) == 0);
  CHECK(csv.find("\n0,") != std::string::npos);

  // One "node part" row per network node (9 visible + 9 hidden here).
  const std::string dump = slurp(tmp.path / "scan" / "partition.txt");
  CHECK(count_lines(dump) == 18);
  CHECK(dump.rfind("0 ", 0) == 0);
  for (const char* row : {"\n1 ", "\n17 "}) CHECK(dump.find(row) != std::string::npos);
  for (char c : dump)
    if (c != ' ' && c != '\n') CHECK((c >= '0' && c <= '9'));
}
