#include "pnqs/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "pnqs/errors.hpp"

namespace pnqs {
namespace {

constexpr char kMagic[8] = {'P', 'N', 'Q', 'S', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, T value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T take(std::istream& is, const std::string& path) {
  T value{};
  is.read(reinterpret_cast<char*>(&value), sizeof(value));
  if (!is) throw config_error("checkpoint '" + path + "': truncated file");
  return value;
}

void put_array(std::ostream& os, const std::vector<double>& v) {
  put<std::uint64_t>(os, v.size());
  if (!v.empty())
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> take_array(std::istream& is, const std::string& path) {
  auto n = take<std::uint64_t>(is, path);
  if (n > (1ull << 32))
    throw config_error("checkpoint '" + path + "': implausible array length");
  std::vector<double> v(n);
  if (n > 0) {
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!is) throw config_error("checkpoint '" + path + "': truncated file");
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const Topology& topo,
                     const ModelParameters& params, std::uint64_t seed) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw config_error("checkpoint '" + path + "': cannot open for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, kVersion);
  put<std::uint8_t>(os, params.arch == Arch::dbm ? 1 : 0);
  put<std::int32_t>(os, topo.L);
  put<double>(os, topo.k1);
  put<double>(os, topo.k2);
  put<std::uint64_t>(os, seed);
  put_array(os, params.visible_bias);
  put_array(os, params.hidden_bias);
  put_array(os, params.deep_bias);
  put_array(os, params.vh_weights);
  put_array(os, params.hd_weights);
  os.flush();
  if (!os) throw config_error("checkpoint '" + path + "': write failed");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw config_error("checkpoint '" + path + "': cannot open");
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw config_error("checkpoint '" + path + "': not a checkpoint file");
  auto version = take<std::uint32_t>(is, path);
  if (version != kVersion)
    throw config_error("checkpoint '" + path + "': unsupported version " +
                       std::to_string(version));
  Checkpoint ck;
  ck.arch = take<std::uint8_t>(is, path) == 1 ? Arch::dbm : Arch::frbm;
  ck.L = take<std::int32_t>(is, path);
  ck.k1 = take<double>(is, path);
  ck.k2 = take<double>(is, path);
  ck.seed = take<std::uint64_t>(is, path);
  ck.params.arch = ck.arch;
  ck.params.visible_bias = take_array(is, path);
  ck.params.hidden_bias = take_array(is, path);
  ck.params.deep_bias = take_array(is, path);
  ck.params.vh_weights = take_array(is, path);
  ck.params.hd_weights = take_array(is, path);
  return ck;
}

}  // namespace pnqs
