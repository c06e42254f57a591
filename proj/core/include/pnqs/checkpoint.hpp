#pragma once

#include <cstdint>
#include <string>

#include "pnqs/model.hpp"

namespace pnqs {

// Versioned binary parameter snapshot.  Doubles are stored verbatim
// (native little-endian IEEE754), so save -> load round-trips bit-exactly.
struct Checkpoint {
  Arch arch = Arch::frbm;
  int L = 0;
  double k1 = 0.0;
  double k2 = 0.0;
  std::uint64_t seed = 0;
  ModelParameters params;
};

void save_checkpoint(const std::string& path, const Topology& topo,
                     const ModelParameters& params, std::uint64_t seed);

Checkpoint load_checkpoint(const std::string& path);

}  // namespace pnqs
