#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace pnqs {

// splitmix64 step, used only to expand a user seed into xoshiro state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ (Blackman & Vigna).  jump() advances the stream by 2^128
// steps and long_jump() by 2^192, so substreams carved out by either can
// never overlap in any run we could perform.
class Xoshiro256pp {
 public:
  Xoshiro256pp() : Xoshiro256pp(0) {}

  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) word = splitmix64(x);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [-1, 1), the comparator noise of a p-bit update.
  double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

  // Standard normal via Box-Muller.  Stateless (no cached second value) so
  // a stream's draw sequence stays a pure function of its position.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(6.283185307179586476925286766559 * u2);
  }

  void jump() { apply_jump(kJump); }
  void long_jump() { apply_jump(kLongJump); }

  const std::array<std::uint64_t, 4>& state() const { return state_; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  void apply_jump(const std::array<std::uint64_t, 4>& table) {
    std::array<std::uint64_t, 4> acc{0, 0, 0, 0};
    for (std::uint64_t word : table) {
      for (int bit = 0; bit < 64; ++bit) {
        if (word & (1ULL << bit)) {
          for (int i = 0; i < 4; ++i) acc[i] ^= state_[i];
        }
        next();
      }
    }
    state_ = acc;
  }

  static constexpr std::array<std::uint64_t, 4> kJump = {
      0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL,
      0x39abdc4529b1661cULL};
  static constexpr std::array<std::uint64_t, 4> kLongJump = {
      0x76e15d3efefdcbbfULL, 0xc5004e441c522fb3ULL, 0x77710069854ee241ULL,
      0x39109bb02acbe635ULL};

  std::array<std::uint64_t, 4> state_;
};

// Stream layout used across the code base: every consumer of randomness
// gets make_stream(seed, region, index).  Regions are separated by
// long_jump, streams within a region by jump, so all streams derived from
// one master seed are pairwise non-overlapping.
inline Xoshiro256pp make_stream(std::uint64_t seed, std::uint64_t region,
                                std::uint64_t index) {
  Xoshiro256pp rng(seed);
  for (std::uint64_t r = 0; r < region; ++r) rng.long_jump();
  for (std::uint64_t i = 0; i < index; ++i) rng.jump();
  return rng;
}

// Region assignments for one training/evaluation run.
namespace streams {
constexpr std::uint64_t kParamInit = 0;   // parameter initialisation
constexpr std::uint64_t kOuterChain = 1;  // free-running training chain
constexpr std::uint64_t kEvalChain = 2;   // evaluation chain
constexpr std::uint64_t kPartition = 3;   // cluster simulator, index = part id
constexpr std::uint64_t kEvalInner = 4;   // clamped chains during evaluation
constexpr std::uint64_t kScratch = 5;     // tests and one-off utilities
// Clamped chains of training iteration t live in region kIterBase + t,
// index = sample number within the batch.
constexpr std::uint64_t kIterBase = 8;
}  // namespace streams

}  // namespace pnqs
