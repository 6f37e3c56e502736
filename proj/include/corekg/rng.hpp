#pragma once

#include <cstdint>
#include <random>

namespace corekg {

// splitmix64 finalizer. Bijective on 64-bit words; conditions raw seeds and
// derives substream seeds.
std::uint64_t mix64(std::uint64_t x);

// Every run of the pipeline derives one substream per (purpose, index) pair
// from the master seed. Streams are independent of how many other streams
// exist, so adding a user or a method never perturbs earlier draws.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t purpose, std::uint64_t index = 0);

// Named stream purposes. Values are part of the reproducibility contract:
// changing them changes every artifact byte.
enum : std::uint64_t {
  kStreamSplit = 1,
  kStreamProfile = 2,
  kStreamSample = 3,
  kStreamSynthetic = 4,
};

// mt19937_64 with canonical 53-bit doubles. The engine's output sequence is
// fixed by the standard, and the double construction below avoids
// std::uniform_real_distribution (whose mapping is implementation-defined),
// so identical seeds give identical streams on any conforming platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0,1), 53 significant bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0,n), unbiased via rejection. n must be nonzero.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 gen_;
};

}  // namespace corekg
