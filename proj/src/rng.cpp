#include "corekg/rng.hpp"

#include "corekg/errors.hpp"

namespace corekg {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t purpose,
                             std::uint64_t index) {
  return mix64(mix64(master ^ mix64(purpose)) ^ mix64(index));
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("Rng::below(0)");
  // Reject the short final cycle so every residue is equally likely.
  std::uint64_t threshold = (0ull - n) % n;  // 2^64 mod n
  for (;;) {
    std::uint64_t x = next_u64();
    if (x >= threshold) return x % n;
  }
}

}  // namespace corekg
