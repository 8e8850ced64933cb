// Seed derivation. Every random stream is keyed by (root seed, counters), so
// no component ever touches global RNG state.

#ifndef SPMTL_RNG_HPP_
#define SPMTL_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace spmtl {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root,
                                 std::initializer_list<std::uint64_t> counters) {
  std::uint64_t h = splitmix64(root);
  for (std::uint64_t c : counters) h = splitmix64(h ^ splitmix64(c + 0x632BE59BD9B4E019ULL));
  return h;
}

// Stream purposes, used as the first counter.
enum class Stream : std::uint64_t {
  kData = 1,
  kSplit = 2,
  kCrossValidation = 3,
  kInit = 4,
  kFold = 5,
};

inline Rng make_rng(std::uint64_t root, Stream purpose, std::uint64_t a = 0,
                    std::uint64_t b = 0) {
  return Rng(derive_seed(root, {static_cast<std::uint64_t>(purpose), a, b}));
}

}  // namespace spmtl

#endif  // SPMTL_RNG_HPP_
