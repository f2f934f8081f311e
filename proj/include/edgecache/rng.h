#ifndef EDGECACHE_RNG_H_
#define EDGECACHE_RNG_H_

#include <cstdint>
#include <initializer_list>

namespace edgecache {

// SplitMix64 finalizer; used to derive independent sub-stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Derives a sub-stream seed from a root seed and a list of stream keys.
// Keys are folded in order, so (root, {a, b}) and (root, {b, a}) differ.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> keys);

// Stream tags for derive_seed. Adding new tags must not renumber old ones.
enum class StreamTag : std::uint64_t {
  kRequest = 1,
  kPolicy = 2,
  kBroadcast = 3,
  kReplication = 4,
  kEstimation = 5,
};

// xoshiro256** with explicit state. Small enough to keep one per
// (user, item) renewal process.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t next();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Exponential with the given rate; rate must be positive.
  double exponential(double rate);

 private:
  std::uint64_t s_[4];
};

}  // namespace edgecache

#endif  // EDGECACHE_RNG_H_
