#pragma once

#include <cstdint>
#include <string_view>

namespace ipc {

// Every random quantity in this project is drawn from xoshiro256++ seeded
// through splitmix64, with an independent substream per named quantity.
// The generator, the seeding chain, and the uniform-double mapping are all
// fixed here so that generated problems are bit-reproducible across
// platforms and across language ports.

// Advances `state` by the splitmix64 increment and returns the mixed output.
std::uint64_t splitmix64_next(std::uint64_t& state);

// FNV-1a over the bytes of `tag`.
std::uint64_t fnv1a64(std::string_view tag);

// Seed of the substream named `tag`. Substreams for distinct tags are
// mutually independent and independent of draw order, so adding a new
// random quantity to a generator never perturbs the existing ones.
std::uint64_t sub_seed(std::uint64_t master_seed, std::string_view tag);

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed);

  std::uint64_t next();

  // Uniform double in [a, b): top 53 bits of next() scaled by 2^-53.
  double uniform(double a, double b);

 private:
  std::uint64_t s_[4];
};

}  // namespace ipc
