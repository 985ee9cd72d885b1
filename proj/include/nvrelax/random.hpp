#pragma once

#include <cstdint>
#include <string_view>

namespace nvrelax {

// Deterministic random streams. Every stochastic operation in the toolkit
// draws from a stream derived from (master seed, task label, index), so
// outputs are a pure function of the seed and independent of worker count
// and platform. std::random distributions are implementation-defined and
// are deliberately not used anywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  // SplitMix64 step.
  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos();

  // Standard normal via Box-Muller (cosine branch, two uniforms per draw).
  double gaussian();

  // Poisson with arbitrary mean. Exact: large means are split into
  // sub-Poisson chunks small enough for Knuth's product method.
  std::uint64_t poisson(double mean);

 private:
  std::uint64_t state_;
};

// 64-bit FNV-1a hash of a task label.
std::uint64_t hash_label(std::string_view label);

// Substream seed for work unit `index` of the task named `label`.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index);

}  // namespace nvrelax
