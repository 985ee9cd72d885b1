#include "nvrelax/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nvrelax {

std::uint64_t Rng::next_u64() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::gaussian() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) throw std::domain_error("poisson: mean must be non-negative");
  if (mean == 0.0) return 0;
  // Split so each chunk mean stays <= 30; sum of independent Poissons is Poisson.
  const auto chunks = static_cast<std::uint64_t>(mean / 30.0) + 1;
  const double chunk_mean = mean / static_cast<double>(chunks);
  const double limit = std::exp(-chunk_mean);
  std::uint64_t total = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    double p = 1.0;
    std::uint64_t k = 0;
    do {
      ++k;
      p *= uniform();
    } while (p > limit);
    total += k - 1;
  }
  return total;
}

std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index) {
  // One SplitMix64 scramble over the combined words keeps substreams
  // decorrelated even for adjacent indices.
  Rng mix(master ^ hash_label(label));
  const std::uint64_t base = mix.next_u64();
  Rng mix2(base + 0x632be59bd9b4e019ULL * index);
  return mix2.next_u64();
}

}  // namespace nvrelax
