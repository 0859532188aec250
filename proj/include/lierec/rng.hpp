#pragma once

#include <cstdint>
#include <random>

namespace lierec {

/**
 * @brief Portable seeded random source.
 *
 * The engine is std::mt19937_64, whose output sequence is fixed by the C++
 * standard. Distributions are implemented here rather than taken from
 * <random>, because the standard library distributions are not required to
 * produce the same values across implementations.
 *
 *   uniform01()  = (next() >> 11) * 2^-53                    in [0, 1)
 *   normal()     = Box-Muller on (1 - u1, u2), cosine branch only,
 *                  so every normal consumes exactly two engine outputs.
 *
 * Sub-streams: substream(seed, i) seeds a fresh engine with
 * splitmix64(seed ^ splitmix64(i + 1)), one independent stream per index.
 */
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi);
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

}  // namespace lierec
