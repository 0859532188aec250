#pragma once

#include <cstdint>
#include <vector>

#include "lierec/lie_groups.hpp"
#include "lierec/rng.hpp"

namespace lierec {

/// Parameters of synthetic trajectory generation.
struct SamplingConfig
{
  GroupKind kind{GroupKind::SE2};
  double bound_a{1.0};      ///< generator coordinates ~ Uniform[-a, a]
  double dt{0.1};           ///< seconds between poses
  std::size_t steps{20};    ///< T, number of increments; poses hold T + 1 entries
  double noise_sigma{0.0};  ///< std-dev of the per-step generator perturbation
  std::uint64_t seed{1};

  /// Throws DomainError naming the offending field.
  void validate() const;
};

/// Worst-case rotation-like magnitude of dt * xi for |xi_i| <= bound_a.
double max_increment_magnitude(const SamplingConfig & config) noexcept;

/// Drift above which generated poses are projected back onto the group.
inline constexpr double kRenormalizeDrift = 1e-9;

struct Trajectory
{
  GroupKind kind{GroupKind::SE2};
  double dt{0.1};
  std::vector<GroupElement> poses;
  AlgebraVector true_xi;
  double noise_sigma{0.0};

  std::size_t steps() const noexcept { return poses.empty() ? 0 : poses.size() - 1; }
};

/// A noisy trajectory together with the perturbations injected at each step.
struct NoisyTrajectory
{
  Trajectory trajectory;
  std::vector<AlgebraVector> noise;  ///< eps_t, one per step
};

/// Each coordinate i.i.d. Uniform[-a, a].
AlgebraVector sample_generator(const SamplingConfig & config, Rng & rng);

/// g_{t+1} = g_t exp(dt xi) from g_0 = I.
Trajectory generate_clean(const AlgebraVector & xi, const SamplingConfig & config);

/// g_{t+1} = g_t exp(dt (xi + eps_t)), eps_t ~ N(0, sigma^2 I).
Trajectory generate_noisy(const AlgebraVector & xi, const SamplingConfig & config, Rng & rng);

/// generate_noisy that also returns the injected eps_t.
NoisyTrajectory generate_noisy_recorded(const AlgebraVector & xi, const SamplingConfig & config,
  Rng & rng);

/**
 * @brief Generates `count` trajectories from config.seed.
 *
 * Trajectory i draws its generator and its noise from Rng::substream(seed, i),
 * so the dataset is independent of generation order.
 */
std::vector<Trajectory> generate_dataset(const SamplingConfig & config, std::size_t count);

}  // namespace lierec
