#pragma once

#include <span>
#include <vector>

#include "lierec/lie_groups.hpp"
#include "lierec/trajectory.hpp"

namespace lierec {

/// delta_t = log(g_t^-1 g_{t+1}) for every consecutive pose pair.
struct IncrementSequence
{
  GroupKind kind{GroupKind::SE2};
  double dt{0.1};
  std::vector<AlgebraVector> increments;
};

/// Dataset-wide mean vector and a single pooled scalar deviation.
struct NormalizationStats
{
  GroupKind kind{GroupKind::SE2};
  std::vector<double> mean;  ///< one entry per algebra coordinate
  double sigma{1.0};         ///< sqrt(mean ||delta - mean||^2)
  std::size_t count{0};      ///< number of pooled increment vectors
};

/// Flattened, normalized increments; increment-major, coordinate-minor.
using FeatureVector = std::vector<double>;

/// Throws DomainError naming the step whose relative pose crosses a branch cut.
IncrementSequence to_increments(const Trajectory & traj);

/**
 * @brief Pools every increment of every sequence and fits (mu, sigma).
 *
 * sigma is the root mean squared Euclidean deviation from mu, not a
 * per-coordinate scale. Summation runs in dataset order so results are
 * reproducible. Throws DomainError for fewer than two increments or zero
 * spread.
 */
NormalizationStats fit_stats(std::span<const IncrementSequence> dataset);

/// values[t*d + j] = (increments[t][j] - mu[j]) / sigma
FeatureVector normalize(const IncrementSequence & seq, const NormalizationStats & stats);

/// Affine inverse of normalize().
IncrementSequence denormalize(std::span<const double> features, const NormalizationStats & stats,
  double dt);

}  // namespace lierec
