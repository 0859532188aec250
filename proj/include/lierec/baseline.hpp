#pragma once

#include <span>
#include <vector>

#include "lierec/lie_groups.hpp"
#include "lierec/trajectory.hpp"

namespace lierec {

/**
 * @brief Closed-form generator estimate (1 / (T dt)) sum_t log(g_t^-1 g_{t+1}).
 *
 * Exact on noise-free trajectories. Accepts a negative dt, which makes the
 * estimate invariant under reversal of the pose sequence.
 */
AlgebraVector estimate_mean_increment(const Trajectory & traj);

/// Errors of a learned and a closed-form estimate against the truth.
struct ErrorReport
{
  AlgebraVector truth;
  AlgebraVector model_pred;
  AlgebraVector baseline_pred;
  std::vector<double> model_abs_error;
  std::vector<double> baseline_abs_error;
  double model_euclidean{0.0};
  double baseline_euclidean{0.0};
};

ErrorReport compare(const AlgebraVector & model_pred, const AlgebraVector & baseline_pred,
  const AlgebraVector & truth);

/// Per-component mean and max of absolute errors over a set of reports.
struct ErrorSummary
{
  std::size_t count{0};
  std::vector<double> model_mean, model_max;
  std::vector<double> baseline_mean, baseline_max;
  double model_euclidean_mean{0.0};
  double baseline_euclidean_mean{0.0};

  /// Mean of model_mean over components.
  double model_mean_overall() const;
  double baseline_mean_overall() const;
};

ErrorSummary summarize(std::span<const ErrorReport> reports);

}  // namespace lierec
