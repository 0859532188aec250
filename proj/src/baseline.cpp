#include "lierec/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lierec/error.hpp"
#include "lierec/preprocessing.hpp"

namespace lierec {

AlgebraVector estimate_mean_increment(const Trajectory & traj)
{
  if (traj.poses.size() < 2) { throw DomainError("baseline: trajectory needs at least two poses"); }
  if (traj.dt == 0.0 || !std::isfinite(traj.dt)) { throw DomainError("baseline: dt must be nonzero"); }
  const IncrementSequence seq = to_increments(traj);
  AlgebraVector sum(traj.kind);
  for (const auto & inc : seq.increments) { sum += inc; }
  return sum * (1.0 / (static_cast<double>(seq.increments.size()) * traj.dt));
}

ErrorReport compare(const AlgebraVector & model_pred, const AlgebraVector & baseline_pred,
  const AlgebraVector & truth)
{
  if (model_pred.kind() != truth.kind() || baseline_pred.kind() != truth.kind()) {
    throw DimensionError("compare: kind mismatch");
  }
  ErrorReport r{truth, model_pred, baseline_pred, {}, {}, 0.0, 0.0};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    r.model_abs_error.push_back(std::abs(model_pred[i] - truth[i]));
    r.baseline_abs_error.push_back(std::abs(baseline_pred[i] - truth[i]));
  }
  r.model_euclidean = (model_pred - truth).norm();
  r.baseline_euclidean = (baseline_pred - truth).norm();
  return r;
}

namespace {

double mean_of(const std::vector<double> & v)
{
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double ErrorSummary::model_mean_overall() const { return mean_of(model_mean); }
double ErrorSummary::baseline_mean_overall() const { return mean_of(baseline_mean); }

ErrorSummary summarize(std::span<const ErrorReport> reports)
{
  ErrorSummary s;
  if (reports.empty()) { return s; }
  const std::size_t d = reports.front().truth.size();
  s.count = reports.size();
  s.model_mean.assign(d, 0.0);
  s.model_max.assign(d, 0.0);
  s.baseline_mean.assign(d, 0.0);
  s.baseline_max.assign(d, 0.0);
  for (const auto & r : reports) {
    if (r.truth.size() != d) { throw DimensionError("summarize: mixed algebra dims"); }
    for (std::size_t i = 0; i < d; ++i) {
      s.model_mean[i] += r.model_abs_error[i];
      s.baseline_mean[i] += r.baseline_abs_error[i];
      s.model_max[i] = std::max(s.model_max[i], r.model_abs_error[i]);
      s.baseline_max[i] = std::max(s.baseline_max[i], r.baseline_abs_error[i]);
    }
    s.model_euclidean_mean += r.model_euclidean;
    s.baseline_euclidean_mean += r.baseline_euclidean;
  }
  const double n = static_cast<double>(reports.size());
  for (std::size_t i = 0; i < d; ++i) {
    s.model_mean[i] /= n;
    s.baseline_mean[i] /= n;
  }
  s.model_euclidean_mean /= n;
  s.baseline_euclidean_mean /= n;
  return s;
}

}  // namespace lierec
