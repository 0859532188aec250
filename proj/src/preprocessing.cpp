#include "lierec/preprocessing.hpp"

#include <cmath>
#include <string>

#include "lierec/error.hpp"

namespace lierec {

IncrementSequence to_increments(const Trajectory & traj)
{
  IncrementSequence seq;
  seq.kind = traj.kind;
  seq.dt = traj.dt;
  if (traj.poses.empty()) { return seq; }
  seq.increments.reserve(traj.poses.size() - 1);
  for (std::size_t t = 0; t + 1 < traj.poses.size(); ++t) {
    const GroupElement rel = between(traj.poses[t], traj.poses[t + 1]);
    if (auto why = log_domain_violation(rel)) {
      throw DomainError("increment " + std::to_string(t) + ": " + *why);
    }
    seq.increments.push_back(group_log(rel));
  }
  return seq;
}

NormalizationStats fit_stats(std::span<const IncrementSequence> dataset)
{
  if (dataset.empty()) { throw DomainError("fit_stats: empty dataset"); }
  NormalizationStats stats;
  stats.kind = dataset.front().kind;
  const std::size_t d = algebra_dim(stats.kind);
  stats.mean.assign(d, 0.0);

  for (const auto & seq : dataset) {
    if (seq.kind != stats.kind) { throw DimensionError("fit_stats: mixed group kinds"); }
    for (const auto & inc : seq.increments) {
      for (std::size_t j = 0; j < d; ++j) { stats.mean[j] += inc[j]; }
      ++stats.count;
    }
  }
  if (stats.count < 2) { throw DomainError("fit_stats: need at least two increments"); }
  for (double & m : stats.mean) { m /= static_cast<double>(stats.count); }

  double sq = 0.0;
  for (const auto & seq : dataset) {
    for (const auto & inc : seq.increments) {
      for (std::size_t j = 0; j < d; ++j) {
        const double e = inc[j] - stats.mean[j];
        sq += e * e;
      }
    }
  }
  stats.sigma = std::sqrt(sq / static_cast<double>(stats.count));
  if (!(stats.sigma > 0.0)) { throw DomainError("fit_stats: increments have zero variance"); }
  return stats;
}

FeatureVector normalize(const IncrementSequence & seq, const NormalizationStats & stats)
{
  if (seq.kind != stats.kind) { throw DimensionError("normalize: stats fitted for another group"); }
  if (!(stats.sigma > 0.0)) { throw DomainError("normalize: sigma must be positive"); }
  const std::size_t d = algebra_dim(seq.kind);
  FeatureVector x;
  x.reserve(seq.increments.size() * d);
  for (const auto & inc : seq.increments) {
    for (std::size_t j = 0; j < d; ++j) { x.push_back((inc[j] - stats.mean[j]) / stats.sigma); }
  }
  return x;
}

IncrementSequence denormalize(std::span<const double> features, const NormalizationStats & stats,
  double dt)
{
  const std::size_t d = algebra_dim(stats.kind);
  if (features.size() % d != 0) {
    throw DimensionError("denormalize: feature length is not a multiple of the algebra dim");
  }
  IncrementSequence seq;
  seq.kind = stats.kind;
  seq.dt = dt;
  for (std::size_t t = 0; t < features.size() / d; ++t) {
    AlgebraVector inc(stats.kind);
    for (std::size_t j = 0; j < d; ++j) { inc[j] = features[t * d + j] * stats.sigma + stats.mean[j]; }
    seq.increments.push_back(inc);
  }
  return seq;
}

}  // namespace lierec
