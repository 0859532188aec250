#include "lierec/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "lierec/error.hpp"

namespace lierec {

namespace {

// Rotation-like magnitude of an algebra element: the angle that must stay below pi
// for log(exp(u)) == u. Zero for non-elliptic sl2r elements.
double principal_angle(const AlgebraVector & u)
{
  switch (u.kind()) {
    case GroupKind::SO3: return u.norm();
    case GroupKind::SE3: return std::sqrt(u[3] * u[3] + u[4] * u[4] + u[5] * u[5]);
    case GroupKind::SE2: return std::abs(u[2]);
    case GroupKind::SL2R: {
      const double q = u[0] * u[0] + u[1] * u[2];
      return q < 0.0 ? std::sqrt(-q) : 0.0;
    }
  }
  return 0.0;
}

NoisyTrajectory synthesize(const AlgebraVector & xi, const SamplingConfig & config, Rng * rng)
{
  config.validate();
  if (xi.kind() != config.kind) {
    throw DimensionError("generator kind " + std::string(to_string(xi.kind()))
                         + " does not match config kind " + std::string(to_string(config.kind)));
  }
  if (!xi.all_finite()) { throw DomainError("generator has non-finite coordinates"); }

  NoisyTrajectory out;
  Trajectory & traj = out.trajectory;
  traj.kind = config.kind;
  traj.dt = config.dt;
  traj.true_xi = xi;
  traj.noise_sigma = config.noise_sigma;
  traj.poses.reserve(config.steps + 1);
  traj.poses.push_back(GroupElement::identity(config.kind));
  out.noise.reserve(config.steps);

  const bool noisy = rng != nullptr && config.noise_sigma > 0.0;
  for (std::size_t t = 0; t < config.steps; ++t) {
    AlgebraVector eps(config.kind);
    if (noisy) {
      for (std::size_t i = 0; i < eps.size(); ++i) { eps[i] = config.noise_sigma * rng->normal(); }
    }
    const AlgebraVector increment = (xi + eps) * config.dt;
    if (principal_angle(increment) >= std::numbers::pi - kRotationBranchMargin) {
      std::ostringstream os;
      os << "step " << t << " increment angle " << principal_angle(increment)
         << " wraps past pi and cannot be recovered by log";
      throw DomainError(os.str());
    }
    const GroupElement step = group_exp(increment);
    if (auto why = log_domain_violation(step)) {
      std::ostringstream os;
      os << "step " << t << " increment is not loggable: " << *why;
      throw DomainError(os.str());
    }
    GroupElement next = compose(traj.poses.back(), step);
    if (membership_drift(config.kind, next.matrix()) > kRenormalizeDrift) {
      next = GroupElement::unchecked(config.kind, project_to_group(config.kind, next.matrix()));
    }
    traj.poses.push_back(next);
    out.noise.push_back(eps);
  }
  return out;
}

}  // namespace

void SamplingConfig::validate() const
{
  auto fail = [](const std::string & msg) { throw DomainError("sampling config: " + msg); };
  if (!(bound_a >= 0.0) || !std::isfinite(bound_a)) { fail("bound_a must be finite and >= 0"); }
  if (!(dt > 0.0) || !std::isfinite(dt)) { fail("dt must be finite and > 0"); }
  if (steps < 2) { fail("steps must be >= 2"); }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) { fail("noise_sigma must be >= 0"); }
  if (!(max_increment_magnitude(*this) < 0.5 * std::numbers::pi)) {
    std::ostringstream os;
    os << "bound_a * dt too large: worst-case increment angle " << max_increment_magnitude(*this)
       << " must stay below pi/2";
    fail(os.str());
  }
}

double max_increment_magnitude(const SamplingConfig & config) noexcept
{
  const double scale = config.bound_a * config.dt;
  switch (config.kind) {
    case GroupKind::SO3:
    case GroupKind::SE3: return std::sqrt(3.0) * scale;
    case GroupKind::SE2:
    case GroupKind::SL2R: return scale;
  }
  return scale;
}

AlgebraVector sample_generator(const SamplingConfig & config, Rng & rng)
{
  AlgebraVector xi(config.kind);
  for (std::size_t i = 0; i < xi.size(); ++i) {
    xi[i] = config.bound_a * (2.0 * rng.uniform01() - 1.0);
  }
  return xi;
}

Trajectory generate_clean(const AlgebraVector & xi, const SamplingConfig & config)
{
  return synthesize(xi, config, nullptr).trajectory;
}

Trajectory generate_noisy(const AlgebraVector & xi, const SamplingConfig & config, Rng & rng)
{
  return synthesize(xi, config, &rng).trajectory;
}

NoisyTrajectory generate_noisy_recorded(const AlgebraVector & xi, const SamplingConfig & config,
  Rng & rng)
{
  return synthesize(xi, config, &rng);
}

std::vector<Trajectory> generate_dataset(const SamplingConfig & config, std::size_t count)
{
  config.validate();
  std::vector<Trajectory> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng = Rng::substream(config.seed, i);
    const AlgebraVector xi = sample_generator(config, rng);
    out.push_back(generate_noisy(xi, config, rng));
  }
  return out;
}

}  // namespace lierec
