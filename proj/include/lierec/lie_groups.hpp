#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "lierec/matrix.hpp"

namespace lierec {

enum class GroupKind { SE2, SE3, SO3, SL2R };

/// Matrix size of the ambient GL(n): 3, 4, 3, 2.
std::size_t ambient_dim(GroupKind kind) noexcept;

/// Dimension of the Lie algebra: 3, 6, 3, 3.
std::size_t algebra_dim(GroupKind kind) noexcept;

/// Lowercase serialized name: "se2" | "se3" | "so3" | "sl2r".
std::string_view to_string(GroupKind kind) noexcept;

/// Inverse of to_string; throws DomainError for unknown names.
GroupKind parse_group_kind(std::string_view name);

/**
 * @brief Coordinates of a Lie algebra element in the fixed basis of its group.
 *
 * Basis order
 * -----------
 * so3:  [wx wy wz]
 * se2:  [vx vy w]
 * se3:  [vx vy vz wx wy wz]   (translation first)
 * sl2r: [a b c]  ->  a*[1 0; 0 -1] + b*[0 1; 0 0] + c*[0 0; 1 0]
 */
class AlgebraVector
{
public:
  static constexpr std::size_t kMaxDim = 6;

  AlgebraVector() = default;

  /// Zero vector of the given kind.
  explicit AlgebraVector(GroupKind kind);

  AlgebraVector(GroupKind kind, std::initializer_list<double> coords);
  AlgebraVector(GroupKind kind, std::span<const double> coords);

  GroupKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return algebra_dim(kind_); }

  double & operator[](std::size_t i) noexcept { return coords_[i]; }
  double operator[](std::size_t i) const noexcept { return coords_[i]; }

  std::span<const double> coords() const noexcept { return {coords_.data(), size()}; }
  std::span<double> coords() noexcept { return {coords_.data(), size()}; }

  double norm() const noexcept;
  bool all_finite() const noexcept;

  AlgebraVector & operator+=(const AlgebraVector & other);
  AlgebraVector & operator-=(const AlgebraVector & other);
  AlgebraVector & operator*=(double s) noexcept;

  friend AlgebraVector operator+(AlgebraVector a, const AlgebraVector & b) { return a += b; }
  friend AlgebraVector operator-(AlgebraVector a, const AlgebraVector & b) { return a -= b; }
  friend AlgebraVector operator*(AlgebraVector a, double s) { return a *= s; }
  friend AlgebraVector operator*(double s, AlgebraVector a) { return a *= s; }
  friend AlgebraVector operator-(AlgebraVector a) { return a *= -1.0; }

  friend bool operator==(const AlgebraVector & a, const AlgebraVector & b) noexcept;

private:
  GroupKind kind_{GroupKind::SO3};
  std::array<double, kMaxDim> coords_{};
};

/// Largest absolute coordinate difference; throws DimensionError on kind mismatch.
double max_abs_diff(const AlgebraVector & a, const AlgebraVector & b);

/// Membership tolerances for GroupElement validation.
inline constexpr double kMembershipTol = 1e-8;
/// Tolerance on the algebra structure (skew / traceless) accepted by vee().
inline constexpr double kAlgebraTol = 1e-8;
/// Rotation angle margin below pi inside which log is accepted.
inline constexpr double kRotationBranchMargin = 1e-6;
/// SL(2,R) log requires trace > -2 + kSl2TraceMargin.
inline constexpr double kSl2TraceMargin = 1e-9;
/// Threshold on |det| separating the SL(2,R) regimes.
inline constexpr double kRegimeTol = 1e-9;

/**
 * @brief A matrix known to lie on the manifold of a specific group.
 *
 * Construction through from_matrix() validates membership; the remaining
 * factories produce members by construction.
 */
class GroupElement
{
public:
  static GroupElement identity(GroupKind kind);

  /// Validates membership and throws DomainError describing the violation.
  static GroupElement from_matrix(GroupKind kind, const Matrix & m, double tol = kMembershipTol);

  /// Wraps a matrix without validation. Callers guarantee membership.
  static GroupElement unchecked(GroupKind kind, const Matrix & m);

  GroupKind kind() const noexcept { return kind_; }
  const Matrix & matrix() const noexcept { return matrix_; }

  GroupElement inverse() const;

private:
  GroupElement(GroupKind kind, const Matrix & m) : kind_(kind), matrix_(m) {}

  GroupKind kind_;
  Matrix matrix_;
};

/// Describes why `m` is not a member of `kind`, or nullopt when it is.
std::optional<std::string> membership_violation(GroupKind kind, const Matrix & m,
  double tol = kMembershipTol);

/// Worst of the orthogonality / determinant / bottom-row residuals of `m` for `kind`.
double membership_drift(GroupKind kind, const Matrix & m);

Matrix hat(const AlgebraVector & v);

/// Throws DomainError when `m` is not in the algebra within kAlgebraTol.
AlgebraVector vee(const Matrix & m, GroupKind kind);

GroupElement group_exp(const AlgebraVector & v);

/// Throws DomainError when `g` lies on or beyond the branch cut of its log.
AlgebraVector group_log(const GroupElement & g);

/// Describes why group_log(g) would fail, or nullopt when it is defined.
std::optional<std::string> log_domain_violation(const GroupElement & g);

/// Group product a*b; throws DimensionError on kind mismatch.
GroupElement compose(const GroupElement & a, const GroupElement & b);

/// g_a^{-1} g_b, the increment taking a to b in the body frame.
GroupElement between(const GroupElement & a, const GroupElement & b);

/**
 * @brief Projects a drifted element back onto its group.
 *
 * Rotation blocks receive polar-decomposition Newton steps R <- (R + R^-T)/2,
 * homogeneous rows are reset, and SL(2,R) matrices are rescaled by det^-1/2.
 */
Matrix project_to_group(GroupKind kind, const Matrix & m);

enum class Regime { Elliptic, Hyperbolic, Parabolic };

std::string_view to_string(Regime regime) noexcept;

/// Sign of det(hat(v)) with tolerance kRegimeTol; throws DimensionError unless kind is SL2R.
Regime classify_regime(const AlgebraVector & v);

}  // namespace lierec
