#include "lierec/lie_groups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "lierec/error.hpp"

namespace lierec {

namespace {

using Vec3 = std::array<double, 3>;

// Below this angle the trigonometric coefficients switch to 4th-order Taylor series.
constexpr double kSmallAngle = 1e-4;

double norm3(const Vec3 & v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Matrix skew(const Vec3 & w)
{
  return Matrix{{0.0, -w[2], w[1]}, {w[2], 0.0, -w[0]}, {-w[1], w[0], 0.0}};
}

Matrix block(const Matrix & m, std::size_t n)
{
  Matrix b(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) { b(r, c) = m(r, c); }
  }
  return b;
}

// sin(t)/t, (1-cos t)/t^2, (t-sin t)/t^3
struct RodriguesCoeffs
{
  double a, b, c;
};

RodriguesCoeffs rodrigues_coeffs(double theta)
{
  const double t2 = theta * theta;
  if (theta < kSmallAngle) {
    return {1.0 - t2 / 6.0 + t2 * t2 / 120.0,
      0.5 - t2 / 24.0 + t2 * t2 / 720.0,
      1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0};
  }
  const double s = std::sin(theta);
  const double half = std::sin(0.5 * theta);
  // 1 - cos t = 2 sin^2(t/2) avoids cancellation for small t
  return {s / theta, 2.0 * half * half / t2, (theta - s) / (t2 * theta)};
}

// R = I + a K + b K^2
Matrix so3_exp(const Vec3 & w)
{
  const double theta = norm3(w);
  const auto k = rodrigues_coeffs(theta);
  const Matrix K = skew(w);
  return Matrix::identity(3) + K * k.a + mat_mul(K, K) * k.b;
}

// Left Jacobian V = I + b K + c K^2
Matrix so3_left_jacobian(const Vec3 & w)
{
  const double theta = norm3(w);
  const auto k = rodrigues_coeffs(theta);
  const Matrix K = skew(w);
  return Matrix::identity(3) + K * k.b + mat_mul(K, K) * k.c;
}

// V^-1 = I - K/2 + d K^2, d = (1 - a/(2b)) / t^2
Matrix so3_left_jacobian_inv(const Vec3 & w)
{
  const double theta = norm3(w);
  const double t2 = theta * theta;
  double d = 0.0;
  if (theta < kSmallAngle) {
    d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
  } else {
    const auto k = rodrigues_coeffs(theta);
    d = (1.0 - k.a / (2.0 * k.b)) / t2;
  }
  const Matrix K = skew(w);
  return Matrix::identity(3) - K * 0.5 + mat_mul(K, K) * d;
}

double rotation_angle(const Matrix & R)
{
  const double sin_part = 0.5 * norm3({R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)});
  const double cos_part = 0.5 * (R.trace() - 1.0);
  return std::atan2(sin_part, cos_part);
}

Vec3 so3_log(const Matrix & R)
{
  const double theta = rotation_angle(R);
  const Vec3 s{R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1)};
  double f = 0.0;
  if (theta < kSmallAngle) {
    const double t2 = theta * theta;
    f = 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0;
  } else {
    f = theta / (2.0 * std::sin(theta));
  }
  return {f * s[0], f * s[1], f * s[2]};
}

double orthogonality_residual(const Matrix & R)
{
  return frobenius_distance(mat_mul(R.transpose(), R), Matrix::identity(R.rows()));
}

// Polar factor by Newton iteration: R <- (R + R^-T) / 2.
Matrix orthonormalize(Matrix R)
{
  for (int i = 0; i < 4 && orthogonality_residual(R) > 1e-15; ++i) {
    R = (R + mat_inverse(R).transpose()) * 0.5;
  }
  return R;
}

// cosh(s) and sinh(s)/s as functions of q = s^2 (negative q gives cos/sin),
// where X^2 = q I for traceless 2x2 X.
struct Sl2Coeffs
{
  double c0, c1;
};

Sl2Coeffs sl2_exp_coeffs(double q)
{
  const double s = std::sqrt(std::abs(q));
  if (s < kSmallAngle) {
    return {1.0 + q / 2.0 + q * q / 24.0, 1.0 + q / 6.0 + q * q / 120.0};
  }
  if (q > 0.0) { return {std::cosh(s), std::sinh(s) / s}; }
  return {std::cos(s), std::sin(s) / s};
}

}  // namespace

std::size_t ambient_dim(GroupKind kind) noexcept
{
  switch (kind) {
    case GroupKind::SE2: return 3;
    case GroupKind::SE3: return 4;
    case GroupKind::SO3: return 3;
    case GroupKind::SL2R: return 2;
  }
  return 0;
}

std::size_t algebra_dim(GroupKind kind) noexcept
{
  switch (kind) {
    case GroupKind::SE2: return 3;
    case GroupKind::SE3: return 6;
    case GroupKind::SO3: return 3;
    case GroupKind::SL2R: return 3;
  }
  return 0;
}

std::string_view to_string(GroupKind kind) noexcept
{
  switch (kind) {
    case GroupKind::SE2: return "se2";
    case GroupKind::SE3: return "se3";
    case GroupKind::SO3: return "so3";
    case GroupKind::SL2R: return "sl2r";
  }
  return "?";
}

GroupKind parse_group_kind(std::string_view name)
{
  for (auto k : {GroupKind::SE2, GroupKind::SE3, GroupKind::SO3, GroupKind::SL2R}) {
    if (to_string(k) == name) { return k; }
  }
  throw DomainError("unknown group '" + std::string(name) + "' (expected se2|se3|so3|sl2r)");
}

// ---------------------------------------------------------------------------
// AlgebraVector

AlgebraVector::AlgebraVector(GroupKind kind) : kind_(kind) {}

AlgebraVector::AlgebraVector(GroupKind kind, std::initializer_list<double> coords)
    : AlgebraVector(kind, std::span<const double>(coords.begin(), coords.size()))
{}

AlgebraVector::AlgebraVector(GroupKind kind, std::span<const double> coords) : kind_(kind)
{
  if (coords.size() != algebra_dim(kind)) {
    throw DimensionError(std::string(to_string(kind)) + " algebra vector needs "
                         + std::to_string(algebra_dim(kind)) + " coordinates, got "
                         + std::to_string(coords.size()));
  }
  std::copy(coords.begin(), coords.end(), coords_.begin());
}

double AlgebraVector::norm() const noexcept
{
  double s = 0.0;
  for (double v : coords()) { s += v * v; }
  return std::sqrt(s);
}

bool AlgebraVector::all_finite() const noexcept
{
  const auto c = coords();
  return std::all_of(c.begin(), c.end(), [](double v) { return std::isfinite(v); });
}

AlgebraVector & AlgebraVector::operator+=(const AlgebraVector & other)
{
  if (kind_ != other.kind_) { throw DimensionError("algebra vector kind mismatch"); }
  for (std::size_t i = 0; i < size(); ++i) { coords_[i] += other.coords_[i]; }
  return *this;
}

AlgebraVector & AlgebraVector::operator-=(const AlgebraVector & other)
{
  if (kind_ != other.kind_) { throw DimensionError("algebra vector kind mismatch"); }
  for (std::size_t i = 0; i < size(); ++i) { coords_[i] -= other.coords_[i]; }
  return *this;
}

AlgebraVector & AlgebraVector::operator*=(double s) noexcept
{
  for (std::size_t i = 0; i < size(); ++i) { coords_[i] *= s; }
  return *this;
}

bool operator==(const AlgebraVector & a, const AlgebraVector & b) noexcept
{
  if (a.kind_ != b.kind_) { return false; }
  const auto ca = a.coords();
  const auto cb = b.coords();
  return std::equal(ca.begin(), ca.end(), cb.begin());
}

double max_abs_diff(const AlgebraVector & a, const AlgebraVector & b)
{
  if (a.kind() != b.kind()) { throw DimensionError("algebra vector kind mismatch"); }
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) { m = std::max(m, std::abs(a[i] - b[i])); }
  return m;
}

// ---------------------------------------------------------------------------
// Membership

double membership_drift(GroupKind kind, const Matrix & m)
{
  const std::size_t n = ambient_dim(kind);
  if (m.rows() != n || m.cols() != n) { return INFINITY; }
  switch (kind) {
    case GroupKind::SL2R: return std::abs(determinant(m) - 1.0);
    case GroupKind::SO3:
      return std::max(orthogonality_residual(m), std::abs(determinant(m) - 1.0));
    case GroupKind::SE2:
    case GroupKind::SE3: {
      const Matrix R = block(m, n - 1);
      double drift = std::max(orthogonality_residual(R), std::abs(determinant(R) - 1.0));
      for (std::size_t c = 0; c + 1 < n; ++c) { drift = std::max(drift, std::abs(m(n - 1, c))); }
      return std::max(drift, std::abs(m(n - 1, n - 1) - 1.0));
    }
  }
  return INFINITY;
}

std::optional<std::string> membership_violation(GroupKind kind, const Matrix & m, double tol)
{
  const std::size_t n = ambient_dim(kind);
  const std::string name(to_string(kind));
  if (m.rows() != n || m.cols() != n) {
    return name + " element must be " + std::to_string(n) + "x" + std::to_string(n);
  }
  if (!m.all_finite()) { return name + " element has non-finite entries"; }

  std::ostringstream os;
  os.precision(3);
  if (kind == GroupKind::SL2R) {
    const double det = determinant(m);
    if (std::abs(det - 1.0) >= tol) {
      os << "sl2r element has det " << det << " (|det - 1| >= " << tol << ")";
      return os.str();
    }
    return std::nullopt;
  }

  const bool homogeneous = kind != GroupKind::SO3;
  const Matrix R = homogeneous ? block(m, n - 1) : m;
  if (homogeneous) {
    for (std::size_t c = 0; c + 1 < n; ++c) {
      if (std::abs(m(n - 1, c)) > tol) { return name + " element bottom row is not (0,...,0,1)"; }
    }
    if (std::abs(m(n - 1, n - 1) - 1.0) > tol) {
      return name + " element bottom row is not (0,...,0,1)";
    }
  }
  const double ortho = orthogonality_residual(R);
  if (ortho >= tol) {
    os << name << " rotation block not orthogonal: |R^T R - I| = " << ortho;
    return os.str();
  }
  const double det = determinant(R);
  if (kind == GroupKind::SO3 ? std::abs(det - 1.0) >= tol : det <= 0.0) {
    os << name << " rotation block has det " << det;
    return os.str();
  }
  return std::nullopt;
}

GroupElement GroupElement::identity(GroupKind kind)
{
  return GroupElement(kind, Matrix::identity(ambient_dim(kind)));
}

GroupElement GroupElement::from_matrix(GroupKind kind, const Matrix & m, double tol)
{
  if (auto why = membership_violation(kind, m, tol)) { throw DomainError(*why); }
  return GroupElement(kind, m);
}

GroupElement GroupElement::unchecked(GroupKind kind, const Matrix & m) { return GroupElement(kind, m); }

GroupElement GroupElement::inverse() const
{
  const std::size_t n = matrix_.rows();
  switch (kind_) {
    case GroupKind::SO3: return GroupElement(kind_, matrix_.transpose());
    case GroupKind::SE2:
    case GroupKind::SE3: {
      // [R t; 0 1]^-1 = [R^T  -R^T t; 0 1]
      Matrix inv = Matrix::identity(n);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        double t = 0.0;
        for (std::size_t k = 0; k + 1 < n; ++k) {
          inv(i, k) = matrix_(k, i);
          t += matrix_(k, i) * matrix_(k, n - 1);
        }
        inv(i, n - 1) = -t;
      }
      return GroupElement(kind_, inv);
    }
    case GroupKind::SL2R: return GroupElement(kind_, mat_inverse(matrix_));
  }
  return *this;
}

// ---------------------------------------------------------------------------
// hat / vee

Matrix hat(const AlgebraVector & v)
{
  switch (v.kind()) {
    case GroupKind::SO3: return skew({v[0], v[1], v[2]});
    case GroupKind::SE2:
      return Matrix{{0.0, -v[2], v[0]}, {v[2], 0.0, v[1]}, {0.0, 0.0, 0.0}};
    case GroupKind::SE3: {
      Matrix m(4, 4);
      const Matrix K = skew({v[3], v[4], v[5]});
      for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) { m(r, c) = K(r, c); }
        m(r, 3) = v[r];
      }
      return m;
    }
    case GroupKind::SL2R: return Matrix{{v[0], v[1]}, {v[2], -v[0]}};
  }
  throw DimensionError("hat: unknown group");
}

AlgebraVector vee(const Matrix & m, GroupKind kind)
{
  const std::size_t n = ambient_dim(kind);
  const std::string name(to_string(kind));
  if (m.rows() != n || m.cols() != n) {
    throw DimensionError("vee: " + name + " algebra element must be " + std::to_string(n) + "x"
                         + std::to_string(n));
  }
  auto require = [&](double residual, const char * what) {
    if (!(residual <= kAlgebraTol)) {
      std::ostringstream os;
      os << "vee: matrix is not in the " << name << " algebra (" << what << " residual "
         << residual << ")";
      throw DomainError(os.str());
    }
  };

  if (kind == GroupKind::SL2R) {
    require(std::abs(m.trace()), "trace");
    return AlgebraVector(kind, {m(0, 0), m(0, 1), m(1, 0)});
  }

  const std::size_t rn = kind == GroupKind::SO3 ? 3 : n - 1;
  const Matrix K = block(m, rn);
  require(frobenius_norm(K + K.transpose()), "skew");
  if (kind != GroupKind::SO3) {
    double bottom = 0.0;
    for (std::size_t c = 0; c < n; ++c) { bottom = std::max(bottom, std::abs(m(n - 1, c))); }
    require(bottom, "bottom row");
  }
  switch (kind) {
    case GroupKind::SO3: return AlgebraVector(kind, {K(2, 1), K(0, 2), K(1, 0)});
    case GroupKind::SE2: return AlgebraVector(kind, {m(0, 2), m(1, 2), K(1, 0)});
    case GroupKind::SE3:
      return AlgebraVector(kind, {m(0, 3), m(1, 3), m(2, 3), K(2, 1), K(0, 2), K(1, 0)});
    case GroupKind::SL2R: break;
  }
  throw DimensionError("vee: unknown group");
}

// ---------------------------------------------------------------------------
// exp / log

GroupElement group_exp(const AlgebraVector & v)
{
  const GroupKind kind = v.kind();
  switch (kind) {
    case GroupKind::SO3: return GroupElement::unchecked(kind, so3_exp({v[0], v[1], v[2]}));
    case GroupKind::SE2: {
      const double w = v[2];
      const auto k = rodrigues_coeffs(std::abs(w));
      // V = [a -b w; b w a] with a = sin w / w, b w = (1 - cos w) / w
      const double a = k.a;
      const double bw = k.b * w;
      const double c = std::cos(w);
      const double s = std::sin(w);
      return GroupElement::unchecked(kind,
        Matrix{{c, -s, a * v[0] - bw * v[1]}, {s, c, bw * v[0] + a * v[1]}, {0.0, 0.0, 1.0}});
    }
    case GroupKind::SE3: {
      const Vec3 w{v[3], v[4], v[5]};
      const Matrix R = so3_exp(w);
      const Matrix V = so3_left_jacobian(w);
      Matrix g = Matrix::identity(4);
      for (std::size_t r = 0; r < 3; ++r) {
        double t = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
          g(r, c) = R(r, c);
          t += V(r, c) * v[c];
        }
        g(r, 3) = t;
      }
      return GroupElement::unchecked(kind, g);
    }
    case GroupKind::SL2R: {
      const Matrix X = hat(v);
      // X^2 = (a^2 + bc) I = -det(X) I
      const double q = v[0] * v[0] + v[1] * v[2];
      const auto k = sl2_exp_coeffs(q);
      return GroupElement::unchecked(kind, Matrix::identity(2) * k.c0 + X * k.c1);
    }
  }
  throw DimensionError("group_exp: unknown group");
}

std::optional<std::string> log_domain_violation(const GroupElement & g)
{
  const Matrix & m = g.matrix();
  std::ostringstream os;
  os.precision(10);
  switch (g.kind()) {
    case GroupKind::SO3:
    case GroupKind::SE3: {
      const double theta = rotation_angle(block(m, 3));
      if (theta >= std::numbers::pi - kRotationBranchMargin) {
        os << "log branch cut: rotation angle " << theta << " is not below pi - "
           << kRotationBranchMargin;
        return os.str();
      }
      return std::nullopt;
    }
    case GroupKind::SE2: return std::nullopt;
    case GroupKind::SL2R: {
      const double tr = m.trace();
      if (!(tr > -2.0 + kSl2TraceMargin)) {
        os << "log branch cut: sl2r trace " << tr << " is not above -2 + " << kSl2TraceMargin;
        return os.str();
      }
      return std::nullopt;
    }
  }
  return "log: unknown group";
}

AlgebraVector group_log(const GroupElement & g)
{
  if (auto why = log_domain_violation(g)) { throw DomainError(*why); }
  const Matrix & m = g.matrix();
  const GroupKind kind = g.kind();
  switch (kind) {
    case GroupKind::SO3: {
      const Vec3 w = so3_log(m);
      return AlgebraVector(kind, {w[0], w[1], w[2]});
    }
    case GroupKind::SE2: {
      const double w = std::atan2(m(1, 0), m(0, 0));
      const auto k = rodrigues_coeffs(std::abs(w));
      const double a = k.a;
      const double bw = k.b * w;
      const double inv_det = 1.0 / (a * a + bw * bw);
      const double tx = m(0, 2);
      const double ty = m(1, 2);
      return AlgebraVector(kind, {inv_det * (a * tx + bw * ty), inv_det * (-bw * tx + a * ty), w});
    }
    case GroupKind::SE3: {
      const Vec3 w = so3_log(block(m, 3));
      const Matrix Vinv = so3_left_jacobian_inv(w);
      AlgebraVector out(kind);
      for (std::size_t r = 0; r < 3; ++r) {
        double u = 0.0;
        for (std::size_t c = 0; c < 3; ++c) { u += Vinv(r, c) * m(c, 3); }
        out[r] = u;
        out[r + 3] = w[r];
      }
      return out;
    }
    case GroupKind::SL2R: {
      // g = c0 I + c1 X with c0 = tr/2; M = g - c0 I = c1 X and -det(M) = c1^2 q.
      const double half_tr = 0.5 * m.trace();
      const Matrix M = m - Matrix::identity(2) * half_tr;
      const double p = -determinant(M);
      double s = 0.0;
      double c1 = 1.0;
      if (p > 0.0) {
        s = std::asinh(std::sqrt(p));
        c1 = s < kSmallAngle ? 1.0 + s * s / 6.0 + s * s * s * s / 120.0 : std::sqrt(p) / s;
      } else if (p < 0.0) {
        s = std::atan2(std::sqrt(-p), half_tr);
        c1 = s < kSmallAngle ? 1.0 - s * s / 6.0 + s * s * s * s / 120.0 : std::sqrt(-p) / s;
      }
      const Matrix X = M * (1.0 / c1);
      return AlgebraVector(kind, {0.5 * (X(0, 0) - X(1, 1)), X(0, 1), X(1, 0)});
    }
  }
  throw DimensionError("group_log: unknown group");
}

GroupElement compose(const GroupElement & a, const GroupElement & b)
{
  if (a.kind() != b.kind()) {
    throw DimensionError("compose: kind mismatch " + std::string(to_string(a.kind())) + " vs "
                         + std::string(to_string(b.kind())));
  }
  return GroupElement::unchecked(a.kind(), mat_mul(a.matrix(), b.matrix()));
}

GroupElement between(const GroupElement & a, const GroupElement & b)
{
  return compose(a.inverse(), b);
}

Matrix project_to_group(GroupKind kind, const Matrix & m)
{
  switch (kind) {
    case GroupKind::SO3: return orthonormalize(m);
    case GroupKind::SE2:
    case GroupKind::SE3: {
      const std::size_t n = ambient_dim(kind);
      const Matrix R = orthonormalize(block(m, n - 1));
      Matrix out = m;
      for (std::size_t r = 0; r + 1 < n; ++r) {
        for (std::size_t c = 0; c + 1 < n; ++c) { out(r, c) = R(r, c); }
        out(n - 1, r) = 0.0;
      }
      out(n - 1, n - 1) = 1.0;
      return out;
    }
    case GroupKind::SL2R: {
      const double det = determinant(m);
      if (!(det > 0.0)) { throw NumericalError("cannot renormalize sl2r matrix with det <= 0"); }
      return m * (1.0 / std::sqrt(det));
    }
  }
  return m;
}

std::string_view to_string(Regime regime) noexcept
{
  switch (regime) {
    case Regime::Elliptic: return "elliptic";
    case Regime::Hyperbolic: return "hyperbolic";
    case Regime::Parabolic: return "parabolic";
  }
  return "?";
}

Regime classify_regime(const AlgebraVector & v)
{
  if (v.kind() != GroupKind::SL2R) {
    throw DimensionError("classify_regime requires an sl2r vector, got "
                         + std::string(to_string(v.kind())));
  }
  const double det = determinant(hat(v));
  if (det > kRegimeTol) { return Regime::Elliptic; }
  if (det < -kRegimeTol) { return Regime::Hyperbolic; }
  return Regime::Parabolic;
}

}  // namespace lierec
