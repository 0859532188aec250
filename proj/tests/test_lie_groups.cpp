#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lierec/error.hpp"
#include "lierec/lie_groups.hpp"
#include "test_support.hpp"

using namespace lierec;
using test::kAllGroups;

namespace {

constexpr double kPi = std::numbers::pi;

double series_gap(const AlgebraVector & v)
{
  return frobenius_distance(group_exp(v).matrix(), mat_exp_series(hat(v), 30));
}

}  // namespace

TEST_CASE("group kind table")
{
  CHECK(ambient_dim(GroupKind::SE2) == 3);
  CHECK(ambient_dim(GroupKind::SE3) == 4);
  CHECK(ambient_dim(GroupKind::SO3) == 3);
  CHECK(ambient_dim(GroupKind::SL2R) == 2);
  CHECK(algebra_dim(GroupKind::SE2) == 3);
  CHECK(algebra_dim(GroupKind::SE3) == 6);
  CHECK(algebra_dim(GroupKind::SO3) == 3);
  CHECK(algebra_dim(GroupKind::SL2R) == 3);
  for (auto k : kAllGroups) { CHECK(parse_group_kind(to_string(k)) == k); }
  CHECK(to_string(GroupKind::SL2R) == "sl2r");
  CHECK_THROWS_AS(parse_group_kind("se4"), DomainError);
}

TEST_CASE("algebra vector length is checked")
{
  CHECK_THROWS_AS(AlgebraVector(GroupKind::SE3, {1.0, 2.0, 3.0}), DimensionError);
  CHECK_THROWS_AS(AlgebraVector(GroupKind::SO3) + AlgebraVector(GroupKind::SE2), DimensionError);
}

TEST_CASE("hat follows the fixed basis")
{
  CHECK(hat(AlgebraVector(GroupKind::SO3, {1, 0, 0})) == Matrix{{0, 0, 0}, {0, 0, -1}, {0, 1, 0}});
  CHECK(hat(AlgebraVector(GroupKind::SL2R)) == Matrix(2, 2));
  CHECK(hat(AlgebraVector(GroupKind::SE2, {2, 3, 5})) == Matrix{{0, -5, 2}, {5, 0, 3}, {0, 0, 0}});
  CHECK(hat(AlgebraVector(GroupKind::SE3, {1, 2, 3, 4, 5, 6}))
        == Matrix{{0, -6, 5, 1}, {6, 0, -4, 2}, {-5, 4, 0, 3}, {0, 0, 0, 0}});
  CHECK(hat(AlgebraVector(GroupKind::SL2R, {1, 2, 3})) == Matrix{{1, 2}, {3, -1}});
}

TEST_CASE("vee inverts hat and rejects non-algebra matrices")
{
  Rng rng(21);
  for (auto k : kAllGroups) {
    for (int trial = 0; trial < 200; ++trial) {
      const AlgebraVector v = test::random_algebra(rng, k, 3.0);
      CHECK(vee(hat(v), k) == v);
    }
  }
  CHECK(vee(Matrix{{1, 0}, {0, -1}}, GroupKind::SL2R) == AlgebraVector(GroupKind::SL2R, {1, 0, 0}));
  CHECK_THROWS_AS(vee(Matrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}, GroupKind::SO3), DomainError);
  CHECK_THROWS_AS(vee(Matrix{{1, 0}, {0, 1}}, GroupKind::SL2R), DomainError);
  CHECK_THROWS_AS(vee(Matrix{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}, GroupKind::SE2), DomainError);
  CHECK_THROWS_AS(vee(Matrix(2, 2), GroupKind::SO3), DimensionError);
}

TEST_CASE("group_exp known values")
{
  for (auto k : kAllGroups) {
    CHECK(group_exp(AlgebraVector(k)).matrix() == Matrix::identity(ambient_dim(k)));
  }
  // frozen from the 30-term series oracle (see test_matrix)
  const Matrix quarter{{0, -1, 0}, {1, 0, 0}, {0, 0, 1}};
  CHECK(frobenius_distance(group_exp(AlgebraVector(GroupKind::SO3, {0, 0, kPi / 2})).matrix(), quarter) < 1e-15);

  const Matrix d = group_exp(AlgebraVector(GroupKind::SL2R, {1, 0, 0})).matrix();
  CHECK(frobenius_distance(d, Matrix::diagonal({std::numbers::e, 1.0 / std::numbers::e})) < 1e-14);

  CHECK(group_exp(AlgebraVector(GroupKind::SE2, {1, 0, 0})).matrix() == Matrix{{1, 0, 1}, {0, 1, 0}, {0, 0, 1}});

  // parabolic: exp([0 1; 0 0]) = [1 1; 0 1]
  CHECK(group_exp(AlgebraVector(GroupKind::SL2R, {0, 1, 0})).matrix() == Matrix{{1, 1}, {0, 1}});
}

TEST_CASE("closed-form exp agrees with the power series")
{
  Rng rng(22);
  for (auto k : kAllGroups) {
    CAPTURE(to_string(k));
    for (int trial = 0; trial < 300; ++trial) {
      const AlgebraVector v = test::random_algebra(rng, k, 5.0);
      CHECK(series_gap(v) < 1e-9);
    }
    // small-angle Taylor branches
    for (double scale : {1e-3, 1e-4, 9e-5, 1e-6, 1e-9}) {
      AlgebraVector v(k);
      for (std::size_t i = 0; i < v.size(); ++i) { v[i] = scale * (i % 2 ? -0.6 : 0.8); }
      CHECK(series_gap(v) < 1e-14);
      CHECK(max_abs_diff(group_log(group_exp(v)), v) < 1e-15);
    }
  }
}

TEST_CASE("exp lands on the group")
{
  Rng rng(23);
  for (auto k : kAllGroups) {
    for (int trial = 0; trial < 300; ++trial) {
      const AlgebraVector v = test::random_algebra(rng, k, 3.0);
      const GroupElement g = group_exp(v);
      CHECK(membership_drift(k, g.matrix()) < 1e-10);
      CHECK_FALSE(membership_violation(k, g.matrix()).has_value());
    }
  }
}

TEST_CASE("log inverts exp inside the injectivity region")
{
  Rng rng(24);
  for (auto k : kAllGroups) {
    CAPTURE(to_string(k));
    CHECK(group_log(GroupElement::identity(k)) == AlgebraVector(k));
    for (int trial = 0; trial < 500; ++trial) {
      const AlgebraVector v = test::random_algebra(rng, k, 1.0);
      CHECK(max_abs_diff(group_log(group_exp(v)), v) < 1e-9);
    }
  }
  // near the rotation branch cut
  const AlgebraVector near_pi(GroupKind::SO3, {0.0, 0.0, kPi - 1e-5});
  CHECK(max_abs_diff(group_log(group_exp(near_pi)), near_pi) < 1e-8);
  const AlgebraVector sl2_near(GroupKind::SL2R, {0.0, kPi - 1e-4, -(kPi - 1e-4)});
  CHECK(max_abs_diff(group_log(group_exp(sl2_near)), sl2_near) < 1e-8);
}

TEST_CASE("exp(log(g)) recovers g")
{
  Rng rng(25);
  for (auto k : kAllGroups) {
    for (int trial = 0; trial < 200; ++trial) {
      const GroupElement g = group_exp(test::random_algebra(rng, k, 2.5));
      if (log_domain_violation(g)) { continue; }
      CHECK(frobenius_distance(group_exp(group_log(g)).matrix(), g.matrix()) < 1e-8);
    }
  }
}

TEST_CASE("log rejects branch-cut inputs")
{
  const GroupElement half_turn = group_exp(AlgebraVector(GroupKind::SO3, {0, 0, kPi}));
  CHECK_THROWS_AS(group_log(half_turn), DomainError);
  CHECK_THROWS_AS(group_log(group_exp(AlgebraVector(GroupKind::SE3, {1, 0, 0, kPi, 0, 0}))), DomainError);
  const GroupElement minus_identity = GroupElement::from_matrix(GroupKind::SL2R, Matrix{{-1, 0}, {0, -1}});
  try {
    group_log(minus_identity);
    FAIL("expected branch-cut error");
  } catch (const DomainError & e) {
    CHECK(std::string(e.what()).find("branch cut") != std::string::npos);
  }
  // -[[e,0],[0,1/e]] has trace < -2 and no real logarithm
  CHECK_THROWS_AS(group_log(GroupElement::from_matrix(GroupKind::SL2R, Matrix::diagonal({-2.0, -0.5}))), DomainError);
}

TEST_CASE("compose and inverse")
{
  Rng rng(26);
  for (auto k : kAllGroups) {
    const GroupElement g = group_exp(test::random_algebra(rng, k, 1.5));
    CHECK(compose(g, GroupElement::identity(k)).matrix() == g.matrix());
    CHECK(frobenius_distance(compose(g, g.inverse()).matrix(), Matrix::identity(ambient_dim(k))) < 1e-10);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const GroupElement a = group_exp(test::random_algebra(rng, GroupKind::SE2, 2.0));
    const GroupElement b = group_exp(test::random_algebra(rng, GroupKind::SE2, 2.0));
    const auto expected = test::naive_product(test::to_vec(a.matrix()), test::to_vec(b.matrix()), 3, 3, 3);
    const Matrix ab = compose(a, b).matrix();
    for (std::size_t i = 0; i < 9; ++i) { CHECK(ab.entries()[i] == doctest::Approx(expected[i]).epsilon(1e-15)); }
  }
  CHECK_THROWS_AS(compose(GroupElement::identity(GroupKind::SO3), GroupElement::identity(GroupKind::SE2)), DimensionError);
}

TEST_CASE("one-parameter subgroup property")
{
  Rng rng(27);
  for (auto k : kAllGroups) {
    for (int trial = 0; trial < 200; ++trial) {
      const AlgebraVector v = test::random_algebra(rng, k, 1.0);
      const double s = rng.uniform(-1.5, 1.5);
      const double t = rng.uniform(-1.5, 1.5);
      const Matrix lhs = group_exp(v * (s + t)).matrix();
      const Matrix rhs = compose(group_exp(v * s), group_exp(v * t)).matrix();
      CHECK(frobenius_distance(lhs, rhs) < 1e-9);
    }
  }
}

TEST_CASE("membership validation")
{
  CHECK_NOTHROW(GroupElement::from_matrix(GroupKind::SE2, Matrix::identity(3)));
  CHECK_THROWS_AS(GroupElement::from_matrix(GroupKind::SL2R, Matrix::diagonal({2.0, 1.0})), DomainError);
  CHECK_THROWS_AS(GroupElement::from_matrix(GroupKind::SO3, Matrix::diagonal({1.0, 1.0, -1.0})), DomainError);
  CHECK_THROWS_AS(GroupElement::from_matrix(GroupKind::SO3, Matrix::diagonal({1.0, 1.0, 1.001})), DomainError);
  Matrix bad_row = Matrix::identity(4);
  bad_row(3, 0) = 0.5;
  CHECK_THROWS_AS(GroupElement::from_matrix(GroupKind::SE3, bad_row), DomainError);
  CHECK_THROWS_AS(GroupElement::from_matrix(GroupKind::SE2, Matrix::identity(4)), DomainError);
}

TEST_CASE("project_to_group removes drift")
{
  Rng rng(28);
  for (auto k : kAllGroups) {
    Matrix m = group_exp(test::random_algebra(rng, k, 1.0)).matrix();
    for (double & e : m.entries()) { e *= 1.0 + rng.uniform(-1e-7, 1e-7); }
    const Matrix p = project_to_group(k, m);
    CHECK(membership_drift(k, p) < 1e-12);
    CHECK(frobenius_distance(p, m) < 1e-6);
  }
}

TEST_CASE("classify_regime")
{
  CHECK(classify_regime(vee(Matrix{{0, 1}, {-1, 0}}, GroupKind::SL2R)) == Regime::Elliptic);
  CHECK(classify_regime(vee(Matrix{{1, 0}, {0, -1}}, GroupKind::SL2R)) == Regime::Hyperbolic);
  CHECK(classify_regime(vee(Matrix{{0, 1}, {0, 0}}, GroupKind::SL2R)) == Regime::Parabolic);
  CHECK(to_string(Regime::Elliptic) == "elliptic");
  CHECK_THROWS_AS(classify_regime(AlgebraVector(GroupKind::SO3)), DimensionError);
}

TEST_CASE("regime is invariant under conjugation")
{
  Rng rng(29);
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const AlgebraVector v = test::random_algebra(rng, GroupKind::SL2R, 1.0);
    if (std::abs(determinant(hat(v))) < 1e-6) { continue; }
    const GroupElement h = group_exp(test::random_algebra(rng, GroupKind::SL2R, 1.0));
    const Matrix conj = mat_mul(mat_mul(h.matrix(), hat(v)), h.inverse().matrix());
    CHECK(classify_regime(vee(conj, GroupKind::SL2R)) == classify_regime(v));
    ++checked;
  }
  CHECK(checked > 900);
}
