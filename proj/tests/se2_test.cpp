#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles/se2_oracle.hpp"
#include "posefuse/se2.hpp"

using namespace posefuse;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_pose(const Pose2& p, double x, double y, double th, double tol = 1e-12) {
  EXPECT_NEAR(p.x(), x, tol);
  EXPECT_NEAR(p.y(), y, tol);
  EXPECT_NEAR(normalize_angle(p.theta() - th), 0.0, tol);
}

Pose2 random_pose(std::mt19937_64& rng, double span = 50.0) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  return {pos(rng), pos(rng), ang(rng)};
}

}  // namespace

TEST(NormalizeAngle, WrapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(normalize_angle(0.0), 0.0);
  EXPECT_NEAR(normalize_angle(3 * kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(-kPi), kPi, 1e-12);
  EXPECT_NEAR(normalize_angle(2 * kPi + 0.25), 0.25, 1e-12);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-100, 100);
  for (int i = 0; i < 1000; ++i) {
    const double r = normalize_angle(a(rng));
    EXPECT_GT(r, -kPi);
    EXPECT_LE(r, kPi);
  }
}

TEST(Pose2, ConstructorNormalizesHeading) {
  const Pose2 p(1, 2, 2 * kPi + 0.5);
  EXPECT_NEAR(p.theta(), 0.5, 1e-12);
}

TEST(Compose, IdentityAndTranslations) {
  expect_pose(compose(Pose2::identity(), Pose2(3, 4, 0.5)), 3, 4, 0.5);
  expect_pose(compose(Pose2(1, 0, 0), Pose2(0, 1, 0)), 1, 1, 0);
}

TEST(Compose, QuarterTurnMatchesMatrixProduct) {
  const Pose2 r = compose(Pose2(0, 0, kPi / 2), Pose2(1, 0, 0));
  const oracle::Xyt m = oracle::from_hom(oracle::hom(0, 0, kPi / 2) * oracle::hom(1, 0, 0));
  expect_pose(r, m.x, m.y, m.t);
  expect_pose(r, 0, 1, kPi / 2);
}

TEST(Compose, RandomMatchesMatrixProduct) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 1000; ++i) {
    const Pose2 a = random_pose(rng), b = random_pose(rng);
    const oracle::Xyt m =
        oracle::from_hom(oracle::hom(a.x(), a.y(), a.theta()) * oracle::hom(b.x(), b.y(), b.theta()));
    expect_pose(compose(a, b), m.x, m.y, m.t, 1e-10);
  }
}

TEST(Inverse, KnownValues) {
  expect_pose(inverse(Pose2::identity()), 0, 0, 0);
  expect_pose(inverse(Pose2(1, 0, 0)), -1, 0, 0);
  const oracle::Xyt m = oracle::from_hom(oracle::hom(0, 1, kPi / 2).inverse());
  expect_pose(inverse(Pose2(0, 1, kPi / 2)), m.x, m.y, m.t);
  expect_pose(inverse(Pose2(0, 1, kPi / 2)), -1, 0, -kPi / 2);
}

TEST(Between, EqualsInverseCompose) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const Pose2 a = random_pose(rng), b = random_pose(rng);
    const Pose2 d = between(a, b);
    const Pose2 e = compose(inverse(a), b);
    expect_pose(d, e.x(), e.y(), e.theta(), 1e-10);
  }
}

TEST(LogMap, KnownValues) {
  const Tangent3 z = log_map(Pose2::identity());
  EXPECT_EQ(z.dx, 0.0);
  EXPECT_EQ(z.dy, 0.0);
  EXPECT_EQ(z.dtheta, 0.0);
  const Tangent3 t = log_map(Pose2(5, 0, 0));
  EXPECT_NEAR(t.dx, 5, 1e-15);
  EXPECT_NEAR(t.dy, 0, 1e-15);
  EXPECT_NEAR(t.dtheta, 0, 1e-15);
}

TEST(ExpMap, KnownValues) {
  expect_pose(exp_map({0, 0, 0}), 0, 0, 0);
  expect_pose(exp_map({1, 0, 0}), 1, 0, 0);
  // Half circle of radius 1/pi * pi: unit speed along an arc of pi rad.
  expect_pose(exp_map({kPi, 0, kPi}), 0, 2, kPi, 1e-12);
}

TEST(ExpLog, MatchSeriesOracle) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-20, 20);
  std::uniform_real_distribution<double> w(-3.1, 3.1);
  for (int i = 0; i < 500; ++i) {
    const Tangent3 v{u(rng), u(rng), w(rng)};
    const oracle::Xyt m = oracle::from_hom(oracle::expm(v.dx, v.dy, v.dtheta));
    expect_pose(exp_map(v), m.x, m.y, m.t, 1e-9);

    const Pose2 p = random_pose(rng);
    const Eigen::Vector3d l = oracle::logm(oracle::hom(p.x(), p.y(), p.theta()));
    const Tangent3 got = log_map(p);
    EXPECT_NEAR(got.dx, l.x(), 1e-9);
    EXPECT_NEAR(got.dy, l.y(), 1e-9);
    EXPECT_NEAR(got.dtheta, l.z(), 1e-12);
  }
}

TEST(ExpLog, SmallAngleBranchIsContinuous) {
  for (double th : {1e-3, 1.01e-4, 0.99e-4, 1e-6, 1e-9, -1e-5}) {
    const Tangent3 v{2.0, -1.0, th};
    const oracle::Xyt m = oracle::from_hom(oracle::expm(v.dx, v.dy, v.dtheta));
    expect_pose(exp_map(v), m.x, m.y, m.t, 1e-13);
    const Tangent3 back = log_map(exp_map(v));
    EXPECT_NEAR(back.dx, v.dx, 1e-13);
    EXPECT_NEAR(back.dy, v.dy, 1e-13);
    EXPECT_NEAR(back.dtheta, v.dtheta, 1e-15);
  }
}

TEST(ExpLog, RoundTripNearPi) {
  for (double th : {kPi - 1e-9, -kPi + 1e-9, kPi}) {
    const Pose2 p(3.0, -2.0, th);
    const Pose2 q = exp_map(log_map(p));
    expect_pose(q, p.x(), p.y(), p.theta(), 1e-9);
  }
}

TEST(Adjoint, MatchesConjugation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  for (int i = 0; i < 100; ++i) {
    const Pose2 a = random_pose(rng, 5.0);
    const Tangent3 d{u(rng), u(rng), u(rng)};
    // a * exp(d) * a^-1 = exp(Ad(a) d) to first order; compare via the log.
    const Tangent3 lhs = log_map(compose(compose(a, exp_map(d)), inverse(a)));
    const Eigen::Vector3d rhs = adjoint(a) * d.vector();
    EXPECT_NEAR(lhs.dx, rhs.x(), 1e-12);
    EXPECT_NEAR(lhs.dy, rhs.y(), 1e-12);
    EXPECT_NEAR(lhs.dtheta, rhs.z(), 1e-12);
  }
}

TEST(RightJacobianInverse, IdentityAtZero) {
  const Eigen::Matrix3d j = right_jacobian_inverse({0, 0, 0});
  EXPECT_LT((j - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EdgeResidual, KnownValues) {
  const Tangent3 a = edge_residual(Pose2::identity(), Pose2::identity(), Pose2::identity());
  EXPECT_EQ(a.vector(), Eigen::Vector3d::Zero());
  const Tangent3 b = edge_residual(Pose2::identity(), Pose2(1, 0, 0), Pose2(1, 0, 0));
  EXPECT_LT(b.vector().norm(), 1e-15);
  const Tangent3 c = edge_residual(Pose2::identity(), Pose2(2, 0, 0), Pose2(1, 0, 0));
  EXPECT_NEAR(c.dx, 1.0, 1e-15);
  EXPECT_NEAR(c.dy, 0.0, 1e-15);
  EXPECT_NEAR(c.dtheta, 0.0, 1e-15);
}

TEST(EdgeJacobians, IdentityChartAtZeroResidual) {
  const EdgeJacobians j = edge_jacobians(Pose2::identity(), Pose2::identity(), Pose2::identity());
  EXPECT_LT((j.wrt_to - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((j.wrt_from + Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EdgeJacobians, FromSideIsMinusRelativeAdjointAtZeroResidual) {
  const Pose2 xi(1, 2, 0.3), xj(4, -1, 1.2);
  const Pose2 z = between(xi, xj);
  const EdgeJacobians j = edge_jacobians(xi, xj, z);
  const Eigen::Matrix3d expected = -adjoint(between(xj, xi));
  EXPECT_LT((j.wrt_from - expected).cwiseAbs().maxCoeff(), 1e-12);
}

namespace {

// Central differences of a residual function under right perturbations.
template <class F>
Eigen::Matrix3d numeric_jacobian(F residual_at, const Pose2& x, double h = 1e-6) {
  Eigen::Matrix3d j;
  for (int k = 0; k < 3; ++k) {
    Eigen::Vector3d d = Eigen::Vector3d::Zero();
    d(k) = h;
    Eigen::Vector3d diff = residual_at(retract(x, Tangent3::from_vector(d))).vector() -
                           residual_at(retract(x, Tangent3::from_vector(-d))).vector();
    diff(2) = normalize_angle(diff(2));
    j.col(k) = diff / (2 * h);
  }
  return j;
}

double relative_error(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace

TEST(EdgeJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> small(-0.5, 0.5);
  for (int i = 0; i < 300; ++i) {
    const Pose2 xi = random_pose(rng, 20), xj = random_pose(rng, 20);
    const Pose2 z = compose(between(xi, xj), Pose2(small(rng), small(rng), small(rng)));
    const EdgeJacobians j = edge_jacobians(xi, xj, z);
    const auto fi = [&](const Pose2& p) { return edge_residual(p, xj, z); };
    const auto fj = [&](const Pose2& p) { return edge_residual(xi, p, z); };
    EXPECT_LT(relative_error(j.wrt_from, numeric_jacobian(fi, xi)), 1e-5);
    EXPECT_LT(relative_error(j.wrt_to, numeric_jacobian(fj, xj)), 1e-5);
  }
}

TEST(PositionResidual, IgnoresEndpointHeadings) {
  const Pose2 z(3, 4, 0.2);
  const Tangent3 a = position_residual(Pose2(1, 1, 0.0), Pose2(5, 6, 0.0), z);
  const Tangent3 b = position_residual(Pose2(1, 1, 2.0), Pose2(5, 6, -1.0), z);
  EXPECT_NEAR(a.dx, b.dx, 1e-15);
  EXPECT_NEAR(a.dy, b.dy, 1e-15);
}

TEST(PositionJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    const Pose2 xi = random_pose(rng, 20), xj = random_pose(rng, 20), z = random_pose(rng, 20);
    const EdgeJacobians j = position_jacobians(xi, xj, z);
    const auto fi = [&](const Pose2& p) { return position_residual(p, xj, z); };
    const auto fj = [&](const Pose2& p) { return position_residual(xi, p, z); };
    EXPECT_LT(relative_error(j.wrt_from, numeric_jacobian(fi, xi)), 1e-5);
    EXPECT_LT(relative_error(j.wrt_to, numeric_jacobian(fj, xj)), 1e-5);
  }
}
