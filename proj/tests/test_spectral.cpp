#include "admlab/spectral.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace admlab;

namespace {

CoeffVector random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  CoeffVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = g(rng) / (1.0 + i);
  return x;
}

double rel_diff(const CoeffVector& a, const CoeffVector& b) { return (a - b).norm() / std::max(a.norm(), 1e-300); }

}  // namespace

TEST(NeumannInstance, EigenvaluesAndTraces) {
  const auto op = SpectralOperator::neumann_laplacian(8, 0.0);
  EXPECT_EQ(op.eigenvalue(0), 0.0);
  EXPECT_NEAR(op.eigenvalue(3), 9.0 * std::numbers::pi * std::numbers::pi, 1e-12);
  EXPECT_EQ(op.boundary(0)[0], 1.0);
  EXPECT_EQ(op.boundary(0)[1], 1.0);
  EXPECT_NEAR(op.boundary(1)[0], std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(op.boundary(1)[1], -std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(op.boundary(2)[1], std::sqrt(2.0), 1e-15);
}

TEST(SpectralOperator, RejectsInvalidSpectra) {
  EXPECT_THROW(SpectralOperator({1.0, 0.5}, 0.0, {{1, 1}, {1, 1}}), std::invalid_argument);
  EXPECT_THROW(SpectralOperator({-1.0}, 0.0, {{1, 1}}), std::invalid_argument);
  EXPECT_THROW(SpectralOperator({1.0}, -1.0, {{1, 1}}), std::invalid_argument);
}

TEST(Semigroup, IdentityAtZeroAndConstantFixedPoint) {
  const auto op = SpectralOperator::neumann_laplacian(32, 0.0);
  const auto x = random_vector(32, 1);
  EXPECT_EQ(rel_diff(op.semigroup_apply(0.0, x), x), 0.0);
  const auto e0 = CoeffVector::unit(32, 0);
  for (double t : {0.1, 1.0, 100.0}) EXPECT_EQ(op.semigroup_apply(t, e0)[0], 1.0);
}

TEST(Semigroup, ShiftedScalarDecay) {
  const auto op = SpectralOperator::neumann_laplacian(4, 1.0);
  EXPECT_NEAR(op.semigroup_apply(1.0, CoeffVector::unit(4, 0))[0], 0.36787944117144233, 1e-15);
}

TEST(Semigroup, RejectsNegativeTime) {
  const auto op = SpectralOperator::neumann_laplacian(4, 1.0);
  EXPECT_THROW(op.semigroup_apply(-1e-3, CoeffVector(4)), std::invalid_argument);
}

TEST(Semigroup, SemigroupLawOnRandomInputs) {
  const auto op = SpectralOperator::neumann_laplacian(256, 1.0);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  for (int r = 0; r < 20; ++r) {
    const double s = u(rng), t = u(rng);
    const auto x = random_vector(256, 100 + r);
    EXPECT_LT(rel_diff(op.semigroup_apply(s, op.semigroup_apply(t, x)), op.semigroup_apply(s + t, x)), 1e-12);
  }
}

TEST(Semigroup, NormNonincreasingInTime) {
  const auto op = SpectralOperator::neumann_laplacian(128, 1.0);
  const auto x = random_vector(128, 5);
  double prev = x.norm();
  for (double t = 1e-4; t < 10.0; t *= 2.0) {
    const double n = op.semigroup_apply(t, x).norm();
    EXPECT_LE(n, prev);
    prev = n;
  }
}

TEST(Semigroup, AnalyticityBoundPerMode) {
  // sup_t (t mu)^k e^{-t mu} = (k/e)^k for every mode.
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  for (unsigned k = 1; k <= 3; ++k) {
    const double ck = std::pow(k / std::numbers::e, k);
    for (std::size_t n = 0; n < op.size(); ++n) {
      double best = 0.0;
      for (int i = 0; i <= 1200; ++i) {
        const double t = std::pow(10.0, -6.0 + 12.0 * i / 1200.0);
        const double z = t * op.shifted(n);
        best = std::max(best, std::pow(z, k) * std::exp(-z));
      }
      EXPECT_LE(best, ck * (1.0 + 1e-12));
      // At the maximizer t = k / mu the bound is attained.
      const double z = static_cast<double>(k);
      EXPECT_NEAR(std::pow(z, k) * std::exp(-z), ck, 1e-12);
    }
  }
}

TEST(Resolvent, ScalarValues) {
  const auto op = SpectralOperator::scalar(0.0, 1.0);
  const CoeffVector x(std::vector<double>{3.0});
  EXPECT_NEAR(op.resolvent_power_apply(2.0, 1, x)[0], 1.0, 1e-15);
  EXPECT_NEAR(op.resolvent_power_apply(1.0, 2, x)[0], 0.75, 1e-15);
}

TEST(Resolvent, PowerEqualsComposition) {
  const auto op = SpectralOperator::neumann_laplacian(128, 1.0);
  const auto x = random_vector(128, 9);
  for (double lambda : {1e-3, 1.0, 50.0}) {
    const auto once = op.resolvent_power_apply(lambda, 2, x);
    const auto twice = op.resolvent_power_apply(lambda, 1, op.resolvent_power_apply(lambda, 1, x));
    EXPECT_LT(rel_diff(once, twice), 1e-12);
  }
}

TEST(Resolvent, RejectsSpectrumAndZeroPower) {
  const auto op = SpectralOperator::neumann_laplacian(4, 0.0);
  EXPECT_THROW(op.resolvent_power_apply(0.0, 1, CoeffVector(4)), std::invalid_argument);
  EXPECT_THROW(op.resolvent_power_apply(1.0, 0, CoeffVector(4)), std::invalid_argument);
}

TEST(Resolvent, Sectoriality) {
  const auto op = SpectralOperator::neumann_laplacian(256, 1.0);
  const auto x = random_vector(256, 11);
  for (double lambda = 1e-6; lambda < 1e6; lambda *= 3.7)
    EXPECT_LE(lambda * op.resolvent_power_apply(lambda, 1, x).norm(), x.norm() * (1.0 + 1e-14));
}

TEST(FractionalPower, IdentityHalfAndComposition) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  const auto x = random_vector(64, 13);
  EXPECT_EQ(rel_diff(op.fractional_power_apply(0.0, x), x), 0.0);
  EXPECT_LT(rel_diff(op.fractional_power_apply(0.5, op.fractional_power_apply(0.5, x)), op.fractional_power_apply(1.0, x)),
            1e-12);
  const auto four = SpectralOperator::scalar(3.0, 1.0);
  EXPECT_NEAR(four.fractional_power_apply(0.5, CoeffVector(std::vector<double>{1.0}))[0], 2.0, 1e-15);
}

TEST(FractionalPower, NegativePowerOfSingularOperatorRejected) {
  const auto op = SpectralOperator::neumann_laplacian(4, 0.0);
  EXPECT_THROW(op.fractional_power_apply(-0.5, CoeffVector(4)), std::invalid_argument);
}

TEST(Boundary, ObservationOfModes) {
  const auto op = SpectralOperator::neumann_laplacian(8, 1.0);
  const auto c0 = BoundaryOperator::observation(1.0, 0.0);
  const auto c1 = BoundaryOperator::observation(0.0, 1.0);
  EXPECT_EQ(boundary_observe(op, c0, CoeffVector::unit(8, 0)), 1.0);
  EXPECT_NEAR(boundary_observe(op, c0, CoeffVector::unit(8, 1)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(boundary_observe(op, c1, CoeffVector::unit(8, 1)), -std::sqrt(2.0), 1e-15);
}

TEST(Boundary, KindAndWeightChecks) {
  const auto op = SpectralOperator::neumann_laplacian(4, 1.0);
  EXPECT_THROW(BoundaryOperator::observation(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(boundary_observe(op, BoundaryOperator::control(), CoeffVector(4)), std::invalid_argument);
  EXPECT_THROW(control_embed(op, BoundaryOperator::observation(), 1.0), std::invalid_argument);
}

TEST(Boundary, ControlEmbedding) {
  const auto op = SpectralOperator::neumann_laplacian(8, 1.0);
  const auto b = BoundaryOperator::control(1.0, 0.0);
  EXPECT_EQ(control_embed(op, b, 0.0).norm(), 0.0);
  const auto v = control_embed(op, b, 1.0);
  EXPECT_EQ(v[0], 1.0);
  for (std::size_t n = 1; n < 8; ++n) EXPECT_NEAR(v[n], std::sqrt(2.0), 1e-15);
}

TEST(Boundary, AdjointnessThroughResolvent) {
  const auto op = SpectralOperator::neumann_laplacian(512, 1.0);
  for (auto [w0, w1] : {std::pair{1.0, 0.0}, std::pair{0.3, -2.0}}) {
    const auto c = BoundaryOperator::observation(w0, w1);
    const auto b = BoundaryOperator::control(w0, w1);
    const auto x = random_vector(512, 17);
    for (double lambda : {0.5, 10.0}) {
      const double lhs = boundary_observe(op, c, op.resolvent_power_apply(lambda, 1, x));
      const double rhs = x.dot(op.resolvent_power_apply(lambda, 1, control_embed(op, b, 1.0)));
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(CoeffVector, ParsevalUnderRegrouping) {
  auto x = random_vector(300, 21);
  const double before = x.norm();
  std::mt19937_64 rng(2);
  std::shuffle(x.data().begin(), x.data().end(), rng);
  EXPECT_NEAR(x.norm(), before, 1e-14 * before);
  double s = 0.0;
  for (double v : x.data()) s += v * v;
  EXPECT_NEAR(x.squared_norm(), s, 1e-14 * s);
}

TEST(SpectralOperator, TimeRescalingAndTruncation) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  const auto x = random_vector(64, 4);
  const auto r = op.time_rescaled(4.0);
  EXPECT_LT(rel_diff(r.semigroup_apply(2.0, x), op.semigroup_apply(0.5, x)), 1e-14);
  EXPECT_EQ(op.truncated(10).size(), 10u);
  EXPECT_THROW(op.truncated(10).semigroup_apply(1.0, x), std::invalid_argument);
}
