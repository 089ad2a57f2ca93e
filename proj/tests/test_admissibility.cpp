#include "admlab/admissibility.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace admlab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const SpectralOperator& heat() {
  static const SpectralOperator op = SpectralOperator::neumann_laplacian(4096, 1.0);
  return op;
}

}  // namespace

// ---------------------------------------------------------------------------
// Observation constants

TEST(ObservationConstant, ConstantModeHalfLine) {
  const auto op = SpectralOperator::neumann_laplacian(16, 1.0);
  const auto c = BoundaryOperator::observation();
  const std::vector<CoeffVector> trials{CoeffVector::unit(16, 0)};
  const auto q = obs_admissibility_constant(op, c, {2.0, 0.0, kInf}, trials);
  EXPECT_NEAR(q.constant_estimate, 1.0 / std::sqrt(2.0), 1e-10);
  ObsOptions eig;
  eig.method = ObsMethod::EigenSum;
  EXPECT_NEAR(obs_admissibility_constant(op, c, {2.0, 0.0, kInf}, trials, eig).constant_estimate,
              1.0 / std::sqrt(2.0), 1e-14);
  EXPECT_NEAR(obs_admissibility_constant(op, c, {1.0, 0.0, kInf}, trials).constant_estimate, 1.0, 1e-10);
}

TEST(ObservationConstant, QuadratureMatchesEigenSum) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  const auto c = BoundaryOperator::observation();
  const auto trials = standard_trial_states(op, c, 3);
  ObsOptions eig;
  eig.method = ObsMethod::EigenSum;
  for (double alpha : {-0.2, 0.0, 0.3})
    for (double tau : {0.5, kInf}) {
      const WeightParams wp{2.0, alpha, tau};
      const auto a = obs_admissibility_constant(op, c, wp, trials);
      const auto b = obs_admissibility_constant(op, c, wp, trials, eig);
      for (std::size_t i = 0; i < trials.size(); ++i)
        EXPECT_NEAR(a.witnesses[i].ratio, b.witnesses[i].ratio, 1e-8 * b.witnesses[i].ratio);
    }
}

TEST(ObservationConstant, MonotoneInHorizon) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  const auto c = BoundaryOperator::observation();
  const auto trials = standard_trial_states(op, c, 5);
  double prev = 0.0;
  for (double tau : {0.01, 0.1, 1.0, 10.0, kInf}) {
    const double v = obs_admissibility_constant(op, c, {2.0, 0.1, tau}, trials).constant_estimate;
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(ObservationConstant, DivergentWeightReportedInfinite) {
  const auto op = SpectralOperator::neumann_laplacian(8, 1.0);
  const auto rep =
      obs_admissibility_constant(op, BoundaryOperator::observation(), {2.0, -0.5, 1.0}, {CoeffVector::unit(8, 0)});
  EXPECT_TRUE(rep.divergent);
  EXPECT_TRUE(std::isinf(rep.constant_estimate));
}

TEST(ObservationConstant, EstimateDominatesEveryWitness) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  const auto c = BoundaryOperator::observation();
  const auto rep = obs_admissibility_constant(op, c, {2.0, 0.2, 1.0}, standard_trial_states(op, c, 9));
  for (const auto& w : rep.witnesses) EXPECT_GE(rep.constant_estimate, w.ratio);
  // The exact Gram constant bounds every trial ratio from above.
  EXPECT_LE(rep.constant_estimate, obs_gram_constant(op, c, 0.2, 1.0) * (1.0 + 1e-9));
}

TEST(ObservationConstant, FiniteAndInfiniteHorizonsAreComparable) {
  const auto op = SpectralOperator::neumann_laplacian(256, 1.0);
  const auto c = BoundaryOperator::observation();
  for (double alpha : {-0.2, 0.0, 0.25}) {
    const double m1 = obs_gram_constant(op, c, alpha, 1.0);
    const double minf = obs_gram_constant(op, c, alpha, kInf);
    EXPECT_GE(minf, m1);
    EXPECT_LE(minf / m1, 10.0);
  }
}

TEST(ObservationConstant, HoelderChainBoundsTheResolventScan) {
  // lambda^{1-alpha-1/p} |C (lambda + A)^{-1} x| <= Gamma(1 - alpha p')^{1/p'} p'^{-(1 - alpha p')/p'} M ||x||
  const auto op = SpectralOperator::neumann_laplacian(256, 1.0);
  const auto c = BoundaryOperator::observation();
  for (double alpha : {-0.2, 0.0, 0.3}) {
    const double m = obs_gram_constant(op, c, alpha, kInf);
    const double q = 2.0;
    const double factor = std::pow(std::tgamma(1.0 - alpha * q), 1.0 / q) * std::pow(q, -(1.0 - alpha * q) / q);
    const auto scan = scan_WC(op, c, 2.0, alpha, 1);
    EXPECT_EQ(scan.verdict, Verdict::Bounded);
    EXPECT_LE(scan.sup_value, factor * m * (1.0 + 1e-9));
  }
}

// ---------------------------------------------------------------------------
// Control constants

TEST(ControlConstant, ZeroInput) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  const auto rep = control_admissibility_constant(op, BoundaryOperator::control(), {2.0, 0.0, 1.0},
                                                  {PiecewiseExpSignal::constant(0.0, 1.0, 0.0)});
  EXPECT_EQ(rep.constant_estimate, 0.0);
}

TEST(ControlConstant, ScalarResponseToDecayingPulse) {
  const double eps = 0.7;
  for (int k : {1, 5, 40}) {
    const PiecewiseExpSignal u({{double(k), double(k + 1), 1.0, -eps}});
    for (double d : {0.1, 0.5, 1.0})
      EXPECT_NEAR(mode_response(eps, u, k + d), d * std::exp(-eps * d), 1e-14);
  }
}

TEST(ControlConstant, TimeShiftCovarianceWithoutWeight) {
  const auto op = SpectralOperator::neumann_laplacian(256, 1.0);
  const auto b = BoundaryOperator::control();
  const PiecewiseExpSignal u({{0.0, 0.3, 1.0, 0.0}, {0.3, 0.8, -0.5, 1.0}});
  const WeightParams wp{2.0, 0.0, kInf};
  const double k0 = control_admissibility_constant(op, b, wp, {u}).constant_estimate;
  for (double shift : {0.5, 3.0}) {
    const double k1 = control_admissibility_constant(op, b, wp, {u.shifted(shift)}).constant_estimate;
    EXPECT_NEAR(k1, k0, 1e-10 * k0);
  }
}

TEST(ControlConstant, DivergentInputRejected) {
  const auto op = SpectralOperator::neumann_laplacian(8, 1.0);
  EXPECT_THROW(control_admissibility_constant(op, BoundaryOperator::control(), {2.0, -0.5, 1.0},
                                              {PiecewiseExpSignal::constant(0.0, 1.0)}),
               std::domain_error);
}

TEST(ControlConstant, WeightedInputNormClosedForm) {
  // ||1_{[0,tau]}||_{L^2_alpha} = (tau^{1 + 2 alpha} / (1 + 2 alpha))^{1/2}
  for (double alpha : {-0.3, 0.0, 0.4}) {
    const double tau = 1.7;
    const double expect = std::sqrt(std::pow(tau, 1.0 + 2.0 * alpha) / (1.0 + 2.0 * alpha));
    EXPECT_NEAR(weighted_input_norm(PiecewiseExpSignal::constant(0.0, tau), {2.0, alpha, kInf}), expect, 1e-11 * expect);
  }
}

TEST(DualConstant, ZeroInput) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  EXPECT_EQ(dual_control_constant(op, BoundaryOperator::control(), {2.0, 0.25, kInf},
                                  {PiecewiseExpSignal::constant(0.0, 1.0, 0.0)})
                .constant_estimate,
            0.0);
}

TEST(DualConstant, AgreesWithControlConstantOnReflectedInputsWithoutWeight) {
  // For alpha = 0 the reflection u -> u(tau - .) is an isometry and the dual
  // integral of the reflected input is the state at tau. Inputs below make
  // every mode response increase in t, so the state norm peaks at tau.
  const auto op = SpectralOperator::neumann_laplacian(1024, 1.0);
  const auto b = BoundaryOperator::control();
  const double tau = 1.5;
  const std::vector<PiecewiseExpSignal> inputs{PiecewiseExpSignal::constant(0.0, tau),
                                               PiecewiseExpSignal({{0.0, tau, 1.0, 2.0}}),
                                               PiecewiseExpSignal({{0.0, 0.5, 1.0, 0.0}, {0.5, tau, 2.0, 0.0}})};
  std::vector<PiecewiseExpSignal> reflected;
  for (const auto& u : inputs) reflected.push_back(u.reflected(tau));
  const double control = control_admissibility_constant(op, b, {2.0, 0.0, tau}, inputs).constant_estimate;
  const double dual = dual_control_constant(op, b, {2.0, 0.0, kInf}, reflected).constant_estimate;
  EXPECT_NEAR(dual, control, 1e-6 * control);
}

TEST(DualConstant, ReflectedInputGivesStateAtHorizonWithWeight) {
  const auto op = SpectralOperator::neumann_laplacian(512, 1.0);
  const auto b = BoundaryOperator::control();
  const double tau = 2.0, alpha = 0.25;
  const PiecewiseExpSignal u({{0.2, 1.1, 1.0, -0.4}, {1.1, 1.9, -0.6, 0.3}});
  const auto ru = u.reflected(tau);
  const double dual = dual_control_constant(op, b, {2.0, alpha, kInf}, {ru}).constant_estimate;
  const double norm = weighted_input_norm(ru, {2.0, -alpha, kInf});
  EXPECT_NEAR(dual * norm, control_state_norm(op, b, u, tau), 1e-9 * control_state_norm(op, b, u, tau));
}

// ---------------------------------------------------------------------------
// Resolvent scans

TEST(ScanWC, UnweightedHeatSlope) {
  const auto r = scan_WC(heat(), BoundaryOperator::observation(), 2.0, 0.0, 1);
  EXPECT_NEAR(r.slope_high, -0.25, 0.02);
  EXPECT_EQ(r.verdict, Verdict::Bounded);
  for (double v : r.values) EXPECT_LE(v, r.sup_value);
  EXPECT_LT(r.max_relative_tail, 1e-3);
}

TEST(ScanWC, BelowThresholdDiverges) {
  // 2 alpha + 2/p = 0.4 with p = 2
  const auto r = scan_WC(heat(), BoundaryOperator::observation(), 2.0, -0.3, 1);
  EXPECT_NEAR(r.slope_high, 0.05, 0.02);
  EXPECT_EQ(r.verdict, Verdict::DivergentAtInfinity);
}

TEST(ScanWC, RejectsAlphaOutsideRange) {
  EXPECT_THROW(scan_WC(heat(), BoundaryOperator::observation(), 2.0, -0.5, 1), std::invalid_argument);
  EXPECT_THROW(scan_WC(heat(), BoundaryOperator::observation(), 2.0, 0.5, 1), std::invalid_argument);
  EXPECT_NO_THROW(scan_WC(heat(), BoundaryOperator::observation(), 2.0, 1.2, 2));
}

TEST(ScanWC, SingleModeFormula) {
  const double mu = 3.0;
  const auto op = SpectralOperator::scalar(mu - 1.0, 1.0);
  const auto c = BoundaryOperator::observation();
  for (unsigned k : {1u, 2u, 3u}) {
    for (double alpha : {-0.4, 0.2}) {
      const double e = k - alpha - 0.5;
      const auto r = scan_WC(op, c, 2.0, alpha, k);
      for (std::size_t i = 0; i < r.values.size(); i += 17) {
        const double lam = r.lambda_grid[i];
        EXPECT_NEAR(r.values[i], std::pow(lam, e) / std::pow(lam + mu, k), 1e-13 * r.values[i]);
      }
      EXPECT_NE(r.verdict, Verdict::DivergentAtInfinity);
      EXPECT_NEAR(r.slope_low, e, 1e-4);
    }
  }
}

TEST(ScanWB, ThresholdAtThreeHalves) {
  const auto b = BoundaryOperator::control();
  for (double s : {0.7, 1.2, 1.4, 1.6, 1.8}) {
    const double alpha = (s - 1.0) / 2.0;
    const auto r = scan_WB(heat(), b, 2.0, alpha, 1);
    EXPECT_EQ(r.verdict == Verdict::Bounded, s <= 1.5) << s;
    EXPECT_NEAR(r.slope_high, 1.0 + alpha - 0.5 - 0.75, 0.02) << s;
  }
}

TEST(ScanWB, ZeroControlGivesZeroValues) {
  const auto r = scan_coefficients(heat(), std::vector<double>(heat().size(), 0.0), 0.5, 1, {});
  EXPECT_EQ(r.sup_value, 0.0);
  EXPECT_EQ(r.verdict, Verdict::Bounded);
}

TEST(ScanWB, HilbertDualityWithObservationScan) {
  const auto op = SpectralOperator::neumann_laplacian(1024, 1.0);
  for (double p : {1.5, 2.0, 3.0})
    for (double alpha : {-0.2, 0.1}) {
      const double pc = p / (p - 1.0);
      const auto wb = scan_WB(op, BoundaryOperator::control(), p, alpha, 1);
      const auto wc = scan_WC(op, BoundaryOperator::observation(), pc, -alpha, 1);
      for (std::size_t i = 0; i < wb.values.size(); ++i)
        EXPECT_NEAR(wb.values[i], wc.values[i], 1e-10 * wc.values[i]);
    }
}

TEST(ScanWC, VerdictsFlipAtThresholds) {
  const auto c = BoundaryOperator::observation();
  const auto b = BoundaryOperator::control();
  for (double p : {1.5, 2.0, 3.0})
    for (double s : {0.2, 0.35, 0.65, 0.9, 1.1, 1.35, 1.65, 1.8}) {
      const double alpha = (s - 2.0 / p) / 2.0;
      const double ip = 1.0 / p;
      if (!(alpha > -ip && alpha < 1.0 - ip)) continue;
      EXPECT_EQ(scan_WC(heat(), c, p, alpha, 1).verdict == Verdict::Bounded, s >= 0.5);
      EXPECT_EQ(scan_WB(heat(), b, p, alpha, 1).verdict == Verdict::Bounded, s <= 1.5);
    }
}

TEST(ScanWC, TimeRescalingCovariance) {
  // Dividing every eigenvalue by c maps the value at lambda to c^{k - e} times
  // the original value at c lambda.
  const auto op = SpectralOperator::neumann_laplacian(1024, 1.0);
  const auto c = BoundaryOperator::observation();
  const double cc = 10.0;
  ScanGrid g;
  g.points = 121;
  const auto r0 = scan_WC(op, c, 2.0, 0.1, 1, g);
  const auto r1 = scan_WC(op.time_rescaled(cc), c, 2.0, 0.1, 1, g);
  const double factor = std::pow(cc, 1.0 - r0.exponent);
  for (std::size_t i = 0; i + 10 < r0.values.size(); ++i)
    EXPECT_NEAR(r1.values[i], factor * r0.values[i + 10], 1e-10 * r1.values[i]);
}

// ---------------------------------------------------------------------------
// Square-function estimate

TEST(LpStar, ClosedFormValues) {
  const auto op = SpectralOperator::neumann_laplacian(64, 1.0);
  auto x = CoeffVector::unit(64, 5);
  EXPECT_NEAR(lp_star_estimate(op, 2.0, 0.5, x), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(lp_star_estimate(op, 2.0, 1.0, x), 0.5, 1e-15);
  EXPECT_EQ(lp_star_estimate(op, 2.0, 0.5, CoeffVector(64)), 0.0);
  EXPECT_THROW(lp_star_estimate(op, 2.0, 0.0, x), std::invalid_argument);
}

TEST(LpStar, QuadratureMatchesClosedForm) {
  const auto op = SpectralOperator::neumann_laplacian(512, 1.0);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  CoeffVector x(512);
  for (std::size_t n = 0; n < 512; ++n) x[n] = g(rng) / std::pow(1.0 + n, 0.75);
  for (double th : {0.25, 0.5, 1.0, 2.5}) {
    const double a = lp_star_estimate(op, 2.0, th, x, LpStarMethod::Quadrature);
    const double b = lp_star_estimate(op, 2.0, th, x, LpStarMethod::Exact);
    EXPECT_NEAR(a, b, 1e-8 * b) << th;
  }
}

TEST(LpStar, SingleModeForGeneralP) {
  // One mode: (int_0^inf z^{theta p} e^{-p z} dz/z)^{1/p} = (Gamma(theta p) p^{-theta p})^{1/p}.
  const auto op = SpectralOperator::scalar(4.0, 1.0);
  for (double p : {1.0, 1.5, 3.0}) {
    const double th = 0.6;
    const double expect = std::pow(std::tgamma(th * p) * std::pow(p, -th * p), 1.0 / p);
    EXPECT_NEAR(lp_star_estimate(op, p, th, CoeffVector(std::vector<double>{1.0})), expect, 1e-9 * expect);
  }
}

// ---------------------------------------------------------------------------
// Counterexample

TEST(Counterexample, EndpointValueAndGrowth) {
  const auto rep = counterexample_alpha_negative(1.0, 2.0, 0.5, {10, 100});
  ASSERT_EQ(rep.rows.size(), 2u);
  for (const auto& r : rep.rows) {
    EXPECT_NEAR(r.endpoint_output, std::exp(-1.0), 1e-12);
    EXPECT_NEAR(r.unweighted_norm, std::sqrt((1.0 - std::exp(-2.0)) / 2.0), 1e-15);
    EXPECT_LE(r.weighted_norm, std::pow(r.k, -0.5) * r.unweighted_norm * (1.0 + 1e-12));
  }
  EXPECT_GE(rep.rows[1].ratio / rep.rows[0].ratio, 0.9 * std::sqrt(10.0));
  EXPECT_TRUE(rep.grows_like_k_beta);
}

TEST(Counterexample, RejectsBadParameters) {
  EXPECT_THROW(counterexample_alpha_negative(1.0, 2.0, 0.0, {10}), std::invalid_argument);
  EXPECT_THROW(counterexample_alpha_negative(1.0, 2.0, 0.5, {0}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Well-posedness constant

TEST(Wellposedness, SchurBoundIsOneWithoutWeight) {
  EXPECT_EQ(weighted_exponential_schur_bound(2.0, 0.0), 1.0);
  EXPECT_GE(weighted_exponential_schur_bound(2.0, 0.2), 1.0);
  EXPECT_THROW(weighted_exponential_schur_bound(2.0, 0.5), std::invalid_argument);
}

TEST(Wellposedness, ConstantBoundsMeasuredGraphNorm) {
  // ||mu e^{-mu .} * u||_{L^2_alpha} <= schur ||u||_{L^2_alpha} for a few mu.
  const double alpha = 0.1, tau = 1.0;
  const double schur = weighted_exponential_schur_bound(2.0, alpha);
  const auto grid = TimeGrid::make(tau);
  const PiecewiseExpSignal u({{0.0, 0.4, 1.0, 0.0}, {0.4, 1.0, -1.0, 0.5}});
  const double un = weighted_input_norm(u, {2.0, alpha, tau});
  for (double mu : {1.0, 10.0, 1000.0}) {
    const auto y = Signal::sample(grid, [&](double t) { return mu * mode_response(mu, u, t); });
    EXPECT_LE(weighted_lp_norm(y, {2.0, alpha, tau}), schur * un * (1.0 + 1e-6));
  }
}
