#include "admlab/weighted_conv.hpp"

#include <gtest/gtest.h>

#include <boost/math/special_functions/digamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace admlab;

namespace {

// Composite Simpson in u with sigma = u^4. For alpha p' = 1/2 the integrand
// becomes a polynomial-like function of u that vanishes at u = 0.
double c_tilde_simpson(double p, double alpha, int n = 200000) {
  const double q = p / (p - 1.0);
  auto g = [&](double u) {
    const double s = u * u * u * u;
    if (s == 0.0) return 0.0;
    const double v = s == 1.0 ? -alpha : (std::pow(s, -alpha) - 1.0) / (s - 1.0);
    return std::pow(std::abs(v), q) * 4.0 * u * u * u;
  };
  const double h = 1.0 / n;
  double sum = g(0.0) + g(1.0);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(i * h);
  return sum * h / 3.0;
}

const GridPtr& grid() {
  static const GridPtr g = conv_grid();
  return g;
}

}  // namespace

TEST(CTilde, VanishesWithoutWeight) {
  EXPECT_EQ(c_tilde(2.0, 0.0).value, 0.0);
  EXPECT_FALSE(c_tilde(2.0, 0.0).divergent);
}

TEST(CTilde, QuadraticVanishingNearZero) {
  const double v = c_tilde(2.0, 1e-3).value;
  EXPECT_LT(v, 1e-4);
  EXPECT_GT(v, 0.0);
  // c_tilde / alpha^2 tends to the finite value int_0^1 (ln sigma / (sigma - 1))^2.
  EXPECT_NEAR(c_tilde(2.0, 1e-3).value / 1e-6, c_tilde(2.0, 2e-3).value / 4e-6, 0.01 * v / 1e-6);
}

TEST(CTilde, MatchesIndependentQuadrature) {
  for (double alpha : {0.25, -0.2, -0.5}) {
    const double ref = c_tilde_simpson(2.0, alpha);
    EXPECT_NEAR(c_tilde(2.0, alpha).value, ref, 1e-7 * ref) << alpha;
  }
  EXPECT_GT(c_tilde(2.0, 0.25).value, 0.0);
}

TEST(CTilde, DivergentBeyondConjugateRange) {
  EXPECT_TRUE(c_tilde(2.0, 0.5).divergent);
  EXPECT_TRUE(std::isinf(c_tilde(3.0, 0.7).value));
  EXPECT_THROW(c_tilde(1.0, 0.1), std::invalid_argument);
}

TEST(Commutator, ZeroWithoutWeight) {
  const auto sys = ConvolutionSystem::heat_trace();
  const auto f = Signal::sample(grid(), [](double t) { return std::sin(t); });
  for (double v : apply_commutator(sys, 0.0, f).values) EXPECT_EQ(v, 0.0);
}

TEST(Commutator, ModelKernelOnConstantInputIsTimeIndependent) {
  // int_0^1 (sigma^{-alpha} - 1)/(1 - sigma) d sigma = psi(1) - psi(1 - alpha)
  const auto sys = ConvolutionSystem::model(1.0);
  const auto f = Signal::sample(grid(), [](double) { return 1.0; });
  for (double alpha : {0.25, -0.3}) {
    const double expect = boost::math::digamma(1.0) - boost::math::digamma(1.0 - alpha);
    const auto y = apply_commutator(sys, alpha, f);
    for (std::size_t i = 0; i < y.size(); i += 37) EXPECT_NEAR(y.values[i], expect, 1e-7) << grid()->times()[i];
  }
}

TEST(Commutator, Linearity) {
  const auto sys = ConvolutionSystem::heat_trace();
  const auto f = Signal::sample(grid(), [](double t) { return std::cos(2 * t); });
  const auto g = Signal::sample(grid(), [](double t) { return t < 1.0 ? 1.0 : -0.5; });
  const double a = 1.7, b = -0.4;
  Signal h = f;
  for (std::size_t i = 0; i < h.size(); ++i) h.values[i] = a * f.values[i] + b * g.values[i];
  const auto tf = apply_commutator(sys, 0.2, f), tg = apply_commutator(sys, 0.2, g), th = apply_commutator(sys, 0.2, h);
  for (std::size_t i = 0; i < h.size(); ++i)
    EXPECT_NEAR(th.values[i], a * tf.values[i] + b * tg.values[i], 1e-10 * (1.0 + std::abs(th.values[i])));
}

TEST(WeightedIO, WeightIsometryAndInverse) {
  const auto u = Signal::sample(grid(), [](double t) { return std::exp(-t) - 0.3; });
  const auto back = apply_weight(apply_weight(u, 0.37), -0.37);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(back.values[i], u.values[i], 1e-15);
  const double h = grid()->horizon();
  EXPECT_NEAR(weighted_lp_norm(u, {2.0, 0.37, h}), weighted_lp_norm(apply_weight(u, 0.37), {2.0, 0.0, h}),
              1e-12 * weighted_lp_norm(u, {2.0, 0.37, h}));
}

TEST(WeightedIO, ConjugatedFormAgrees) {
  const auto sys = ConvolutionSystem::heat_trace();
  const auto u = Signal::sample(grid(), [](double t) { return 1.0 + std::sin(3.0 * t); });
  for (double alpha : {-0.2, 0.25}) {
    const auto io = weighted_io_apply(sys, {2.0, alpha, grid()->horizon()}, u);
    EXPECT_LT(io.max_relative_gap, 1e-6);
    // The conjugated route interpolates t^alpha u, which is not polynomial on
    // the panel touching t = 0; away from it the two routes agree closely.
    double scale = 0.0, gap = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      scale = std::max(scale, std::abs(io.direct.values[i]));
      if (grid()->times()[i] >= 1e-3) gap = std::max(gap, std::abs(io.direct.values[i] - io.conjugated.values[i]));
    }
    EXPECT_LT(gap / scale, 1e-8) << alpha;
  }
}

TEST(WeightedIO, HeatKernelMatchesIndependentIntegral) {
  const auto sys = ConvolutionSystem::heat_trace();
  // Eight nodes per panel resolve the convolution to about 1e-9; sixteen to round-off.
  for (auto [nodes, tol] : {std::pair{8u, 2e-9}, std::pair{16u, 1e-12}}) {
    ConvGridOptions o;
    o.nodes = nodes;
    const auto g = conv_grid(o);
    const auto y = convolve(sys, 0.0, Conjugation::Plain, Signal::sample(g, [](double) { return 1.0; }));
    for (std::size_t i = 0; i < y.size(); i += 41) {
      const double t = g->times()[i];
      // r = w^2 removes the inverse square-root singularity at r = 0.
      const double ref = quad::integrate_uniform([&](double w) { return 2.0 * w * sys.kernel(w * w); }, 0.0,
                                                 std::sqrt(t), 64, quad::gauss_legendre(16));
      EXPECT_NEAR(y.values[i], ref, tol * ref) << nodes << " " << t;
    }
  }
}

TEST(HeatKernel, SmallTimeFormMatchesEigenSum) {
  const auto op = SpectralOperator::neumann_laplacian(4096, 1.0);
  const auto eig = ConvolutionSystem::from_spectral(op, BoundaryOperator::observation(), BoundaryOperator::control());
  const auto theta = ConvolutionSystem::heat_trace(1.0);
  for (double t : {0.01, 0.3, 0.99, 1.01, 4.0}) EXPECT_NEAR(eig.kernel(t), theta.kernel(t), 1e-10 * theta.kernel(t));
}

TEST(HeatKernel, BoundCertificate) {
  const auto sys = ConvolutionSystem::heat_trace();
  EXPECT_TRUE(std::isfinite(sys.m_bound));
  EXPECT_GT(sys.m_bound, 0.0);
  // t K(t) -> 0 at 0 since K(t) ~ (pi t)^{-1/2}.
  EXPECT_LT(1e-8 * sys.kernel(1e-8), 1e-3);
  // The bound is a sampled supremum; a much denser sweep moves it very little.
  double dense = 0.0;
  for (double t = 1e-6; t < 1e3; t *= 1.0005) dense = std::max(dense, t * sys.kernel(t));
  EXPECT_LE(sys.m_bound, dense);
  EXPECT_NEAR(sys.m_bound, dense, 1e-4 * dense);
}

TEST(Equivalence, IdentityWithoutWeight) {
  const auto sys = ConvolutionSystem::heat_trace();
  const auto trials = conv_trial_inputs(grid(), {}, 42, 4);
  const auto rep = equivalence_ratio(sys, 2.0, 0.0, trials);
  EXPECT_EQ(rep.ratio, 1.0);
  EXPECT_EQ(rep.commutator, 0.0);
}

TEST(Equivalence, ZeroKernel) {
  const auto trials = conv_trial_inputs(grid(), {}, 42, 4);
  const auto rep = equivalence_ratio(ConvolutionSystem::zero(), 2.0, 0.2, trials);
  EXPECT_EQ(rep.norm_plain, 0.0);
  EXPECT_EQ(rep.norm_weighted, 0.0);
}

TEST(Equivalence, TransferBoundOnHeatInstance) {
  const auto sys = ConvolutionSystem::heat_trace();
  const auto trials = conv_trial_inputs(grid(), {}, 42, 8);
  for (double alpha : {-0.2, -0.1, 0.2, 0.25}) {
    const auto rep = equivalence_ratio(sys, 2.0, alpha, trials);
    EXPECT_TRUE(std::isfinite(rep.norm_plain));
    EXPECT_TRUE(std::isfinite(rep.norm_weighted));
    EXPECT_TRUE(rep.triangle_ok) << alpha;
    EXPECT_LE(rep.norm_weighted, rep.norm_plain + std::sqrt(rep.c_tilde) * sys.m_bound) << alpha;
  }
}

TEST(Equivalence, RejectsAlphaOutsideRange) {
  const auto trials = conv_trial_inputs(grid(), {}, 1, 1);
  EXPECT_THROW(equivalence_ratio(ConvolutionSystem::heat_trace(), 2.0, 0.5, trials), std::invalid_argument);
}

TEST(WeakType, PointwiseBoundOnModelKernel) {
  for (double p : {1.5, 2.0, 4.0})
    for (double alpha : {-0.2, 0.1, 0.25}) {
      if (!(alpha < 1.0 - 1.0 / p)) continue;
      const auto w = weak_type_check(p, alpha);
      EXPECT_TRUE(w.holds) << p << " " << alpha;
    }
}
