#pragma once

#include "admlab/quadrature.hpp"
#include "admlab/spectral.hpp"
#include "admlab/time_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace admlab {

/// Scalar input-output kernel K(t) with the bound t |K(t)| <= m_bound.
struct ConvolutionSystem {
  std::function<double(double)> kernel;
  double m_bound = 0.0;
  std::string name;

  /// sup of t |K(t)| over a log grid on [lo, hi].
  static double kernel_bound(const std::function<double(double)>& k, double lo = 1e-6, double hi = 1e3,
                             std::size_t points = 1801) {
    double m = 0.0;
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < points; ++i) {
      const double t = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
      m = std::max(m, t * std::abs(k(t)));
    }
    return m;
  }

  /// C T(t) B for the Neumann heat equation observed and controlled at x = 0:
  /// e^{-shift t} sum_{n in Z} e^{-pi^2 n^2 t}. Small t uses the Poisson-summed
  /// form (pi t)^{-1/2} sum_m e^{-m^2/t}, which converges fast there.
  static ConvolutionSystem heat_trace(double shift = 1.0) {
    ConvolutionSystem s;
    s.name = "heat-trace";
    s.kernel = [shift](double t) {
      if (!(t > 0.0)) return 0.0;
      double theta;
      if (t < 1.0) {
        double sum = 1.0;
        for (int m = 1; m < 10; ++m) {
          const double e = std::exp(-double(m) * m / t);
          sum += 2.0 * e;
          if (e < 1e-18) break;
        }
        theta = sum / std::sqrt(std::numbers::pi * t);
      } else {
        double sum = 1.0;
        for (int n = 1; n < 10; ++n) {
          const double e = std::exp(-std::numbers::pi * std::numbers::pi * n * n * t);
          sum += 2.0 * e;
          if (e < 1e-18) break;
        }
        theta = sum;
      }
      return std::exp(-shift * t) * theta;
    };
    s.m_bound = kernel_bound(s.kernel);
    return s;
  }

  /// C T(t) B by eigen-sum over the operator's modes.
  static ConvolutionSystem from_spectral(const SpectralOperator& op, const BoundaryOperator& c,
                                         const BoundaryOperator& b) {
    std::vector<std::pair<double, double>> modes;
    for (std::size_t n = 0; n < op.size(); ++n) {
      const double w = c.coefficient(op, n) * b.coefficient(op, n);
      if (w != 0.0) modes.emplace_back(op.shifted(n), w);
    }
    ConvolutionSystem s;
    s.name = "eigen-sum";
    s.kernel = [modes](double t) {
      double sum = 0.0;
      for (const auto& [mu, w] : modes) {
        const double e = std::exp(-mu * t);
        if (e == 0.0) break;
        sum += w * e;
      }
      return sum;
    };
    s.m_bound = kernel_bound(s.kernel);
    return s;
  }

  /// K(t) = m / t.
  static ConvolutionSystem model(double m = 1.0) {
    ConvolutionSystem s;
    s.name = "model";
    s.kernel = [m](double t) { return t > 0.0 ? m / t : 0.0; };
    s.m_bound = m;
    return s;
  }

  static ConvolutionSystem zero() {
    ConvolutionSystem s;
    s.name = "zero";
    s.kernel = [](double) { return 0.0; };
    s.m_bound = 0.0;
    return s;
  }
};

/// int_0^1 |(sigma^{-alpha} - 1)/(sigma - 1)|^{p'} d sigma, with the value
/// (-alpha) at sigma = 1. Infinite (flagged) when alpha p' >= 1.
struct CTilde {
  double value = 0.0;
  bool divergent = false;
};

inline CTilde c_tilde(double p, double alpha) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("c_tilde: p must lie in (1, inf)");
  const double q = p / (p - 1.0);
  if (!(alpha < 1.0 - 1.0 / p)) return {std::numeric_limits<double>::infinity(), true};
  if (alpha == 0.0) return {0.0, false};
  auto f = [&](double, double ds, double dr) {
    // ln(sigma) from the distance to 1 keeps the quotient accurate near sigma = 1.
    const double ls = dr < 0.5 ? std::log1p(-dr) : std::log(ds);
    const double g = dr == 0.0 ? -alpha : std::expm1(-alpha * ls) / (-dr);
    return std::pow(std::abs(g), q);
  };
  const double e0 = alpha > 0.0 ? -alpha * q : 0.0;
  return {quad::integrate_endpoint_singular(f, 0.0, 1.0, e0, 0.0), false};
}

enum class Conjugation {
  Plain,      ///< int K(t-s) f(s) ds
  Weighted,   ///< int K(t-s) (t/s)^alpha f(s) ds, the conjugate t^alpha F t^{-alpha}
  Commutator  ///< int K(t-s) [(t/s)^alpha - 1] f(s) ds
};

/// Convolution evaluated at every node of f's grid. Each panel below t is
/// integrated in v with s = t - v^2, which absorbs an inverse square-root
/// singularity of K at the diagonal; f is interpolated inside its panel. On the
/// panel touching s = 0 the lower half is refined geometrically toward 0, where
/// the weight (t/s)^alpha is singular.
inline Signal convolve(const ConvolutionSystem& sys, double alpha, Conjugation mode, const Signal& f) {
  const TimeGrid& g = *f.grid;
  const auto& rule = quad::gauss_legendre(static_cast<unsigned>(g.nodes_per_panel()));
  const auto& edges = g.edges();
  std::vector<double> out(g.size(), 0.0);
  quad::SingularOptions near_zero;
  near_zero.levels = 40;
  near_zero.nodes = static_cast<unsigned>(g.nodes_per_panel());
  const double zero_exponent = mode != Conjugation::Plain && alpha > 0.0 ? -alpha : 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double t = g.times()[i];
    // Integrand at s = t - r, f taken from panel k.
    auto term = [&](std::size_t k, double s, double r) {
      if (!(s > 0.0) || !(r > 0.0)) return 0.0;
      double bracket = 1.0;
      if (mode != Conjugation::Plain) {
        const double lt = r < 0.5 * t ? -std::log1p(-r / t) : std::log(t / s);
        bracket = mode == Conjugation::Weighted ? std::exp(alpha * lt) : std::expm1(alpha * lt);
      }
      if (bracket == 0.0) return 0.0;
      return sys.kernel(r) * bracket * g.interpolate_in_panel(f.values, k, s);
    };
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < edges.size() && edges[k] < t; ++k) {
      const double upper = std::min(edges[k + 1], t);
      double lower = edges[k];
      if (lower == 0.0) {
        const double mid_s = 0.5 * upper;
        total += quad::integrate_endpoint_singular([&](double s) { return term(k, s, t - s); }, 0.0, mid_s,
                                                   zero_exponent, 0.0, near_zero);
        lower = mid_s;
      }
      const double v_lo = std::sqrt(t - upper), v_hi = std::sqrt(t - lower);
      const double half = 0.5 * (v_hi - v_lo), mid = 0.5 * (v_hi + v_lo);
      double sum = 0.0;
      for (std::size_t j = 0; j < rule.size(); ++j) {
        const double v = mid + half * rule.nodes[j];
        const double r = v * v;
        sum += rule.weights[j] * 2.0 * v * term(k, t - r, r);
      }
      total += half * sum;
    }
    out[i] = total;
  }
  return Signal(f.grid, std::move(out));
}

inline Signal apply_commutator(const ConvolutionSystem& sys, double alpha, const Signal& f) {
  return convolve(sys, alpha, Conjugation::Commutator, f);
}

/// Output of F^alpha = K * u on L^p_alpha, computed directly and through the
/// conjugated form t^alpha F t^{-alpha} applied to t^alpha u.
struct WeightedIO {
  Signal direct;      ///< K * u
  Signal conjugated;  ///< t^{-alpha} [t^alpha F t^{-alpha}](t^alpha u)
  double max_relative_gap = 0.0;
};

inline WeightedIO weighted_io_apply(const ConvolutionSystem& sys, const WeightParams& wp, const Signal& u) {
  WeightedIO io;
  io.direct = convolve(sys, 0.0, Conjugation::Plain, u);
  const Signal w = apply_weight(u, wp.alpha);
  io.conjugated = apply_weight(convolve(sys, wp.alpha, Conjugation::Weighted, w), -wp.alpha);
  double scale = 0.0;
  for (double v : io.direct.values) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < u.size(); ++i)
    io.max_relative_gap =
        std::max(io.max_relative_gap, std::abs(io.direct.values[i] - io.conjugated.values[i]) / std::max(scale, 1e-300));
  return io;
}

struct ConvGridOptions {
  double horizon = 2.0;
  unsigned uniform_panels = 16;
  unsigned graded_levels = 30;
  unsigned nodes = 8;
};

inline GridPtr conv_grid(const ConvGridOptions& o = {}) {
  GridOptions g;
  g.graded_levels = o.graded_levels;
  g.uniform_panels = o.uniform_panels;
  g.nodes = o.nodes;
  return TimeGrid::make(o.horizon, g);
}

/// Seeded random piecewise-constant signals on the uniform panels, followed by
/// truncated power laws t^{-beta} 1_{t < cut}.
inline std::vector<Signal> conv_trial_inputs(const GridPtr& grid, const ConvGridOptions& o, std::uint64_t seed,
                                             std::size_t random_count = 16,
                                             const std::vector<double>& betas = {0.1, 0.2, 0.3, 0.4}) {
  std::vector<Signal> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double width = o.horizon / o.uniform_panels;
  for (std::size_t r = 0; r < random_count; ++r) {
    std::vector<double> level(o.uniform_panels);
    for (auto& l : level) l = uni(rng);
    out.push_back(Signal::sample(grid, [&](double t) {
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(t / width), o.uniform_panels - 1);
      return level[k];
    }));
  }
  for (double beta : betas)
    for (double cut : {width, o.horizon / 4.0, o.horizon})
      out.push_back(Signal::sample(grid, [&](double t) { return t < cut ? std::pow(t, -beta) : 0.0; }));
  return out;
}

struct EquivalenceReport {
  double p = 2.0, alpha = 0.0;
  double norm_plain = 0.0;     ///< max ||F v||_p / ||v||_p over trials
  double norm_weighted = 0.0;  ///< max ||t^alpha F t^{-alpha} v||_p / ||v||_p, i.e. ||F^alpha|| on L^p_alpha
  double commutator = 0.0;     ///< max ||T v||_p / ||v||_p
  double c_tilde = 0.0;
  double pointwise_bound = 0.0;  ///< c_tilde^{1/p'} M
  double ratio = 1.0;            ///< norm_weighted / norm_plain
  bool triangle_ok = true;       ///< |norm_weighted - norm_plain| <= commutator
  std::size_t trials = 0;
};

/// Estimates ||F|| on L^p and ||F^alpha|| on L^p_alpha over the trial family,
/// together with the commutator norm that links them.
inline EquivalenceReport equivalence_ratio(const ConvolutionSystem& sys, double p, double alpha,
                                           const std::vector<Signal>& trials) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("equivalence_ratio: p must lie in (1, inf)");
  if (!(alpha > -1.0 / p && alpha < 1.0 - 1.0 / p))
    throw std::invalid_argument("equivalence_ratio: alpha outside (-1/p, 1/p')");
  EquivalenceReport rep;
  rep.p = p;
  rep.alpha = alpha;
  rep.trials = trials.size();
  const CTilde ct = c_tilde(p, alpha);
  rep.c_tilde = ct.value;
  rep.pointwise_bound = std::pow(ct.value, 1.0 - 1.0 / p) * sys.m_bound;
  for (const auto& v : trials) {
    const double horizon = v.grid->horizon();
    const WeightParams lp{p, 0.0, horizon};
    const double vn = weighted_lp_norm(v, lp);
    if (vn == 0.0) continue;
    const double a = weighted_lp_norm(convolve(sys, 0.0, Conjugation::Plain, v), lp) / vn;
    const double b = weighted_lp_norm(convolve(sys, alpha, Conjugation::Weighted, v), lp) / vn;
    const double c = weighted_lp_norm(convolve(sys, alpha, Conjugation::Commutator, v), lp) / vn;
    rep.norm_plain = std::max(rep.norm_plain, a);
    rep.norm_weighted = std::max(rep.norm_weighted, b);
    rep.commutator = std::max(rep.commutator, c);
  }
  rep.ratio = rep.norm_plain > 0.0 ? rep.norm_weighted / rep.norm_plain : (rep.norm_weighted == 0.0 ? 1.0 : 0.0);
  rep.triangle_ok = std::abs(rep.norm_weighted - rep.norm_plain) <= rep.commutator * (1.0 + 1e-12) + 1e-300;
  return rep;
}

/// |(T f)(t)| for the model kernel K(u) = m/u and f = 1_{[0,1]}, with the
/// pointwise bound c_tilde^{1/p'} m t^{-1/p}, sampled on t in [t_lo, t_hi].
struct WeakTypeCheck {
  std::vector<double> times, values, bounds;
  bool holds = true;
};

inline WeakTypeCheck weak_type_check(double p, double alpha, double m = 1.0, double t_lo = 1.0, double t_hi = 1e3,
                                     std::size_t points = 61) {
  WeakTypeCheck w;
  const double c = std::pow(c_tilde(p, alpha).value, 1.0 - 1.0 / p);
  for (std::size_t i = 0; i < points; ++i) {
    const double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / static_cast<double>(points - 1));
    const double upper = std::min(t, 1.0);
    auto f = [&](double s, double, double dr) {
      const double r = upper == t ? dr : t - s;
      const double lt = r < 0.5 * t ? -std::log1p(-r / t) : std::log(t / s);
      return r > 0.0 ? m * std::expm1(alpha * lt) / r : m * alpha / t;
    };
    const double v = std::abs(quad::integrate_endpoint_singular(f, 0.0, upper, alpha > 0.0 ? -alpha : 0.0, 0.0));
    const double bound = c * m * std::pow(t, -1.0 / p);
    w.times.push_back(t);
    w.values.push_back(v);
    w.bounds.push_back(bound);
    if (v > bound * (1.0 + 1e-9)) w.holds = false;
  }
  return w;
}

}  // namespace admlab
