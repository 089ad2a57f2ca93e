#pragma once

#include "admlab/quadrature.hpp"
#include "admlab/spectral.hpp"
#include "admlab/time_grid.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace admlab {

// ---------------------------------------------------------------------------
// Resolvent scans

enum class Verdict { Bounded, DivergentAtInfinity, DivergentAtZero };

inline std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Bounded: return "bounded";
    case Verdict::DivergentAtInfinity: return "divergent-at-inf";
    case Verdict::DivergentAtZero: return "divergent-at-0";
  }
  return "?";
}

struct ScanGrid {
  double lo = 1e-6;
  double hi = 1e6;
  std::size_t points = 121;
  double slope_tol = 0.02;

  [[nodiscard]] std::vector<double> lambdas() const {
    std::vector<double> g(points);
    const double a = std::log10(lo), b = std::log10(hi);
    for (std::size_t i = 0; i < points; ++i)
      g[i] = std::pow(10.0, points == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    return g;
  }
};

struct ScanResult {
  std::vector<double> lambda_grid;
  std::vector<double> values;
  double sup_value = 0.0;
  double slope_low = 0.0;
  double slope_high = 0.0;
  double exponent = 0.0;           ///< power of lambda multiplying the resolvent norm
  double max_relative_tail = 0.0;  ///< truncation tail bound relative to the value
  Verdict verdict = Verdict::Bounded;
};

namespace detail {

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double d = n * sxx - sx * sx;
  return d == 0.0 ? 0.0 : (n * sxy - sx * sy) / d;
}

inline double reciprocal(double p) { return std::isinf(p) ? 0.0 : 1.0 / p; }

}  // namespace detail

/// lambda^exponent * (sum_n coeffs_n^2 / (lambda + mu_n)^{2k})^{1/2} on the
/// grid, where mu_n are the shifted eigenvalues. This is the exact norm of the
/// rank-one maps C (lambda + A)^{-k} and (lambda + A)^{-k} B.
inline ScanResult scan_coefficients(const SpectralOperator& op, const std::vector<double>& coeffs, double exponent,
                                    unsigned k, const ScanGrid& grid, double weight_sum = 0.0) {
  if (k == 0) throw std::invalid_argument("scan: k must be positive");
  ScanResult r;
  r.exponent = exponent;
  r.lambda_grid = grid.lambdas();
  r.values.resize(r.lambda_grid.size());
  const double tail = weight_sum > 0.0 ? op.resolvent_tail_bound(weight_sum, k) : 0.0;
  for (std::size_t i = 0; i < r.lambda_grid.size(); ++i) {
    const double lam = r.lambda_grid[i];
    if (!(lam + op.shifted(0) > 0.0)) throw std::invalid_argument("scan: lambda hits the spectrum");
    double s = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
      if (coeffs[n] == 0.0) continue;
      const double d = 1.0 / (lam + op.shifted(n));
      double dk = 1.0;
      for (unsigned j = 0; j < 2 * k; ++j) dk *= d;
      s += coeffs[n] * coeffs[n] * dk;
    }
    r.values[i] = std::pow(lam, exponent) * std::sqrt(s);
    if (s > 0.0) r.max_relative_tail = std::max(r.max_relative_tail, std::sqrt(1.0 + tail / s) - 1.0);
  }
  r.sup_value = *std::max_element(r.values.begin(), r.values.end());
  if (r.sup_value == 0.0) return r;

  // Fit the lowest and highest decade of the grid.
  std::vector<double> xl, yl, xh, yh;
  for (std::size_t i = 0; i < r.lambda_grid.size(); ++i) {
    const double lam = r.lambda_grid[i];
    if (lam <= grid.lo * 10.0 * (1 + 1e-12)) {
      xl.push_back(lam);
      yl.push_back(r.values[i]);
    }
    if (lam >= grid.hi / 10.0 * (1 - 1e-12)) {
      xh.push_back(lam);
      yh.push_back(r.values[i]);
    }
  }
  r.slope_low = detail::loglog_slope(xl, yl);
  r.slope_high = detail::loglog_slope(xh, yh);
  if (r.slope_high > grid.slope_tol)
    r.verdict = Verdict::DivergentAtInfinity;
  else if (r.slope_low < -grid.slope_tol)
    r.verdict = Verdict::DivergentAtZero;
  else
    r.verdict = Verdict::Bounded;
  return r;
}

/// Values lambda^{k - alpha - 1/p} ||C (lambda + A)^{-k}||.
inline ScanResult scan_WC(const SpectralOperator& op, const BoundaryOperator& c, double p, double alpha, unsigned k,
                          const ScanGrid& grid = {}) {
  if (c.kind != BoundaryKind::Observation) throw std::invalid_argument("scan_WC: needs an observation operator");
  const double ip = detail::reciprocal(p);
  if (!(alpha > -ip && alpha < k - ip)) throw std::invalid_argument("scan_WC: alpha outside (-1/p, k - 1/p)");
  return scan_coefficients(op, c.coefficients(op), k - alpha - ip, k, grid, c.weight_sum());
}

/// Values lambda^{k + alpha - 1/p'} ||(lambda + A)^{-k} B||.
inline ScanResult scan_WB(const SpectralOperator& op, const BoundaryOperator& b, double p, double alpha, unsigned k,
                          const ScanGrid& grid = {}) {
  if (b.kind != BoundaryKind::Control) throw std::invalid_argument("scan_WB: needs a control operator");
  const double ipc = 1.0 - detail::reciprocal(p);
  if (!(alpha > ipc - k && alpha < ipc)) throw std::invalid_argument("scan_WB: alpha outside (1/p' - k, 1/p')");
  return scan_coefficients(op, b.coefficients(op), k + alpha - ipc, k, grid, b.weight_sum());
}

/// Plain resolvent norms ||C (lambda + A)^{-k}|| (exponent zero).
inline ScanResult scan_resolvent_norm(const SpectralOperator& op, const BoundaryOperator& c, unsigned k,
                                      const ScanGrid& grid = {}) {
  return scan_coefficients(op, c.coefficients(op), 0.0, k, grid, c.weight_sum());
}

// ---------------------------------------------------------------------------
// Admissibility constants

struct Witness {
  std::string label;
  double ratio = 0.0;
};

struct AdmissibilityReport {
  double constant_estimate = 0.0;
  double horizon = std::numeric_limits<double>::infinity();
  std::vector<Witness> witnesses;
  bool divergent = false;

  void add(std::string label, double ratio) {
    witnesses.push_back({std::move(label), ratio});
    if (std::isinf(ratio)) divergent = true;
    constant_estimate = std::max(constant_estimate, ratio);
  }
};

enum class ObsMethod { Quadrature, EigenSum };

struct ObsOptions {
  ObsMethod method = ObsMethod::Quadrature;
  GridOptions grid{};
  double decay_span = 64.0;  ///< infinite horizons are cut at decay_span / (smallest shifted eigenvalue)
};

namespace detail {

inline GridPtr observation_grid(const SpectralOperator& op, double horizon, const ObsOptions& opt) {
  GridOptions g = opt.grid;
  if (std::isinf(horizon)) g.far_time = std::max(2.0 * g.near_time, opt.decay_span / op.shifted(0));
  return TimeGrid::make(horizon, g);
}

// int_0^tau t^{2 alpha} e^{-nu t} dt
inline double power_exp_moment(double two_alpha, double nu, double tau) {
  const double a = two_alpha + 1.0;
  if (std::isinf(tau)) return std::tgamma(a) / std::pow(nu, a);
  return boost::math::tgamma_lower(a, nu * tau) / std::pow(nu, a);
}

}  // namespace detail

/// y(t) = C T(t) x sampled on `grid`.
inline Signal observation_signal(const SpectralOperator& op, const BoundaryOperator& c, const CoeffVector& x,
                                 GridPtr grid) {
  std::vector<std::pair<double, double>> modes;  // (mu_n, c_n x_n)
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double a = c.coefficient(op, n) * x[n];
    if (a != 0.0) modes.emplace_back(op.shifted(n), a);
  }
  return Signal::sample(std::move(grid), [&](double t) {
    double s = 0.0;
    for (const auto& [mu, a] : modes) s += a * std::exp(-mu * t);
    return s;
  });
}

/// Lower bound for the smallest M with ||C T(.) x||_{L^p_alpha(0,tau)} <= M ||x||,
/// as the maximum ratio over the trial states.
inline AdmissibilityReport obs_admissibility_constant(const SpectralOperator& op, const BoundaryOperator& c,
                                                      const WeightParams& wp, const std::vector<CoeffVector>& trials,
                                                      const ObsOptions& opt = {}) {
  if (c.kind != BoundaryKind::Observation) throw std::invalid_argument("obs constant: needs an observation operator");
  wp.validate();
  AdmissibilityReport rep;
  rep.horizon = wp.horizon;
  GridPtr grid;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const CoeffVector& x = trials[i];
    const double xn = x.norm();
    if (xn == 0.0) throw std::invalid_argument("obs constant: zero trial state");
    const std::string label = "trial-" + std::to_string(i);
    if (wp.infinite_horizon() && !(op.shifted(0) > 0.0) && c.coefficient(op, 0) * x[0] != 0.0 && !wp.p_infinite()) {
      rep.add(label, std::numeric_limits<double>::infinity());
      continue;
    }
    if (opt.method == ObsMethod::EigenSum) {
      if (wp.p != 2.0) throw std::invalid_argument("obs constant: eigen-sum evaluation needs p = 2");
      if (2.0 * wp.alpha <= -1.0) {
        rep.add(label, std::numeric_limits<double>::infinity());
        continue;
      }
      std::vector<std::pair<double, double>> modes;
      for (std::size_t n = 0; n < x.size(); ++n) {
        const double a = c.coefficient(op, n) * x[n];
        if (a != 0.0) modes.emplace_back(op.shifted(n), a);
      }
      double s = 0.0;
      for (const auto& [mu, a] : modes)
        for (const auto& [nu, b] : modes) s += a * b * detail::power_exp_moment(2.0 * wp.alpha, mu + nu, wp.horizon);
      rep.add(label, std::sqrt(std::max(s, 0.0)) / xn);
      continue;
    }
    if (!grid) grid = detail::observation_grid(op, wp.horizon, opt);
    rep.add(label, weighted_lp_norm(observation_signal(op, c, x, grid), wp) / xn);
  }
  return rep;
}

/// Exact p = 2 admissibility constant of the (truncated) system: the square
/// root of the largest eigenvalue of G_nm = c_n c_m int_0^tau t^{2 alpha}
/// e^{-(mu_n + mu_m) t} dt.
inline double obs_gram_constant(const SpectralOperator& op, const BoundaryOperator& c, double alpha, double horizon) {
  if (2.0 * alpha <= -1.0) return std::numeric_limits<double>::infinity();
  const std::size_t n = op.size();
  Eigen::MatrixXd g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double v = c.coefficient(op, i) * c.coefficient(op, j) *
                       detail::power_exp_moment(2.0 * alpha, op.shifted(i) + op.shifted(j), horizon);
      g(i, j) = v;
      g(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

/// Trial family: unit modes, seeded Gaussian combinations of the low modes,
/// and boundary-concentrated vectors (partial sums of the trace coefficients
/// smoothed by the inverse shifted operator).
inline std::vector<CoeffVector> standard_trial_states(const SpectralOperator& op, const BoundaryOperator& c,
                                                      std::uint64_t seed, std::size_t low_modes = 16,
                                                      std::size_t random_count = 8) {
  std::vector<CoeffVector> out;
  const std::size_t n = op.size();
  low_modes = std::min(low_modes, n);
  for (std::size_t m = 0; m < low_modes; ++m) out.push_back(CoeffVector::unit(n, m));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t r = 0; r < random_count; ++r) {
    CoeffVector x(n);
    for (std::size_t m = 0; m < low_modes; ++m) x[m] = gauss(rng);
    out.push_back(std::move(x));
  }
  for (std::size_t cut = 16; cut <= n; cut *= 4) {
    CoeffVector x(n);
    for (std::size_t m = 0; m < cut; ++m) x[m] = c.coefficient(op, m) / op.shifted(m);
    if (x.norm() > 0.0) out.push_back(std::move(x));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Control side

/// u(s) = c exp(r (s - a)) on [a, b).
struct ExpPiece {
  double a = 0.0;
  double b = 1.0;
  double c = 1.0;
  double r = 0.0;
};

/// Finite sum of exponential pieces with disjoint supports, in increasing order.
struct PiecewiseExpSignal {
  std::vector<ExpPiece> pieces;

  PiecewiseExpSignal() = default;
  explicit PiecewiseExpSignal(std::vector<ExpPiece> p) : pieces(std::move(p)) {
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      if (!(pieces[i].b > pieces[i].a) || pieces[i].a < 0.0)
        throw std::invalid_argument("PiecewiseExpSignal: pieces need 0 <= a < b");
      if (i > 0 && pieces[i].a < pieces[i - 1].b)
        throw std::invalid_argument("PiecewiseExpSignal: pieces must be ordered and disjoint");
    }
  }

  static PiecewiseExpSignal constant(double a, double b, double c = 1.0) { return PiecewiseExpSignal({{a, b, c, 0.0}}); }

  [[nodiscard]] double operator()(double s) const {
    for (const auto& p : pieces)
      if (s >= p.a && s < p.b) return p.c * std::exp(p.r * (s - p.a));
    return 0.0;
  }
  [[nodiscard]] bool zero() const {
    return std::all_of(pieces.begin(), pieces.end(), [](const ExpPiece& p) { return p.c == 0.0; });
  }
  [[nodiscard]] double support_begin() const { return pieces.empty() ? 0.0 : pieces.front().a; }
  [[nodiscard]] double support_end() const { return pieces.empty() ? 0.0 : pieces.back().b; }

  [[nodiscard]] PiecewiseExpSignal shifted(double by) const {
    PiecewiseExpSignal s = *this;
    for (auto& p : s.pieces) {
      p.a += by;
      p.b += by;
    }
    return s;
  }

  /// s -> u(tau - s), for signals supported in [0, tau].
  [[nodiscard]] PiecewiseExpSignal reflected(double tau) const {
    if (support_end() > tau) throw std::invalid_argument("reflected: support exceeds tau");
    std::vector<ExpPiece> out;
    for (auto it = pieces.rbegin(); it != pieces.rend(); ++it)
      out.push_back({tau - it->b, tau - it->a, it->c * std::exp(it->r * (it->b - it->a)), -it->r});
    return PiecewiseExpSignal(std::move(out));
  }
};

/// ||u||_{L^p_alpha(0, horizon)} by singular quadrature per piece.
/// Throws std::domain_error when the weighted norm diverges.
inline double weighted_input_norm(const PiecewiseExpSignal& u, const WeightParams& wp) {
  wp.validate();
  if (wp.p_infinite()) {
    double m = 0.0;
    for (const auto& pc : u.pieces) {
      const double b = std::min(pc.b, wp.horizon);
      for (int i = 0; i <= 256; ++i) {
        const double s = pc.a + (b - pc.a) * i / 256.0;
        if (s <= 0.0 && wp.alpha < 0.0) {
          if (pc.c != 0.0) throw std::domain_error("weighted_input_norm: input not in the weighted space");
          continue;
        }
        m = std::max(m, std::pow(s, wp.alpha) * std::abs(pc.c) * std::exp(pc.r * (s - pc.a)));
      }
    }
    return m;
  }
  const double ap = wp.alpha * wp.p;
  double sum = 0.0;
  for (const auto& pc : u.pieces) {
    if (pc.c == 0.0 || pc.a >= wp.horizon) continue;
    const double b = std::min(pc.b, wp.horizon);
    if (pc.a == 0.0 && ap <= -1.0) throw std::domain_error("weighted_input_norm: input not in the weighted space");
    const double ea = pc.a == 0.0 ? ap : 0.0;
    sum += std::pow(std::abs(pc.c), wp.p) *
           quad::integrate_endpoint_singular(
               [&](double s, double da, double) {
                 return std::pow(s, ap) * std::exp(wp.p * pc.r * da);
               },
               pc.a, b, ea, 0.0);
  }
  return std::pow(sum, 1.0 / wp.p);
}

/// Mode response int_0^t e^{-mu (t-s)} u(s) ds in closed form.
inline double mode_response(double mu, const PiecewiseExpSignal& u, double t) {
  double s = 0.0;
  for (const auto& pc : u.pieces) {
    if (t <= pc.a) break;
    const double end = std::min(t, pc.b);
    const double len = end - pc.a;
    s += pc.c * std::exp(-mu * (t - end) + pc.r * len) * quad::exp_integral(mu + pc.r, len);
  }
  return s;
}

/// ||(T * B u)(t)||_X.
inline double control_state_norm(const SpectralOperator& op, const BoundaryOperator& b, const PiecewiseExpSignal& u,
                                 double t) {
  double s = 0.0;
  for (std::size_t n = 0; n < op.size(); ++n) {
    const double bn = b.coefficient(op, n);
    if (bn == 0.0) continue;
    const double v = bn * mode_response(op.shifted(n), u, t);
    s += v * v;
  }
  return std::sqrt(s);
}

struct ControlOptions {
  unsigned graded_levels = 48;  ///< sample times graded toward the start of the support
  unsigned nodes = 8;
};

/// Maximum of ||(T * B u)(t)|| over sample times in (0, horizon]. The state
/// decays once the input is switched off, so sampling stops at the end of
/// the support; samples are graded toward the start of the support and
/// include every piece endpoint.
inline double control_sup_state(const SpectralOperator& op, const BoundaryOperator& b, const PiecewiseExpSignal& u,
                                double horizon, const ControlOptions& opt = {}) {
  if (u.pieces.empty()) return 0.0;
  const double t0 = u.support_begin();
  const double t1 = std::min(u.support_end(), horizon);
  if (!(t1 > t0)) return 0.0;
  GridOptions g;
  g.graded_levels = opt.graded_levels;
  g.nodes = opt.nodes;
  g.uniform_panels = 8;
  const auto grid = TimeGrid::make(t1 - t0, g);
  double best = 0.0;
  for (double off : grid->times()) best = std::max(best, control_state_norm(op, b, u, t0 + off));
  for (const auto& pc : u.pieces) {
    if (pc.b <= horizon) best = std::max(best, control_state_norm(op, b, u, pc.b));
  }
  best = std::max(best, control_state_norm(op, b, u, t1));
  return best;
}

/// Lower bound for the smallest K with ||T * B u||_{L^inf((0,tau),X)} <= K ||u||_{L^p_alpha}.
inline AdmissibilityReport control_admissibility_constant(const SpectralOperator& op, const BoundaryOperator& b,
                                                          const WeightParams& wp,
                                                          const std::vector<PiecewiseExpSignal>& inputs,
                                                          const ControlOptions& opt = {}) {
  if (b.kind != BoundaryKind::Control) throw std::invalid_argument("control constant: needs a control operator");
  AdmissibilityReport rep;
  rep.horizon = wp.horizon;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string label = "input-" + std::to_string(i);
    if (inputs[i].zero()) {
      rep.add(label, 0.0);
      continue;
    }
    const double un = weighted_input_norm(inputs[i], wp);
    if (un == 0.0) {
      rep.add(label, 0.0);
      continue;
    }
    rep.add(label, control_sup_state(op, b, inputs[i], wp.horizon, opt) / un);
  }
  return rep;
}

/// Lower bound for the smallest K with ||int_0^inf T(t) B u(t) dt|| <= K ||u||_{L^p_{-alpha}}.
inline AdmissibilityReport dual_control_constant(const SpectralOperator& op, const BoundaryOperator& b,
                                                 const WeightParams& wp,
                                                 const std::vector<PiecewiseExpSignal>& inputs) {
  if (b.kind != BoundaryKind::Control) throw std::invalid_argument("dual constant: needs a control operator");
  if (wp.p_infinite()) throw std::invalid_argument("dual constant: needs p < inf");
  WeightParams dual = wp;
  dual.alpha = -wp.alpha;
  AdmissibilityReport rep;
  rep.horizon = wp.horizon;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const std::string label = "input-" + std::to_string(i);
    const auto& u = inputs[i];
    if (u.zero()) {
      rep.add(label, 0.0);
      continue;
    }
    const double un = weighted_input_norm(u, dual);
    double s = 0.0;
    for (std::size_t n = 0; n < op.size(); ++n) {
      const double bn = b.coefficient(op, n);
      if (bn == 0.0) continue;
      const double mu = op.shifted(n);
      double v = 0.0;
      for (const auto& pc : u.pieces) {
        const double end = std::min(pc.b, wp.horizon);
        if (end <= pc.a) continue;
        v += pc.c * std::exp(-mu * pc.a) * quad::exp_integral(mu - pc.r, end - pc.a);
      }
      s += bn * bn * v * v;
    }
    rep.add(label, un == 0.0 ? 0.0 : std::sqrt(s) / un);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Square-function estimate

enum class LpStarMethod { Auto, Exact, Quadrature };

/// (int_0^inf ||(tA)^theta T(t) x||^p dt/t)^{1/p} for the shifted operator.
/// p = 2 has the exact per-mode value Gamma(2 theta) 2^{-2 theta} |x_n|^2.
inline double lp_star_estimate(const SpectralOperator& op, double p, double theta, const CoeffVector& x,
                               LpStarMethod method = LpStarMethod::Auto) {
  if (!(theta > 0.0)) throw std::invalid_argument("lp_star_estimate: theta must be positive");
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("lp_star_estimate: p must lie in [1, inf)");
  if (!(op.shifted(0) > 0.0)) throw std::invalid_argument("lp_star_estimate: shifted eigenvalues must be positive");
  if (x.squared_norm() == 0.0) return 0.0;
  if (method == LpStarMethod::Exact || (method == LpStarMethod::Auto && p == 2.0)) {
    if (p != 2.0) throw std::invalid_argument("lp_star_estimate: exact evaluation needs p = 2");
    return std::sqrt(std::tgamma(2.0 * theta) * std::pow(2.0, -2.0 * theta)) * x.norm();
  }
  double mu_lo = std::numeric_limits<double>::infinity(), mu_hi = 0.0;
  std::vector<std::pair<double, double>> modes;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] == 0.0) continue;
    const double mu = op.shifted(n);
    modes.emplace_back(mu, x[n] * x[n]);
    mu_lo = std::min(mu_lo, mu);
    mu_hi = std::max(mu_hi, mu);
  }
  auto g2 = [&](double t) {
    double s = 0.0;
    for (const auto& [mu, w] : modes) {
      const double z = t * mu;
      s += w * std::pow(z, 2.0 * theta) * std::exp(-2.0 * z);
    }
    return s;
  };
  // Below t0 every mode is in its power regime; integrate that tail analytically.
  const double t0 = 1e-6 / mu_hi, t1 = 80.0 / mu_lo;
  double lead = 0.0;
  for (const auto& [mu, w] : modes) lead += w * std::pow(mu, 2.0 * theta);
  double total = std::pow(lead, p / 2.0) * std::pow(t0, theta * p) / (theta * p);
  const double u0 = std::log(t0), u1 = std::log(t1);
  const auto panels = static_cast<std::size_t>(std::ceil((u1 - u0) / 0.25));
  total += quad::integrate_uniform([&](double u) { return std::pow(g2(std::exp(u)), p / 2.0); }, u0, u1, panels,
                                   quad::gauss_legendre(12));
  return std::pow(total, 1.0 / p);
}

// ---------------------------------------------------------------------------
// Counterexample for negative weights

struct CounterexampleRow {
  int k = 0;
  double weighted_norm = 0.0;    ///< ||u_k||_{L^p_alpha}, alpha = -beta
  double unweighted_norm = 0.0;  ///< ||u_k||_{L^p}
  double sup_output = 0.0;       ///< sup over delta in (0,1] of (T * u_k)(k + delta)
  double endpoint_output = 0.0;  ///< (T * u_k)(k + 1)
  double ratio = 0.0;            ///< sup_output / weighted_norm
};

struct CounterexampleReport {
  double epsilon = 1.0, p = 2.0, beta = 0.5;
  std::vector<CounterexampleRow> rows;
  double fitted_exponent = 0.0;  ///< least-squares growth exponent of ratio in k
  bool grows_like_k_beta = false;
};

/// Scalar system x' = -epsilon x + u with inputs u_k = 1_{[k,k+1]} e^{-epsilon(. - k)}.
inline CounterexampleReport counterexample_alpha_negative(double epsilon, double p, double beta,
                                                          const std::vector<int>& ks) {
  if (!(beta > 0.0)) throw std::invalid_argument("counterexample: beta must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("counterexample: epsilon must be positive");
  if (!(p >= 1.0) || std::isinf(p)) throw std::invalid_argument("counterexample: p must be finite");
  CounterexampleReport rep;
  rep.epsilon = epsilon;
  rep.p = p;
  rep.beta = beta;
  const WeightParams wp{p, -beta, std::numeric_limits<double>::infinity()};
  for (int k : ks) {
    if (k < 1) throw std::invalid_argument("counterexample: k must be positive");
    const PiecewiseExpSignal u({{double(k), double(k + 1), 1.0, -epsilon}});
    CounterexampleRow row;
    row.k = k;
    row.weighted_norm = weighted_input_norm(u, wp);
    row.unweighted_norm = std::pow(-std::expm1(-epsilon * p) / (epsilon * p), 1.0 / p);
    auto out = [&](double d) { return mode_response(epsilon, u, k + d); };
    row.endpoint_output = out(1.0);
    // Golden-section search for the maximum on (0, 1].
    double lo = 0.0, hi = 1.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
      if (out(x1) < out(x2)) {
        lo = x1;
        x1 = x2;
        x2 = lo + g * (hi - lo);
      } else {
        hi = x2;
        x2 = x1;
        x1 = hi - g * (hi - lo);
      }
    }
    row.sup_output = std::max({out(0.5 * (lo + hi)), out(1.0)});
    row.ratio = row.sup_output / row.weighted_norm;
    rep.rows.push_back(row);
  }
  if (rep.rows.size() >= 2) {
    std::vector<double> kx, ry;
    for (const auto& r : rep.rows) {
      kx.push_back(r.k);
      ry.push_back(r.ratio);
    }
    rep.fitted_exponent = detail::loglog_slope(kx, ry);
    rep.grows_like_k_beta = std::abs(rep.fitted_exponent - beta) <= 0.1 * beta;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Well-posedness constant for the state space Z = X_1

struct WellposednessConstant {
  double state_part = 0.0;  ///< bound for sup_t ||(T * B u)(t)||_X
  double graph_part = 0.0;  ///< bound for ||T * B u||_{L^p_alpha(Z)}
  double schur = 0.0;       ///< weighted Young/Schur bound of u -> mu e^{-mu .} * u on L^p_alpha
  [[nodiscard]] double value() const { return std::max(state_part, graph_part); }
};

/// Upper bound on the norm of u -> int_0^t mu e^{-mu (t-s)} u(s) ds on
/// L^p_alpha(0, inf). The bound is mu-independent; for alpha = 0 it is 1
/// (Young). Otherwise a Schur test with test function y^{-1/(p p')}.
inline double weighted_exponential_schur_bound(double p, double alpha) {
  if (!(p > 1.0) || std::isinf(p)) throw std::invalid_argument("schur bound: needs 1 < p < inf");
  const double q = p / (p - 1.0);
  if (!(alpha > -1.0 / p && alpha < 1.0 / q)) throw std::invalid_argument("schur bound: alpha outside (-1/p, 1/p')");
  if (alpha == 0.0) return 1.0;
  const double a1 = alpha + 1.0 / p;  // exponent of (t/s) in the first test
  const double a2 = alpha - 1.0 / q;  // exponent of (t/s) in the second test
  auto first = [&](double t) {
    return t * quad::integrate_endpoint_singular(
                   [&](double, double ds, double dr) { return std::exp(-t * dr) * std::pow(ds, -a1); }, 0.0, 1.0, -a1,
                   0.0);
  };
  auto second = [&](double s) {
    const double w1 = 60.0;
    return quad::integrate_endpoint_singular(
        [&](double w) { return std::exp(-w) * std::pow(1.0 + w / s, a2); }, 0.0, w1, 0.0, 0.0);
  };
  double c1 = 1.0, c2 = 1.0;  // both tests tend to 1 at infinity
  for (int i = -40; i <= 40; ++i) {
    const double t = std::pow(10.0, i / 10.0);
    c1 = std::max(c1, first(t));
    c2 = std::max(c2, second(t));
  }
  return std::pow(c1, 1.0 / q) * std::pow(c2, 1.0 / p);
}

/// K with ||T * B u||_Sigma <= K ||u||_{L^p_alpha(0,tau)}, Sigma norm being
/// max(sup_t ||x(t)||_X, ||x||_{L^p_alpha(Z)}) and ||x||_Z = ||(shift + A) x||.
/// The state part uses Hoelder mode by mode, the graph part the Schur bound.
inline WellposednessConstant wellposedness_constant(const SpectralOperator& op, const BoundaryOperator& b,
                                                    const WeightParams& wp, std::size_t t_points = 96) {
  wp.validate();
  if (!std::isfinite(wp.horizon)) throw std::invalid_argument("wellposedness_constant: needs a finite horizon");
  if (!(wp.p > 1.0) || wp.p_infinite()) throw std::invalid_argument("wellposedness_constant: needs 1 < p < inf");
  WellposednessConstant k;
  const double q = wp.conjugate();
  k.schur = weighted_exponential_schur_bound(wp.p, wp.alpha);
  double b2 = 0.0, b1 = 0.0;
  for (std::size_t n = 0; n < op.size(); ++n) {
    const double bn = b.coefficient(op, n);
    b2 += bn * bn;
    b1 += std::abs(bn);
  }
  k.graph_part = k.schur * (wp.p >= 2.0 ? std::sqrt(b2) : b1);
  // h_n(t) = || e^{-mu (t - .)} s^{-alpha} ||_{L^{p'}(0,t)}
  const double e = -wp.alpha * q;
  for (std::size_t i = 0; i < t_points; ++i) {
    const double t = wp.horizon * std::pow(2.0, -static_cast<double>(i) / 4.0);
    double s = 0.0;
    for (std::size_t n = 0; n < op.size(); ++n) {
      const double bn = b.coefficient(op, n);
      if (bn == 0.0) continue;
      const double mu = op.shifted(n);
      const double h = std::pow(
          quad::integrate_endpoint_singular(
              [&](double, double ds, double dr) { return std::exp(-q * mu * dr) * std::pow(ds, e); }, 0.0, t, e, 0.0),
          1.0 / q);
      s += bn * bn * h * h;
    }
    k.state_part = std::max(k.state_part, std::sqrt(s));
  }
  return k;
}

}  // namespace admlab
