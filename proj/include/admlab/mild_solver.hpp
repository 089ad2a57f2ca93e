#pragma once

#include "admlab/admissibility.hpp"
#include "admlab/quadrature.hpp"
#include "admlab/spectral.hpp"
#include "admlab/time_grid.hpp"

#include <boost/math/special_functions/gamma.hpp>

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

/// Heat equation with boundary feedback u = (f(psi(x)) - f(psi(x0))) g C x,
/// psi(x) the integral of x over the subinterval omega.
struct FeedbackSystem {
  SpectralOperator op = SpectralOperator::neumann_laplacian(16, 1.0);
  BoundaryOperator b = BoundaryOperator::control(1.0, 0.0);
  BoundaryOperator c = BoundaryOperator::observation(1.0, 0.0);
  std::function<double(double)> f = [](double r) { return r; };
  double f_lipschitz = 1.0;
  double g = 1.0;
  double omega_a = 0.3, omega_b = 0.6;
  std::vector<double> psi;  ///< integrals of the eigenfunctions over omega
  double lipschitz = 0.0;   ///< L = Lip(f) |g| ||psi||
  double k_wellposed = 0.0;
  double c_norm = 0.0;  ///< ||C||_{Z -> Y}, Z normed by ||(shift + A) x||
  double tau_max = 1.0;

  /// Fills psi, L, ||C|| and K (the latter on [0, tau_max] for the weight wp).
  void certify(const WeightParams& wp) {
    psi.assign(op.size(), 0.0);
    for (std::size_t n = 0; n < op.size(); ++n) {
      if (n == 0) {
        psi[n] = omega_b - omega_a;
      } else {
        const double k = std::numbers::pi * static_cast<double>(n);
        psi[n] = std::numbers::sqrt2 * (std::sin(k * omega_b) - std::sin(k * omega_a)) / k;
      }
    }
    double pn = 0.0, cz = 0.0;
    for (std::size_t n = 0; n < op.size(); ++n) {
      pn += psi[n] * psi[n];
      const double cn = c.coefficient(op, n) / op.shifted(n);
      cz += cn * cn;
    }
    lipschitz = f_lipschitz * std::abs(g) * std::sqrt(pn);
    c_norm = std::sqrt(cz);
    WeightParams w = wp;
    w.horizon = tau_max;
    k_wellposed = wellposedness_constant(op, b, w).value();
  }

  [[nodiscard]] double measure(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += psi[n] * x[n];
    return s;
  }
  [[nodiscard]] double observe(const std::vector<double>& x) const {
    double s = 0.0;
    for (std::size_t n = 0; n < x.size(); ++n) s += c.coefficient(op, n) * x[n];
    return s;
  }

  /// The example system: 16 Neumann modes, shift 1, Neumann control and
  /// Dirichlet trace observation at x = 0, omega = [0.3, 0.6].
  static FeedbackSystem heat_example(const WeightParams& wp, std::function<double(double)> f, double f_lipschitz,
                                     double g = 1.0, std::size_t modes = 16, double tau_max = 1.0) {
    FeedbackSystem s;
    s.op = SpectralOperator::neumann_laplacian(modes, 1.0);
    s.f = std::move(f);
    s.f_lipschitz = f_lipschitz;
    s.g = g;
    s.tau_max = tau_max;
    s.certify(wp);
    return s;
  }
};

/// Seeded initial state on modes 1..n-1 with coefficients decaying like
/// n^{-decay}; mode 0 is chosen so that psi(x0) = 0.
inline CoeffVector balanced_initial_state(const FeedbackSystem& sys, std::uint64_t seed, double scale = 0.2,
                                          double decay = 2.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CoeffVector x(sys.op.size());
  double m = 0.0;
  for (std::size_t n = 1; n < x.size(); ++n) {
    x[n] = scale * gauss(rng) / std::pow(static_cast<double>(n), decay);
    m += sys.psi[n] * x[n];
  }
  x[0] = -m / sys.psi[0];
  return x;
}

struct ParameterChoice {
  bool ok = false;
  double rho = 0.0, tau = 0.0, eta = 0.0;
  std::vector<double> curve_tau, curve_cv, curve_lv;  ///< measured c_v, l_v on a tau grid
  std::string message;
};

namespace detail {

// ||T(tau) x0 - x0||; each mode factor 1 - e^{-mu t} increases, so this is also the sup over [0, tau].
inline double semigroup_deviation(const SpectralOperator& op, const CoeffVector& x0, double tau) {
  double s = 0.0;
  for (std::size_t n = 0; n < x0.size(); ++n) {
    const double d = -std::expm1(-op.shifted(n) * tau) * x0[n];
    s += d * d;
  }
  return std::sqrt(s);
}

// ||T(.) x0||_{L^p_alpha((0,tau), Z)}, exact for p = 2.
inline double semigroup_graph_norm(const SpectralOperator& op, const CoeffVector& x0, const WeightParams& wp,
                                   double tau) {
  if (wp.p == 2.0) {
    double s = 0.0;
    for (std::size_t n = 0; n < x0.size(); ++n) {
      const double mu = op.shifted(n);
      const double a = 2.0 * wp.alpha + 1.0;
      s += mu * mu * x0[n] * x0[n] * boost::math::tgamma_lower(a, 2.0 * mu * tau) / std::pow(2.0 * mu, a);
    }
    return std::sqrt(s);
  }
  auto f = [&](double t) {
    double s = 0.0;
    for (std::size_t n = 0; n < x0.size(); ++n) {
      const double v = op.shifted(n) * std::exp(-op.shifted(n) * t) * x0[n];
      s += v * v;
    }
    return std::pow(t, wp.alpha * wp.p) * std::pow(s, wp.p / 2.0);
  };
  return std::pow(quad::integrate_endpoint_singular(f, 0.0, tau, wp.alpha * wp.p, 0.0), 1.0 / wp.p);
}

}  // namespace detail

/// rho = min(rho_max, 1/(8 K L ||C||)), so eta = 4 K L ||C|| rho <= 1/2, and the
/// largest tau <= tau_max (by bisection) with max(c_v(tau), l_v(tau)) <= rho.
inline ParameterChoice choose_parameters(const FeedbackSystem& sys, const CoeffVector& x0, const WeightParams& wp,
                                         double rho_max = 1.0) {
  ParameterChoice pc;
  const double klc = sys.k_wellposed * sys.lipschitz * sys.c_norm;
  if (!std::isfinite(klc)) {
    pc.message = "non-finite K L ||C||";
    return pc;
  }
  pc.rho = klc == 0.0 ? rho_max : std::min(rho_max, 0.5 / (4.0 * klc));
  pc.eta = 4.0 * klc * pc.rho;
  auto worst = [&](double tau) {
    return std::max(detail::semigroup_deviation(sys.op, x0, tau), detail::semigroup_graph_norm(sys.op, x0, wp, tau));
  };
  for (int i = 0; i <= 32; ++i) {
    const double t = sys.tau_max * std::pow(10.0, -8.0 + 8.0 * i / 32.0);
    pc.curve_tau.push_back(t);
    pc.curve_cv.push_back(detail::semigroup_deviation(sys.op, x0, t));
    pc.curve_lv.push_back(detail::semigroup_graph_norm(sys.op, x0, wp, t));
  }
  if (worst(sys.tau_max) <= pc.rho) {
    pc.tau = sys.tau_max;
  } else {
    double lo = 0.0, hi = sys.tau_max;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (worst(mid) <= pc.rho ? lo : hi) = mid;
    }
    pc.tau = lo;
  }
  pc.ok = pc.tau > 0.0;
  if (!pc.ok) pc.message = "no horizon satisfies max(c_v, l_v) <= rho";
  return pc;
}

/// Coefficient trajectory on a time grid 0 = t_0 < ... < t_N = tau.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;  ///< states[j][n]
};

struct StepRecord {
  double sup_distance = 0.0;       ///< sup_t ||x_{m+1}(t) - x_m(t)||_X
  double weighted_distance = 0.0;  ///< ||x_{m+1} - x_m||_{L^p_alpha(Z)}
  double sigma_distance = 0.0;     ///< max of the two
  double ratio = 0.0;              ///< sigma_distance / previous sigma_distance
  double ball_distance = 0.0;      ///< ||x_{m+1} - v||_Sigma
};

struct FixedPointRun {
  double rho = 0.0, tau = 0.0, eta = 0.0;
  std::vector<StepRecord> iterates;
  double residual = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;
  bool converged = false;
  bool aborted = false;
  std::string message;
  Trajectory solution;
};

struct SolverOptions {
  std::size_t steps = 20000;
  double grading = 3.0;     ///< t_j = tau (j/N)^grading
  double ratio_slack = 0.05;
};

namespace detail {

// (1 - e^{-z}(1+z))/z^2 and (z - 1 + e^{-z})/z^2.
inline void linear_input_weights(double z, double& w_old, double& w_new) {
  if (z < 0.05) {
    double term = 1.0, a = 0.0, b = 0.0, fact = 2.0;  // fact = (k+2)!
    for (int k = 0; k < 12; ++k) {
      a += term * (k + 1) / fact;
      b += term / fact;
      term *= -z;
      fact *= (k + 3);
    }
    w_old = a;
    w_new = b;
    return;
  }
  const double e = std::exp(-z);
  w_old = (1.0 - e * (1.0 + z)) / (z * z);
  w_new = (z - 1.0 + e) / (z * z);
}

inline std::vector<double> make_solver_times(double tau, const SolverOptions& o) {
  std::vector<double> t(o.steps + 1);
  for (std::size_t j = 0; j <= o.steps; ++j)
    t[j] = tau * std::pow(static_cast<double>(j) / static_cast<double>(o.steps), o.grading);
  return t;
}

// Feedback input at every node of a trajectory.
inline std::vector<double> feedback_input(const FeedbackSystem& sys, const Trajectory& x, double f0) {
  std::vector<double> u(x.times.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    u[j] = (sys.f(sys.measure(x.states[j])) - f0) * sys.g * sys.observe(x.states[j]);
  return u;
}

// v + T * B u with u piecewise linear between nodes, integrated exactly per mode.
inline Trajectory propagate(const FeedbackSystem& sys, const CoeffVector& x0, const std::vector<double>& times,
                            const std::vector<double>& u) {
  const std::size_t modes = sys.op.size();
  Trajectory out;
  out.times = times;
  out.states.assign(times.size(), std::vector<double>(modes, 0.0));
  for (std::size_t n = 0; n < modes; ++n) {
    const double mu = sys.op.shifted(n);
    const double bn = sys.b.coefficient(sys.op, n);
    double conv = 0.0;
    out.states[0][n] = x0[n];
    for (std::size_t j = 0; j + 1 < times.size(); ++j) {
      const double h = times[j + 1] - times[j];
      const double z = mu * h;
      double wo, wn;
      linear_input_weights(z, wo, wn);
      conv = std::exp(-z) * conv + bn * h * (u[j] * wo + u[j + 1] * wn);
      out.states[j + 1][n] = std::exp(-mu * times[j + 1]) * x0[n] + conv;
    }
  }
  return out;
}

struct SigmaParts {
  double sup = 0.0, weighted = 0.0;
  [[nodiscard]] double value() const { return std::max(sup, weighted); }
};

// Sigma norm of a - b (or of a when b is null), trajectories linear between nodes.
inline SigmaParts sigma_norm(const FeedbackSystem& sys, const WeightParams& wp, const Trajectory& a,
                             const Trajectory* b = nullptr) {
  const std::size_t modes = sys.op.size();
  const std::size_t nt = a.times.size();
  std::vector<std::vector<double>> d(nt, std::vector<double>(modes));
  SigmaParts s;
  for (std::size_t j = 0; j < nt; ++j) {
    double x2 = 0.0;
    for (std::size_t n = 0; n < modes; ++n) {
      d[j][n] = a.states[j][n] - (b ? b->states[j][n] : 0.0);
      x2 += d[j][n] * d[j][n];
    }
    s.sup = std::max(s.sup, std::sqrt(x2));
  }
  const double ap = wp.alpha * wp.p;
  const auto& rule = quad::gauss_legendre(4);
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < nt; ++j) {
    double aa = 0.0, ab = 0.0, bb = 0.0;  // Z inner products of the endpoint values
    for (std::size_t n = 0; n < modes; ++n) {
      const double mu = sys.op.shifted(n);
      const double p0 = mu * d[j][n], p1 = mu * d[j + 1][n];
      aa += p0 * p0;
      ab += p0 * p1;
      bb += p1 * p1;
    }
    if (aa == 0.0 && bb == 0.0) continue;
    const double t0 = a.times[j], t1 = a.times[j + 1], h = t1 - t0;
    auto integrand = [&](double t) {
      const double r = (t - t0) / h;
      const double q = std::max(0.0, (1 - r) * (1 - r) * aa + 2 * r * (1 - r) * ab + r * r * bb);
      return std::pow(t, ap) * std::pow(q, wp.p / 2.0);
    };
    if (t0 == 0.0) {
      quad::SingularOptions o;
      o.levels = 30;
      total += quad::integrate_endpoint_singular(integrand, t0, t1, ap, 0.0, o);
    } else {
      total += quad::integrate_panel(integrand, t0, t1, rule);
    }
  }
  s.weighted = std::pow(total, 1.0 / wp.p);
  return s;
}

inline Trajectory free_trajectory(const FeedbackSystem& sys, const CoeffVector& x0, const std::vector<double>& times) {
  return propagate(sys, x0, times, std::vector<double>(times.size(), 0.0));
}

}  // namespace detail

/// The map Gamma x = v + T * B (F(x) - F(x0)) C x evaluated on x's grid.
inline Trajectory gamma_map(const FeedbackSystem& sys, const CoeffVector& x0, const Trajectory& x) {
  const double f0 = sys.f(sys.measure(x0.data()));
  return detail::propagate(sys, x0, x.times, detail::feedback_input(sys, x, f0));
}

/// Sigma norm of a - b: max(sup_t ||a - b||_X, ||a - b||_{L^p_alpha(Z)}).
inline double sigma_distance(const FeedbackSystem& sys, const WeightParams& wp, const Trajectory& a,
                             const Trajectory& b) {
  return detail::sigma_norm(sys, wp, a, &b).value();
}

/// ||x - Gamma x||_Sigma on the grid refined by midpoints. Midpoint states come
/// from x's own mild formula (exact propagation with its piecewise-linear
/// input), so the defect measures both the fixed-point error and the time
/// discretization of the input.
inline double residual(const FeedbackSystem& sys, const Trajectory& x, const CoeffVector& x0, const WeightParams& wp) {
  const double f0 = sys.f(sys.measure(x0.data()));
  const std::vector<double> u = detail::feedback_input(sys, x, f0);
  const std::size_t modes = sys.op.size();
  Trajectory fine;
  for (std::size_t j = 0; j < x.times.size(); ++j) {
    fine.times.push_back(x.times[j]);
    fine.states.push_back(x.states[j]);
    if (j + 1 == x.times.size()) break;
    const double h = 0.5 * (x.times[j + 1] - x.times[j]);
    const double um = 0.5 * (u[j] + u[j + 1]);
    std::vector<double> mid(modes);
    for (std::size_t n = 0; n < modes; ++n) {
      const double mu = sys.op.shifted(n);
      double wo, wn;
      detail::linear_input_weights(mu * h, wo, wn);
      mid[n] = std::exp(-mu * h) * x.states[j][n] + sys.b.coefficient(sys.op, n) * h * (u[j] * wo + um * wn);
    }
    fine.times.push_back(x.times[j] + h);
    fine.states.push_back(std::move(mid));
  }
  return sigma_distance(sys, wp, fine, gamma_map(sys, x0, fine));
}

/// Picard iteration x_{m+1} = Gamma x_m from x_0 = v (or from `start`), stopped
/// when successive iterates are closer than tol in the Sigma norm.
inline FixedPointRun picard_iterate(const FeedbackSystem& sys, const CoeffVector& x0, const WeightParams& wp,
                                    double rho, double tau, double eta, double tol, std::size_t max_iter,
                                    const SolverOptions& opt = {}, const Trajectory* start = nullptr) {
  if (!(eta < 1.0)) throw std::invalid_argument("picard_iterate: eta must be below 1");
  FixedPointRun run;
  run.rho = rho;
  run.tau = tau;
  run.eta = eta;
  const auto times = detail::make_solver_times(tau, opt);
  const Trajectory v = detail::free_trajectory(sys, x0, times);
  Trajectory x = start ? *start : v;
  if (x.times.size() != times.size()) throw std::invalid_argument("picard_iterate: start trajectory grid mismatch");
  double prev = 0.0;
  for (std::size_t m = 0; m < max_iter; ++m) {
    Trajectory next = gamma_map(sys, x0, x);
    const auto parts = detail::sigma_norm(sys, wp, next, &x);
    StepRecord rec;
    rec.sup_distance = parts.sup;
    rec.weighted_distance = parts.weighted;
    rec.sigma_distance = parts.value();
    rec.ratio = m == 0 || prev == 0.0 ? 0.0 : rec.sigma_distance / prev;
    rec.ball_distance = sigma_distance(sys, wp, next, v);
    run.iterates.push_back(rec);
    run.max_ratio = std::max(run.max_ratio, rec.ratio);
    x = std::move(next);
    // Ratios of distances already at round-off level carry no information.
    if (m > 0 && prev > 1e3 * std::numeric_limits<double>::epsilon() && rec.ratio > eta + opt.ratio_slack) {
      run.aborted = true;
      run.message = "step ratio " + std::to_string(rec.ratio) + " exceeds eta + slack";
      break;
    }
    if (rec.ball_distance > rho) {
      run.aborted = true;
      run.message = "iterate left the ball of radius rho";
      break;
    }
    prev = rec.sigma_distance;
    if (rec.sigma_distance < tol) {
      run.converged = true;
      break;
    }
  }
  if (!run.converged && !run.aborted) run.message = "iteration limit reached";
  run.solution = std::move(x);
  run.residual = residual(sys, run.solution, x0, wp);
  if (run.converged && !(run.residual < std::numeric_limits<double>::infinity())) run.converged = false;
  return run;
}

}  // namespace admlab
