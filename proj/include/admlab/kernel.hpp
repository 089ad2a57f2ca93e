#pragma once

#include "admlab/quadrature.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace admlab {

/// Parameters of k(t,s) = 1_{(0,t)}(s) (t-s)^{-gamma} s^{-alpha} acting L^p(0,tau) -> L^inf(0,tau).
struct KernelSpec {
  double alpha = 0.0;
  double gamma = 0.0;
  double p = 2.0;
  double tau = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool finite_horizon() const noexcept { return std::isfinite(tau); }
  [[nodiscard]] double p_conjugate() const noexcept {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
  }
};

/// Row of the boundedness table that governs a spec: row 1 for p = 1 and a
/// finite horizon, row 2 for p = 1 on the half-line, row 3 for p > 1 and a
/// finite horizon, row 4 for p > 1 on the half-line.
struct KernelClass {
  bool bounded = false;
  int row = 0;

  [[nodiscard]] std::string tag() const {
    static const char* names[] = {"?", "i", "ii", "iii", "iv"};
    return std::string(names[row]) + (bounded ? "" : "-violated");
  }
};

inline double kernel_eval(const KernelSpec& k, double t, double s) {
  if (!(s > 0.0) || !(s < t) || t > k.tau) return 0.0;
  return std::pow(t - s, -k.gamma) * std::pow(s, -k.alpha);
}

inline KernelClass classify(const KernelSpec& k) {
  constexpr double eps = 1e-12;
  KernelClass c;
  if (k.p == 1.0) {
    c.row = k.finite_horizon() ? 1 : 2;
    c.bounded = k.finite_horizon() ? (k.alpha <= 0.0 && k.gamma <= 0.0) : (k.alpha == 0.0 && k.gamma == 0.0);
    return c;
  }
  const double ip = std::isinf(k.p) ? 0.0 : 1.0 / k.p;
  const bool base = k.alpha + ip < 1.0 && k.gamma + ip < 1.0;
  const double sum = k.alpha + k.gamma + ip;
  c.row = k.finite_horizon() ? 3 : 4;
  c.bounded = base && (k.finite_horizon() ? sum <= 1.0 + eps : std::abs(sum - 1.0) <= eps);
  return c;
}

namespace detail {
// x^x with 0^0 = 1.
inline double self_power(double x) { return x == 0.0 ? 1.0 : std::pow(x, x); }
}  // namespace detail

/// Exact operator norm; +inf for unbounded specs.
inline double norm_closed_form(const KernelSpec& k) {
  if (!classify(k).bounded) return std::numeric_limits<double>::infinity();
  if (k.p == 1.0) {
    if (!k.finite_horizon()) return 1.0;
    const double a = std::abs(k.alpha), g = std::abs(k.gamma), s = std::abs(k.alpha + k.gamma);
    return detail::self_power(a) * detail::self_power(g) / detail::self_power(s) * std::pow(k.tau, s);
  }
  const double q = k.p_conjugate();
  const double b = std::pow(boost::math::beta(1.0 - k.alpha * q, 1.0 - k.gamma * q), 1.0 / q);
  if (!k.finite_horizon()) return b;
  return std::pow(k.tau, 1.0 / q - k.alpha - k.gamma) * b;
}

struct BruteForceOptions {
  unsigned t_points = 256;
  unsigned levels = 40;
  double divergence_change = 0.10;  ///< relative change that flags divergence
};

struct BruteForceResult {
  double value = 0.0;
  double refined_value = 0.0;
  bool divergent = false;
};

namespace detail {

// L^{p'} norm of sigma -> (1-sigma)^{-gamma} sigma^{-alpha} on (0,1).
inline double unit_profile_norm(const KernelSpec& k, unsigned levels) {
  const double q = k.p_conjugate();
  if (std::isinf(q)) {
    // Supremum of the profile: graded scan into both endpoints, then golden-section refinement.
    auto prof = [&](double s) { return std::pow(1.0 - s, -k.gamma) * std::pow(s, -k.alpha); };
    double best = 0.0, arg = 0.5;
    auto probe = [&](double s) {
      if (!(s > 0.0 && s < 1.0)) return;
      const double v = prof(s);
      if (v > best || !std::isfinite(v)) {
        best = v;
        arg = s;
      }
    };
    for (unsigned l = 1; l <= levels; ++l) {
      const double h = std::ldexp(1.0, -static_cast<int>(l));
      probe(h);
      probe(1.0 - h);
    }
    for (int i = 1; i < 256; ++i) probe(i / 256.0);
    if (!std::isfinite(best)) return best;
    double lo = std::max(arg - 1.0 / 256.0, 0.0), hi = std::min(arg + 1.0 / 256.0, 1.0);
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      if (prof(x1) < prof(x2)) {
        lo = x1;
        x1 = x2;
        x2 = lo + r * (hi - lo);
      } else {
        hi = x2;
        x2 = x1;
        x1 = hi - r * (hi - lo);
      }
    }
    probe(0.5 * (lo + hi));
    return best;
  }
  const double ea = -k.alpha * q, eg = -k.gamma * q;
  quad::SingularOptions opt;
  opt.levels = levels;
  const double integral = quad::integrate_endpoint_singular(
      [&](double, double ds, double dr) { return std::pow(dr, eg) * std::pow(ds, ea); }, 0.0, 1.0, ea, eg, opt);
  return std::pow(integral, 1.0 / q);
}

inline double sup_over_t(const KernelSpec& k, double profile, unsigned points, double range_scale) {
  const double q = k.p_conjugate();
  const double expo = (std::isinf(q) ? 0.0 : 1.0 / q) - k.alpha - k.gamma;
  double best = 0.0;
  for (unsigned i = 0; i < points; ++i) {
    double t;
    if (k.finite_horizon()) {
      t = k.tau * std::exp2(-range_scale * i / 4.0);
    } else {
      const double c = range_scale * (static_cast<double>(i) - points / 2.0) / 2.0;
      t = std::exp2(c);
    }
    best = std::max(best, std::pow(t, expo) * profile);
  }
  return best;
}

}  // namespace detail

/// Supremum over a graded t-grid of ||k(t, .)||_{L^{p'}} by singularity-split
/// quadrature in sigma = s/t. The run is repeated with doubled endpoint
/// refinement and doubled t-range; a relative change above the threshold
/// marks the spec as divergent.
inline BruteForceResult norm_bruteforce(const KernelSpec& k, const BruteForceOptions& opt = {}) {
  BruteForceResult r;
  const double p1 = detail::unit_profile_norm(k, opt.levels);
  const double p2 = detail::unit_profile_norm(k, 2 * opt.levels);
  r.value = detail::sup_over_t(k, p1, opt.t_points, 1.0);
  r.refined_value = detail::sup_over_t(k, p2, 2 * opt.t_points, 1.0);
  if (!std::isfinite(r.value) || !std::isfinite(r.refined_value)) {
    r.divergent = true;
  } else {
    const double denom = std::max(std::abs(r.value), std::numeric_limits<double>::min());
    r.divergent = std::abs(r.refined_value - r.value) / denom > opt.divergence_change;
  }
  return r;
}

/// (K f)(t) = int_0^t (t-s)^{-gamma} s^{-alpha} f(s) ds by singular quadrature.
template <class F>
double apply_kernel(const KernelSpec& k, F&& f, double t, unsigned levels = 40) {
  quad::SingularOptions opt;
  opt.levels = levels;
  return quad::integrate_endpoint_singular(
      [&](double s, double ds, double dr) { return std::pow(dr, -k.gamma) * std::pow(ds, -k.alpha) * f(s); }, 0.0, t,
      -k.alpha, -k.gamma, opt);
}

}  // namespace admlab
