#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace admlab::quad {

/// Gauss-Legendre rule on the reference interval [-1, 1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

namespace detail {

template <unsigned N>
Rule make_rule() {
  using G = boost::math::quadrature::gauss<double, N>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  Rule r;
  r.nodes.reserve(N);
  r.weights.reserve(N);
  // boost stores the nonnegative half; mirror it.
  for (std::size_t i = x.size(); i-- > 0;) {
    if (x[i] == 0.0) continue;
    r.nodes.push_back(-x[i]);
    r.weights.push_back(w[i]);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.nodes.push_back(x[i]);
    r.weights.push_back(w[i]);
  }
  return r;
}

}  // namespace detail

/// Supported sizes: 4, 8, 12, 16, 20.
inline const Rule& gauss_legendre(unsigned n = 8) {
  static const Rule r4 = detail::make_rule<4>();
  static const Rule r8 = detail::make_rule<8>();
  static const Rule r12 = detail::make_rule<12>();
  static const Rule r16 = detail::make_rule<16>();
  static const Rule r20 = detail::make_rule<20>();
  switch (n) {
    case 4: return r4;
    case 8: return r8;
    case 12: return r12;
    case 16: return r16;
    case 20: return r20;
    default: throw std::invalid_argument("gauss_legendre: unsupported rule size");
  }
}

template <class F>
double integrate_panel(F&& f, double a, double b, const Rule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Composite rule on [a, b] with `panels` equal panels.
template <class F>
double integrate_uniform(F&& f, double a, double b, std::size_t panels, const Rule& rule = gauss_legendre()) {
  const double h = (b - a) / static_cast<double>(panels);
  double sum = 0.0;
  for (std::size_t k = 0; k < panels; ++k) sum += integrate_panel(f, a + h * k, a + h * (k + 1), rule);
  return sum;
}

struct SingularOptions {
  unsigned levels = 40;  ///< geometric refinement levels toward each endpoint
  unsigned nodes = 8;
};

namespace detail {

// Integrates g over [0, width] on panels [width 2^{-l-1}, width 2^{-l}]. When
// g behaves like v^exponent with exponent > -1, the innermost panel is
// replaced by its power-law value g(h) h / (exponent + 1); otherwise it is
// integrated by the rule, so a divergent integral keeps growing with levels.
template <class G>
double graded_panels(G&& g, double width, double exponent, unsigned levels, const Rule& rule) {
  double sum = 0.0;
  double hi = width;
  for (unsigned l = 0; l < levels; ++l) {
    const double lo = 0.5 * hi;
    sum += integrate_panel(g, lo, hi, rule);
    hi = lo;
  }
  if (exponent > -1.0) {
    const double gh = g(hi);
    if (std::isfinite(gh)) sum += gh * hi / (exponent + 1.0);
  } else {
    sum += integrate_panel(g, 0.0, hi, rule);
  }
  return sum;
}

}  // namespace detail

/// Integrates f over [a, b] where f behaves like (s-a)^{exp_a} near a and
/// (b-s)^{exp_b} near b. The interval is split at its midpoint and each half
/// is covered by Gauss-Legendre panels that halve toward the endpoint.
///
/// f may be callable as f(s) or as f(s, s - a, b - s); the three-argument
/// form receives endpoint distances without cancellation.
///
/// Exponents <= -1 get no closed-form tail, so the result keeps growing with
/// `levels`; callers use that for divergence detection.
template <class F>
double integrate_endpoint_singular(F&& f, double a, double b, double exp_a, double exp_b,
                                   const SingularOptions& opt = {}) {
  if (!(b > a)) return 0.0;
  const Rule& rule = gauss_legendre(opt.nodes);
  const double len = b - a, half = 0.5 * len;
  auto call = [&](double s, double da, double db) -> double {
    if constexpr (std::is_invocable_v<F&, double, double, double>) {
      return f(s, da, db);
    } else {
      return f(s);
    }
  };
  auto left = [&](double da) { return da > 0.0 ? call(a + da, da, len - da) : 0.0; };
  auto right = [&](double db) { return db > 0.0 ? call(b - db, len - db, db) : 0.0; };
  return detail::graded_panels(left, half, exp_a, opt.levels, rule) +
         detail::graded_panels(right, half, exp_b, opt.levels, rule);
}

/// Integral of t^beta over [a, b], 0 <= a < b; requires beta > -1 when a = 0.
inline double power_moment(double beta, double a, double b) {
  if (beta == -1.0) return std::log(b / a);
  const double e = beta + 1.0;
  const double pa = a > 0.0 ? std::pow(a, e) : 0.0;
  return (std::pow(b, e) - pa) / e;
}

/// (1 - e^{-z}) / z, stable near zero.
inline double phi1(double z) {
  if (std::abs(z) < 1e-5) return 1.0 - z / 2.0 + z * z / 6.0;
  return -std::expm1(-z) / z;
}

/// Integral over [0, L] of e^{-kappa w} dw.
inline double exp_integral(double kappa, double length) {
  return length * phi1(kappa * length);
}

}  // namespace admlab::quad
