#pragma once

#include "admlab/quadrature.hpp"
#include "admlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace admlab {

/// Real interpolation norm (theta, q) of the diagonal Hilbert couple with
/// ||x||_0^2 = sum a_n^2 x_n^2 and ||x||_1^2 = sum b_n^2 x_n^2, realized by
/// the quadratic K-functional K(t)^2 = sum x_n^2 t^2 a_n^2 b_n^2 / (a_n^2 + t^2 b_n^2).
/// The integral over dt/t runs in log t on Gauss-Legendre panels; both power
/// tails beyond the mode transition points are added in closed form.
inline double interp_norm_diagonal(const std::vector<double>& a, const std::vector<double>& b, double theta, double q,
                                   const std::vector<double>& x) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("interpolation norm: theta must lie in (0,1)");
  if (!(q >= 1.0)) throw std::invalid_argument("interpolation norm: q must lie in [1, inf]");
  struct Mode {
    double x2, a2, b2;
  };
  std::vector<Mode> modes;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  double small = 0.0, large = 0.0;  // K ~ t sqrt(small) near 0, K -> sqrt(large) at infinity
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n] == 0.0) continue;
    const Mode m{x[n] * x[n], a[n] * a[n], b[n] * b[n]};
    modes.push_back(m);
    const double turn = std::abs(a[n] / b[n]);
    lo = std::min(lo, turn);
    hi = std::max(hi, turn);
    small += m.x2 * m.b2;
    large += m.x2 * m.a2;
  }
  if (modes.empty()) return 0.0;
  auto phi = [&](double t) {
    double k2 = 0.0;
    for (const auto& m : modes) k2 += m.x2 * t * t * m.a2 * m.b2 / (m.a2 + t * t * m.b2);
    return std::pow(t, -theta) * std::sqrt(k2);
  };
  const double t0 = 1e-5 * lo, t1 = 1e5 * hi;
  const double u0 = std::log(t0), u1 = std::log(t1);
  const auto panels = static_cast<std::size_t>(std::ceil((u1 - u0) / 0.25));

  if (std::isinf(q)) {
    const double h = (u1 - u0) / (4.0 * panels);
    double best = 0.0, arg = u0;
    for (std::size_t i = 0; i <= 4 * panels; ++i) {
      const double u = u0 + h * i;
      const double v = phi(std::exp(u));
      if (v > best) {
        best = v;
        arg = u;
      }
    }
    // Tails are monotone (t^{1-theta} rising, t^{-theta} falling), so the
    // maximum is interior; refine it by golden section.
    double l = arg - h, r = arg + h;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = r - g * (r - l), x2 = l + g * (r - l);
    for (int it = 0; it < 200 && r - l > 1e-13; ++it) {
      if (phi(std::exp(x1)) < phi(std::exp(x2))) {
        l = x1;
        x1 = x2;
        x2 = l + g * (r - l);
      } else {
        r = x2;
        x2 = x1;
        x1 = r - g * (r - l);
      }
    }
    return std::max(best, phi(std::exp(0.5 * (l + r))));
  }

  double total = quad::integrate_uniform([&](double u) { return std::pow(phi(std::exp(u)), q); }, u0, u1, panels,
                                         quad::gauss_legendre(12));
  total += std::pow(small, q / 2.0) * std::pow(t0, (1.0 - theta) * q) / ((1.0 - theta) * q);
  total += std::pow(large, q / 2.0) * std::pow(t1, -theta * q) / (theta * q);
  return std::pow(total, 1.0 / q);
}

/// (theta, q) norm for the couple (X, X_1), X_1 normed by ||(shift + A) x||.
inline double interp_norm_k_functional(const SpectralOperator& op, double theta, double q, const CoeffVector& x) {
  if (!(op.shifted(0) > 0.0)) throw std::invalid_argument("interpolation norm: shifted eigenvalues must be positive");
  std::vector<double> a(x.size(), 1.0), b(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) b[n] = op.shifted(n);
  return interp_norm_diagonal(a, b, theta, q, x.data());
}

/// (eta, r) norm for the couple (X_{-1}, X), X_{-1} normed by ||(shift + A)^{-1} x||.
inline double interp_norm_negative(const SpectralOperator& op, double eta, double r, const CoeffVector& x) {
  if (!(op.shifted(0) > 0.0)) throw std::invalid_argument("interpolation norm: shifted eigenvalues must be positive");
  std::vector<double> a(x.size()), b(x.size(), 1.0);
  for (std::size_t n = 0; n < x.size(); ++n) a[n] = 1.0 / op.shifted(n);
  return interp_norm_diagonal(a, b, eta, r, x.data());
}

/// Mode-wise bound for t ||T(t)||_{W -> Z} with Z = (X, X_1)_{theta,1} and
/// W = (X_{-1}, X)_{theta,inf}: sup over n of t e^{-t mu_n} ||e_n||_Z / ||e_n||_W.
struct SmoothingProfile {
  std::vector<double> times;
  std::vector<double> values;
  double sup_value = 0.0;
};

inline SmoothingProfile smoothing_profile(const SpectralOperator& op, double theta, const std::vector<double>& times) {
  SmoothingProfile prof;
  prof.times = times;
  std::vector<double> ratio(op.size());
  for (std::size_t n = 0; n < op.size(); ++n) {
    const std::vector<double> single{1.0};
    const double mu = op.shifted(n);
    const double z = interp_norm_diagonal({1.0}, {mu}, theta, 1.0, single);
    const double w = interp_norm_diagonal({1.0 / mu}, {1.0}, theta, std::numeric_limits<double>::infinity(), single);
    ratio[n] = z / w;
  }
  for (double t : times) {
    double best = 0.0;
    for (std::size_t n = 0; n < op.size(); ++n) best = std::max(best, t * std::exp(-t * op.shifted(n)) * ratio[n]);
    prof.values.push_back(best);
    prof.sup_value = std::max(prof.sup_value, best);
  }
  return prof;
}

}  // namespace admlab
