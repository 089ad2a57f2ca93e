#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

namespace admlab {

/// Element of X in the eigenbasis.
class CoeffVector {
 public:
  CoeffVector() = default;
  explicit CoeffVector(std::size_t n) : c_(n, 0.0) {}
  explicit CoeffVector(std::vector<double> c) : c_(std::move(c)) {}

  static CoeffVector unit(std::size_t n, std::size_t mode) {
    CoeffVector v(n);
    v.c_.at(mode) = 1.0;
    return v;
  }

  [[nodiscard]] std::size_t size() const noexcept { return c_.size(); }
  double& operator[](std::size_t i) { return c_[i]; }
  double operator[](std::size_t i) const { return c_[i]; }
  [[nodiscard]] const std::vector<double>& data() const noexcept { return c_; }
  std::vector<double>& data() noexcept { return c_; }

  [[nodiscard]] double squared_norm() const noexcept {
    double s = 0.0;
    for (double x : c_) s += x * x;
    return s;
  }
  [[nodiscard]] double norm() const noexcept { return std::sqrt(squared_norm()); }

  [[nodiscard]] double dot(const CoeffVector& o) const {
    if (o.size() != size()) throw std::invalid_argument("CoeffVector: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < c_.size(); ++i) s += c_[i] * o.c_[i];
    return s;
  }

  CoeffVector& operator*=(double a) {
    for (double& x : c_) x *= a;
    return *this;
  }
  CoeffVector& operator+=(const CoeffVector& o) {
    if (o.size() != size()) throw std::invalid_argument("CoeffVector: size mismatch");
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
  }
  friend CoeffVector operator*(double a, CoeffVector v) { return v *= a; }
  friend CoeffVector operator+(CoeffVector a, const CoeffVector& b) { return a += b; }
  friend CoeffVector operator-(CoeffVector a, const CoeffVector& b) { return a += (-1.0) * b; }

 private:
  std::vector<double> c_;
};

/// Large-n behaviour lambda_n ~ coeff * n^exponent and |phi_n| <= boundary_bound
/// at each endpoint; used for truncation tail bounds.
struct SpectralAsymptotics {
  double coeff = 0.0;
  double exponent = 0.0;
  double boundary_bound = 0.0;
};

/// A value together with an upper bound on the discarded mode tail.
struct Truncated {
  double value = 0.0;
  double tail_bound = 0.0;
};

/// Nonnegative diagonal operator with eigenfunction traces at both endpoints
/// of the unit interval. The shift realizes shift*Id + A.
class SpectralOperator {
 public:
  SpectralOperator(std::vector<double> eigenvalues, double shift, std::vector<std::array<double, 2>> boundary,
                   std::optional<SpectralAsymptotics> asym = std::nullopt)
      : lambda_(std::move(eigenvalues)), shift_(shift), boundary_(std::move(boundary)), asym_(asym) {
    if (lambda_.empty()) throw std::invalid_argument("SpectralOperator: no modes");
    if (boundary_.size() != lambda_.size()) throw std::invalid_argument("SpectralOperator: boundary size mismatch");
    if (!(shift_ >= 0.0)) throw std::invalid_argument("SpectralOperator: shift must be nonnegative");
    for (std::size_t i = 0; i < lambda_.size(); ++i) {
      if (!(lambda_[i] >= 0.0)) throw std::invalid_argument("SpectralOperator: eigenvalues must be nonnegative");
      if (i > 0 && lambda_[i] < lambda_[i - 1])
        throw std::invalid_argument("SpectralOperator: eigenvalues must be sorted ascending");
    }
  }

  /// -d^2/dx^2 on (0,1) with Neumann conditions: lambda_n = (n pi)^2,
  /// phi_0 = 1, phi_n = sqrt(2) cos(n pi x).
  static SpectralOperator neumann_laplacian(std::size_t modes = 4096, double shift = 1.0) {
    std::vector<double> ev(modes);
    std::vector<std::array<double, 2>> bd(modes);
    const double r2 = std::numbers::sqrt2;
    for (std::size_t n = 0; n < modes; ++n) {
      const double k = std::numbers::pi * static_cast<double>(n);
      ev[n] = k * k;
      bd[n] = n == 0 ? std::array<double, 2>{1.0, 1.0} : std::array<double, 2>{r2, (n % 2 == 0) ? r2 : -r2};
    }
    return SpectralOperator(std::move(ev), shift, std::move(bd),
                            SpectralAsymptotics{std::numbers::pi * std::numbers::pi, 2.0, r2});
  }

  /// One mode with eigenvalue `eigenvalue` and traces (b0, b1).
  static SpectralOperator scalar(double eigenvalue, double shift = 0.0, double b0 = 1.0, double b1 = 0.0) {
    return SpectralOperator({eigenvalue}, shift, {{b0, b1}});
  }

  [[nodiscard]] std::size_t size() const noexcept { return lambda_.size(); }
  [[nodiscard]] double shift() const noexcept { return shift_; }
  [[nodiscard]] double eigenvalue(std::size_t n) const { return lambda_[n]; }
  /// eigenvalue_n + shift
  [[nodiscard]] double shifted(std::size_t n) const { return lambda_[n] + shift_; }
  [[nodiscard]] const std::array<double, 2>& boundary(std::size_t n) const { return boundary_[n]; }
  [[nodiscard]] const std::optional<SpectralAsymptotics>& asymptotics() const noexcept { return asym_; }

  /// Same operator restricted to the first `modes` modes.
  [[nodiscard]] SpectralOperator truncated(std::size_t modes) const {
    modes = std::min(modes, size());
    return SpectralOperator(std::vector<double>(lambda_.begin(), lambda_.begin() + modes), shift_,
                            std::vector<std::array<double, 2>>(boundary_.begin(), boundary_.begin() + modes), asym_);
  }

  /// Same operator with every eigenvalue and the shift divided by c.
  [[nodiscard]] SpectralOperator time_rescaled(double c) const {
    std::vector<double> ev(lambda_);
    for (double& x : ev) x /= c;
    std::optional<SpectralAsymptotics> a = asym_;
    if (a) a->coeff /= c;
    return SpectralOperator(std::move(ev), shift_ / c, boundary_, a);
  }

  CoeffVector semigroup_apply(double t, const CoeffVector& x) const {
    if (!(t >= 0.0)) throw std::invalid_argument("semigroup_apply: t must be nonnegative");
    check_size(x);
    CoeffVector y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) y[n] = std::exp(-t * shifted(n)) * x[n];
    return y;
  }

  CoeffVector resolvent_power_apply(double lambda, unsigned k, const CoeffVector& x) const {
    if (k == 0) throw std::invalid_argument("resolvent_power_apply: k must be positive");
    check_size(x);
    if (!(lambda + shifted(0) > 0.0)) throw std::invalid_argument("resolvent_power_apply: lambda hits the spectrum");
    CoeffVector y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) y[n] = x[n] / std::pow(lambda + shifted(n), static_cast<double>(k));
    return y;
  }

  CoeffVector fractional_power_apply(double theta, const CoeffVector& x) const {
    check_size(x);
    if (theta < 0.0 && !(shifted(0) > 0.0))
      throw std::invalid_argument("fractional_power_apply: negative power of a non-injective operator");
    CoeffVector y(x.size());
    for (std::size_t n = 0; n < x.size(); ++n) y[n] = theta == 0.0 ? x[n] : std::pow(shifted(n), theta) * x[n];
    return y;
  }

  /// Upper bound on sum_{n >= size} B^2 / (lambda + mu_n)^{2k} from the
  /// asymptotics (integral comparison with mu_n >= c n^d). Zero when the
  /// operator carries no asymptotics.
  [[nodiscard]] double resolvent_tail_bound(double weight_sum, unsigned k) const {
    if (!asym_ || size() < 2) return 0.0;
    const double b = asym_->boundary_bound * weight_sum;
    const double e = 2.0 * k * asym_->exponent;
    if (e <= 1.0) return std::numeric_limits<double>::infinity();
    const double n1 = static_cast<double>(size() - 1);
    return b * b * std::pow(asym_->coeff, -2.0 * k) * std::pow(n1, 1.0 - e) / (e - 1.0);
  }

 private:
  void check_size(const CoeffVector& x) const {
    if (x.size() > size()) throw std::invalid_argument("CoeffVector longer than the operator's mode count");
  }

  std::vector<double> lambda_;
  double shift_;
  std::vector<std::array<double, 2>> boundary_;
  std::optional<SpectralAsymptotics> asym_;
};

enum class BoundaryKind { Observation, Control };

/// w0 * (trace at 0) + w1 * (trace at 1), either as an observation C or as
/// its formal adjoint, a control B into X_{-1}.
struct BoundaryOperator {
  BoundaryKind kind = BoundaryKind::Observation;
  double w0 = 1.0;
  double w1 = 0.0;

  BoundaryOperator(BoundaryKind k, double a, double b) : kind(k), w0(a), w1(b) {
    if (w0 == 0.0 && w1 == 0.0) throw std::invalid_argument("BoundaryOperator: both endpoint weights are zero");
  }

  static BoundaryOperator observation(double w0 = 1.0, double w1 = 0.0) { return {BoundaryKind::Observation, w0, w1}; }
  static BoundaryOperator control(double w0 = 1.0, double w1 = 0.0) { return {BoundaryKind::Control, w0, w1}; }

  [[nodiscard]] double coefficient(const SpectralOperator& op, std::size_t n) const {
    const auto& b = op.boundary(n);
    return w0 * b[0] + w1 * b[1];
  }

  /// Coefficient sequence of the functional (observation) or of B*1 (control).
  [[nodiscard]] std::vector<double> coefficients(const SpectralOperator& op) const {
    std::vector<double> c(op.size());
    for (std::size_t n = 0; n < c.size(); ++n) c[n] = coefficient(op, n);
    return c;
  }

  [[nodiscard]] double weight_sum() const noexcept { return std::abs(w0) + std::abs(w1); }
};

inline double boundary_observe(const SpectralOperator& op, const BoundaryOperator& c, const CoeffVector& x) {
  if (c.kind != BoundaryKind::Observation) throw std::invalid_argument("boundary_observe: needs an observation operator");
  double s = 0.0;
  for (std::size_t n = 0; n < x.size(); ++n) s += x[n] * c.coefficient(op, n);
  return s;
}

/// B u as a coefficient sequence. It lives in X_{-1}: only smoothed images
/// of it have meaningful X norms.
inline CoeffVector control_embed(const SpectralOperator& op, const BoundaryOperator& b, double u) {
  if (b.kind != BoundaryKind::Control) throw std::invalid_argument("control_embed: needs a control operator");
  CoeffVector v(op.size());
  for (std::size_t n = 0; n < op.size(); ++n) v[n] = u * b.coefficient(op, n);
  return v;
}

}  // namespace admlab
