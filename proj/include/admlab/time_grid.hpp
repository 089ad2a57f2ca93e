#pragma once

#include "admlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <type_traits>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

namespace admlab {

/// Weight triple (p, alpha, horizon) defining L^p_alpha on (0, horizon).
struct WeightParams {
  double p = 2.0;
  double alpha = 0.0;
  double horizon = std::numeric_limits<double>::infinity();

  [[nodiscard]] bool infinite_horizon() const noexcept { return std::isinf(horizon); }
  [[nodiscard]] bool p_infinite() const noexcept { return std::isinf(p); }

  /// Conjugate exponent p' with 1/p + 1/p' = 1.
  [[nodiscard]] double conjugate() const noexcept { return conjugate_exponent(p); }

  static double conjugate_exponent(double p) noexcept {
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return 1.0;
    return p / (p - 1.0);
  }

  /// alpha > -1/p.
  [[nodiscard]] bool valid_for_observation() const noexcept {
    return p >= 1.0 && alpha > -1.0 / p;
  }
  /// alpha < 1/p', or alpha <= 0 when p = 1.
  [[nodiscard]] bool valid_for_control() const noexcept {
    if (p < 1.0) return false;
    if (p == 1.0) return alpha <= 0.0;
    return alpha < 1.0 - 1.0 / p;
  }

  void validate() const {
    if (!(p >= 1.0)) throw std::invalid_argument("WeightParams: p must lie in [1, inf]");
    if (!(horizon > 0.0)) throw std::invalid_argument("WeightParams: horizon must be positive");
    if (!std::isfinite(alpha)) throw std::invalid_argument("WeightParams: alpha must be finite");
  }
};

struct GridOptions {
  unsigned graded_levels = 64;   ///< geometric panels toward t = 0 (ratio 2)
  unsigned uniform_panels = 0;   ///< equal panels on [horizon / uniform_panels, horizon]
  unsigned nodes = 8;            ///< Gauss-Legendre nodes per panel
  double far_time = 256.0;       ///< truncation point for an infinite horizon
  double near_time = 1.0;        ///< end of the graded zone for an infinite horizon
};

/// Composite Gauss-Legendre grid on (0, horizon], graded toward t = 0.
class TimeGrid {
 public:
  /// Builds from explicit panel edges e_0 = 0 < e_1 < ... < e_m.
  TimeGrid(std::vector<double> edges, unsigned nodes) : edges_(std::move(edges)), rule_(&quad::gauss_legendre(nodes)) {
    if (edges_.size() < 2) throw std::invalid_argument("TimeGrid: need at least one panel");
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (!(edges_[i] > edges_[i - 1])) throw std::invalid_argument("TimeGrid: edges must increase strictly");
    const std::size_t m = rule_->size();
    t_.reserve((edges_.size() - 1) * m);
    w_.reserve(t_.capacity());
    for (std::size_t k = 0; k + 1 < edges_.size(); ++k) {
      const double a = edges_[k], b = edges_[k + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      for (std::size_t i = 0; i < m; ++i) {
        t_.push_back(mid + half * rule_->nodes[i]);
        w_.push_back(half * rule_->weights[i]);
      }
    }
    bary_.resize(m);
    // Barycentric weights of the reference nodes.
    for (std::size_t i = 0; i < m; ++i) {
      double prod = 1.0;
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) prod *= rule_->nodes[i] - rule_->nodes[j];
      bary_[i] = 1.0 / prod;
    }
  }

  /// Graded grid on (0, horizon]; infinite horizons get outward doubling
  /// panels from `near_time` up to `far_time`.
  static std::shared_ptr<const TimeGrid> make(double horizon, const GridOptions& opt = {}) {
    std::vector<double> edges;
    double graded_end;
    std::vector<double> outer;
    if (std::isinf(horizon)) {
      graded_end = opt.near_time;
      for (double e = 2.0 * opt.near_time; e < opt.far_time * (1.0 + 1e-12); e *= 2.0) outer.push_back(e);
      if (outer.empty() || outer.back() < opt.far_time) outer.push_back(opt.far_time);
    } else {
      if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
      const unsigned m = std::max(1u, opt.uniform_panels);
      graded_end = horizon / m;
      for (unsigned k = 2; k <= m; ++k) outer.push_back(horizon * k / m);
    }
    edges.push_back(0.0);
    for (unsigned l = opt.graded_levels; l >= 1; --l) edges.push_back(graded_end * std::ldexp(1.0, -static_cast<int>(l)));
    edges.push_back(graded_end);
    edges.insert(edges.end(), outer.begin(), outer.end());
    return std::make_shared<const TimeGrid>(std::move(edges), opt.nodes);
  }

  [[nodiscard]] std::size_t size() const noexcept { return t_.size(); }
  [[nodiscard]] std::size_t panels() const noexcept { return edges_.size() - 1; }
  [[nodiscard]] std::size_t nodes_per_panel() const noexcept { return rule_->size(); }
  [[nodiscard]] const std::vector<double>& times() const noexcept { return t_; }
  [[nodiscard]] const std::vector<double>& weights() const noexcept { return w_; }
  [[nodiscard]] const std::vector<double>& edges() const noexcept { return edges_; }
  [[nodiscard]] double horizon() const noexcept { return edges_.back(); }

  /// Weights W_i with sum_i W_i g(t_i) = int_0^{e_1} t^beta g(t) dt for every
  /// polynomial g of degree < nodes on the panel touching 0 (beta > -1). Built
  /// from the Lagrange basis in shifted Legendre form, whose power moments are
  /// int_0^1 x^b P_k(2x-1) dx = b(b-1)...(b-k+1) / ((b+1)(b+2)...(b+k+1)).
  [[nodiscard]] std::vector<double> first_panel_product_weights(double beta) const {
    if (!(beta > -1.0)) throw std::invalid_argument("TimeGrid: product weights need beta > -1");
    const std::size_t m = rule_->size();
    std::vector<double> moment(m);
    double num = 1.0, den = beta + 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      moment[k] = num / den;
      num *= beta - static_cast<double>(k);
      den *= (beta + static_cast<double>(k) + 2.0);
    }
    const double h = edges_[1];
    const double scale = std::pow(h, beta + 1.0);
    std::vector<double> w(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      const double y = rule_->nodes[j];  // 2x - 1 for the node x in [0, 1]
      double p0 = 1.0, p1 = y, sum = moment[0];
      if (m > 1) sum += 3.0 * p1 * moment[1];
      for (std::size_t k = 2; k < m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * y * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        sum += (2.0 * k + 1.0) * p2 * moment[k];
        p0 = p1;
        p1 = p2;
      }
      w[j] = scale * 0.5 * rule_->weights[j] * sum;
    }
    return w;
  }

  /// Panel index containing t (clamped to the grid).
  [[nodiscard]] std::size_t panel_of(double t) const noexcept {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), t);
    std::size_t k = it == edges_.begin() ? 0 : static_cast<std::size_t>(it - edges_.begin()) - 1;
    return std::min(k, panels() - 1);
  }

  /// Polynomial interpolation of node values within the panel holding t.
  [[nodiscard]] double interpolate(const std::vector<double>& values, double t) const {
    return interpolate_in_panel(values, panel_of(t), t);
  }

  /// Evaluates the interpolant of panel k at t (t may lie outside the panel).
  [[nodiscard]] double interpolate_in_panel(const std::vector<double>& values, std::size_t k, double t) const {
    const std::size_t m = rule_->size();
    const double a = edges_[k], b = edges_[k + 1];
    const double x = (2.0 * t - a - b) / (b - a);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = x - rule_->nodes[i];
      if (d == 0.0) return values[k * m + i];
      const double c = bary_[i] / d;
      num += c * values[k * m + i];
      den += c;
    }
    return num / den;
  }

 private:
  std::vector<double> edges_;
  const quad::Rule* rule_;
  std::vector<double> t_, w_, bary_;
};

using GridPtr = std::shared_ptr<const TimeGrid>;

/// Real-valued samples of a signal at the nodes of a TimeGrid.
struct Signal {
  GridPtr grid;
  std::vector<double> values;

  Signal() = default;
  Signal(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (grid && values.size() != grid->size()) throw std::invalid_argument("Signal: size mismatch with grid");
  }

  template <class F>
  static Signal sample(GridPtr g, F&& f) {
    std::vector<double> v(g->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g->times()[i]);
    return Signal(std::move(g), std::move(v));
  }

  [[nodiscard]] double operator()(double t) const { return grid->interpolate(values, t); }
  [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

/// Multiplication by t^alpha (the weight isometry L^p_alpha -> L^p).
inline Signal apply_weight(const Signal& f, double alpha) {
  Signal g = f;
  const auto& t = f.grid->times();
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] *= std::pow(t[i], alpha);
  return g;
}

/// Quadrature value of (int t^{alpha p} |f(t)|^p dt)^{1/p} on the grid.
/// For p = inf this is max t^alpha |f(t)| over the nodes, a lower bound of the
/// essential supremum. Returns +inf when alpha p <= -1 and f does not vanish
/// near t = 0 (the weighted norm diverges).
inline double weighted_lp_norm(const Signal& f, const WeightParams& wp) {
  wp.validate();
  const auto& t = f.grid->times();
  const auto& w = f.grid->weights();
  if (t.empty()) return 0.0;
  if (wp.p_infinite()) {
    double m = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (t[i] > wp.horizon) break;
      m = std::max(m, std::pow(t[i], wp.alpha) * std::abs(f.values[i]));
    }
    return m;
  }
  if (wp.alpha * wp.p <= -1.0) {
    const std::size_t m = std::min<std::size_t>(f.grid->nodes_per_panel(), t.size());
    for (std::size_t i = 0; i < m; ++i)
      if (f.values[i] != 0.0) return std::numeric_limits<double>::infinity();
  }
  // On the panel touching 0 the weight t^{alpha p} is integrated exactly
  // against the interpolant of |f|^p.
  const double beta = wp.alpha * wp.p;
  const std::size_t m = f.grid->nodes_per_panel();
  const bool product = beta != 0.0 && beta > -1.0 && f.grid->edges()[1] <= wp.horizon;
  const std::vector<double> w0 = product ? f.grid->first_panel_product_weights(beta) : std::vector<double>{};
  double sum = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > wp.horizon) break;
    const double v = std::abs(f.values[i]);
    if (v == 0.0) continue;
    sum += (product && i < m ? w0[i] : w[i] * std::pow(t[i], beta)) * std::pow(v, wp.p);
  }
  return std::pow(sum, 1.0 / wp.p);
}

/// Samples f on a fresh graded grid over (0, horizon] and returns its norm.
template <class F>
  requires(std::invocable<F&, double> && !std::same_as<std::remove_cvref_t<F>, Signal>)
double weighted_lp_norm(F&& f, const WeightParams& wp, const GridOptions& opt = {}) {
  return weighted_lp_norm(Signal::sample(TimeGrid::make(wp.horizon, opt), std::forward<F>(f)), wp);
}

}  // namespace admlab
