#pragma once

#include "admlab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace admlab {

/// Haar coefficients on [0,1] at levels 0..N; level j stores all 2^j cubes
/// [k 2^-j, (k+1) 2^-j) densely (zeros mean "no wavelet there").
struct WaveletCoeffs {
  std::vector<std::vector<double>> levels;
  bool in_region = true;  ///< false when a family was built outside its intended (q, p) region
  std::string note;

  explicit WaveletCoeffs(unsigned n = 0) : levels(n + 1) {
    for (unsigned j = 0; j <= n; ++j) levels[j].assign(std::size_t{1} << j, 0.0);
  }
  [[nodiscard]] unsigned depth() const { return static_cast<unsigned>(levels.size()) - 1; }
};

/// L^q norm of the Haar square function (sum |a|^2 |Q|^{-1} 1_Q)^{1/2}. The
/// square function is constant on finest-level cells, so the integral is a
/// finite sum.
inline double square_function_lq_norm(const WaveletCoeffs& c, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("square_function_lq_norm: q must be >= 1");
  const unsigned n = c.depth();
  std::vector<double> s2(std::size_t{1} << n, 0.0);
  for (unsigned j = 0; j <= n; ++j) {
    const double scale = std::ldexp(1.0, static_cast<int>(j));
    const unsigned shift = n - j;
    for (std::size_t cell = 0; cell < s2.size(); ++cell) {
      const double a = c.levels[j][cell >> shift];
      s2[cell] += a * a * scale;
    }
  }
  double sum = 0.0;
  for (double v : s2) sum += std::pow(v, q / 2.0);
  return std::pow(std::ldexp(sum, -static_cast<int>(n)), 1.0 / q);
}

/// (sum_j ((sum_lambda |a|^q)^{1/q} 2^{-j(1/q - 1/2)})^p)^{1/p}.
inline double besov_norm(const WaveletCoeffs& c, double q, double p) {
  if (!(q >= 1.0 && p >= 1.0)) throw std::invalid_argument("besov_norm: q and p must be >= 1");
  double total = 0.0;
  for (unsigned j = 0; j < c.levels.size(); ++j) {
    double lq = 0.0;
    for (double a : c.levels[j]) lq += std::pow(std::abs(a), q);
    const double level = std::pow(lq, 1.0 / q) * std::pow(2.0, -static_cast<double>(j) * (1.0 / q - 0.5));
    total += std::pow(level, p);
  }
  return std::pow(total, 1.0 / p);
}

/// Nested family: every cube of levels 0..N carries 2^{-j/2}, so each level
/// adds one unit to the squared square function everywhere. Norms:
/// L^q = (N+1)^{1/2}, Besov = (N+1)^{1/p}.
inline WaveletCoeffs region_ii_family(double q, double p, unsigned n) {
  WaveletCoeffs c(n);
  for (unsigned j = 0; j <= n; ++j) std::fill(c.levels[j].begin(), c.levels[j].end(), std::pow(2.0, -0.5 * j));
  c.in_region = q < p && p < 2.0;
  if (!c.in_region) c.note = "parameters outside q < p < 2";
  return c;
}

/// Disjoint family: one cube [2^-j, 2^{1-j}) per level j = 1..N, scaled so each
/// contributes 1 to both the L^q integral and the Besov level sum. Norms:
/// L^q = N^{1/q}, Besov = N^{1/p}. N = 0 gives the single level-0 coefficient.
inline WaveletCoeffs region_iv_family(double q, double p, unsigned n) {
  WaveletCoeffs c(n);
  if (n == 0) {
    c.levels[0][0] = 1.0;
  } else {
    for (unsigned j = 1; j <= n; ++j) c.levels[j][1] = std::pow(2.0, j * (1.0 / q - 0.5));
  }
  c.in_region = q > 2.0 && p > 2.0 && p < q;
  if (!c.in_region) c.note = "parameters outside 2 < p < q";
  return c;
}

/// Gaussian coefficients scaled by 2^{-j/2}, so each level carries comparable mass.
inline WaveletCoeffs random_coefficients(unsigned n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  WaveletCoeffs c(n);
  for (unsigned j = 0; j <= n; ++j)
    for (double& a : c.levels[j]) a = g(rng) * std::pow(2.0, -0.5 * j);
  return c;
}

inline double besov_ratio(const WaveletCoeffs& c, double q, double p) {
  return besov_norm(c, q, p) / square_function_lq_norm(c, q);
}

enum class EmbeddingVerdict { Embeds, Fails, Inconclusive };

inline const char* to_string(EmbeddingVerdict v) {
  switch (v) {
    case EmbeddingVerdict::Embeds: return "EMBEDS";
    case EmbeddingVerdict::Fails: return "FAILS";
    default: return "INCONCLUSIVE";
  }
}

struct EmbeddingCell {
  double q = 0.0, p = 0.0;
  std::vector<double> family_ratio;  ///< worst family ratio at each N
  std::vector<double> random_ratio;  ///< worst random-draw ratio at each N
  double family_growth = 0.0;        ///< family ratio growth over the last doubling
  double random_growth = 0.0;
  EmbeddingVerdict verdict = EmbeddingVerdict::Inconclusive;
};

struct EmbeddingScanOptions {
  std::vector<unsigned> depths{4, 8, 16};
  double growth_threshold = 1.01;    ///< family growth per doubling that counts as unbounded
  double random_threshold = 1.5;     ///< random-draw growth that contradicts a bounded verdict
  unsigned random_draws = 4;
  std::uint64_t seed = 7;
  unsigned threads = 0;
};

/// Growth test of the Besov/L^q ratio along N. The extremal families decide the
/// verdict; random draws can only veto an EMBEDS verdict (then INCONCLUSIVE).
inline EmbeddingCell embedding_cell(double q, double p, const EmbeddingScanOptions& o) {
  if (o.depths.size() < 2) throw std::invalid_argument("embedding scan: need at least two depths");
  EmbeddingCell cell;
  cell.q = q;
  cell.p = p;
  for (unsigned n : o.depths) {
    cell.family_ratio.push_back(
        std::max(besov_ratio(region_ii_family(q, p, n), q, p), besov_ratio(region_iv_family(q, p, n), q, p)));
    double worst = 0.0;
    for (unsigned d = 0; d < o.random_draws; ++d)
      worst = std::max(worst, besov_ratio(random_coefficients(n, o.seed + 1000003ULL * d), q, p));
    cell.random_ratio.push_back(worst);
  }
  const std::size_t k = o.depths.size() - 1;
  cell.family_growth = cell.family_ratio[k] / cell.family_ratio[k - 1];
  cell.random_growth = o.random_draws ? cell.random_ratio[k] / cell.random_ratio[k - 1] : 0.0;
  if (cell.family_growth >= o.growth_threshold) {
    cell.verdict = EmbeddingVerdict::Fails;
  } else if (cell.random_growth >= o.random_threshold) {
    cell.verdict = EmbeddingVerdict::Inconclusive;
  } else {
    cell.verdict = EmbeddingVerdict::Embeds;
  }
  return cell;
}

/// Row-major map over q_grid x p_grid.
inline std::vector<EmbeddingCell> embedding_region_scan(const std::vector<double>& q_grid,
                                                        const std::vector<double>& p_grid,
                                                        const EmbeddingScanOptions& o = {}) {
  for (double v : q_grid)
    if (!(v > 1.0)) throw std::invalid_argument("embedding scan: q must exceed 1");
  for (double v : p_grid)
    if (!(v > 1.0)) throw std::invalid_argument("embedding scan: p must exceed 1");
  return parallel_map(
      q_grid.size() * p_grid.size(),
      [&](std::size_t i) { return embedding_cell(q_grid[i / p_grid.size()], p_grid[i % p_grid.size()], o); },
      o.threads);
}

inline bool embedding_predicate(double q, double p) { return p >= std::max(2.0, q); }

/// Per-unit-N slope of log(Besov/L^q) for the nested family between depths
/// n1 < n2: measured from the coefficient sums and predicted as
/// (1/p - 1/2)(log(n2+1) - log(n1+1))/(n2 - n1).
struct SlopeCheck {
  double measured = 0.0, predicted = 0.0;
  [[nodiscard]] double relative_error() const { return std::abs(measured - predicted) / std::abs(predicted); }
};

inline SlopeCheck region_ii_slope(double q, double p, unsigned n1, unsigned n2) {
  if (!(n2 > n1)) throw std::invalid_argument("region_ii_slope: need n2 > n1");
  SlopeCheck s;
  const double r1 = besov_ratio(region_ii_family(q, p, n1), q, p);
  const double r2 = besov_ratio(region_ii_family(q, p, n2), q, p);
  const double dn = static_cast<double>(n2 - n1);
  s.measured = (std::log(r2) - std::log(r1)) / dn;
  s.predicted = (1.0 / p - 0.5) * (std::log(n2 + 1.0) - std::log(n1 + 1.0)) / dn;
  return s;
}

}  // namespace admlab
