#pragma once

#include "admlab/admissibility.hpp"
#include "admlab/besov.hpp"
#include "admlab/kernel.hpp"
#include "admlab/mild_solver.hpp"
#include "admlab/report/config.hpp"
#include "admlab/report/table.hpp"
#include "admlab/weighted_conv.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace admlab::report {

struct RunContext {
  std::optional<std::uint64_t> seed_override;
  double tolerance_scale = 1.0;
};

struct RunOutput {
  Table table;
  nlohmann::json summary = nlohmann::json::object();  ///< name -> {value, tag}
  std::vector<std::string> failures;                  ///< failed embedded comparisons, in order
  double tolerance = 0.0;                             ///< cell tolerance used by compare
  std::optional<std::uint64_t> seed;

  void note(const std::string& name, double value, Provenance tag) {
    summary[name] = {{"value", value}, {"tag", to_string(tag)}};
  }
  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

using Runner = std::function<RunOutput()>;

/// Validates a scenario's parameters and returns the deferred computation.
using Preparer = std::function<Runner(ParamReader&, const RunContext&)>;

namespace detail {

constexpr auto CF = Provenance::ClosedForm;
constexpr auto QD = Provenance::Quadrature;
constexpr auto TM = Provenance::TrialMax;

inline Column num(std::string n, Provenance t) { return {std::move(n), true, t}; }
inline Column txt(std::string n) { return {std::move(n), false, Provenance::ClosedForm}; }

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::uint64_t need_seed(ParamReader& r, const RunContext& ctx) {
  if (ctx.seed_override) {
    if (r.has("seed")) (void)r.integer("seed");
    return *ctx.seed_override;
  }
  if (!r.has("seed")) r.fail("seed", "randomized scenarios need a seed (in params or via --seed)");
  const auto s = r.integer("seed");
  r.require(s >= 0, "seed", "must be non-negative");
  return static_cast<std::uint64_t>(s);
}

struct HeatParams {
  std::size_t modes;
  double shift, w0, w1;
};

inline HeatParams heat_params(ParamReader& r, std::size_t default_modes) {
  HeatParams h;
  const auto m = r.integer("modes", static_cast<std::int64_t>(default_modes));
  r.require(m >= 1 && m <= (1 << 20), "modes", "must lie in [1, 2^20]");
  h.modes = static_cast<std::size_t>(m);
  h.shift = r.number("shift", 1.0);
  r.require(h.shift > 0.0, "shift", "must be positive");
  h.w0 = r.number("w0", 1.0);
  h.w1 = r.number("w1", 0.0);
  r.require(h.w0 != 0.0 || h.w1 != 0.0, "w0", "w0 and w1 cannot both vanish");
  return h;
}

inline Runner prepare_scan(ParamReader& r, const RunContext& ctx, bool observation) {
  const auto ps = r.numbers("p");
  const auto as = r.numbers("alpha");
  const auto k = r.integer("k", 1);
  r.require(k >= 1 && k <= 8, "k", "must lie in [1, 8]");
  const auto heat = heat_params(r, 4096);
  ScanGrid grid;
  grid.lo = r.number("lambda_lo", grid.lo);
  grid.hi = r.number("lambda_hi", grid.hi);
  r.require(grid.lo > 0.0 && grid.hi > grid.lo * 100.0, "lambda_hi", "need 0 < lambda_lo and lambda_hi >= 100 lambda_lo");
  const auto pts = r.integer("points", static_cast<std::int64_t>(grid.points));
  r.require(pts >= 8, "points", "need at least 8 points");
  grid.points = static_cast<std::size_t>(pts);
  grid.slope_tol = r.number("slope_tol", grid.slope_tol);
  std::optional<double> expect;
  if (r.has("expect_slope_high")) expect = r.number("expect_slope_high");
  const double expect_tol = r.number("expect_tolerance", 0.02);
  for (double p : ps) r.require(p >= 1.0, "p", "must be >= 1");
  for (double p : ps)
    for (double a : as) {
      const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
      const bool ok = observation ? (a > -ip && a < k - ip) : (a > (1.0 - ip) - k && a < 1.0 - ip);
      r.require(ok, "alpha", "alpha " + fmt(a) + " outside the admissible range for p = " + fmt(p));
    }
  return [=] {
    RunOutput out;
    out.tolerance = 1e-12;
    out.table = Table({num("p", CF), num("alpha", CF), num("s", CF), num("exponent", CF), num("sup_value", CF),
                       num("slope_low", CF), num("slope_high", CF), num("truncation_tail", CF), txt("verdict")});
    const auto op = SpectralOperator::neumann_laplacian(heat.modes, heat.shift);
    for (double p : ps)
      for (double a : as) {
        const double ip = std::isinf(p) ? 0.0 : 1.0 / p;
        const auto res = observation ? scan_WC(op, BoundaryOperator::observation(heat.w0, heat.w1), p, a,
                                               static_cast<unsigned>(k), grid)
                                     : scan_WB(op, BoundaryOperator::control(heat.w0, heat.w1), p, a,
                                               static_cast<unsigned>(k), grid);
        out.table.add_row({p, a, 2.0 * a + 2.0 * ip, res.exponent, res.sup_value, res.slope_low, res.slope_high,
                           res.max_relative_tail, to_string(res.verdict)});
        if (expect)
          out.check(std::abs(res.slope_high - *expect) <= expect_tol * ctx.tolerance_scale,
                    "slope_high " + fmt(res.slope_high) + " at (p=" + fmt(p) + ", alpha=" + fmt(a) + ") differs from " +
                        fmt(*expect) + " by more than " + fmt(expect_tol * ctx.tolerance_scale));
      }
    return out;
  };
}

inline Runner prepare_lpstar(ParamReader& r, const RunContext& ctx) {
  const double p = r.number("p", 2.0);
  r.require(p >= 1.0 && std::isfinite(p), "p", "must lie in [1, inf)");
  const auto thetas = r.numbers("theta");
  for (double t : thetas) r.require(t > 0.0, "theta", "must be positive");
  const auto count = r.integer("count", 20);
  r.require(count >= 1, "count", "must be positive");
  const auto heat = heat_params(r, 4096);
  const double decay = r.number("decay", 0.75);
  const double tol = r.number("tolerance", 1e-6);
  const auto seed = need_seed(r, ctx);
  return [=] {
    RunOutput out;
    out.seed = seed;
    out.tolerance = tol;
    out.table = Table({num("theta", CF), num("trial", CF), num("ratio_quadrature", QD), num("ratio_closed", CF),
                       num("rel_err", QD)});
    const auto op = SpectralOperator::neumann_laplacian(heat.modes, heat.shift);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<CoeffVector> xs;
    for (std::int64_t i = 0; i < count; ++i) {
      CoeffVector x(heat.modes);
      for (std::size_t n = 0; n < heat.modes; ++n) x[n] = g(rng) / std::pow(1.0 + n, decay);
      xs.push_back(std::move(x));
    }
    for (double th : thetas) {
      const auto ratios = parallel_map(xs.size(), [&](std::size_t i) {
        return lp_star_estimate(op, p, th, xs[i], LpStarMethod::Quadrature) / xs[i].norm();
      });
      const double closed = p == 2.0 ? std::sqrt(std::tgamma(2.0 * th) * std::pow(2.0, -2.0 * th)) : NAN;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        const double err = std::abs(ratios[i] - closed) / closed;
        out.table.add_row({th, static_cast<double>(i), ratios[i], closed, err});
        if (p == 2.0)
          out.check(err < tol * ctx.tolerance_scale,
                    "rel_err " + fmt(err) + " at theta=" + fmt(th) + ", trial " + std::to_string(i));
      }
    }
    return out;
  };
}

inline Runner prepare_kernel_lattice(ParamReader& r, const RunContext& ctx) {
  const auto ps = r.numbers("p", std::vector<double>{1.0, 1.5, 2.0, 4.0});
  const auto as = r.numbers("alpha", std::vector<double>{-1.0, -0.5, 0.0, 0.2, 0.45});
  const auto gs = r.numbers("gamma", std::vector<double>{-1.0, -0.5, 0.0, 0.2, 0.45});
  const auto taus = r.numbers("tau", std::vector<double>{0.5, 1.0, 10.0});
  for (double p : ps) r.require(p >= 1.0, "p", "must be >= 1");
  for (double t : taus) r.require(t > 0.0, "tau", "must be positive");
  BruteForceOptions bo;
  const auto levels = r.integer("levels", bo.levels);
  r.require(levels >= 8 && levels <= 400, "levels", "must lie in [8, 400]");
  const auto tp = r.integer("t_points", bo.t_points);
  r.require(tp >= 16 && tp <= 8192, "t_points", "must lie in [16, 8192]");
  bo.levels = static_cast<unsigned>(levels);
  bo.t_points = static_cast<unsigned>(tp);
  const double tol = r.number("tolerance", 1e-6);
  return [=] {
    RunOutput out;
    out.tolerance = 1e-8;
    out.table = Table({num("p", CF), num("alpha", CF), num("gamma", CF), num("tau", CF), txt("tag"),
                       num("norm_closed", CF), num("norm_brute", QD), num("rel_err", QD)});
    for (double p : ps)
      for (double a : as)
        for (double g : gs)
          for (double t : taus) {
            const KernelSpec k{a, g, p, t};
            const auto cls = classify(k);
            if (!cls.bounded) continue;
            const double c = norm_closed_form(k);
            const auto b = norm_bruteforce(k, bo);
            const double err = std::abs(c - b.value) / c;
            out.table.add_row({p, a, g, t, cls.tag(), c, b.value, err});
            out.check(err < tol * ctx.tolerance_scale && !b.divergent,
                      "rel_err " + fmt(err) + " at (p=" + fmt(p) + ", alpha=" + fmt(a) + ", gamma=" + fmt(g) +
                          ", tau=" + fmt(t) + ")");
          }
    return out;
  };
}

inline Runner prepare_conv(ParamReader& r, const RunContext& ctx) {
  const double p = r.number("p", 2.0);
  r.require(p > 1.0 && std::isfinite(p), "p", "must lie in (1, inf)");
  const auto as = r.numbers("alpha", std::vector<double>{-0.2, 0.0, 0.25});
  for (double a : as) r.require(a > -1.0 / p && a < 1.0 - 1.0 / p, "alpha", "must lie in (-1/p, 1/p')");
  ConvGridOptions go;
  go.horizon = r.number("horizon", go.horizon);
  r.require(go.horizon > 0.0 && std::isfinite(go.horizon), "horizon", "must be positive and finite");
  go.uniform_panels = static_cast<unsigned>(r.integer("uniform_panels", go.uniform_panels));
  go.graded_levels = static_cast<unsigned>(r.integer("graded_levels", go.graded_levels));
  const auto nodes = r.integer("nodes", go.nodes);
  r.require(nodes == 4 || nodes == 8 || nodes == 12 || nodes == 16 || nodes == 20, "nodes",
            "must be one of 4, 8, 12, 16, 20");
  go.nodes = static_cast<unsigned>(nodes);
  r.require(go.uniform_panels >= 1, "uniform_panels", "must be positive");
  const auto count = r.integer("random_count", 16);
  r.require(count >= 0, "random_count", "must be non-negative");
  const std::string system = r.text("system", "heat");
  r.require(system == "heat" || system == "model", "system", "must be \"heat\" or \"model\"");
  const double safety = r.number("safety", 1.1);
  const double zero_tol = r.number("tolerance", 1e-10);
  const auto seed = need_seed(r, ctx);
  return [=] {
    RunOutput out;
    out.seed = seed;
    out.tolerance = 1e-9;
    out.table = Table({num("alpha", CF), num("norm_plain", TM), num("norm_weighted", TM), num("commutator", TM),
                       num("c_tilde", QD), num("m_bound", QD), num("bound", QD), num("gap", TM)});
    const auto sys = system == "heat" ? ConvolutionSystem::heat_trace(1.0) : ConvolutionSystem::model(1.0);
    const auto grid = conv_grid(go);
    const auto trials = conv_trial_inputs(grid, go, seed, static_cast<std::size_t>(count));
    const auto reps = parallel_map(as.size(), [&](std::size_t i) { return equivalence_ratio(sys, p, as[i], trials); });
    for (const auto& rep : reps) {
      const double bound = safety * std::pow(rep.c_tilde, 1.0 - 1.0 / p) * sys.m_bound;
      const double gap = std::abs(rep.norm_weighted - rep.norm_plain);
      out.table.add_row({rep.alpha, rep.norm_plain, rep.norm_weighted, rep.commutator, rep.c_tilde, sys.m_bound,
                         bound, gap});
      if (rep.alpha == 0.0) {
        out.check(gap <= zero_tol * ctx.tolerance_scale, "gap " + fmt(gap) + " at alpha=0 exceeds " + fmt(zero_tol));
      } else {
        out.check(gap <= bound * ctx.tolerance_scale,
                  "gap " + fmt(gap) + " at alpha=" + fmt(rep.alpha) + " exceeds the commutator bound " + fmt(bound));
      }
    }
    return out;
  };
}

inline Runner prepare_counterexample(ParamReader& r, const RunContext& ctx) {
  const double eps = r.number("epsilon", 1.0);
  const double p = r.number("p", 2.0);
  const double beta = r.number("beta", 0.5);
  const auto ks = r.integers("ks", std::vector<std::int64_t>{10, 100});
  r.require(eps > 0.0, "epsilon", "must be positive");
  r.require(p >= 1.0 && std::isfinite(p), "p", "must lie in [1, inf)");
  r.require(beta > 0.0, "beta", "must be positive");
  for (auto k : ks) r.require(k >= 1 && k <= 100000000, "ks", "entries must lie in [1, 1e8]");
  const double tol = r.number("tolerance", 1e-10);
  const double band = r.number("growth_band", 0.1);
  return [=] {
    RunOutput out;
    out.tolerance = 1e-10;
    out.table = Table({num("k", CF), num("weighted_norm", QD), num("unweighted_norm", CF), num("sup_output", QD),
                       num("endpoint_output", CF), num("ratio", QD)});
    std::vector<int> ki(ks.begin(), ks.end());
    const auto rep = counterexample_alpha_negative(eps, p, beta, ki);
    for (const auto& row : rep.rows) {
      out.table.add_row({static_cast<double>(row.k), row.weighted_norm, row.unweighted_norm, row.sup_output,
                         row.endpoint_output, row.ratio});
      const double err = std::abs(row.endpoint_output - std::exp(-eps));
      out.check(err <= tol * ctx.tolerance_scale, "endpoint output at k=" + std::to_string(row.k) + " off by " + fmt(err));
    }
    out.note("fitted_exponent", rep.fitted_exponent, QD);
    if (rep.rows.size() >= 2) {
      const auto& a = rep.rows.front();
      const auto& b = rep.rows.back();
      const double growth = b.ratio / a.ratio;
      const double predicted = std::pow(static_cast<double>(b.k) / a.k, beta);
      out.note("growth", growth, QD);
      out.note("predicted_growth", predicted, CF);
      out.check(growth >= (1.0 - band) * predicted && growth <= (1.0 + band) * predicted,
                "growth " + fmt(growth) + " outside [" + fmt((1 - band) * predicted) + ", " +
                    fmt((1 + band) * predicted) + "]");
    }
    return out;
  };
}

inline Runner prepare_picard(ParamReader& r, const RunContext& ctx) {
  WeightParams wp;
  wp.p = r.number("p", 2.0);
  wp.alpha = r.number("alpha", 0.1);
  r.require(wp.p > 1.0 && std::isfinite(wp.p), "p", "must lie in (1, inf)");
  r.require(wp.alpha > -1.0 / wp.p && wp.alpha < 1.0 - 1.0 / wp.p, "alpha", "must lie in (-1/p, 1/p')");
  const auto modes = r.integer("modes", 16);
  r.require(modes >= 2 && modes <= 4096, "modes", "must lie in [2, 4096]");
  const std::string feedback = r.text("feedback", "linear");
  r.require(feedback == "linear" || feedback == "zero", "feedback", "must be \"linear\" or \"zero\"");
  const double scale = r.number("scale", 0.2);
  const double tau_max = r.number("tau_max", 1.0);
  r.require(tau_max > 0.0 && std::isfinite(tau_max), "tau_max", "must be positive and finite");
  const double rho_max = r.number("rho_max", 1.0);
  r.require(rho_max > 0.0, "rho_max", "must be positive");
  const double tol = r.number("tol", 1e-8);
  r.require(tol > 0.0, "tol", "must be positive");
  const auto max_iter = r.integer("max_iter", 50);
  r.require(max_iter >= 1, "max_iter", "must be positive");
  SolverOptions so;
  const auto steps = r.integer("steps", static_cast<std::int64_t>(so.steps));
  r.require(steps >= 16 && steps <= 1000000, "steps", "must lie in [16, 1e6]");
  so.steps = static_cast<std::size_t>(steps);
  so.ratio_slack = r.number("ratio_slack", so.ratio_slack);
  const double residual_factor = r.number("residual_factor", 10.0);
  const auto seed = need_seed(r, ctx);
  return [=] {
    RunOutput out;
    out.seed = seed;
    out.tolerance = 1e-12;
    out.table = Table({num("iteration", CF), num("sup_distance", CF), num("weighted_distance", QD),
                       num("sigma_distance", QD), num("ratio", QD), num("ball_distance", QD)});
    const bool linear = feedback == "linear";
    auto sys = FeedbackSystem::heat_example(
        wp, linear ? std::function<double(double)>([](double v) { return v; }) : [](double) { return 0.0; },
        linear ? 1.0 : 0.0, 1.0, static_cast<std::size_t>(modes), tau_max);
    const auto x0 = balanced_initial_state(sys, seed, scale);
    const auto pc = choose_parameters(sys, x0, wp, rho_max);
    out.note("L", sys.lipschitz, CF);
    out.note("K", sys.k_wellposed, QD);
    out.note("C_norm", sys.c_norm, CF);
    out.note("rho", pc.rho, QD);
    out.note("tau", pc.tau, QD);
    out.note("eta", pc.eta, QD);
    if (!pc.ok) {
      out.check(false, "parameter choice failed: " + pc.message);
      return out;
    }
    const auto run = picard_iterate(sys, x0, wp, pc.rho, pc.tau, pc.eta, tol, static_cast<std::size_t>(max_iter), so);
    for (std::size_t i = 0; i < run.iterates.size(); ++i) {
      const auto& s = run.iterates[i];
      out.table.add_row({static_cast<double>(i + 1), s.sup_distance, s.weighted_distance, s.sigma_distance, s.ratio,
                         s.ball_distance});
    }
    out.note("residual", run.residual, QD);
    out.note("max_ratio", run.max_ratio, QD);
    out.note("iterations", static_cast<double>(run.iterates.size()), CF);
    out.check(run.converged, "Picard iteration did not converge: " + run.message);
    out.check(run.max_ratio <= pc.eta + so.ratio_slack,
              "step ratio " + fmt(run.max_ratio) + " exceeds eta + slack = " + fmt(pc.eta + so.ratio_slack));
    const double limit = linear ? residual_factor * tol : 1e-12;
    out.check(run.residual <= limit * ctx.tolerance_scale, "residual " + fmt(run.residual) + " exceeds " + fmt(limit));
    return out;
  };
}

inline Runner prepare_besov(ParamReader& r, const RunContext& ctx) {
  const std::vector<double> def{1.25, 1.5, 1.75, 2.25, 2.5, 3.0, 3.5, 4.0, 5.0};
  const auto qs = r.numbers("q", def);
  const auto ps = r.numbers("p", def);
  for (double q : qs) r.require(q > 1.0 && std::isfinite(q), "q", "must lie in (1, inf)");
  for (double p : ps) r.require(p > 1.0 && std::isfinite(p), "p", "must lie in (1, inf)");
  EmbeddingScanOptions o;
  const auto depths = r.integers("depths", std::vector<std::int64_t>{4, 8, 16});
  r.require(depths.size() >= 2, "depths", "need at least two depths");
  o.depths.clear();
  for (auto d : depths) {
    r.require(d >= 1 && d <= 20, "depths", "entries must lie in [1, 20]");
    o.depths.push_back(static_cast<unsigned>(d));
  }
  o.growth_threshold = r.number("growth_threshold", o.growth_threshold);
  o.random_threshold = r.number("random_threshold", o.random_threshold);
  const auto draws = r.integer("draws", o.random_draws);
  r.require(draws >= 0 && draws <= 64, "draws", "must lie in [0, 64]");
  o.random_draws = static_cast<unsigned>(draws);
  const double margin = r.number("boundary_margin", 0.1);
  o.seed = need_seed(r, ctx);
  return [=] {
    RunOutput out;
    out.seed = o.seed;
    out.tolerance = 1e-12;
    out.table = Table({num("q", CF), num("p", CF), num("family_growth", CF), num("random_growth", TM),
                       num("predicate", CF), num("checked", CF), txt("verdict")});
    const auto cells = embedding_region_scan(qs, ps, o);
    std::size_t checked = 0, agree = 0;
    for (const auto& c : cells) {
      const bool pred = embedding_predicate(c.q, c.p);
      const bool off = std::abs(c.p - std::max(2.0, c.q)) >= margin;
      out.table.add_row({c.q, c.p, c.family_growth, c.random_growth, pred ? 1.0 : 0.0, off ? 1.0 : 0.0,
                         to_string(c.verdict)});
      if (!off) continue;
      ++checked;
      const bool ok = c.verdict == (pred ? EmbeddingVerdict::Embeds : EmbeddingVerdict::Fails);
      if (ok) ++agree;
      out.check(ok, std::string("verdict ") + to_string(c.verdict) + " at (q=" + fmt(c.q) + ", p=" + fmt(c.p) +
                        ") disagrees with the predicate");
    }
    out.note("cells_checked", static_cast<double>(checked), CF);
    out.note("cells_agreeing", static_cast<double>(agree), CF);
    return out;
  };
}

}  // namespace detail

struct KindInfo {
  std::string name;
  std::string summary;
  Preparer prepare;
};

inline const std::vector<KindInfo>& kinds() {
  static const std::vector<KindInfo> k{
      {"wc-scan", "observation resolvent scan; params p, alpha (numbers or lists)",
       [](ParamReader& r, const RunContext& c) { return detail::prepare_scan(r, c, true); }},
      {"wb-scan", "control resolvent scan; params p, alpha (numbers or lists)",
       [](ParamReader& r, const RunContext& c) { return detail::prepare_scan(r, c, false); }},
      {"lpstar", "square-function estimate, quadrature against the p = 2 closed form; params theta, seed",
       detail::prepare_lpstar},
      {"kernel-lattice", "weakly singular kernel norms, closed form against brute force; all params optional",
       detail::prepare_kernel_lattice},
      {"conv-equivalence", "weighted versus plain convolution norms and the commutator bound; params seed",
       detail::prepare_conv},
      {"counterexample", "negative-weight counterexample growth; all params optional", detail::prepare_counterexample},
      {"picard", "fixed-point solver on the heat feedback example; params seed", detail::prepare_picard},
      {"besov-region", "Haar Besov embedding region map; params seed", detail::prepare_besov},
  };
  return k;
}

inline const KindInfo* find_kind(const std::string& name) {
  for (const auto& k : kinds())
    if (k.name == name) return &k;
  return nullptr;
}

}  // namespace admlab::report
