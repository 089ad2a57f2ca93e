#pragma once

#include "admlab/parallel.hpp"
#include "admlab/report/config.hpp"
#include "admlab/report/runners.hpp"
#include "admlab/report/table.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <chrono>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace admlab::report {

inline constexpr const char* kArtifactName = "admlab";
inline constexpr const char* kArtifactVersion = "1.0.0";

/// Exit codes shared by the command-line tool.
enum ExitCode : int { kOk = 0, kAssertionFailed = 1, kInvalidInput = 2 };

struct Scenario {
  std::string name;
  std::string kind;
  nlohmann::json params;
  std::string output;  ///< path stem relative to the output directory
  std::size_t line = 0;
  Runner runner;
};

/// Parses and validates a whole config; throws ConfigError with a line number.
inline std::vector<Scenario> load_config(const std::string& text, const RunContext& ctx) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // Count lines up to the failing byte.
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError(line, "malformed JSON");
  }
  const SourceMap map(text);
  if (!root.is_object()) throw ConfigError(1, "top level must be an object");
  for (const auto& [k, v] : root.items())
    if (k != "scenarios" && k != "description")
      throw ConfigError(map.top_key_line(k), "unknown top-level key \"" + k + "\"");
  if (!root.contains("scenarios") || !root["scenarios"].is_array())
    throw ConfigError(map.top_key_line("scenarios"), "\"scenarios\" must be an array");
  std::vector<Scenario> out;
  std::set<std::string> outputs;
  const auto& arr = root["scenarios"];
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& s = arr[i];
    const std::size_t line = map.scenario_line(i);
    if (!s.is_object()) throw ConfigError(line, "scenario must be an object");
    for (const auto& [k, v] : s.items())
      if (k != "name" && k != "kind" && k != "params" && k != "output")
        throw ConfigError(map.key_line(i, k), "unknown scenario key \"" + k + "\"");
    Scenario sc;
    sc.line = line;
    if (!s.contains("name") || !s["name"].is_string() || s["name"].get<std::string>().empty())
      throw ConfigError(map.key_line(i, "name"), "scenario needs a non-empty string \"name\"");
    sc.name = s["name"];
    for (char c : sc.name)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
        throw ConfigError(map.key_line(i, "name"), "name may only contain letters, digits, '-', '_' and '.'");
    if (!s.contains("kind") || !s["kind"].is_string())
      throw ConfigError(map.key_line(i, "kind"), "scenario needs a string \"kind\"");
    sc.kind = s["kind"];
    const KindInfo* info = find_kind(sc.kind);
    if (!info) throw ConfigError(map.key_line(i, "kind"), "unknown kind \"" + sc.kind + "\"");
    sc.output = sc.name;
    if (s.contains("output")) {
      if (!s["output"].is_string() || s["output"].get<std::string>().empty())
        throw ConfigError(map.key_line(i, "output"), "\"output\" must be a non-empty string");
      sc.output = s["output"];
      const std::filesystem::path op(sc.output);
      if (op.is_absolute() || sc.output.find("..") != std::string::npos)
        throw ConfigError(map.key_line(i, "output"), "\"output\" must be a relative path without \"..\"");
    }
    if (!outputs.insert(sc.output).second)
      throw ConfigError(map.key_line(i, "output"), "duplicate output \"" + sc.output + "\"");
    sc.params = s.contains("params") ? s["params"] : nlohmann::json::object();
    ParamReader reader(sc.params, map, i);
    sc.runner = info->prepare(reader, ctx);
    reader.finish();
    out.push_back(std::move(sc));
  }
  return out;
}

struct ScenarioResult {
  std::string name;
  bool passed = true;
  std::string first_failure;
  std::string csv_path, manifest_path;
};

inline nlohmann::json make_manifest(const Scenario& sc, const RunOutput& out, const std::string& csv_file,
                                    double wall_time) {
  nlohmann::json m;
  m["artifact"] = kArtifactName;
  m["version"] = kArtifactVersion;
  m["scenario"] = sc.name;
  m["kind"] = sc.kind;
  m["params"] = sc.params;
  m["seed"] = out.seed ? nlohmann::json(*out.seed) : nlohmann::json(nullptr);
  m["digest"] = fnv1a_hex(sc.kind + "\n" + sc.params.dump() + "\n" + (out.seed ? std::to_string(*out.seed) : "-"));
  m["tolerance"] = out.tolerance;
  m["csv"] = csv_file;
  m["columns"] = columns_to_json(out.table.columns());
  m["summary"] = out.summary;
  m["status"] = out.failures.empty() ? "pass" : "fail";
  m["failures"] = out.failures;
  m["wall_time_s"] = wall_time;
  return m;
}

/// Runs validated scenarios and writes <out_dir>/<output>.csv and
/// <output>.manifest.json for each.
inline std::vector<ScenarioResult> run_scenarios(const std::vector<Scenario>& scenarios, const std::string& out_dir,
                                                 bool parallel) {
  std::vector<ScenarioResult> results(scenarios.size());
  auto one = [&](std::size_t i) {
    const auto& sc = scenarios[i];
    const auto t0 = std::chrono::steady_clock::now();
    RunOutput out = sc.runner();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::filesystem::path base = std::filesystem::path(out_dir) / sc.output;
    std::filesystem::create_directories(base.parent_path());
    const std::string csv = base.string() + ".csv";
    const std::string manifest = base.string() + ".manifest.json";
    write_file(csv, out.table.to_csv());
    write_file(manifest,
               make_manifest(sc, out, std::filesystem::path(csv).filename().string(), wall).dump(2) + "\n");
    ScenarioResult& r = results[i];
    r.name = sc.name;
    r.passed = out.failures.empty();
    if (!r.passed) r.first_failure = out.failures.front();
    r.csv_path = csv;
    r.manifest_path = manifest;
  };
  parallel_for(scenarios.size(), one, parallel ? 0u : 1u);
  return results;
}

/// Whole `run` command: returns the exit code and reports on `log`.
inline int run_config_file(const std::string& path, const RunContext& ctx, const std::string& out_dir, bool parallel,
                           std::ostream& log) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    log << path << ": " << e.what() << "\n";
    return kInvalidInput;
  }
  std::vector<Scenario> scenarios;
  try {
    scenarios = load_config(text, ctx);
  } catch (const ConfigError& e) {
    log << path << ":" << e.line() << ": " << e.what() << "\n";
    return kInvalidInput;
  }
  std::vector<ScenarioResult> results;
  try {
    results = run_scenarios(scenarios, out_dir, parallel);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kAssertionFailed;
  }
  int code = kOk;
  for (const auto& r : results) {
    log << (r.passed ? "pass " : "FAIL ") << r.name << " -> " << r.csv_path << "\n";
    if (!r.passed && code == kOk) {
      log << "  first failing comparison: " << r.first_failure << "\n";
      code = kAssertionFailed;
    }
  }
  return code;
}

struct CellDiff {
  std::size_t row = 0;
  std::string column;
  std::string a, b;
  double rel_diff = 0.0;  ///< |a - b| / max(1, |a|, |b|)
  bool flagged = false;
};

struct CompareReport {
  std::string kind;
  double tolerance = 0.0;
  bool same_seed = true;
  std::vector<CellDiff> diffs;  ///< cells that differ at all
  [[nodiscard]] std::size_t flagged() const {
    std::size_t n = 0;
    for (const auto& d : diffs) n += d.flagged;
    return n;
  }
};

/// Raised for manifests that cannot be compared (kind mismatch, bad files).
class CompareError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Table load_manifest_table(const std::string& manifest_path, nlohmann::json& manifest) {
  try {
    manifest = nlohmann::json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw CompareError(manifest_path + ": " + e.what());
  }
  try {
    const auto cols = columns_from_json(manifest.at("columns"));
    const auto csv = (std::filesystem::path(manifest_path).parent_path() / manifest.at("csv").get<std::string>());
    return Table::from_csv(read_file(csv.string()), cols);
  } catch (const std::exception& e) {
    throw CompareError(manifest_path + ": " + e.what());
  }
}

/// Cell-wise comparison of two runs of the same kind. Differences above the
/// tolerance are flagged, except in trial-max columns when the seeds differ.
inline CompareReport compare_runs(const std::string& path_a, const std::string& path_b, double tolerance_scale = 1.0) {
  nlohmann::json ma, mb;
  const Table ta = load_manifest_table(path_a, ma);
  const Table tb = load_manifest_table(path_b, mb);
  CompareReport rep;
  rep.kind = ma.value("kind", "");
  if (rep.kind != mb.value("kind", "")) throw CompareError("kind mismatch: " + rep.kind + " vs " + mb.value("kind", ""));
  rep.tolerance = std::max(ma.value("tolerance", 0.0), mb.value("tolerance", 0.0)) * tolerance_scale;
  rep.same_seed = ma["seed"] == mb["seed"];
  const auto& ca = ta.columns();
  const auto& cb = tb.columns();
  if (ca.size() != cb.size()) throw CompareError("column layouts differ");
  for (std::size_t j = 0; j < ca.size(); ++j)
    if (ca[j].name != cb[j].name || ca[j].numeric != cb[j].numeric) throw CompareError("column layouts differ");
  const std::size_t rows = std::max(ta.rows().size(), tb.rows().size());
  for (std::size_t i = 0; i < rows; ++i) {
    if (i >= ta.rows().size() || i >= tb.rows().size()) {
      rep.diffs.push_back({i, "<row>", i < ta.rows().size() ? "present" : "missing",
                           i < tb.rows().size() ? "present" : "missing", INFINITY, true});
      continue;
    }
    for (std::size_t j = 0; j < ca.size(); ++j) {
      const auto& x = ta.rows()[i][j];
      const auto& y = tb.rows()[i][j];
      CellDiff d;
      d.row = i;
      d.column = ca[j].name;
      const bool may_differ = !rep.same_seed && ca[j].numeric && ca[j].tag == Provenance::TrialMax;
      if (ca[j].numeric) {
        const double u = std::get<double>(x), v = std::get<double>(y);
        d.a = format_number(u);
        d.b = format_number(v);
        if (u == v || (std::isnan(u) && std::isnan(v))) continue;
        // Relative for magnitudes above 1, absolute below, so round-off in
        // near-zero cells (error columns, converged distances) is not flagged.
        const double scale = std::max({1.0, std::abs(u), std::abs(v)});
        d.rel_diff = std::isfinite(scale) ? std::abs(u - v) / scale : INFINITY;
        d.flagged = !may_differ && !(d.rel_diff <= rep.tolerance);
      } else {
        d.a = std::get<std::string>(x);
        d.b = std::get<std::string>(y);
        if (d.a == d.b) continue;
        d.rel_diff = INFINITY;
        d.flagged = !may_differ;
      }
      rep.diffs.push_back(std::move(d));
    }
  }
  return rep;
}

}  // namespace admlab::report
