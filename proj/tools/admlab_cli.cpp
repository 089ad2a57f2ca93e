// Command-line front end: run scenario configs, compare manifests, list kinds.

#include "admlab/report/app.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  using namespace admlab::report;
  CLI::App app{"Weighted admissibility laboratory: scenario runner"};
  app.require_subcommand(1);

  std::string config, out_dir;
  std::int64_t seed = -1;
  bool parallel = false;
  double tolerance_scale = 1.0;
  auto* run = app.add_subcommand("run", "Run every scenario in a JSON config");
  run->add_option("config", config, "Config file")->required();
  run->add_option("--seed", seed, "Override the seed of every randomized scenario")->check(CLI::NonNegativeNumber);
  run->add_option("--out-dir", out_dir, "Output directory (default: $ADMLAB_OUT_DIR or .)");
  run->add_flag("--parallel", parallel, "Run scenarios concurrently");
  run->add_option("--tolerance-scale", tolerance_scale, "Multiply every embedded tolerance")
      ->check(CLI::PositiveNumber);

  std::string manifest_a, manifest_b;
  double compare_scale = 1.0;
  auto* compare = app.add_subcommand("compare", "Cell-wise comparison of two runs of the same kind");
  compare->add_option("manifest_a", manifest_a, "First manifest")->required();
  compare->add_option("manifest_b", manifest_b, "Second manifest")->required();
  compare->add_option("--tolerance-scale", compare_scale, "Multiply the scenario tolerance")
      ->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list-kinds", "List scenario kinds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalidInput;
  }

  if (*list) {
    for (const auto& k : kinds()) std::cout << k.name << "\t" << k.summary << "\n";
    return kOk;
  }

  if (*run) {
    RunContext ctx;
    if (seed >= 0) ctx.seed_override = static_cast<std::uint64_t>(seed);
    ctx.tolerance_scale = tolerance_scale;
    if (out_dir.empty()) {
      const char* env = std::getenv("ADMLAB_OUT_DIR");
      out_dir = env && *env ? env : ".";
    }
    return run_config_file(config, ctx, out_dir, parallel, std::cerr);
  }

  try {
    const auto rep = compare_runs(manifest_a, manifest_b, compare_scale);
    std::cout << "kind " << rep.kind << ", tolerance " << format_number(rep.tolerance)
              << (rep.same_seed ? ", same seed" : ", different seeds") << "\n";
    std::cout << "row,column,a,b,rel_diff,flagged\n";
    for (const auto& d : rep.diffs)
      std::cout << d.row << "," << d.column << "," << d.a << "," << d.b << "," << format_number(d.rel_diff) << ","
                << (d.flagged ? 1 : 0) << "\n";
    std::cout << rep.diffs.size() << " differing cells, " << rep.flagged() << " beyond tolerance\n";
    return rep.flagged() ? kAssertionFailed : kOk;
  } catch (const CompareError& e) {
    std::cerr << "compare: " << e.what() << "\n";
    return kInvalidInput;
  }
}
