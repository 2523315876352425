#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "overnow/adversary.hpp"
#include "overnow/harness.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"overnow: churn-resilient cluster overlay simulator"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "execute a scenario config");
  std::string run_config;
  std::uint64_t run_seed = 0;
  bool run_seed_set = false;
  std::string out_dir;
  std::uint32_t dump_every = 0;
  run->add_option("--config", run_config, "scenario config path")->required();
  run->add_option("--seed", run_seed, "override the config seed")
      ->each([&](const std::string&) { run_seed_set = true; });
  run->add_option("--out", out_dir, "output directory for metrics and snapshot");
  run->add_option("--dump-overlay", dump_every, "dump the overlay every N steps (needs --out)");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "check invariants of a state snapshot");
  std::string sweep_state;
  sweep->add_option("--state", sweep_state, "state snapshot path")->required();

  // attack
  auto* attack = app.add_subcommand("attack", "run an adversary preset");
  std::string attack_preset, attack_config;
  std::uint64_t attack_ops = 10000;
  bool attack_no_exchange = false;
  attack->add_option("--preset", attack_preset, "targeted | crash")->required();
  attack->add_option("--config", attack_config, "scenario config path")->required();
  attack->add_option("--ops", attack_ops, "operation budget for the targeted preset");
  attack->add_flag("--no-exchange", attack_no_exchange, "disable member exchange (control run)");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "summarize a metrics stream");
  std::string metrics_path;
  analyze->add_option("--metrics", metrics_path, "metrics.jsonl path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      overnow::harness::ScenarioConfig config = overnow::harness::load_config_file(run_config);
      if (run_seed_set) config.seed = run_seed;
      overnow::harness::RunOptions options;
      if (!out_dir.empty()) options.out_dir = out_dir;
      options.dump_overlay_every = dump_every;
      const auto result = overnow::harness::run_scenario(config, options);
      std::cout << result.exit_summary << '\n';
      if (out_dir.empty()) std::cout << result.metrics_jsonl;
      return result.sweeps_ok ? 0 : 1;
    }
    if (*sweep) {
      const auto loaded = overnow::harness::load_state(slurp(sweep_state));
      const auto report = overnow::harness::sweep_invariants(loaded.state, &loaded.ledger);
      for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
      std::cout << (report.ok() ? "ok" : "FAIL") << " (" << report.violations.size()
                << " violations)\n";
      return report.ok() ? 0 : 1;
    }
    if (*attack) {
      overnow::harness::ScenarioConfig config = overnow::harness::load_config_file(attack_config);
      if (attack_preset == "targeted") {
        auto result = overnow::harness::run_scenario(config);
        const overnow::ClusterId target =
            config.adversary_target.value_or(result.state.clusters.begin()->first);
        overnow::Rng attack_rng = overnow::Rng(config.seed).derive(7);
        const auto outcome = overnow::adversary::targeted_join_leave_attack(
            result.state, target, attack_ops, !attack_no_exchange, result.adversary, attack_rng);
        if (outcome.captured_at) {
          std::cout << "captured target " << target << " at op " << *outcome.captured_at << '\n';
        } else {
          std::cout << "target " << target << " never captured in " << outcome.ops_used
                    << " ops\n";
        }
        return 0;
      }
      if (attack_preset == "crash") {
        auto result = overnow::harness::run_scenario(config);
        overnow::Rng attack_rng = overnow::Rng(config.seed).derive(8);
        const double eps = result.adversary.policy.behavior.crash_epsilon.value_or(0.1);
        overnow::adversary::crash_attack(result.state, eps, result.adversary, attack_rng);
        const auto report =
            overnow::harness::sweep_invariants(result.state, &result.adversary.ledger);
        for (const auto& v : report.violations) std::cout << "violation: " << v << '\n';
        std::cout << "post-crash n=" << result.state.node_count()
                  << " clusters=" << result.state.clusters.size()
                  << " sweeps=" << (report.ok() ? "ok" : "FAIL") << '\n';
        return report.ok() ? 0 : 1;
      }
      std::cerr << "unknown preset: " << attack_preset << '\n';
      return 2;
    }
    if (*analyze) {
      std::cout << overnow::harness::analyze_metrics(slurp(metrics_path));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
