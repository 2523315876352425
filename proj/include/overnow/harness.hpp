#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "overnow/adversary.hpp"
#include "overnow/now.hpp"

namespace overnow::harness {

enum class ChurnOp { join, leave, crash_attack, app_call };

struct ChurnEvent {
  std::uint64_t step = 0;
  ChurnOp op = ChurnOp::join;
  double epsilon = 0.0;    // crash_attack
  std::string app;         // app_call: broadcast_local | broadcast_global |
                           //           agree | aggregate | sample
  std::string app_args;
};

enum class ChurnMix { none, alternating, mixed, joins, leaves };

struct ScenarioConfig {
  std::uint64_t seed = 1;
  int lambda = 2;
  int k = 2;
  double l = 1.5;
  double tau = 0.0;
  double epsilon = 0.1;
  double delta = 0.01;
  double c = 4.0;
  std::size_t n_initial = 64;
  std::size_t n_max = 256;
  std::uint32_t batch_size = 1;
  std::uint32_t metrics_every = 50;
  bool override_unsafe = false;
  bool demo_violation = false;
  bool exchange_enabled = true;
  bool track_majority = true;

  std::string adversary_corrupt_on_join = "probabilistic";
  std::vector<std::string> adversary_behavior;  // silent, equivocate, ...
  std::optional<ClusterId> adversary_target;

  ChurnMix mix = ChurnMix::none;
  std::uint64_t mix_ops = 0;
  double join_weight = 1.0;
  double leave_weight = 1.0;
  std::vector<ChurnEvent> events;  // explicit entries merged into the schedule

  /// Throws std::invalid_argument naming the offending field on violation.
  void validate() const;
};

/// Key-value text with [section] headers; `event = <step> <op> [args]` lines
/// in the [churn] section accumulate.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config_file(const std::string& path);

struct SweepReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Quiescent-state checks: partition integrity, size band, neighbor-view
/// consistency, overlay/cluster agreement, and (with a ledger) the
/// honest-majority census. Reports, never mutates.
SweepReport sweep_invariants(const now::PartitionState& state,
                             const adversary::CorruptionLedger* ledger = nullptr);

struct RunResult {
  now::PartitionState state;
  adversary::AdversaryCtx adversary;
  std::string metrics_jsonl;
  std::string summary_csv;
  bool sweeps_ok = true;
  std::uint64_t majority_flips = 0;   // (step, cluster) pairs with a malicious majority
  std::uint64_t majority_checks = 0;  // (step, cluster) pairs examined
  std::string exit_summary;
};

struct RunOptions {
  std::optional<std::string> out_dir;
  std::uint32_t dump_overlay_every = 0;  // overlay snapshots to out_dir when > 0
};

/// Full deterministic run: discovery on a random node graph with a connected
/// honest core, clusterization, then the churn schedule. Identical configs
/// produce byte-identical metrics streams.
RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Snapshot of the partition plus honesty ground truth, loadable by the CLI's
/// sweep command.
std::string save_state(const now::PartitionState& state,
                       const adversary::CorruptionLedger& ledger);
struct LoadedState {
  now::PartitionState state;
  adversary::CorruptionLedger ledger;
};
LoadedState load_state(const std::string& text);

/// Summary table over a metrics stream (the CLI's analyze command).
std::string analyze_metrics(const std::string& jsonl);

}  // namespace overnow::harness
