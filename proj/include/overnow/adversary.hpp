#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "overnow/rng.hpp"
#include "overnow/types.hpp"

namespace overnow::now {
struct PartitionState;
}

namespace overnow::adversary {

enum class CorruptOnJoin { never, probabilistic, budgeted_targeted };

/// Strategy flags consulted at protocol decision points. Corrupted nodes
/// follow the protocol unless a flag says otherwise.
struct Behavior {
  bool silent = false;            // drop forwards / stay quiet in discovery
  bool equivocate = false;        // per-receiver payloads where channels allow it
  bool withhold_reveal = false;   // abort-bias the shared randomness
  bool hijack_walks = false;      // captured relay clusters redirect walks
  bool forge_ids = false;         // attempt (rejected) identity injection
  std::optional<ClusterId> target;
  std::optional<double> crash_epsilon;
};

struct AdversaryPolicy {
  double tau = 0.0;  // corruptible fraction of the configured maximum size
  CorruptOnJoin corrupt_on_join = CorruptOnJoin::never;
  Behavior behavior;
};

/// Ground-truth honesty. Corruption is static: once listed, always listed.
struct CorruptionLedger {
  std::set<NodeId> corrupted;
  std::uint64_t budget_used = 0;

  bool is_corrupted(NodeId id) const { return corrupted.count(id) != 0; }
};

/// Policy + ledger + the adversary's private randomness. Passed to every
/// protocol operation; honest draws never come from this stream.
struct AdversaryCtx {
  AdversaryPolicy policy;
  CorruptionLedger ledger;
  Rng rng;
  std::size_t max_nodes = 0;      // budget denominator
  std::size_t live_corrupted = 0;

  bool is_corrupted(NodeId id) const { return ledger.is_corrupted(id); }
  std::size_t corruption_budget() const {
    return static_cast<std::size_t>(policy.tau * static_cast<double>(max_nodes));
  }

  void note_join(NodeId id) {
    if (is_corrupted(id)) ++live_corrupted;
  }
  void note_leave(NodeId id) {
    if (is_corrupted(id) && live_corrupted > 0) --live_corrupted;
  }
};

/// Marks exactly floor(tau * |nodes|) nodes corrupted, chosen uniformly.
CorruptionLedger corrupt_initial(const std::vector<NodeId>& nodes, const AdversaryPolicy& policy,
                                 Rng& rng);

/// Join-time corruption decision. Returns true (and updates the ledger) only
/// while the live corrupted count stays within the tau budget.
bool decide_on_join(NodeId new_node, AdversaryCtx& ctx);

struct AttackOutcome {
  std::optional<std::uint64_t> captured_at;  // first op with a malicious majority
  std::uint64_t ops_used = 0;
};

/// The cluster-capture strategy: cycle owned nodes through join/leave,
/// keeping those that land in the target and retrying the rest. With member
/// exchange disabled this accumulates a majority; with exchange enabled the
/// churn keeps flushing the target.
AttackOutcome targeted_join_leave_attack(now::PartitionState& state, ClusterId target,
                                         std::uint64_t max_ops, bool exchange_enabled,
                                         AdversaryCtx& ctx, Rng& rng);

/// floor(epsilon * n) uniformly random live nodes crash in one step. Each
/// triggers the departure handling of its cluster; clusters that keep at most
/// half their members are declared dead, their overlay vertex crashes, and
/// survivors rejoin.
void crash_attack(now::PartitionState& state, double epsilon, AdversaryCtx& ctx, Rng& rng);

}  // namespace overnow::adversary
