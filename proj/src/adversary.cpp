#include "overnow/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "overnow/now.hpp"

namespace overnow::adversary {

CorruptionLedger corrupt_initial(const std::vector<NodeId>& nodes, const AdversaryPolicy& policy,
                                 Rng& rng) {
  if (policy.tau < 0.0 || policy.tau >= 0.5)
    throw std::invalid_argument("tau must lie in [0, 0.5)");
  CorruptionLedger ledger;
  const std::size_t count =
      static_cast<std::size_t>(policy.tau * static_cast<double>(nodes.size()));
  std::vector<NodeId> pool = nodes;
  std::sort(pool.begin(), pool.end());
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    ledger.corrupted.insert(pool[i]);
  }
  ledger.budget_used = count;
  return ledger;
}

bool decide_on_join(NodeId new_node, AdversaryCtx& ctx) {
  switch (ctx.policy.corrupt_on_join) {
    case CorruptOnJoin::never:
      return false;
    case CorruptOnJoin::probabilistic:
      if (ctx.live_corrupted + 1 > ctx.corruption_budget()) return false;
      if (!ctx.rng.chance(ctx.policy.tau)) return false;
      break;
    case CorruptOnJoin::budgeted_targeted:
      if (ctx.live_corrupted + 1 > ctx.corruption_budget()) return false;
      break;
  }
  ctx.ledger.corrupted.insert(new_node);
  ++ctx.ledger.budget_used;
  return true;
}

AttackOutcome targeted_join_leave_attack(now::PartitionState& state, ClusterId target,
                                         std::uint64_t max_ops, bool exchange_enabled,
                                         AdversaryCtx& ctx, Rng& rng) {
  state.params.exchange_enabled = exchange_enabled;

  auto target_captured = [&]() {
    auto it = state.clusters.find(target);
    if (it == state.clusters.end()) return false;
    return 2 * it->second.malicious > it->second.size();
  };

  auto owned_live_outside_target = [&]() -> std::optional<NodeId> {
    for (NodeId id : ctx.ledger.corrupted) {
      auto it = state.node_index.find(id);
      if (it != state.node_index.end() && it->second != target) return id;
    }
    return std::nullopt;
  };

  std::vector<NodeId> parked;  // owned identities currently offline
  for (NodeId id : ctx.ledger.corrupted) {
    if (!state.node_index.count(id)) parked.push_back(id);
  }

  AttackOutcome outcome;
  for (std::uint64_t op = 1; op <= max_ops; ++op) {
    if (auto stray = owned_live_outside_target()) {
      now::leave(state, *stray, ctx, rng);
      parked.push_back(*stray);
    } else {
      NodeId recruit;
      if (!parked.empty()) {
        recruit = parked.back();
        parked.pop_back();
      } else if (ctx.live_corrupted < ctx.corruption_budget()) {
        recruit = state.next_node_id++;
        ctx.ledger.corrupted.insert(recruit);
        ++ctx.ledger.budget_used;
      } else {
        break;  // every owned node already sits in the target
      }
      now::join(state, recruit, state.clusters.begin()->first, ctx, rng);
    }
    ++state.step;
    outcome.ops_used = op;
    if (target_captured()) {
      outcome.captured_at = op;
      std::ostringstream digest;
      digest << "target " << target << " captured at op " << op;
      state.telemetry.events.push_back(digest.str());
      return outcome;
    }
  }
  return outcome;
}

void crash_attack(now::PartitionState& state, double epsilon, AdversaryCtx& ctx, Rng& rng) {
  if (epsilon <= 0.0 || epsilon >= 1.0) throw std::invalid_argument("epsilon must lie in (0, 1)");
  const std::size_t n = state.node_count();
  const std::size_t count = static_cast<std::size_t>(epsilon * static_cast<double>(n));
  if (count == 0) return;

  std::vector<NodeId> pool;
  pool.reserve(n);
  for (const auto& [id, _] : state.node_index) pool.push_back(id);
  std::vector<NodeId> victims;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    victims.push_back(pool[i]);
  }
  std::sort(victims.begin(), victims.end());

  std::map<ClusterId, std::size_t> pre_sizes;
  for (const auto& [cid, cluster] : state.clusters) pre_sizes[cid] = cluster.size();

  // All crashes land in the same step: rosters shrink first, consequences run
  // afterwards.
  std::map<NodeId, ClusterId> victim_cluster;
  for (NodeId v : victims) {
    victim_cluster[v] = state.cluster_of(v);
    ctx.note_leave(v);
    now::remove_crashed_node(state, v, ctx);
  }

  // Clusters that kept at most half their members are dead to their
  // neighbors; survivors rejoin the network.
  std::vector<NodeId> rejoiners;
  for (const auto& [cid, pre] : pre_sizes) {
    auto it = state.clusters.find(cid);
    if (it == state.clusters.end()) continue;
    if (2 * it->second.size() <= pre) {
      const std::vector<NodeId> survivors = now::declare_cluster_dead(state, cid, ctx);
      rejoiners.insert(rejoiners.end(), survivors.begin(), survivors.end());
    }
  }
  for (NodeId m : rejoiners) {
    now::join_existing_node(state, m, state.clusters.begin()->first, ctx, rng);
  }

  // Each crash triggers its cluster's departure handling.
  for (NodeId v : victims) {
    const ClusterId cid = victim_cluster[v];
    if (!state.clusters.count(cid)) continue;  // died or already merged away
    now::announce_membership(state, cid);
    const std::vector<ClusterId> partners = now::exchange(state, cid, ctx, rng);
    for (ClusterId p : partners) {
      if (state.clusters.count(p)) now::exchange(state, p, ctx, rng);
    }
    if (state.clusters.count(cid) &&
        static_cast<double>(state.cluster(cid).size()) < state.params.merge_floor()) {
      now::dissolve_below_floor(state, cid, ctx, rng);
    }
  }

  std::ostringstream digest;
  digest << "crash_attack eps=" << epsilon << " victims=" << victims.size();
  state.telemetry.events.push_back(digest.str());
}

}  // namespace overnow::adversary
