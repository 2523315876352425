#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "overnow/adversary.hpp"
#include "overnow/graph.hpp"
#include "overnow/over.hpp"

namespace overnow::now {

struct NowParams {
  int lambda = 2;
  int k = 2;
  double l = 1.5;      // size-band stretch, must exceed sqrt(2)
  double tau = 0.0;    // adversary fraction (carried for reporting)
  double epsilon = 0.1;
  bool exchange_enabled = true;

  int nominal_cluster_size() const { return k * lambda * lambda; }
  double split_threshold() const { return k * l * lambda * lambda; }  // size > this splits
  double merge_floor() const { return k * lambda * lambda / l; }      // size < this merges
  double walk_budget() const { return 8.0 * lambda * lambda; }
};

struct Cluster {
  ClusterId id = 0;
  std::vector<NodeId> members;  // sorted
  /// Replica of each adjacent cluster's roster, as accepted under the
  /// half-plus-one rule. Keys track the overlay's distinct neighbors.
  std::map<ClusterId, std::vector<NodeId>> neighbor_view;
  /// Simulator bookkeeping (ground truth), maintained alongside membership;
  /// protocol decisions never read it.
  std::uint32_t malicious = 0;

  std::size_t size() const { return members.size(); }
  bool contains(NodeId id) const;
};

struct Telemetry {
  std::uint64_t message_units = 0;
  std::uint64_t payload_bits = 0;
  std::uint64_t walks = 0;
  std::uint64_t walk_hops = 0;
  std::uint64_t hijacked_walks = 0;
  std::uint64_t withheld_reveals = 0;
  std::uint64_t exchanges = 0;
  std::uint64_t splits = 0;
  std::uint64_t merges = 0;
  std::uint64_t dead_clusters = 0;
  std::uint64_t forged_ids_dropped = 0;
  std::vector<std::string> events;  // split/merge/attack digests, drained by the harness
};

struct PartitionState {
  NowParams params;
  std::map<ClusterId, Cluster> clusters;
  over::OverlayState overlay;
  std::map<NodeId, ClusterId> node_index;
  std::uint64_t step = 0;
  std::size_t n_max = 0;  // configured ceiling (probabilistic initiation, tau budget)
  NodeId next_node_id = 0;
  ClusterId next_cluster_id = 0;
  Telemetry telemetry;

  std::size_t node_count() const { return node_index.size(); }
  const Cluster& cluster(ClusterId id) const;
  Cluster& cluster(ClusterId id);
  ClusterId cluster_of(NodeId id) const;
};

/// One inter-cluster payload. A receiver accepts a payload from cluster C
/// only when more than half of C's members send it identically.
struct ClusterMessage {
  NodeId sender = 0;
  ClusterId sender_cluster = 0;
  std::uint64_t payload = 0;
  std::uint64_t step = 0;
};

/// True when `identical_copies` identical payloads out of a roster of
/// `cluster_size` members clear the half-plus-one acceptance rule.
inline bool majority_accept(std::size_t identical_copies, std::size_t cluster_size) {
  return 2 * identical_copies > cluster_size;
}

// ---------------------------------------------------------------------------
// Initialization

struct GlobalKnowledgeResult {
  std::map<NodeId, std::set<NodeId>> views;
  std::uint64_t steps = 0;
  std::uint64_t message_units = 0;
  std::uint64_t payload_bits = 0;
  std::uint64_t forged_ids_dropped = 0;
};

/// Network discovery on a small node graph: every node repeatedly sends its
/// known-id list to one not-yet-contacted known node. Each ordered pair
/// communicates at most once, so the run takes at most n(n-1) steps. Honest
/// views end complete whenever honest nodes form a connected subgraph.
GlobalKnowledgeResult global_knowledge(const Graph& node_graph,
                                       const adversary::CorruptionLedger& ledger,
                                       const adversary::AdversaryPolicy& policy, Rng& rng,
                                       bool demo_violation = false);

/// Uniformly random partition into floor(|ids| / (k*lambda^2)) clusters of
/// nominal size (remainder spread one per cluster), plus a connected random
/// seed overlay. Requires |ids| >= 2*k*lambda^2.
PartitionState clusterize(const std::vector<NodeId>& ids, const NowParams& params, Rng& rng);

// ---------------------------------------------------------------------------
// Maintenance primitives

/// Commit-reveal shared randomness in [0, r): every member commits a value,
/// reveals are summed modulo r. Commitments bind before any reveal is seen,
/// so a single included honest draw makes the sum uniform. Members may
/// withhold reveals (they are excluded and counted).
std::uint64_t rand_num(PartitionState& state, ClusterId cluster, std::uint64_t r,
                       adversary::AdversaryCtx& adv, Rng& rng);

struct RandClResult {
  ClusterId cluster = 0;
  std::uint32_t hops = 0;
  bool hijacked = false;
};

/// Cluster-level walk over the overlay's distinct-neighbor graph: per hop the
/// current cluster draws the clock value and the next-neighbor index through
/// rand_num, and the receiving cluster validates the handoff under the
/// half-plus-one rule. Terminates where the clock crosses zero.
RandClResult rand_cl(PartitionState& state, ClusterId start, adversary::AdversaryCtx& adv,
                     Rng& rng);

/// Full membership churn of one cluster: every member is assigned a target
/// cluster via rand_cl and a replacement inside it via rand_num; all swaps
/// apply atomically, then rosters are re-announced. Sizes are preserved.
/// Returns the distinct partner clusters that swapped at least one node.
std::vector<ClusterId> exchange(PartitionState& state, ClusterId c, adversary::AdversaryCtx& adv,
                                Rng& rng);

// ---------------------------------------------------------------------------
// Churn operations

/// Insert via a random walk from the contact cluster, exchange the receiving
/// cluster, and split it if it outgrew the band.
void join(PartitionState& state, NodeId new_node, ClusterId contact, adversary::AdversaryCtx& adv,
          Rng& rng);

/// Remove the node, exchange its cluster and (one level deep) every partner
/// of that exchange, then dissolve the cluster if it fell below the band.
void leave(PartitionState& state, NodeId node, adversary::AdversaryCtx& adv, Rng& rng);

/// Refreshes `cluster`'s roster replica at all overlay neighbors and pulls
/// their rosters into its own view. Exposed for the harness's fault checks.
void announce_membership(PartitionState& state, ClusterId cluster);

// ---------------------------------------------------------------------------
// Simulator hooks (harness and adversary orchestration, not protocol surface)

/// Realigns the cached per-cluster malicious counts with a ledger, after
/// clusterize or a snapshot load.
void sync_malicious_counts(PartitionState& state, const adversary::CorruptionLedger& ledger);

/// Insertion path for a node that is already live (merge rejoins, crash
/// survivors): same walk/exchange/split flow as a fresh join, but without
/// touching the adversary's live-count bookkeeping.
void join_existing_node(PartitionState& state, NodeId node, ClusterId contact,
                        adversary::AdversaryCtx& adv, Rng& rng);

/// Dissolves a cluster through the merge path regardless of its size.
void dissolve_below_floor(PartitionState& state, ClusterId cid, adversary::AdversaryCtx& adv,
                          Rng& rng);

/// Silently drops a node from its cluster (a crash as seen by the cluster:
/// the roster shrinks, nothing else happens yet).
void remove_crashed_node(PartitionState& state, NodeId node, adversary::AdversaryCtx& adv);

/// Declares a cluster dead (it kept at most half its members): neighbors
/// drop it, its overlay vertex crashes without repair, and the surviving
/// members are returned for rejoin. Refuses to kill the last cluster.
std::vector<NodeId> declare_cluster_dead(PartitionState& state, ClusterId cid,
                                         adversary::AdversaryCtx& adv);

}  // namespace overnow::now
