#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "overnow/now.hpp"

namespace overnow::apps {

/// Pinned keyed 64-bit mixing hash; truncated to `bits` (<= 64) where a
/// shorter tag is wanted. Collision chance 2^-bits.
std::uint64_t mix_hash(std::uint64_t key, std::uint64_t salt, const std::string& payload);

struct BroadcastOutcome {
  /// Payload digest per live node, empty optional when nothing arrived.
  std::map<NodeId, std::optional<std::uint64_t>> delivered;
  bool aborted = false;
  std::uint32_t rounds = 0;
  std::uint64_t message_units = 0;
  std::uint64_t payload_bits = 0;
};

/// Gossip broadcast with local knowledge: secure broadcast inside the
/// sender's cluster, then ceil(c * (lambda + ln(1/delta)) * lambda^2) rounds
/// in which every informed cluster pushes the payload to one randomly chosen
/// neighbor; receivers majority-vote conflicting copies.
BroadcastOutcome broadcast_local(now::PartitionState& state, NodeId sender,
                                 const std::string& payload, double delta, double c,
                                 adversary::AdversaryCtx& adv, Rng& rng);

/// Broadcast with global knowledge: direct sends fix a per-cluster majority
/// payload, the sender's cluster publishes a salted hash through
/// broadcast_local, and any cluster whose payload mismatches the hash raises
/// an alarm that aborts the protocol.
BroadcastOutcome broadcast_global(now::PartitionState& state, NodeId sender,
                                  const std::string& payload, int hash_bits, double delta,
                                  double c, adversary::AdversaryCtx& adv, Rng& rng);

struct AgreeOutcome {
  int decided = 0;
  std::uint32_t rounds = 0;
  std::uint64_t message_units = 0;
  std::size_t initiating_clusters = 0;
};

/// Byzantine agreement on a bit: an initiating cluster settles the bit
/// internally (valid under an honest majority) and gossips it. Without an
/// explicit initiator, every node volunteers with probability
/// lambda * 2^w / n_max per window, doubling over at most lambda windows;
/// the lowest-member-id tag picks among multiple initiators.
AgreeOutcome agree(now::PartitionState& state, const std::map<NodeId, int>& inputs,
                   std::optional<ClusterId> initiator, double delta, double c,
                   adversary::AdversaryCtx& adv, Rng& rng);

struct AggregateOutcome {
  double estimate = 0.0;
  double true_sum = 0.0;
  std::uint32_t repetitions = 0;
  std::vector<double> w_mins;
  std::uint64_t message_units = 0;
};

/// Sum estimation via exponential minima: each cluster draws `r` exponentials
/// at rate equal to its input sum, the network-wide minima are gossiped, and
/// every node computes r / sum(minima).
AggregateOutcome aggregate_sum(now::PartitionState& state,
                               const std::map<NodeId, std::uint64_t>& inputs, std::uint32_t r,
                               double delta, double c, adversary::AdversaryCtx& adv, Rng& rng);

struct SampleStats {
  std::vector<NodeId> ids;
  std::uint64_t walk_hops = 0;
  std::uint64_t hijacked = 0;
};

/// Peer sampling: each draw walks to a near-uniform cluster, which picks a
/// member through its shared randomness and returns the id along the path.
SampleStats sample_peers(now::PartitionState& state, NodeId requester, std::size_t count,
                         adversary::AdversaryCtx& adv, Rng& rng);

}  // namespace overnow::apps
