#include "overnow/apps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace overnow::apps {

namespace {

constexpr std::uint64_t kHashKey = 0x5eedc0ffee00d1ceULL;

std::uint64_t truncate_bits(std::uint64_t value, int bits) {
  if (bits >= 64) return value;
  return value & ((std::uint64_t{1} << bits) - 1);
}

std::uint32_t spreading_rounds(const now::NowParams& params, double delta, double c) {
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("delta must lie in (0, 1)");
  if (c <= 0.0) throw std::invalid_argument("round constant must be positive");
  const double lambda = params.lambda;
  // (log n + log 1/delta) / phi with log n at the scale parameter and the
  // conductance floor 1/lambda^2.
  return static_cast<std::uint32_t>(
      std::ceil(c * (lambda + std::log(1.0 / delta)) * lambda * lambda));
}

struct GossipDelivery {
  std::map<ClusterId, std::uint64_t> holding;  // digest held by honest members
  std::uint32_t rounds = 0;
};

/// Push gossip of an already-cluster-resident digest for the standard round
/// budget. Corrupted members drop forwards under the silent policy; receiving
/// nodes accept only payloads cleared by the half-plus-one rule.
GossipDelivery gossip_rounds(now::PartitionState& state, ClusterId origin, std::uint64_t digest,
                             std::uint64_t payload_bits, double delta, double c,
                             adversary::AdversaryCtx& adv, Rng& rng) {
  GossipDelivery out;
  out.holding[origin] = digest;
  out.rounds = 1;  // the intra-cluster step
  if (state.clusters.size() == 1) return out;

  const std::uint32_t budget = spreading_rounds(state.params, delta, c);
  for (std::uint32_t t = 0; t < budget; ++t) {
    const std::map<ClusterId, std::uint64_t> informed = out.holding;
    for (const auto& [cid, held] : informed) {
      const auto& nbrs = state.overlay.graph.neighbors(cid);
      if (nbrs.empty()) continue;
      const std::uint64_t idx = now::rand_num(state, cid, nbrs.size(), adv, rng);
      const ClusterId to = nbrs[idx].to;
      const now::Cluster& from = state.cluster(cid);
      const now::Cluster& dest = state.cluster(to);
      state.telemetry.message_units += from.size() * dest.size();
      state.telemetry.payload_bits += payload_bits * from.size() * dest.size();

      std::size_t copies = from.size() - from.malicious;
      if (!adv.policy.behavior.silent) copies += from.malicious;
      if (!now::majority_accept(copies, from.size())) continue;

      // First accepted payload sticks; a later conflicting copy would be
      // outvoted by the members already holding it.
      out.holding.emplace(to, held);
    }
  }
  out.rounds += budget;
  return out;
}

void fill_delivery(const now::PartitionState& state, const GossipDelivery& gossip,
                   BroadcastOutcome& outcome) {
  for (const auto& [cid, cluster] : state.clusters) {
    auto held = gossip.holding.find(cid);
    for (NodeId m : cluster.members) {
      if (held != gossip.holding.end()) {
        outcome.delivered[m] = held->second;
      } else {
        outcome.delivered[m] = std::nullopt;
      }
    }
  }
}

}  // namespace

std::uint64_t mix_hash(std::uint64_t key, std::uint64_t salt, const std::string& payload) {
  std::uint64_t state = key ^ (salt * 0x9e3779b97f4a7c15ULL);
  auto absorb = [&state](std::uint64_t chunk) {
    state ^= chunk;
    state *= 0xbf58476d1ce4e5b9ULL;
    state ^= state >> 29;
    state *= 0x94d049bb133111ebULL;
    state ^= state >> 32;
  };
  std::uint64_t chunk = 0;
  int filled = 0;
  for (unsigned char ch : payload) {
    chunk |= static_cast<std::uint64_t>(ch) << (8 * filled);
    if (++filled == 8) {
      absorb(chunk);
      chunk = 0;
      filled = 0;
    }
  }
  absorb(chunk ^ (static_cast<std::uint64_t>(payload.size()) << 56));
  return state;
}

BroadcastOutcome broadcast_local(now::PartitionState& state, NodeId sender,
                                 const std::string& payload, double delta, double c,
                                 adversary::AdversaryCtx& adv, Rng& rng) {
  auto idx = state.node_index.find(sender);
  if (idx == state.node_index.end()) throw std::invalid_argument("dead sender");
  const ClusterId origin = idx->second;

  const std::uint64_t before_units = state.telemetry.message_units;
  const std::uint64_t before_bits = state.telemetry.payload_bits;

  // Secure broadcast inside the sender's cluster: all members end up with one
  // consistent payload (an equivocating sender is forced to a single value).
  const now::Cluster& oc = state.cluster(origin);
  state.telemetry.message_units += oc.size() * oc.size();
  state.telemetry.payload_bits += 8ull * payload.size() * oc.size();

  const std::uint64_t digest = mix_hash(kHashKey, 0, payload);
  GossipDelivery gossip =
      gossip_rounds(state, origin, digest, 8ull * payload.size(), delta, c, adv, rng);

  BroadcastOutcome outcome;
  outcome.rounds = gossip.rounds;
  fill_delivery(state, gossip, outcome);
  outcome.message_units = state.telemetry.message_units - before_units;
  outcome.payload_bits = state.telemetry.payload_bits - before_bits;
  return outcome;
}

BroadcastOutcome broadcast_global(now::PartitionState& state, NodeId sender,
                                  const std::string& payload, int hash_bits, double delta,
                                  double c, adversary::AdversaryCtx& adv, Rng& rng) {
  auto idx = state.node_index.find(sender);
  if (idx == state.node_index.end()) throw std::invalid_argument("dead sender");
  if (hash_bits < 1 || hash_bits > 64)
    throw std::invalid_argument("hash width must lie in [1, 64]");
  const ClusterId origin = idx->second;

  const std::uint64_t before_units = state.telemetry.message_units;
  const std::uint64_t before_bits = state.telemetry.payload_bits;

  // Direct sends to every node, then a per-cluster majority vote over the
  // members' reports fixes what the sender said to that cluster. A corrupted
  // equivocating sender either splits the clusters in two camps or, when a
  // target cluster is named, splits the copies inside that single cluster.
  const bool equivocating = adv.is_corrupted(sender) && adv.policy.behavior.equivocate;
  const std::string alternate = payload + "#";
  const std::optional<ClusterId> inner_target =
      equivocating ? adv.policy.behavior.target : std::nullopt;

  std::map<ClusterId, std::optional<std::string>> cluster_payload;
  for (const auto& [cid, cluster] : state.clusters) {
    state.telemetry.message_units += cluster.size();
    state.telemetry.payload_bits += 8ull * payload.size() * cluster.size();
    // Members rebroadcast what they received; the majority fixes the value.
    state.telemetry.message_units += cluster.size() * cluster.size();
    if (inner_target && cid == *inner_target) {
      // Half the members saw the alternate copy: no strict majority.
      const std::size_t half = cluster.size() / 2;
      const std::size_t rest = cluster.size() - half;
      if (now::majority_accept(rest, cluster.size())) {
        cluster_payload[cid] = payload;
      } else {
        cluster_payload[cid] = std::nullopt;
      }
    } else if (equivocating && !inner_target && cid % 2 == 1) {
      cluster_payload[cid] = alternate;
    } else {
      cluster_payload[cid] = payload;
    }
  }

  // The sender's cluster salts and tags its own payload; the tag travels by
  // gossip and every cluster checks its resolved payload against it.
  std::uint64_t salt = 0;
  for (int got = 0; got < hash_bits; got += 32) {
    const int width = std::min(32, hash_bits - got);
    salt = (salt << width) |
           now::rand_num(state, origin, std::uint64_t{1} << width, adv, rng);
  }
  const std::optional<std::string>& origin_payload = cluster_payload.at(origin);
  const std::uint64_t tag = truncate_bits(
      mix_hash(kHashKey ^ salt, 2, origin_payload.value_or(payload)), hash_bits);

  // The salt and the tag each cost hash_bits on the wire.
  GossipDelivery tag_gossip = gossip_rounds(state, origin, tag,
                                            2ull * static_cast<std::uint64_t>(hash_bits), delta,
                                            c, adv, rng);

  bool alarm = false;
  for (const auto& [cid, cluster] : state.clusters) {
    auto held = tag_gossip.holding.find(cid);
    if (held == tag_gossip.holding.end()) continue;
    const auto& mine = cluster_payload.at(cid);
    if (!mine) {
      alarm = true;
      break;
    }
    const std::uint64_t expect = truncate_bits(mix_hash(kHashKey ^ salt, 2, *mine), hash_bits);
    if (expect != held->second) {
      alarm = true;
      break;
    }
  }

  BroadcastOutcome outcome;
  outcome.rounds = tag_gossip.rounds + 1;
  if (alarm) {
    // The alarm travels by one more gossip broadcast and everyone aborts.
    gossip_rounds(state, origin, mix_hash(kHashKey, 3, "alarm"), 64, delta, c, adv, rng);
    outcome.aborted = true;
    outcome.rounds += 1;
    for (const auto& [id, _] : state.node_index) outcome.delivered[id] = std::nullopt;
  } else {
    for (const auto& [cid, cluster] : state.clusters) {
      const auto& mine = cluster_payload.at(cid);
      for (NodeId m : cluster.members) {
        outcome.delivered[m] =
            mine ? std::optional<std::uint64_t>(mix_hash(kHashKey, 1, *mine)) : std::nullopt;
      }
    }
  }
  outcome.message_units = state.telemetry.message_units - before_units;
  outcome.payload_bits = state.telemetry.payload_bits - before_bits;
  return outcome;
}

AgreeOutcome agree(now::PartitionState& state, const std::map<NodeId, int>& inputs,
                   std::optional<ClusterId> initiator, double delta, double c,
                   adversary::AdversaryCtx& adv, Rng& rng) {
  AgreeOutcome outcome;
  const std::uint64_t before_units = state.telemetry.message_units;

  std::vector<ClusterId> initiating;
  if (initiator) {
    if (!state.clusters.count(*initiator)) throw std::invalid_argument("unknown cluster");
    initiating.push_back(*initiator);
  } else {
    // Probabilistic initiation: volunteers at rate lambda/n_max, doubled
    // after each silent window of lambda^4 rounds.
    const double lambda = state.params.lambda;
    const std::size_t n_max = state.n_max > 0 ? state.n_max : 2 * state.node_count();
    const std::uint32_t window =
        static_cast<std::uint32_t>(lambda * lambda * lambda * lambda);
    for (int doubling = 0; doubling <= state.params.lambda; ++doubling) {
      const double p = std::min(1.0, lambda * std::pow(2.0, doubling) / n_max);
      std::set<ClusterId> hits;
      for (const auto& [id, cid] : state.node_index) {
        if (rng.chance(p)) hits.insert(cid);
      }
      outcome.rounds += window;
      if (!hits.empty()) {
        initiating.assign(hits.begin(), hits.end());
        break;
      }
    }
    if (initiating.empty()) throw std::runtime_error("initiation failed");
  }

  // Each initiating cluster settles a bit internally. With an honest
  // majority the stub returns the majority bit of the honest members.
  struct Proposal {
    NodeId tag;
    int bit;
  };
  std::vector<Proposal> proposals;
  for (ClusterId cid : initiating) {
    const now::Cluster& cluster = state.cluster(cid);
    state.telemetry.message_units += cluster.size() * cluster.size();
    int bit;
    if (2 * cluster.malicious > cluster.size()) {
      bit = adv.rng.below(2) == 0 ? 0 : 1;  // captured committee: arbitrary
    } else {
      std::size_t ones = 0, honest = 0;
      NodeId lowest_honest = 0;
      bool have_lowest = false;
      for (NodeId m : cluster.members) {
        if (adv.is_corrupted(m)) continue;
        ++honest;
        auto in = inputs.find(m);
        const int v = in == inputs.end() ? 0 : in->second;
        if (!have_lowest) {
          lowest_honest = m;
          have_lowest = true;
        }
        if (v) ++ones;
      }
      if (2 * ones > honest) {
        bit = 1;
      } else if (2 * ones < honest) {
        bit = 0;
      } else {
        auto in = inputs.find(lowest_honest);
        bit = in == inputs.end() ? 0 : in->second;
      }
    }
    proposals.push_back({cluster.members.front(), bit});

    // Gossip the bit with the cluster's lowest-member-id tag.
    const std::string body = std::to_string(bit) + ":" + std::to_string(cluster.members.front());
    BroadcastOutcome b = broadcast_local(state, cluster.members.front(), body, delta, c, adv, rng);
    outcome.rounds += b.rounds;
  }

  const Proposal* winner = &proposals.front();
  for (const Proposal& p : proposals) {
    if (p.tag < winner->tag) winner = &p;
  }
  outcome.decided = winner->bit;
  outcome.initiating_clusters = initiating.size();
  outcome.message_units = state.telemetry.message_units - before_units;
  return outcome;
}

AggregateOutcome aggregate_sum(now::PartitionState& state,
                               const std::map<NodeId, std::uint64_t>& inputs, std::uint32_t r,
                               double delta, double c, adversary::AdversaryCtx& adv, Rng& rng) {
  if (r < 1) throw std::invalid_argument("repetition count must be positive");
  const std::uint64_t before_units = state.telemetry.message_units;

  AggregateOutcome outcome;
  outcome.repetitions = r;

  std::map<ClusterId, double> cluster_sum;
  for (const auto& [cid, cluster] : state.clusters) {
    // Inputs are shared inside the cluster first.
    state.telemetry.message_units += cluster.size() * cluster.size();
    double sum = 0.0;
    for (NodeId m : cluster.members) {
      auto it = inputs.find(m);
      if (it == inputs.end() || it->second < 1) throw std::invalid_argument("nonpositive input");
      sum += static_cast<double>(it->second);
      outcome.true_sum += static_cast<double>(it->second);
    }
    cluster_sum[cid] = sum;
  }

  constexpr std::uint64_t kRes = std::uint64_t{1} << 53;
  outcome.w_mins.assign(r, std::numeric_limits<double>::infinity());
  for (auto& [cid, sum] : cluster_sum) {
    for (std::uint32_t i = 0; i < r; ++i) {
      const std::uint64_t raw = now::rand_num(state, cid, kRes, adv, rng);
      const double u = (static_cast<double>(raw) + 0.5) * 0x1.0p-53;
      const double w = -std::log(u) / sum;  // inverse-CDF exponential draw
      outcome.w_mins[i] = std::min(outcome.w_mins[i], w);
    }
  }

  // Every cluster gossips its draws; message cost charged per cluster.
  for (const auto& [cid, cluster] : state.clusters) {
    BroadcastOutcome b =
        broadcast_local(state, cluster.members.front(), std::string(8 * r, 'w'), delta, c, adv,
                        rng);
    (void)b;
  }

  double total = 0.0;
  for (double w : outcome.w_mins) total += w;
  outcome.estimate = static_cast<double>(r) / total;
  outcome.message_units = state.telemetry.message_units - before_units;
  return outcome;
}

SampleStats sample_peers(now::PartitionState& state, NodeId requester, std::size_t count,
                         adversary::AdversaryCtx& adv, Rng& rng) {
  auto idx = state.node_index.find(requester);
  if (idx == state.node_index.end()) throw std::invalid_argument("unknown node");
  const ClusterId origin = idx->second;

  SampleStats stats;
  for (std::size_t i = 0; i < count; ++i) {
    now::RandClResult res = now::rand_cl(state, origin, adv, rng);
    const now::Cluster& cluster = state.cluster(res.cluster);
    const std::uint64_t pick = now::rand_num(state, res.cluster, cluster.size(), adv, rng);
    stats.ids.push_back(cluster.members[pick]);
    stats.walk_hops += res.hops;
    if (res.hijacked) ++stats.hijacked;
    // The id travels back along the walk path.
    state.telemetry.message_units += res.hops;
  }
  return stats;
}

}  // namespace overnow::apps
