#include "overnow/now.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace overnow::now {

namespace {

constexpr std::uint64_t kClockResolution = std::uint64_t{1} << 53;

void charge(PartitionState& state, std::uint64_t units, std::uint64_t bits) {
  state.telemetry.message_units += units;
  state.telemetry.payload_bits += bits;
}

void insert_member(PartitionState& state, ClusterId cid, NodeId node,
                   const adversary::AdversaryCtx& adv) {
  Cluster& c = state.cluster(cid);
  auto it = std::lower_bound(c.members.begin(), c.members.end(), node);
  c.members.insert(it, node);
  state.node_index[node] = cid;
  if (adv.is_corrupted(node)) ++c.malicious;
}

void erase_member(PartitionState& state, ClusterId cid, NodeId node,
                  const adversary::AdversaryCtx& adv) {
  Cluster& c = state.cluster(cid);
  auto it = std::lower_bound(c.members.begin(), c.members.end(), node);
  if (it == c.members.end() || *it != node) throw std::logic_error("member not in cluster");
  c.members.erase(it);
  state.node_index.erase(node);
  if (adv.is_corrupted(node)) --c.malicious;
}

bool captured(const Cluster& c) { return 2 * c.malicious > c.size(); }

/// Re-synchronizes views around overlay or roster changes: each touched
/// cluster rebuilds its own neighbor view from the live overlay and pushes
/// its roster back out to every neighbor.
void refresh_views(PartitionState& state, const std::set<ClusterId>& touched) {
  for (ClusterId cid : touched) {
    auto it = state.clusters.find(cid);
    if (it == state.clusters.end()) continue;
    Cluster& c = it->second;
    c.neighbor_view.clear();
    for (const Graph::AdjEntry& e : state.overlay.graph.neighbors(cid)) {
      Cluster& nb = state.cluster(e.to);
      c.neighbor_view[e.to] = nb.members;
      nb.neighbor_view[cid] = c.members;
      charge(state, 2 * nb.size() * c.size(), 64ull * nb.size() * c.size());
    }
  }
}

void split_cluster(PartitionState& state, ClusterId cid, adversary::AdversaryCtx& adv, Rng& rng);

/// The full insertion path shared by public joins, merge rejoins and
/// crash-survivor rejoins.
void join_node(PartitionState& state, NodeId node, ClusterId contact,
               adversary::AdversaryCtx& adv, Rng& rng) {
  RandClResult placed = rand_cl(state, contact, adv, rng);
  const ClusterId target = placed.cluster;
  insert_member(state, target, node, adv);
  announce_membership(state, target);
  // The newcomer is sent the local overlay neighborhood along the walk path.
  charge(state, state.cluster(target).size() + placed.hops, 0);
  exchange(state, target, adv, rng);
  if (static_cast<double>(state.cluster(target).size()) > state.params.split_threshold()) {
    split_cluster(state, target, adv, rng);
  }
}

void split_cluster(PartitionState& state, ClusterId cid, adversary::AdversaryCtx& adv, Rng& rng) {
  const std::vector<NodeId> roster = state.cluster(cid).members;
  std::vector<std::uint64_t> flips(roster.size(), 0);
  // Unbiased halving: per-member coin flips, redrawn until balanced within 1.
  for (int attempt = 0;; ++attempt) {
    if (attempt >= 2000) throw std::runtime_error("split halving failed to balance");
    std::size_t ones = 0;
    for (std::size_t i = 0; i < roster.size(); ++i) {
      flips[i] = rand_num(state, cid, 2, adv, rng);
      ones += flips[i];
    }
    const std::size_t zeros = roster.size() - ones;
    if ((ones > zeros ? ones - zeros : zeros - ones) <= 1) break;
  }

  const ClusterId fresh = state.next_cluster_id++;
  over::add_vertex(state.overlay, cid, fresh, rng);
  state.telemetry.walk_hops += state.overlay.history.back().walk_hops_total;
  state.clusters.emplace(fresh, Cluster{fresh, {}, {}, 0});
  for (std::size_t i = 0; i < roster.size(); ++i) {
    if (flips[i] == 1) {
      erase_member(state, cid, roster[i], adv);
      insert_member(state, fresh, roster[i], adv);
    }
  }

  std::set<ClusterId> touched{cid, fresh};
  for (const auto& [a, b] : state.overlay.history.back().edges_touched) {
    touched.insert(a);
    touched.insert(b);
  }
  refresh_views(state, touched);

  ++state.telemetry.splits;
  std::ostringstream digest;
  digest << "split " << cid << " -> " << fresh << " sizes " << state.cluster(cid).size() << '/'
         << state.cluster(fresh).size();
  state.telemetry.events.push_back(digest.str());
}

void merge_dissolve(PartitionState& state, ClusterId cid, adversary::AdversaryCtx& adv, Rng& rng) {
  if (state.clusters.size() < 2) return;  // nothing to merge into
  const std::vector<NodeId> roster = state.cluster(cid).members;

  std::set<ClusterId> touched;
  for (const Graph::AdjEntry& e : state.overlay.graph.neighbors(cid)) touched.insert(e.to);

  for (NodeId m : roster) {
    erase_member(state, cid, m, adv);
  }
  state.clusters.erase(cid);
  over::remove_vertex(state.overlay, cid, rng);
  state.telemetry.walk_hops += state.overlay.history.back().walk_hops_total;
  for (const auto& [a, b] : state.overlay.history.back().edges_touched) {
    touched.insert(a);
    touched.insert(b);
  }
  touched.erase(cid);
  refresh_views(state, touched);

  ++state.telemetry.merges;
  std::ostringstream digest;
  digest << "merge " << cid << " size " << roster.size();
  state.telemetry.events.push_back(digest.str());

  const ClusterId contact = state.clusters.begin()->first;
  for (NodeId m : roster) {
    join_node(state, m, contact, adv, rng);
  }
}

}  // namespace

bool Cluster::contains(NodeId id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

const Cluster& PartitionState::cluster(ClusterId id) const {
  auto it = clusters.find(id);
  if (it == clusters.end()) throw std::invalid_argument("unknown cluster");
  return it->second;
}

Cluster& PartitionState::cluster(ClusterId id) {
  auto it = clusters.find(id);
  if (it == clusters.end()) throw std::invalid_argument("unknown cluster");
  return it->second;
}

ClusterId PartitionState::cluster_of(NodeId id) const {
  auto it = node_index.find(id);
  if (it == node_index.end()) throw std::invalid_argument("unknown node");
  return it->second;
}

GlobalKnowledgeResult global_knowledge(const Graph& node_graph,
                                       const adversary::CorruptionLedger& ledger,
                                       const adversary::AdversaryPolicy& policy, Rng& rng,
                                       bool demo_violation) {
  const std::vector<VertexId> nodes = node_graph.vertices();

  if (!demo_violation) {
    // Honest nodes must form a connected subgraph for discovery to complete.
    std::vector<NodeId> honest;
    for (NodeId v : nodes)
      if (!ledger.is_corrupted(v)) honest.push_back(v);
    if (honest.empty()) throw std::runtime_error("assumption violated");
    std::set<NodeId> seen{honest.front()};
    std::vector<NodeId> stack{honest.front()};
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const Graph::AdjEntry& e : node_graph.neighbors(v)) {
        if (!ledger.is_corrupted(e.to) && seen.insert(e.to).second) stack.push_back(e.to);
      }
    }
    if (seen.size() != honest.size()) throw std::runtime_error("assumption violated");
  }

  GlobalKnowledgeResult res;
  std::set<NodeId> universe(nodes.begin(), nodes.end());
  std::map<NodeId, std::set<NodeId>> contacted;
  for (NodeId v : nodes) {
    auto& view = res.views[v];
    view.insert(v);
    for (const Graph::AdjEntry& e : node_graph.neighbors(v)) view.insert(e.to);
  }

  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (NodeId v : nodes) {
      const bool corrupted = ledger.is_corrupted(v);
      if (corrupted && policy.behavior.silent) continue;
      std::vector<NodeId> candidates;
      for (NodeId known : res.views[v]) {
        if (known != v && !contacted[v].count(known)) candidates.push_back(known);
      }
      if (candidates.empty()) continue;
      const NodeId to = candidates[rng.below(candidates.size())];
      contacted[v].insert(to);
      ++res.steps;
      res.message_units += 1;

      std::set<NodeId> payload;
      if (corrupted && policy.behavior.equivocate) {
        payload = {v};  // discloses nothing beyond its own identity
      } else {
        payload = res.views[v];
      }
      if (corrupted && policy.behavior.forge_ids) {
        // Transport rejects ids that do not exist; count the attempt.
        payload.insert(0xFFFFFFFFu);
      }
      res.payload_bits += 32ull * payload.size();
      auto& target_view = res.views[to];
      target_view.insert(v);
      for (NodeId id : payload) {
        if (universe.count(id)) {
          target_view.insert(id);
        } else {
          ++res.forged_ids_dropped;
        }
      }
      progressed = true;
    }
  }
  return res;
}

PartitionState clusterize(const std::vector<NodeId>& ids, const NowParams& params, Rng& rng) {
  const std::size_t nominal = static_cast<std::size_t>(params.nominal_cluster_size());
  if (ids.size() < 2 * nominal) throw std::invalid_argument("too few nodes to clusterize");

  std::vector<NodeId> shuffled = ids;
  std::sort(shuffled.begin(), shuffled.end());
  for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
    std::swap(shuffled[i], shuffled[rng.below(i + 1)]);
  }

  PartitionState state;
  state.params = params;
  const std::size_t nc = ids.size() / nominal;
  const std::size_t remainder = ids.size() - nc * nominal;
  state.overlay = over::make_seed_overlay(nc, params.lambda, rng);

  std::size_t cursor = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    const ClusterId cid = static_cast<ClusterId>(c);
    Cluster cluster;
    cluster.id = cid;
    const std::size_t size = nominal + (c < remainder ? 1 : 0);
    for (std::size_t i = 0; i < size; ++i) {
      cluster.members.push_back(shuffled[cursor]);
      state.node_index[shuffled[cursor]] = cid;
      ++cursor;
    }
    std::sort(cluster.members.begin(), cluster.members.end());
    state.clusters.emplace(cid, std::move(cluster));
  }

  state.next_cluster_id = static_cast<ClusterId>(nc);
  state.next_node_id = shuffled.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;

  std::set<ClusterId> all;
  for (const auto& [cid, _] : state.clusters) all.insert(cid);
  refresh_views(state, all);

  // Representative-committee bootstrap cost, charged in message units.
  state.telemetry.message_units +=
      static_cast<std::uint64_t>(std::ceil(std::pow(static_cast<double>(ids.size()), 1.5)));
  return state;
}

/// Harness hook: realigns the cached per-cluster malicious counts with a
/// ledger (after clusterize or snapshot load).
void sync_malicious_counts(PartitionState& state, const adversary::CorruptionLedger& ledger) {
  for (auto& [cid, cluster] : state.clusters) {
    cluster.malicious = 0;
    for (NodeId m : cluster.members) {
      if (ledger.is_corrupted(m)) ++cluster.malicious;
    }
  }
}

namespace {

std::uint64_t rand_num_in(PartitionState& state, Cluster& c, std::uint64_t r,
                          adversary::AdversaryCtx& adv, Rng& rng) {
  if (r == 0) throw std::invalid_argument("range must be positive");
  if (c.members.empty()) throw std::invalid_argument("empty cluster");

  const std::uint64_t sz = c.size();
  charge(state, 2 * sz * sz, 2 * sz * sz * (std::bit_width(r) + 64));
  if (r == 1) return 0;

  const std::size_t malicious = c.malicious;
  const std::size_t honest = c.size() - malicious;

  // Honest commitments sum to a uniform residue; one draw represents them.
  std::uint64_t total = honest > 0 ? rng.below(r) : 0;

  if (malicious == 0) return total;

  if (!adv.policy.behavior.withhold_reveal) {
    // Corrupted members commit before any reveal is visible; whatever they
    // commit, an included honest draw keeps the sum uniform.
    for (std::size_t i = 0; i < malicious; ++i) total = (total + adv.rng.below(r)) % r;
    return total;
  }

  // Withholding strategy: commit first, then (seeing the honest reveals)
  // publish the subset of own values whose sum lands nearest residue zero.
  std::vector<std::uint64_t> own(malicious);
  for (auto& v : own) v = adv.rng.below(r);
  const std::size_t cap = std::min<std::size_t>(malicious, 16);
  std::uint64_t best_result = total;
  std::size_t best_included = 0;
  std::uint64_t best_distance = std::min(total, r - total);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << cap); ++mask) {
    std::uint64_t sum = total;
    for (std::size_t i = 0; i < cap; ++i) {
      if (mask & (std::uint64_t{1} << i)) sum = (sum + own[i]) % r;
    }
    const std::uint64_t dist = std::min(sum, r - sum);
    if (dist < best_distance) {
      best_distance = dist;
      best_result = sum;
      best_included = static_cast<std::size_t>(std::popcount(mask));
    }
  }
  state.telemetry.withheld_reveals += malicious - best_included;
  return best_result;
}

}  // namespace

std::uint64_t rand_num(PartitionState& state, ClusterId cid, std::uint64_t r,
                       adversary::AdversaryCtx& adv, Rng& rng) {
  return rand_num_in(state, state.cluster(cid), r, adv, rng);
}

RandClResult rand_cl(PartitionState& state, ClusterId start, adversary::AdversaryCtx& adv,
                     Rng& rng) {
  const Graph& g = state.overlay.graph;
  Cluster* cur_cluster = &state.cluster(start);

  RandClResult res{start, 0, false};
  if (g.distinct_degree(start) == 0) return res;

  const bool hijacking = adv.policy.behavior.hijack_walks;
  auto maybe_hijack = [&](ClusterId cur) -> bool {
    if (!hijacking || !captured(*cur_cluster)) return false;
    ++state.telemetry.hijacked_walks;
    res.hijacked = true;
    if (adv.policy.behavior.target && state.clusters.count(*adv.policy.behavior.target)) {
      res.cluster = *adv.policy.behavior.target;
    } else {
      res.cluster = cur;
    }
    return true;
  };

  if (maybe_hijack(start)) return res;

  double remaining = state.params.walk_budget();
  ClusterId cur = start;
  {
    const auto& nbrs = g.neighbors(start);
    const std::uint64_t idx = rand_num_in(state, *cur_cluster, nbrs.size(), adv, rng);
    const ClusterId nxt = nbrs[idx].to;
    Cluster* nxt_cluster = &state.cluster(nxt);
    charge(state, cur_cluster->size() * nxt_cluster->size(), 0);
    cur = nxt;
    cur_cluster = nxt_cluster;
    res.hops = 1;
  }

  while (true) {
    if (maybe_hijack(cur)) return res;
    const auto& nbrs = g.neighbors(cur);
    const std::size_t d = nbrs.size();
    if (d == 0) break;  // isolated component end; walk cannot continue

    const std::uint64_t raw = rand_num_in(state, *cur_cluster, kClockResolution, adv, rng);
    const double u = (static_cast<double>(raw) + 0.5) * 0x1.0p-53;
    remaining -= std::log(1.0 / u) / static_cast<double>(d);
    if (remaining <= 0.0) break;

    const std::uint64_t idx = rand_num_in(state, *cur_cluster, d, adv, rng);
    const ClusterId nxt = nbrs[idx].to;
    Cluster* nxt_cluster = &state.cluster(nxt);
    charge(state, cur_cluster->size() * nxt_cluster->size(), 0);
    cur = nxt;
    cur_cluster = nxt_cluster;
    ++res.hops;
  }

  res.cluster = cur;
  ++state.telemetry.walks;
  state.telemetry.walk_hops += res.hops;
  return res;
}

std::vector<ClusterId> exchange(PartitionState& state, ClusterId cid,
                                adversary::AdversaryCtx& adv, Rng& rng) {
  if (!state.params.exchange_enabled) return {};
  const std::vector<NodeId> roster = state.cluster(cid).members;

  struct Swap {
    NodeId out;
    ClusterId target;
    NodeId in;
  };
  std::vector<Swap> plan;
  std::set<NodeId> claimed;

  for (NodeId x : roster) {
    ClusterId target = cid;
    NodeId replacement = 0;
    bool found = false;
    for (int walk_try = 0; walk_try < 10 && !found; ++walk_try) {
      RandClResult res = rand_cl(state, cid, adv, rng);
      target = res.cluster;
      if (target == cid) break;  // self-selection degenerates to identity
      const std::vector<NodeId>& pool = state.cluster(target).members;
      for (int pick = 0; pick < 100; ++pick) {
        const std::uint64_t idx = rand_num(state, target, pool.size(), adv, rng);
        if (!claimed.count(pool[idx])) {
          replacement = pool[idx];
          found = true;
          break;
        }
      }
    }
    if (!found) continue;
    claimed.insert(replacement);
    plan.push_back(Swap{x, target, replacement});
  }

  for (const Swap& s : plan) {
    erase_member(state, cid, s.out, adv);
    erase_member(state, s.target, s.in, adv);
    insert_member(state, s.target, s.out, adv);
    insert_member(state, cid, s.in, adv);
  }

  std::set<ClusterId> partners;
  for (const Swap& s : plan) partners.insert(s.target);
  announce_membership(state, cid);
  for (ClusterId p : partners) announce_membership(state, p);

  ++state.telemetry.exchanges;
  return {partners.begin(), partners.end()};
}

void announce_membership(PartitionState& state, ClusterId cid) {
  Cluster& c = state.cluster(cid);
  for (const Graph::AdjEntry& e : state.overlay.graph.neighbors(cid)) {
    Cluster& nb = state.cluster(e.to);
    nb.neighbor_view[cid] = c.members;
    charge(state, c.size() * nb.size(), 32ull * c.size() * nb.size());
  }
}

void join(PartitionState& state, NodeId new_node, ClusterId contact,
          adversary::AdversaryCtx& adv, Rng& rng) {
  if (state.node_index.count(new_node)) throw std::invalid_argument("node already present");
  adv.note_join(new_node);
  join_node(state, new_node, contact, adv, rng);
}

void leave(PartitionState& state, NodeId node, adversary::AdversaryCtx& adv, Rng& rng) {
  auto it = state.node_index.find(node);
  if (it == state.node_index.end()) throw std::invalid_argument("unknown node");
  const ClusterId cid = it->second;
  adv.note_leave(node);
  erase_member(state, cid, node, adv);
  announce_membership(state, cid);

  const std::vector<ClusterId> partners = exchange(state, cid, adv, rng);
  for (ClusterId p : partners) {
    if (state.clusters.count(p)) exchange(state, p, adv, rng);
  }

  if (static_cast<double>(state.cluster(cid).size()) < state.params.merge_floor()) {
    merge_dissolve(state, cid, adv, rng);
  }
}

void join_existing_node(PartitionState& state, NodeId node, ClusterId contact,
                        adversary::AdversaryCtx& adv, Rng& rng) {
  if (state.node_index.count(node)) throw std::invalid_argument("node already present");
  join_node(state, node, contact, adv, rng);
}

void dissolve_below_floor(PartitionState& state, ClusterId cid, adversary::AdversaryCtx& adv,
                          Rng& rng) {
  merge_dissolve(state, cid, adv, rng);
}

void remove_crashed_node(PartitionState& state, NodeId node, adversary::AdversaryCtx& adv) {
  auto it = state.node_index.find(node);
  if (it == state.node_index.end()) throw std::invalid_argument("unknown node");
  erase_member(state, it->second, node, adv);
}

std::vector<NodeId> declare_cluster_dead(PartitionState& state, ClusterId cid,
                                         adversary::AdversaryCtx& adv) {
  if (state.clusters.size() < 2) return {};
  const std::vector<NodeId> survivors = state.cluster(cid).members;
  for (NodeId m : survivors) erase_member(state, cid, m, adv);
  state.clusters.erase(cid);

  std::set<ClusterId> touched;
  for (const Graph::AdjEntry& e : state.overlay.graph.neighbors(cid)) touched.insert(e.to);
  over::crash_vertex(state.overlay, cid);
  refresh_views(state, touched);

  ++state.telemetry.dead_clusters;
  std::ostringstream digest;
  digest << "cluster " << cid << " dead, " << survivors.size() << " survivors rejoin";
  state.telemetry.events.push_back(digest.str());
  return survivors;
}

}  // namespace overnow::now
