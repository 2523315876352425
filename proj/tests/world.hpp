#pragma once

// Shared fixture: a clusterized network with a uniformly corrupted fraction
// and split randomness streams, the way the scenario runner wires them.

#include <vector>

#include "overnow/adversary.hpp"
#include "overnow/now.hpp"

namespace testworld {

struct World {
  overnow::now::PartitionState state;
  overnow::adversary::AdversaryCtx ctx;
  overnow::Rng honest;
  overnow::Rng world;
};

inline World make_world(std::size_t n, const overnow::now::NowParams& params,
                        const overnow::adversary::AdversaryPolicy& policy, std::uint64_t seed) {
  World w;
  overnow::Rng root(seed);
  w.honest = root.derive(2);
  w.world = root.derive(1);
  overnow::Rng adv_rng = root.derive(3);

  std::vector<overnow::NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<overnow::NodeId>(i);
  w.ctx.policy = policy;
  w.ctx.ledger = overnow::adversary::corrupt_initial(ids, policy, adv_rng);
  w.ctx.rng = adv_rng;
  w.ctx.max_nodes = 2 * n;
  w.ctx.live_corrupted = w.ctx.ledger.corrupted.size();

  w.state = overnow::now::clusterize(ids, params, w.honest);
  w.state.n_max = 2 * n;
  overnow::now::sync_malicious_counts(w.state, w.ctx.ledger);
  return w;
}

inline World make_world(std::size_t n, int lambda, int k, double l, double tau,
                        std::uint64_t seed) {
  overnow::now::NowParams params;
  params.lambda = lambda;
  params.k = k;
  params.l = l;
  params.tau = tau;
  overnow::adversary::AdversaryPolicy policy;
  policy.tau = tau;
  policy.corrupt_on_join = tau > 0.0 ? overnow::adversary::CorruptOnJoin::probabilistic
                                     : overnow::adversary::CorruptOnJoin::never;
  return make_world(n, params, policy, seed);
}

}  // namespace testworld
