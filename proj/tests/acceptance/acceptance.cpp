// Acceptance suite: one scaled, seeded empirical check per shipped claim.
// Run with a criterion number to execute just that one, or no arguments for
// the full battery. Prints one PASS/FAIL line per criterion.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "overnow/adversary.hpp"
#include "overnow/apps.hpp"
#include "overnow/ctrw.hpp"
#include "overnow/harness.hpp"
#include "overnow/now.hpp"
#include "overnow/over.hpp"
#include "overnow/spectral.hpp"

using namespace overnow;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Shared scaffolding

struct World {
  now::PartitionState state;
  adversary::AdversaryCtx ctx;
  Rng honest;
  Rng world;
};

World make_world(std::size_t n, int lambda, int k, double l, double tau, std::uint64_t seed,
                 adversary::CorruptOnJoin rule = adversary::CorruptOnJoin::probabilistic) {
  World w;
  Rng root(seed);
  w.honest = root.derive(2);
  w.world = root.derive(1);
  Rng adv_rng = root.derive(3);

  now::NowParams params;
  params.lambda = lambda;
  params.k = k;
  params.l = l;
  params.tau = tau;

  std::vector<NodeId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<NodeId>(i);
  adversary::AdversaryPolicy policy;
  policy.tau = tau;
  policy.corrupt_on_join = tau > 0.0 ? rule : adversary::CorruptOnJoin::never;

  w.ctx.policy = policy;
  w.ctx.ledger = adversary::corrupt_initial(ids, policy, adv_rng);
  w.ctx.rng = adv_rng;
  w.ctx.max_nodes = n + n / 8;
  w.ctx.live_corrupted = w.ctx.ledger.corrupted.size();

  w.state = now::clusterize(ids, params, w.honest);
  w.state.n_max = w.ctx.max_nodes;
  now::sync_malicious_counts(w.state, w.ctx.ledger);
  return w;
}

// Overlay-only churn: one add or remove per step on the maintained graph.
struct OverlayRun {
  over::OverlayState state;
  bool degree_ok = true;      // max degree <= scale^4 at every step
  bool expansion_ok = true;   // lambda2 >= 1/8 at every 50th step
};

OverlayRun run_overlay_churn(std::uint64_t seed, std::size_t n0, int scale, int steps) {
  OverlayRun run;
  Rng rng(seed);
  run.state = over::make_seed_overlay(n0, scale, rng);
  const std::uint64_t cap = static_cast<std::uint64_t>(run.state.degree_cap_reference());
  VertexId next = static_cast<VertexId>(n0);
  for (int i = 1; i <= steps; ++i) {
    const std::vector<VertexId> verts = run.state.graph.vertices();
    if (verts.size() <= 3 || rng.chance(0.5)) {
      over::add_vertex(run.state, verts[rng.below(verts.size())], next++, rng);
    } else {
      over::remove_vertex(run.state, verts[rng.below(verts.size())], rng);
    }
    if (spectral::max_degree(run.state.graph) > cap) run.degree_ok = false;
    if (i % 50 == 0) {
      if (!run.state.graph.connected() ||
          spectral::laplacian_lambda2(run.state.graph) < 0.125) {
        run.expansion_ok = false;
      }
    }
  }
  return run;
}

std::map<std::uint64_t, OverlayRun>& overlay_runs() {
  static std::map<std::uint64_t, OverlayRun> cache;
  if (cache.empty()) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      cache.emplace(seed, run_overlay_churn(1000 + seed, 50, 2, 500));
    }
  }
  return cache;
}

bool all_honest_delivered(const apps::BroadcastOutcome& out,
                          const adversary::CorruptionLedger& ledger) {
  std::set<std::uint64_t> digests;
  for (const auto& [id, digest] : out.delivered) {
    if (ledger.is_corrupted(id)) continue;
    if (!digest) return false;
    digests.insert(*digest);
  }
  return digests.size() == 1;
}

double tv_from(const std::vector<double>& p, const std::vector<double>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

// ---------------------------------------------------------------------------
// 1. Expansion floor under overlay churn

Result criterion_spectral_floor() {
  int good = 0;
  for (auto& [seed, run] : overlay_runs()) {
    if (run.expansion_ok) ++good;
  }
  std::ostringstream detail;
  detail << good << "/50 seeds held lambda2 >= 1/8 at every 50th step (need >= 48)";
  return {good >= 48, detail.str()};
}

// 2. Degree cap under overlay churn

Result criterion_degree_cap() {
  int good = 0;
  for (auto& [seed, run] : overlay_runs()) {
    if (run.degree_ok) ++good;
  }
  std::ostringstream detail;
  detail << good << "/50 seeds kept max degree <= 16 at every step (need >= 48)";
  return {good >= 48, detail.str()};
}

// 3. Walk mixing: the convergence bound exactly, plus sampled histograms

Result criterion_walk_mixing() {
  std::size_t checked = 0, violations = 0;

  auto check_graph = [&](const Graph& g) {
    const double lambda2 = spectral::laplacian_lambda2(g);
    if (lambda2 <= 0.0) return;
    const double n = static_cast<double>(g.vertex_count());
    const double t = ctrw::mixing_budget(n, lambda2);
    const std::vector<double> uniform(g.vertex_count(), 1.0 / n);
    for (VertexId v : g.vertices()) {
      ++checked;
      const double tv = ctrw::tv_distance(ctrw::exact_walk_distribution(g, v, t), uniform);
      if (tv > (std::sqrt(n) / 2.0) * std::exp(-lambda2 * t) + 1e-12) ++violations;
    }
  };

  // Exhaustive over every labeled connected graph on 2..5 vertices.
  for (std::size_t n = 2; n <= 5; ++n) {
    const std::size_t pairs = n * (n - 1) / 2;
    for (std::size_t mask = 0; mask < (std::size_t{1} << pairs); ++mask) {
      Graph g;
      for (std::size_t v = 0; v < n; ++v) g.add_vertex(static_cast<VertexId>(v));
      std::size_t bit = 0;
      for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = u + 1; v < n; ++v, ++bit)
          if (mask & (std::size_t{1} << bit)) g.add_edge(u, v);
      if (g.connected()) check_graph(g);
    }
  }
  // Plus random samples on 6 and 7 vertices.
  Rng rng(2024);
  for (int i = 0; i < 100; ++i) check_graph(connected_erdos_renyi(6 + rng.below(2), 0.5, rng));

  // Sampled endpoint histograms against the exact law at 1e5 walks. The
  // sampler's forced first move is part of its law, so short-horizon oracles
  // average the matrix exponential over the start's neighbors.
  double worst_tv = 0.0;
  {
    Graph p3;
    for (int i = 0; i < 3; ++i) p3.add_vertex(i);
    p3.add_edge(0, 1);
    p3.add_edge(1, 2);
    std::vector<double> freq(3, 0.0);
    const int walks = 100000;
    for (int i = 0; i < walks; ++i) {
      freq[ctrw::ctrw_sample(p3, 0, ctrw::WalkBudget{50.0}, rng).endpoint] += 1.0 / walks;
    }
    worst_tv = std::max(worst_tv, tv_from(freq, ctrw::exact_walk_distribution(p3, 0, 50.0)));

    Graph p4;
    for (int i = 0; i < 4; ++i) p4.add_vertex(i);
    for (int i = 0; i < 3; ++i) p4.add_edge(i, i + 1);
    std::vector<double> freq4(4, 0.0);
    for (int i = 0; i < walks; ++i) {
      freq4[ctrw::ctrw_sample(p4, 0, ctrw::WalkBudget{1.0}, rng).endpoint] += 1.0 / walks;
    }
    worst_tv = std::max(worst_tv, tv_from(freq4, ctrw::exact_walk_distribution(p4, 1, 1.0)));
  }

  std::ostringstream detail;
  detail << violations << "/" << checked << " bound violations (need 0); sampled histogram TV "
         << worst_tv << " (need <= 0.02)";
  return {violations == 0 && worst_tv <= 0.02, detail.str()};
}

// 4. Crash robustness of the maintained overlay

Result criterion_crash_robustness() {
  int connected_after = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    Rng rng(3000 + s);
    // Maintained 100-vertex overlay: a growth phase up to 100 vertices, then
    // steady churn holding the population there.
    over::OverlayState overlay = over::make_seed_overlay(60, 2, rng);
    VertexId next = 60;
    while (overlay.graph.vertex_count() < 100) {
      const std::vector<VertexId> verts = overlay.graph.vertices();
      over::add_vertex(overlay, verts[rng.below(verts.size())], next++, rng);
    }
    for (int i = 0; i < 100; ++i) {
      const std::vector<VertexId> verts = overlay.graph.vertices();
      const bool grow = verts.size() < 100 || (verts.size() == 100 && rng.chance(0.5));
      if (grow) {
        over::add_vertex(overlay, verts[rng.below(verts.size())], next++, rng);
      } else {
        over::remove_vertex(overlay, verts[rng.below(verts.size())], rng);
      }
    }
    const std::size_t crashes = overlay.graph.vertex_count() / 10;
    for (std::size_t i = 0; i < crashes; ++i) {
      const std::vector<VertexId> verts = overlay.graph.vertices();
      over::crash_vertex(overlay, verts[rng.below(verts.size())]);
    }
    if (overlay.graph.connected()) ++connected_after;
  }
  std::ostringstream detail;
  detail << connected_after << "/" << seeds
         << " overlays stayed connected after 10% random crashes (need >= 99)";
  return {connected_after >= 99, detail.str()};
}

// 5. Honest majority under sustained churn

Result criterion_honest_majority() {
  const double l = 1.5;
  const double tau = 1.0 / (2.0 * l * l) - 0.05;
  std::uint64_t flips = 0, checks = 0;
  for (int s = 0; s < 20; ++s) {
    World w = make_world(144, 3, 2, l, tau, 5000 + s);
    NodeId next = 100000;
    for (int op = 0; op < 10000; ++op) {
      ++w.state.step;
      if (op % 2 == 0) {
        adversary::decide_on_join(next, w.ctx);
        auto it = w.state.clusters.begin();
        std::advance(it, w.world.below(w.state.clusters.size()));
        now::join(w.state, next++, it->first, w.ctx, w.honest);
      } else {
        auto it = w.state.node_index.begin();
        std::advance(it, w.world.below(w.state.node_count()));
        now::leave(w.state, it->first, w.ctx, w.honest);
      }
      for (const auto& [cid, cluster] : w.state.clusters) {
        ++checks;
        if (2 * cluster.malicious > cluster.size()) ++flips;
      }
    }
  }
  const double incidence = static_cast<double>(flips) / static_cast<double>(checks);
  std::ostringstream detail;
  detail << flips << "/" << checks << " malicious-majority (step, cluster) pairs = " << incidence
         << " (need <= 0.01)";
  return {incidence <= 0.01, detail.str()};
}

// 6. The capture attack: succeeds without exchange, fails with it

Result criterion_attack_control() {
  const double l = 1.5;
  const double tau = 1.0 / (2.0 * l * l) - 0.05;
  int captured_off = 0, captured_on = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    for (const bool exchange_enabled : {false, true}) {
      World w = make_world(144, 3, 2, l, tau, 6000 + s,
                           adversary::CorruptOnJoin::budgeted_targeted);
      Rng attack_rng = Rng(6000 + s).derive(9);
      const ClusterId target = w.state.clusters.begin()->first;
      const adversary::AttackOutcome out = adversary::targeted_join_leave_attack(
          w.state, target, 10000, exchange_enabled, w.ctx, attack_rng);
      if (out.captured_at) {
        if (exchange_enabled) ++captured_on;
        else ++captured_off;
      }
    }
  }
  std::ostringstream detail;
  detail << "captures without exchange " << captured_off << "/20 (need >= 10), with exchange "
         << captured_on << "/20 (need <= 1)";
  return {captured_off >= 10 && captured_on <= 1, detail.str()};
}

// 7. Network discovery bound and completeness

Result criterion_global_knowledge() {
  adversary::CorruptionLedger ledger;
  adversary::AdversaryPolicy policy;
  Rng rng(7000);
  std::size_t runs = 0, complete = 0;
  bool steps_ok = true;
  for (std::size_t n : {2u, 4u, 8u, 16u, 32u, 64u}) {
    for (int i = 0; i < 20; ++i) {
      Graph g = connected_erdos_renyi(
          n, std::min(1.0, 3.0 * std::log(static_cast<double>(n) + 1.0) / n), rng);
      const now::GlobalKnowledgeResult res = now::global_knowledge(g, ledger, policy, rng);
      ++runs;
      if (res.steps > n * (n - 1)) steps_ok = false;
      bool all = true;
      for (const auto& [id, view] : res.views) {
        if (view.size() != n) all = false;
      }
      if (all) ++complete;
    }
  }
  std::ostringstream detail;
  detail << complete << "/" << runs << " runs complete (need all), step bound "
         << (steps_ok ? "held" : "violated");
  return {complete == runs && steps_ok, detail.str()};
}

// 8. Broadcast delivery and message-cost scaling

Result criterion_broadcast() {
  // Delivery runs on 16 clusters at scale 3: cluster size 18 keeps the
  // chance of a half-malicious (forward-blocked) cluster near 1e-3 and the
  // seed overlay dense enough to have no cut vertices.
  int honest_full = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    World w = make_world(288, 3, 2, 1.5, 0.0, 8000 + s);
    const apps::BroadcastOutcome out = apps::broadcast_local(
        w.state, w.state.node_index.begin()->first, "payload", 0.01, 4.0, w.ctx, w.honest);
    if (all_honest_delivered(out, w.ctx.ledger)) ++honest_full;
  }

  const double l = 1.5;
  const double tau = 1.0 / (2.0 * l * l) - 0.05;
  int adversarial_full = 0;
  for (int s = 0; s < seeds; ++s) {
    World w = make_world(288, 3, 2, l, tau, 8200 + s);
    w.ctx.policy.behavior.silent = true;
    NodeId sender = w.state.node_index.begin()->first;
    while (w.ctx.is_corrupted(sender)) ++sender;
    const apps::BroadcastOutcome out =
        apps::broadcast_local(w.state, sender, "payload", 0.01, 4.0, w.ctx, w.honest);
    if (all_honest_delivered(out, w.ctx.ledger)) ++adversarial_full;
  }

  std::vector<double> ns, units;
  for (const std::size_t n : {64u, 128u, 256u}) {
    double total = 0.0;
    for (int s = 0; s < 5; ++s) {
      World w = make_world(n, 2, 2, 1.5, 0.0, 8400 + s);
      total += static_cast<double>(
          apps::broadcast_local(w.state, w.state.node_index.begin()->first, "payload", 0.01, 4.0,
                                w.ctx, w.honest)
              .message_units);
    }
    ns.push_back(static_cast<double>(n));
    units.push_back(total / 5.0);
  }
  double mean_x = 0.0, mean_y = 0.0;
  for (int i = 0; i < 3; ++i) {
    mean_x += std::log(ns[i]) / 3.0;
    mean_y += std::log(units[i]) / 3.0;
  }
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 3; ++i) {
    num += (std::log(ns[i]) - mean_x) * (std::log(units[i]) - mean_y);
    den += (std::log(ns[i]) - mean_x) * (std::log(ns[i]) - mean_x);
  }
  const double slope = num / den;

  std::ostringstream detail;
  detail << "all-honest delivery " << honest_full << "/100 (need 100), near-bound delivery "
         << adversarial_full << "/100 (need >= 99), unit slope " << slope
         << " (need within [0.8, 1.3])";
  return {honest_full == 100 && adversarial_full >= 99 && slope >= 0.8 && slope <= 1.3,
          detail.str()};
}

// 9. Equivocation detection in the hash-verified broadcast

Result criterion_equivocation() {
  int aborted = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    World w = make_world(128, 2, 2, 1.5, 0.1, 9000 + s);
    w.ctx.policy.behavior.equivocate = true;
    const NodeId sender = *w.ctx.ledger.corrupted.begin();
    const apps::BroadcastOutcome out =
        apps::broadcast_global(w.state, sender, "message", 32, 0.01, 4.0, w.ctx, w.honest);
    if (out.aborted) ++aborted;
  }
  std::ostringstream detail;
  detail << aborted << "/" << seeds << " equivocations aborted (need 100)";
  return {aborted == seeds, detail.str()};
}

// 10. Agreement: validity, consistency and probabilistic initiation

Result criterion_agreement() {
  int valid = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    World w = make_world(96, 2, 2, 1.5, 0.1, 10000 + s);
    // Pick an honest-majority initiating cluster.
    ClusterId initiator = w.state.clusters.begin()->first;
    for (const auto& [cid, c] : w.state.clusters) {
      if (2 * c.malicious < c.size()) initiator = cid;
    }
    // Inputs partition the ids; the decided bit must be one of them.
    std::map<NodeId, int> inputs;
    bool any0 = false, any1 = false;
    for (const auto& [id, cid] : w.state.node_index) {
      inputs[id] = static_cast<int>((id / 3) % 2);
      (inputs[id] ? any1 : any0) = true;
    }
    const apps::AgreeOutcome out =
        apps::agree(w.state, inputs, initiator, 0.01, 4.0, w.ctx, w.honest);
    if ((out.decided == 0 && any0) || (out.decided == 1 && any1)) ++valid;
  }

  int initiated = 0;
  std::size_t oversized = 0;
  for (int s = 0; s < seeds; ++s) {
    World w = make_world(256, 2, 2, 1.5, 0.0, 10200 + s);
    w.state.n_max = 256;
    std::map<NodeId, int> inputs;
    for (const auto& [id, cid] : w.state.node_index) inputs[id] = static_cast<int>(id % 2);
    try {
      const apps::AgreeOutcome out =
          apps::agree(w.state, inputs, std::nullopt, 0.01, 4.0, w.ctx, w.honest);
      ++initiated;
      if (out.initiating_clusters > 8) ++oversized;  // 4 * lambda
    } catch (const std::runtime_error&) {
    }
  }
  std::ostringstream detail;
  detail << valid << "/100 valid decisions (need 100); initiation fired " << initiated
         << "/100 (need >= 99); oversized committees " << oversized << " (need <= 5)";
  return {valid == seeds && initiated >= 99 && oversized <= 5, detail.str()};
}

// 11. Aggregation accuracy and rate additivity

Result criterion_aggregation() {
  int close = 0;
  const int seeds = 100;
  for (int s = 0; s < seeds; ++s) {
    World w = make_world(128, 2, 2, 1.5, 0.0, 11000 + s);
    std::map<NodeId, std::uint64_t> inputs;
    for (const auto& [id, cid] : w.state.node_index) inputs[id] = 1 + id % 10;
    const apps::AggregateOutcome out =
        apps::aggregate_sum(w.state, inputs, 1000, 0.01, 4.0, w.ctx, w.honest);
    if (std::abs(out.estimate - out.true_sum) / out.true_sum <= 0.10) ++close;
  }

  // Rate additivity of the minima, distributionally.
  World w = make_world(96, 2, 2, 1.5, 0.0, 11999);
  std::map<NodeId, std::uint64_t> inputs;
  double total = 0.0;
  for (const auto& [id, cid] : w.state.node_index) {
    inputs[id] = 1 + id % 5;
    total += 1.0 + id % 5;
  }
  const apps::AggregateOutcome out =
      apps::aggregate_sum(w.state, inputs, 2000, 0.01, 4.0, w.ctx, w.honest);
  std::vector<double> sorted = out.w_mins;
  std::sort(sorted.begin(), sorted.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = 1.0 - std::exp(-total * sorted[i]);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i + 1) / sorted.size()));
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / sorted.size()));
  }
  const double ks_crit = 1.628 / std::sqrt(static_cast<double>(sorted.size()));

  std::ostringstream detail;
  detail << close << "/100 runs within 10% relative error (need >= 95); minima KS " << ks
         << " (need < " << ks_crit << ")";
  return {close >= 95 && ks < ks_crit, detail.str()};
}

// 12. Peer sampling: near-uniform and honest-majority

Result criterion_sampling() {
  World w = make_world(96, 2, 2, 1.5, 0.0, 12000);
  for (int i = 0; i < 30; ++i) {
    auto it = w.state.clusters.begin();
    std::advance(it, w.world.below(w.state.clusters.size()));
    now::exchange(w.state, it->first, w.ctx, w.honest);
  }
  const apps::SampleStats stats = apps::sample_peers(w.state, 0, 10000, w.ctx, w.honest);
  std::map<NodeId, double> freq;
  for (NodeId id : stats.ids) freq[id] += 1.0 / static_cast<double>(stats.ids.size());
  double tv = 0.0;
  const double uniform = 1.0 / static_cast<double>(w.state.node_count());
  for (const auto& [id, cid] : w.state.node_index) {
    tv += std::abs((freq.count(id) ? freq.at(id) : 0.0) - uniform);
  }
  tv *= 0.5;

  const double l = 1.5;
  const double tau = 1.0 / (2.0 * l * l) - 0.05;
  World v = make_world(96, 2, 2, l, tau, 12001);
  const apps::SampleStats adv_stats = apps::sample_peers(v.state, 0, 10000, v.ctx, v.honest);
  std::size_t bad = 0;
  for (NodeId id : adv_stats.ids)
    if (v.ctx.is_corrupted(id)) ++bad;
  const double bad_frac = static_cast<double>(bad) / static_cast<double>(adv_stats.ids.size());
  const double bad_cap = l * l * tau * 1.1;

  std::ostringstream detail;
  detail << "sample TV from uniform " << tv << " (need <= 0.05); malicious fraction " << bad_frac
         << " (need <= " << bad_cap << ")";
  return {tv <= 0.05 && bad_frac <= bad_cap, detail.str()};
}

// 13. Determinism of the scenario runner

Result criterion_determinism() {
  const char* config_text = R"(
seed = 77
lambda = 2
k = 2
l = 1.5
tau = 0.15
epsilon = 0.07
n_initial = 64
n_max = 200
metrics_every = 25

[adversary]
corrupt_on_join = probabilistic
behavior = silent

[churn]
mix = mixed
ops = 500
)";
  const harness::ScenarioConfig config = harness::parse_config(config_text);
  const harness::RunResult a = harness::run_scenario(config);
  const harness::RunResult b = harness::run_scenario(config);
  const bool identical = a.metrics_jsonl == b.metrics_jsonl && a.summary_csv == b.summary_csv;
  std::ostringstream detail;
  detail << (identical ? "repeated runs byte-identical" : "metrics streams diverged") << " ("
         << a.metrics_jsonl.size() << " bytes)";
  return {identical && a.sweeps_ok, detail.str()};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "spectral-floor", criterion_spectral_floor},
      {2, "degree-cap", criterion_degree_cap},
      {3, "walk-mixing", criterion_walk_mixing},
      {4, "crash-robustness", criterion_crash_robustness},
      {5, "honest-majority-churn", criterion_honest_majority},
      {6, "capture-attack-control", criterion_attack_control},
      {7, "global-knowledge", criterion_global_knowledge},
      {8, "broadcast-delivery-cost", criterion_broadcast},
      {9, "equivocation-detection", criterion_equivocation},
      {10, "agreement", criterion_agreement},
      {11, "aggregation", criterion_aggregation},
      {12, "peer-sampling", criterion_sampling},
      {13, "determinism", criterion_determinism},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  std::optional<int> selected;
  if (argc > 1) selected = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : criteria()) {
    if (selected && criterion.id != *selected) continue;
    Result result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %-24s %s\n", result.pass ? "PASS" : "FAIL", criterion.id, criterion.name,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
