#include "overnow/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "overnow/apps.hpp"
#include "overnow/spectral.hpp"

namespace overnow::harness {

namespace {

using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

ChurnOp parse_op(const std::string& name, const std::string& where) {
  if (name == "join") return ChurnOp::join;
  if (name == "leave") return ChurnOp::leave;
  if (name == "crash_attack") return ChurnOp::crash_attack;
  if (name == "app") return ChurnOp::app_call;
  throw std::invalid_argument(where + ": unknown op '" + name + "'");
}

adversary::AdversaryPolicy build_policy(const ScenarioConfig& config) {
  adversary::AdversaryPolicy policy;
  policy.tau = config.tau;
  if (config.adversary_corrupt_on_join == "never") {
    policy.corrupt_on_join = adversary::CorruptOnJoin::never;
  } else if (config.adversary_corrupt_on_join == "probabilistic") {
    policy.corrupt_on_join = adversary::CorruptOnJoin::probabilistic;
  } else if (config.adversary_corrupt_on_join == "budgeted_targeted") {
    policy.corrupt_on_join = adversary::CorruptOnJoin::budgeted_targeted;
  } else {
    throw std::invalid_argument("adversary.corrupt_on_join: unknown rule '" +
                                config.adversary_corrupt_on_join + "'");
  }
  for (const std::string& flag : config.adversary_behavior) {
    if (flag == "silent") {
      policy.behavior.silent = true;
    } else if (flag == "equivocate") {
      policy.behavior.equivocate = true;
    } else if (flag == "withhold_reveal") {
      policy.behavior.withhold_reveal = true;
    } else if (flag == "hijack_walks") {
      policy.behavior.hijack_walks = true;
    } else if (flag == "forge_ids") {
      policy.behavior.forge_ids = true;
    } else {
      throw std::invalid_argument("adversary.behavior: unknown flag '" + flag + "'");
    }
  }
  policy.behavior.target = config.adversary_target;
  return policy;
}

ClusterId nth_cluster(const now::PartitionState& state, std::size_t n) {
  auto it = state.clusters.begin();
  std::advance(it, n % state.clusters.size());
  return it->first;
}

NodeId nth_node(const now::PartitionState& state, std::size_t n) {
  auto it = state.node_index.begin();
  std::advance(it, n % state.node_index.size());
  return it->first;
}

std::map<std::string, std::string> parse_app_args(const std::string& args) {
  std::map<std::string, std::string> out;
  for (const std::string& tok : split_ws(args)) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      out[tok] = "";
    } else {
      out[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return out;
}

struct MetricsWriter {
  std::ostringstream jsonl;
  std::ostringstream csv;
  std::uint64_t last_units = 0;

  MetricsWriter() {
    csv << "step,n,clusters,size_min,size_max,size_mean,malicious_max_frac,lambda2,max_degree,"
           "message_units_window,events\n";
  }

  void emit(const now::PartitionState& state, const adversary::CorruptionLedger& ledger,
            bool with_lambda2, const std::vector<std::string>& events) {
    std::size_t size_min = 0, size_max = 0;
    double size_mean = 0.0, worst_frac = 0.0;
    if (!state.clusters.empty()) {
      size_min = state.clusters.begin()->second.size();
      for (const auto& [cid, c] : state.clusters) {
        size_min = std::min(size_min, c.size());
        size_max = std::max(size_max, c.size());
        size_mean += static_cast<double>(c.size());
        std::size_t bad = 0;
        for (NodeId m : c.members)
          if (ledger.is_corrupted(m)) ++bad;
        worst_frac = std::max(worst_frac, static_cast<double>(bad) / c.size());
      }
      size_mean /= static_cast<double>(state.clusters.size());
    }

    ordered_json rec;
    rec["step"] = state.step;
    rec["n"] = state.node_count();
    rec["clusters"] = state.clusters.size();
    rec["size_min"] = size_min;
    rec["size_max"] = size_max;
    rec["size_mean"] = size_mean;
    rec["malicious_max_frac"] = worst_frac;
    if (with_lambda2 && state.clusters.size() >= 2) {
      rec["lambda2"] = spectral::laplacian_lambda2(state.overlay.graph);
    } else {
      rec["lambda2"] = nullptr;
    }
    rec["max_degree"] = spectral::max_degree(state.overlay.graph);
    const std::uint64_t units = state.telemetry.message_units;
    rec["message_units_window"] = units - last_units;
    rec["events"] = events;
    jsonl << rec.dump() << '\n';

    csv << state.step << ',' << state.node_count() << ',' << state.clusters.size() << ','
        << size_min << ',' << size_max << ',' << size_mean << ',' << worst_frac << ',';
    if (with_lambda2 && state.clusters.size() >= 2) {
      csv << rec["lambda2"].get<double>();
    }
    csv << ',' << rec["max_degree"].get<std::uint64_t>() << ',' << (units - last_units) << ",\"";
    for (std::size_t i = 0; i < events.size(); ++i) {
      if (i) csv << ';';
      csv << events[i];
    }
    csv << "\"\n";
    last_units = units;
  }
};

void run_app_call(now::PartitionState& state, const ChurnEvent& ev, const ScenarioConfig& config,
                  adversary::AdversaryCtx& ctx, Rng& rng) {
  const auto args = parse_app_args(ev.app_args);
  auto arg_or = [&](const std::string& key, std::uint64_t fallback) {
    auto it = args.find(key);
    return it == args.end() || it->second.empty() ? fallback : std::stoull(it->second);
  };
  std::ostringstream digest;
  const NodeId sender = state.node_index.begin()->first;
  if (ev.app == "broadcast_local") {
    auto out = apps::broadcast_local(state, sender, "payload-" + std::to_string(state.step),
                                     config.delta, config.c, ctx, rng);
    std::size_t delivered = 0;
    for (const auto& [id, d] : out.delivered)
      if (d) ++delivered;
    digest << "broadcast_local delivered=" << delivered << "/" << out.delivered.size()
           << " rounds=" << out.rounds << " units=" << out.message_units;
  } else if (ev.app == "broadcast_global") {
    auto out = apps::broadcast_global(state, sender, "payload-" + std::to_string(state.step),
                                      static_cast<int>(arg_or("bits", 32)), config.delta,
                                      config.c, ctx, rng);
    digest << "broadcast_global aborted=" << out.aborted << " rounds=" << out.rounds;
  } else if (ev.app == "agree") {
    std::map<NodeId, int> inputs;
    for (const auto& [id, cid] : state.node_index) inputs[id] = static_cast<int>(id % 2);
    std::optional<ClusterId> initiator;
    if (!args.count("probabilistic")) initiator = state.clusters.begin()->first;
    auto out = apps::agree(state, inputs, initiator, config.delta, config.c, ctx, rng);
    digest << "agree decided=" << out.decided << " rounds=" << out.rounds;
  } else if (ev.app == "aggregate") {
    std::map<NodeId, std::uint64_t> inputs;
    for (const auto& [id, cid] : state.node_index) inputs[id] = 1 + id % 10;
    auto out = apps::aggregate_sum(state, inputs, static_cast<std::uint32_t>(arg_or("r", 100)),
                                   config.delta, config.c, ctx, rng);
    digest << "aggregate estimate=" << out.estimate << " true=" << out.true_sum;
  } else if (ev.app == "sample") {
    auto out = apps::sample_peers(state, sender, arg_or("count", 100), ctx, rng);
    digest << "sample count=" << out.ids.size() << " hops=" << out.walk_hops;
  } else {
    throw std::invalid_argument("churn.event: unknown app '" + ev.app + "'");
  }
  state.telemetry.events.push_back(digest.str());
}

}  // namespace

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (lambda < 1) fail("lambda", "must be at least 1");
  if (k < 1) fail("k", "must be at least 1");
  if (!override_unsafe && l <= std::sqrt(2.0)) fail("l", "must exceed sqrt(2)");
  if (tau < 0.0 || tau >= 0.5) fail("tau", "must lie in [0, 0.5)");
  if (!override_unsafe && tau > 1.0 / (2.0 * l * l) - epsilon + 1e-12)
    fail("tau", "exceeds 1/(2 l^2) - epsilon; set override_unsafe to run anyway");
  if (delta <= 0.0 || delta >= 1.0) fail("delta", "must lie in (0, 1)");
  if (c <= 0.0) fail("c", "must be positive");
  const std::size_t nominal = static_cast<std::size_t>(k) * lambda * lambda;
  if (n_initial < 2 * nominal) fail("n_initial", "must be at least 2*k*lambda^2");
  if (n_max < n_initial) fail("n_max", "must be at least n_initial");
  if (batch_size < 1) fail("batch_size", "must be at least 1");
  if (metrics_every < 1) fail("metrics_every", "must be at least 1");
  for (std::size_t i = 0; i < events.size(); ++i) {
    if (events[i].op == ChurnOp::crash_attack &&
        (events[i].epsilon <= 0.0 || events[i].epsilon >= 1.0))
      fail("churn.event[" + std::to_string(i) + "].epsilon", "must lie in (0, 1)");
    if (events[i].op == ChurnOp::app_call && events[i].app.empty())
      fail("churn.event[" + std::to_string(i) + "].app", "must name an application");
  }
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("line " + std::to_string(lineno) + ": malformed section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;

    try {
      if (section.empty()) {
        if (key == "seed") config.seed = std::stoull(value);
        else if (key == "lambda") config.lambda = std::stoi(value);
        else if (key == "k") config.k = std::stoi(value);
        else if (key == "l") config.l = std::stod(value);
        else if (key == "tau") config.tau = std::stod(value);
        else if (key == "epsilon") config.epsilon = std::stod(value);
        else if (key == "delta") config.delta = std::stod(value);
        else if (key == "c") config.c = std::stod(value);
        else if (key == "n_initial") config.n_initial = std::stoull(value);
        else if (key == "n_max") config.n_max = std::stoull(value);
        else if (key == "batch_size") config.batch_size = std::stoul(value);
        else if (key == "metrics_every") config.metrics_every = std::stoul(value);
        else if (key == "override_unsafe") config.override_unsafe = value == "true";
        else if (key == "demo_violation") config.demo_violation = value == "true";
        else if (key == "exchange_enabled") config.exchange_enabled = value == "true";
        else if (key == "track_majority") config.track_majority = value == "true";
        else throw std::invalid_argument(path + ": unknown key");
      } else if (section == "adversary") {
        if (key == "corrupt_on_join") config.adversary_corrupt_on_join = value;
        else if (key == "behavior") {
          std::istringstream flags(value);
          std::string flag;
          while (std::getline(flags, flag, ',')) {
            flag = trim(flag);
            if (!flag.empty()) config.adversary_behavior.push_back(flag);
          }
        } else if (key == "target") config.adversary_target = std::stoul(value);
        else throw std::invalid_argument(path + ": unknown key");
      } else if (section == "churn") {
        if (key == "mix") {
          if (value == "none") config.mix = ChurnMix::none;
          else if (value == "alternating") config.mix = ChurnMix::alternating;
          else if (value == "mixed") config.mix = ChurnMix::mixed;
          else if (value == "joins") config.mix = ChurnMix::joins;
          else if (value == "leaves") config.mix = ChurnMix::leaves;
          else throw std::invalid_argument(path + ": unknown mix '" + value + "'");
        } else if (key == "ops") config.mix_ops = std::stoull(value);
        else if (key == "join_weight") config.join_weight = std::stod(value);
        else if (key == "leave_weight") config.leave_weight = std::stod(value);
        else if (key == "event") {
          const auto toks = split_ws(value);
          if (toks.size() < 2) throw std::invalid_argument(path + ": expected '<step> <op> ...'");
          ChurnEvent ev;
          ev.step = std::stoull(toks[0]);
          ev.op = parse_op(toks[1], path);
          if (ev.op == ChurnOp::crash_attack) {
            if (toks.size() < 3) throw std::invalid_argument(path + ": crash_attack needs epsilon");
            ev.epsilon = std::stod(toks[2]);
          } else if (ev.op == ChurnOp::app_call) {
            if (toks.size() < 3) throw std::invalid_argument(path + ": app needs a name");
            ev.app = toks[2];
            for (std::size_t i = 3; i < toks.size(); ++i) {
              if (i > 3) ev.app_args += ' ';
              ev.app_args += toks[i];
            }
          }
          config.events.push_back(ev);
        } else throw std::invalid_argument(path + ": unknown key");
      } else {
        throw std::invalid_argument("unknown section [" + section + "]");
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument(path + ": malformed value '" + value + "'");
    }
  }
  return config;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

SweepReport sweep_invariants(const now::PartitionState& state,
                             const adversary::CorruptionLedger* ledger) {
  SweepReport report;
  auto flag = [&](const std::string& what) { report.violations.push_back(what); };

  // Partition: node_index and rosters must agree exactly, no duplicates.
  std::size_t roster_total = 0;
  std::set<NodeId> seen;
  for (const auto& [cid, cluster] : state.clusters) {
    for (NodeId m : cluster.members) {
      ++roster_total;
      if (!seen.insert(m).second)
        flag("partition: node " + std::to_string(m) + " appears twice");
      auto it = state.node_index.find(m);
      if (it == state.node_index.end()) {
        flag("partition: node " + std::to_string(m) + " missing from index");
      } else if (it->second != cid) {
        flag("partition: node " + std::to_string(m) + " indexed to cluster " +
             std::to_string(it->second) + " but rostered in " + std::to_string(cid));
      }
    }
  }
  if (roster_total != state.node_index.size())
    flag("partition: roster total " + std::to_string(roster_total) + " != index size " +
         std::to_string(state.node_index.size()));

  // Size band at quiescence.
  for (const auto& [cid, cluster] : state.clusters) {
    const double size = static_cast<double>(cluster.size());
    if (state.clusters.size() >= 2 && size < state.params.merge_floor())
      flag("band: cluster " + std::to_string(cid) + " size " + std::to_string(cluster.size()) +
           " below floor");
    if (size > state.params.split_threshold())
      flag("band: cluster " + std::to_string(cid) + " size " + std::to_string(cluster.size()) +
           " above threshold");
  }

  // Overlay vertices and cluster ids must be the same set.
  const std::vector<VertexId> verts = state.overlay.graph.vertices();
  if (verts.size() != state.clusters.size()) {
    flag("overlay: " + std::to_string(verts.size()) + " vertices vs " +
         std::to_string(state.clusters.size()) + " clusters");
  }
  for (VertexId v : verts) {
    if (!state.clusters.count(v)) flag("overlay: vertex " + std::to_string(v) + " has no cluster");
  }

  // Neighbor views: keys match the overlay, rosters match reality.
  for (const auto& [cid, cluster] : state.clusters) {
    std::set<ClusterId> expected;
    if (state.overlay.graph.has_vertex(cid)) {
      for (const Graph::AdjEntry& e : state.overlay.graph.neighbors(cid)) expected.insert(e.to);
    }
    for (const auto& [nbr, roster] : cluster.neighbor_view) {
      if (!expected.count(nbr)) {
        flag("views: cluster " + std::to_string(cid) + " holds stale neighbor " +
             std::to_string(nbr));
        continue;
      }
      if (roster != state.cluster(nbr).members)
        flag("views: cluster " + std::to_string(cid) + " holds stale roster for " +
             std::to_string(nbr));
    }
    for (ClusterId nbr : expected) {
      if (!cluster.neighbor_view.count(nbr))
        flag("views: cluster " + std::to_string(cid) + " missing neighbor " + std::to_string(nbr));
    }
  }

  // Honest-majority census.
  if (ledger != nullptr) {
    for (const auto& [cid, cluster] : state.clusters) {
      std::size_t bad = 0;
      for (NodeId m : cluster.members)
        if (ledger->is_corrupted(m)) ++bad;
      if (2 * bad > cluster.size())
        flag("majority: cluster " + std::to_string(cid) + " is malicious-majority (" +
             std::to_string(bad) + "/" + std::to_string(cluster.size()) + ")");
    }
  }
  return report;
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();

  Rng root(config.seed);
  Rng world = root.derive(1);
  Rng honest = root.derive(2);
  Rng adv_rng = root.derive(3);
  Rng sched = root.derive(4);

  const adversary::AdversaryPolicy policy = build_policy(config);

  // Init phase: a small random node network whose honest part is connected.
  std::vector<NodeId> ids(config.n_initial);
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<NodeId>(i);
  const double p_init =
      std::min(1.0, 2.0 * std::log(static_cast<double>(ids.size())) / ids.size());

  Graph node_graph;
  adversary::CorruptionLedger ledger;
  bool placed = false;
  for (int attempt = 0; attempt < 500 && !placed; ++attempt) {
    node_graph = connected_erdos_renyi(ids.size(), p_init, world);
    ledger = adversary::corrupt_initial(ids, policy, adv_rng);
    try {
      now::global_knowledge(node_graph, ledger, policy, honest, config.demo_violation);
      placed = true;
    } catch (const std::runtime_error&) {
      // honest core disconnected; redraw
    }
  }
  if (!placed) throw std::runtime_error("assumption violated");

  now::NowParams params;
  params.lambda = config.lambda;
  params.k = config.k;
  params.l = config.l;
  params.tau = config.tau;
  params.epsilon = config.epsilon;
  params.exchange_enabled = config.exchange_enabled;

  const now::GlobalKnowledgeResult gk =
      now::global_knowledge(node_graph, ledger, policy, honest, config.demo_violation);

  RunResult result;
  result.state = now::clusterize(ids, params, honest);
  result.state.n_max = config.n_max;
  result.state.telemetry.message_units += gk.message_units;
  result.state.telemetry.payload_bits += gk.payload_bits;
  result.state.telemetry.forged_ids_dropped += gk.forged_ids_dropped;
  now::sync_malicious_counts(result.state, ledger);
  result.state.next_node_id = static_cast<NodeId>(config.n_initial);

  result.adversary.policy = policy;
  result.adversary.ledger = ledger;
  result.adversary.rng = adv_rng;
  result.adversary.max_nodes = config.n_max;
  result.adversary.live_corrupted = ledger.corrupted.size();

  now::PartitionState& state = result.state;
  adversary::AdversaryCtx& ctx = result.adversary;

  // Build the schedule: generated mix first, explicit entries at their steps.
  std::map<std::uint64_t, std::vector<ChurnEvent>> schedule;
  for (std::uint64_t i = 0; i < config.mix_ops; ++i) {
    ChurnEvent ev;
    switch (config.mix) {
      case ChurnMix::none:
        continue;
      case ChurnMix::alternating:
        ev.op = i % 2 == 0 ? ChurnOp::join : ChurnOp::leave;
        break;
      case ChurnMix::mixed: {
        const double w = config.join_weight + config.leave_weight;
        ev.op = sched.chance(config.join_weight / w) ? ChurnOp::join : ChurnOp::leave;
        break;
      }
      case ChurnMix::joins:
        ev.op = ChurnOp::join;
        break;
      case ChurnMix::leaves:
        ev.op = ChurnOp::leave;
        break;
    }
    ev.step = 1 + i / config.batch_size;
    schedule[ev.step].push_back(ev);
  }
  for (const ChurnEvent& ev : config.events) schedule[ev.step].push_back(ev);

  MetricsWriter metrics;
  std::vector<std::string> pending_events;
  metrics.emit(state, ledger, true, {"init"});

  bool sweeps_ok = sweep_invariants(state, nullptr).ok();

  const std::uint64_t last_step = schedule.empty() ? 0 : schedule.rbegin()->first;
  for (std::uint64_t step = 1; step <= last_step; ++step) {
    state.step = step;
    auto it = schedule.find(step);
    if (it != schedule.end()) {
      for (const ChurnEvent& ev : it->second) {
        switch (ev.op) {
          case ChurnOp::join: {
            if (state.node_count() >= config.n_max) break;
            const NodeId id = state.next_node_id++;
            adversary::decide_on_join(id, ctx);
            const ClusterId contact = nth_cluster(state, world.below(state.clusters.size()));
            now::join(state, id, contact, ctx, honest);
            break;
          }
          case ChurnOp::leave: {
            if (state.node_count() <=
                static_cast<std::size_t>(state.params.nominal_cluster_size()))
              break;
            const NodeId victim = nth_node(state, world.below(state.node_count()));
            now::leave(state, victim, ctx, honest);
            break;
          }
          case ChurnOp::crash_attack:
            adversary::crash_attack(state, ev.epsilon, ctx, world);
            break;
          case ChurnOp::app_call:
            run_app_call(state, ev, config, ctx, honest);
            break;
        }
      }
    }

    if (config.track_majority) {
      for (const auto& [cid, cluster] : state.clusters) {
        ++result.majority_checks;
        if (2 * cluster.malicious > cluster.size()) ++result.majority_flips;
      }
    }

    for (std::string& ev : state.telemetry.events) pending_events.push_back(std::move(ev));
    state.telemetry.events.clear();

    const bool boundary = step % config.metrics_every == 0 || step == last_step;
    if (boundary || !pending_events.empty()) {
      metrics.emit(state, ledger, boundary, pending_events);
      pending_events.clear();
      if (boundary && !sweep_invariants(state, nullptr).ok()) sweeps_ok = false;
    }
    if (options.out_dir && options.dump_overlay_every > 0 &&
        step % options.dump_overlay_every == 0) {
      std::filesystem::create_directories(*options.out_dir);
      std::ofstream dump(*options.out_dir + "/overlay-" + std::to_string(step) + ".graph");
      dump << state.overlay.graph.to_text();
    }
  }

  const SweepReport final_sweep = sweep_invariants(state, nullptr);
  if (!final_sweep.ok()) sweeps_ok = false;
  result.sweeps_ok = sweeps_ok;
  result.metrics_jsonl = metrics.jsonl.str();
  result.summary_csv = metrics.csv.str();

  std::ostringstream summary;
  summary << "steps=" << last_step << " n=" << state.node_count()
          << " clusters=" << state.clusters.size() << " sweeps=" << (sweeps_ok ? "ok" : "FAIL");
  if (config.track_majority) {
    summary << " majority_flips=" << result.majority_flips << "/" << result.majority_checks;
  }
  if (!final_sweep.ok()) {
    summary << " violations:";
    for (const std::string& v : final_sweep.violations) summary << " [" << v << "]";
  }
  result.exit_summary = summary.str();

  if (options.out_dir) {
    std::filesystem::create_directories(*options.out_dir);
    std::ofstream(*options.out_dir + "/metrics.jsonl") << result.metrics_jsonl;
    std::ofstream(*options.out_dir + "/summary.csv") << result.summary_csv;
    std::ofstream(*options.out_dir + "/state.snapshot") << save_state(state, ledger);
  }
  return result;
}

std::string save_state(const now::PartitionState& state,
                       const adversary::CorruptionLedger& ledger) {
  std::ostringstream out;
  out << "overnow-state 1\n";
  out << "params " << state.params.lambda << ' ' << state.params.k << ' ' << state.params.l << ' '
      << state.params.tau << ' ' << state.params.epsilon << ' '
      << (state.params.exchange_enabled ? 1 : 0) << '\n';
  out << "step " << state.step << '\n';
  out << "n_max " << state.n_max << '\n';
  out << "next_node " << state.next_node_id << '\n';
  out << "next_cluster " << state.next_cluster_id << '\n';
  out << "clusters " << state.clusters.size() << '\n';
  for (const auto& [cid, cluster] : state.clusters) {
    out << "cluster " << cid << ' ' << cluster.size();
    for (NodeId m : cluster.members) out << ' ' << m;
    out << '\n';
  }
  std::size_t views = 0;
  for (const auto& [cid, cluster] : state.clusters) views += cluster.neighbor_view.size();
  out << "views " << views << '\n';
  for (const auto& [cid, cluster] : state.clusters) {
    for (const auto& [nbr, roster] : cluster.neighbor_view) {
      out << "view " << cid << ' ' << nbr << ' ' << roster.size();
      for (NodeId m : roster) out << ' ' << m;
      out << '\n';
    }
  }
  out << "corrupted " << ledger.corrupted.size();
  for (NodeId id : ledger.corrupted) out << ' ' << id;
  out << '\n';
  out << "overlay\n" << state.overlay.graph.to_text();
  return out.str();
}

LoadedState load_state(const std::string& text) {
  std::istringstream in(text);
  std::string word;
  int version = 0;
  if (!(in >> word >> version) || word != "overnow-state" || version != 1)
    throw std::invalid_argument("unrecognized state snapshot");

  LoadedState loaded;
  now::PartitionState& state = loaded.state;
  int exchange = 1;
  auto expect = [&](const char* tag) {
    if (!(in >> word) || word != tag)
      throw std::invalid_argument(std::string("snapshot: expected ") + tag);
  };
  expect("params");
  in >> state.params.lambda >> state.params.k >> state.params.l >> state.params.tau >>
      state.params.epsilon >> exchange;
  state.params.exchange_enabled = exchange != 0;
  expect("step");
  in >> state.step;
  expect("n_max");
  in >> state.n_max;
  expect("next_node");
  in >> state.next_node_id;
  expect("next_cluster");
  in >> state.next_cluster_id;
  expect("clusters");
  std::size_t n_clusters = 0;
  in >> n_clusters;
  for (std::size_t i = 0; i < n_clusters; ++i) {
    expect("cluster");
    now::Cluster cluster;
    std::size_t size = 0;
    in >> cluster.id >> size;
    for (std::size_t j = 0; j < size; ++j) {
      NodeId m;
      in >> m;
      cluster.members.push_back(m);
      state.node_index[m] = cluster.id;
    }
    state.clusters.emplace(cluster.id, std::move(cluster));
  }
  expect("views");
  std::size_t n_views = 0;
  in >> n_views;
  for (std::size_t i = 0; i < n_views; ++i) {
    expect("view");
    ClusterId cid, nbr;
    std::size_t size = 0;
    in >> cid >> nbr >> size;
    std::vector<NodeId> roster(size);
    for (auto& m : roster) in >> m;
    state.cluster(cid).neighbor_view[nbr] = std::move(roster);
  }
  expect("corrupted");
  std::size_t n_bad = 0;
  in >> n_bad;
  for (std::size_t i = 0; i < n_bad; ++i) {
    NodeId id;
    in >> id;
    loaded.ledger.corrupted.insert(id);
  }
  loaded.ledger.budget_used = loaded.ledger.corrupted.size();
  expect("overlay");
  std::string rest((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  state.overlay.graph = Graph::from_text(rest);
  state.overlay.scale = state.params.lambda;
  now::sync_malicious_counts(state, loaded.ledger);
  return loaded;
}

std::string analyze_metrics(const std::string& jsonl) {
  std::istringstream in(jsonl);
  std::string line;
  std::size_t records = 0, events = 0;
  std::uint64_t first_step = 0, last_step = 0, total_units = 0;
  std::size_t n_min = 0, n_max_seen = 0, cl_min = 0, cl_max = 0;
  double lambda2_min = std::numeric_limits<double>::infinity();
  std::uint64_t degree_max = 0;
  double worst_frac = 0.0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto rec = nlohmann::json::parse(line);
    const std::uint64_t step = rec["step"].get<std::uint64_t>();
    const std::size_t n = rec["n"].get<std::size_t>();
    const std::size_t cl = rec["clusters"].get<std::size_t>();
    if (records == 0) {
      first_step = step;
      n_min = n_max_seen = n;
      cl_min = cl_max = cl;
    }
    last_step = step;
    n_min = std::min(n_min, n);
    n_max_seen = std::max(n_max_seen, n);
    cl_min = std::min(cl_min, cl);
    cl_max = std::max(cl_max, cl);
    if (!rec["lambda2"].is_null()) lambda2_min = std::min(lambda2_min, rec["lambda2"].get<double>());
    degree_max = std::max(degree_max, rec["max_degree"].get<std::uint64_t>());
    worst_frac = std::max(worst_frac, rec["malicious_max_frac"].get<double>());
    total_units += rec["message_units_window"].get<std::uint64_t>();
    events += rec["events"].size();
    ++records;
  }
  std::ostringstream out;
  out << "records           " << records << "\n"
      << "steps             " << first_step << " .. " << last_step << "\n"
      << "n                 " << n_min << " .. " << n_max_seen << "\n"
      << "clusters          " << cl_min << " .. " << cl_max << "\n"
      << "lambda2 min       ";
  if (std::isfinite(lambda2_min)) out << lambda2_min;
  else out << "n/a";
  out << "\n"
      << "max degree        " << degree_max << "\n"
      << "worst malicious   " << worst_frac << "\n"
      << "message units     " << total_units << "\n"
      << "events            " << events << "\n";
  return out.str();
}

}  // namespace overnow::harness
