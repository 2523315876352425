#include "overnow/over.hpp"

#include <set>
#include <stdexcept>

namespace overnow::over {

namespace {

constexpr int kResampleCap = 100;

struct WalkEndpoint {
  VertexId vertex;
  std::uint64_t hops;
};

WalkEndpoint sample_endpoint(const OverlayState& state, VertexId start, Rng& rng) {
  ctrw::WalkBudget budget{state.walk_budget()};
  ctrw::WalkOutcome walk = ctrw::ctrw_sample(state.graph, start, budget, rng);
  return {walk.endpoint, walk.hops};
}

// Size of v's component, counted only up to `cap`.
std::size_t component_size(const Graph& g, VertexId v, std::size_t cap) {
  std::set<VertexId> seen{v};
  std::vector<VertexId> stack{v};
  while (!stack.empty() && seen.size() < cap) {
    const VertexId cur = stack.back();
    stack.pop_back();
    for (const Graph::AdjEntry& e : g.neighbors(cur)) {
      if (seen.insert(e.to).second) stack.push_back(e.to);
    }
  }
  return seen.size();
}

}  // namespace

OverlayState make_seed_overlay(std::size_t n0, int scale, Rng& rng) {
  if (n0 == 0) throw std::invalid_argument("seed overlay needs at least one vertex");
  if (scale < 1) throw std::invalid_argument("scale must be positive");
  OverlayState state;
  state.scale = scale;
  const double p = static_cast<double>(scale) * scale / static_cast<double>(n0);
  state.graph = n0 == 1 ? erdos_renyi(1, 0.0, rng) : connected_erdos_renyi(n0, p, rng);
  return state;
}

void link(OverlayState& state, VertexId u, VertexId v) {
  if (u == v) throw std::invalid_argument("self-loop forbidden");
  if (!state.graph.has_vertex(u) || !state.graph.has_vertex(v))
    throw std::invalid_argument("unknown vertex");
  state.graph.add_edge(u, v);
}

void add_vertex(OverlayState& state, VertexId entry_point, VertexId new_vertex, Rng& rng) {
  if (!state.graph.has_vertex(entry_point)) throw std::invalid_argument("unknown vertex");
  if (state.graph.has_vertex(new_vertex)) throw std::invalid_argument("vertex already present");

  state.graph.add_vertex(new_vertex);
  OverlayEvent event{OverlayEventKind::add, new_vertex, {}, 0};
  for (int i = 0; i < state.edges_per_event(); ++i) {
    VertexId endpoint = entry_point;
    if (state.graph.degree(entry_point) > 0) {
      int attempts = 0;
      do {
        if (++attempts > kResampleCap) throw std::runtime_error("endpoint resample limit reached");
        WalkEndpoint e = sample_endpoint(state, entry_point, rng);
        endpoint = e.vertex;
        event.walk_hops_total += e.hops;
      } while (endpoint == new_vertex);
    }
    state.graph.add_edge(new_vertex, endpoint);
    event.edges_touched.emplace_back(new_vertex, endpoint);
  }
  state.history.push_back(std::move(event));
}

void remove_vertex(OverlayState& state, VertexId v, Rng& rng) {
  if (!state.graph.has_vertex(v)) throw std::invalid_argument("unknown vertex");
  if (state.graph.vertex_count() == 1) throw std::runtime_error("would empty overlay");

  OverlayEvent event{OverlayEventKind::remove, v, {}, 0};
  // Repair walks start at the departing vertex and need two distinct
  // surviving endpoints, so they only run when v's component offers both.
  if (state.graph.vertex_count() > 2 && component_size(state.graph, v, 3) >= 3) {
    auto pick = [&](VertexId avoid) {
      for (int attempts = 0; attempts < kResampleCap; ++attempts) {
        WalkEndpoint e = sample_endpoint(state, v, rng);
        event.walk_hops_total += e.hops;
        if (e.vertex != v && e.vertex != avoid) return e.vertex;
      }
      throw std::runtime_error("endpoint resample limit reached");
    };
    for (int i = 0; i < state.edges_per_event(); ++i) {
      const VertexId a = pick(v);
      const VertexId b = pick(a);
      state.graph.add_edge(a, b);
      event.edges_touched.emplace_back(a, b);
    }
  }
  state.graph.remove_vertex(v);
  state.history.push_back(std::move(event));
}

void crash_vertex(OverlayState& state, VertexId v) {
  if (!state.graph.has_vertex(v)) throw std::invalid_argument("unknown vertex");
  if (state.graph.vertex_count() == 1) throw std::runtime_error("would empty overlay");
  state.graph.remove_vertex(v);
  state.history.push_back(OverlayEvent{OverlayEventKind::crash, v, {}, 0});
}

}  // namespace overnow::over
