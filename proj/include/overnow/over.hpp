#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "overnow/ctrw.hpp"
#include "overnow/graph.hpp"

namespace overnow::over {

enum class OverlayEventKind { add, remove, crash };

struct OverlayEvent {
  OverlayEventKind kind;
  VertexId vertex;
  std::vector<std::pair<VertexId, VertexId>> edges_touched;
  std::uint64_t walk_hops_total = 0;
};

/// Expander-style multigraph maintained under vertex churn. Every add and
/// graceful remove injects 2*scale^2 random edges chosen by walk endpoints;
/// crashes delete without repair.
struct OverlayState {
  Graph graph;
  int scale = 2;  // stands in for the log of the maximum system size
  std::vector<OverlayEvent> history;

  int edges_per_event() const { return 2 * scale * scale; }
  int degree_cap_reference() const { return scale * scale * scale * scale; }
  double walk_budget() const { return ctrw::overlay_walk_budget(scale); }
};

/// Seed graph: Erdos-Renyi on n0 vertices with p = scale^2/n0, resampled
/// until connected.
OverlayState make_seed_overlay(std::size_t n0, int scale, Rng& rng);

/// Adds one parallel edge between two existing, distinct vertices.
void link(OverlayState& state, VertexId u, VertexId v);

/// Inserts `new_vertex` and connects it with edges_per_event() edges whose
/// far endpoints are walk endpoints started at `entry_point`. Endpoints that
/// land on the new vertex are resampled.
void add_vertex(OverlayState& state, VertexId entry_point, VertexId new_vertex, Rng& rng);

/// Graceful departure: first adds edges_per_event() repair edges between
/// pairs of walk endpoints (walks start at the departing vertex; endpoints
/// equal to it or to each other are resampled), then deletes the vertex.
/// Removing from a two-vertex graph performs no repairs and leaves a single
/// isolated vertex.
void remove_vertex(OverlayState& state, VertexId v, Rng& rng);

/// Ungraceful departure: the vertex and its incident edges vanish, no repair.
void crash_vertex(OverlayState& state, VertexId v);

}  // namespace overnow::over
