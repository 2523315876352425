#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "overnow/rng.hpp"
#include "overnow/types.hpp"

namespace overnow {

/// Undirected multigraph. Parallel edges carry a multiplicity count,
/// self-loops are rejected. degree(v) sums multiplicities.
class Graph {
 public:
  struct AdjEntry {
    VertexId to;
    std::uint32_t count;
  };

  void add_vertex(VertexId v);
  bool has_vertex(VertexId v) const { return adj_.count(v) != 0; }
  void remove_vertex(VertexId v);

  /// Increments the multiplicity of {u, v} by one.
  void add_edge(VertexId u, VertexId v);

  std::uint32_t multiplicity(VertexId u, VertexId v) const;
  std::uint64_t degree(VertexId v) const;
  std::size_t distinct_degree(VertexId v) const { return neighbors(v).size(); }

  /// Sorted by neighbor id; one entry per distinct neighbor.
  const std::vector<AdjEntry>& neighbors(VertexId v) const;

  std::size_t vertex_count() const { return adj_.size(); }
  std::uint64_t edge_count() const { return edges_; }
  std::vector<VertexId> vertices() const;

  bool connected() const;

  /// Neighbor chosen uniformly among incident edge endpoints
  /// (multiplicity-weighted). Throws on an isolated vertex.
  VertexId random_neighbor(VertexId v, Rng& rng) const;

  /// Text form: "n m" header, one line of sorted vertex ids, then one
  /// edge per line "u v" (repeated per multiplicity).
  std::string to_text() const;
  static Graph from_text(std::string_view text);

  bool operator==(const Graph& other) const;

 private:
  struct VertexAdj {
    std::vector<AdjEntry> nbrs;  // sorted by `to`
    std::uint64_t degree = 0;
  };

  VertexAdj& vertex(VertexId v);
  const VertexAdj& vertex(VertexId v) const;

  std::map<VertexId, VertexAdj> adj_;
  std::uint64_t edges_ = 0;
};

/// Erdos-Renyi draw on the vertex set {0, .., n-1}: each pair present with
/// probability p (clamped to [0,1]), single edges only.
Graph erdos_renyi(std::size_t n, double p, Rng& rng);

/// Same, resampled until connected. Throws after `max_attempts` failures.
Graph connected_erdos_renyi(std::size_t n, double p, Rng& rng, int max_attempts = 1000);

}  // namespace overnow
