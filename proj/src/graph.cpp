#include "overnow/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace overnow {

Graph::VertexAdj& Graph::vertex(VertexId v) {
  auto it = adj_.find(v);
  if (it == adj_.end()) throw std::invalid_argument("unknown vertex");
  return it->second;
}

const Graph::VertexAdj& Graph::vertex(VertexId v) const {
  auto it = adj_.find(v);
  if (it == adj_.end()) throw std::invalid_argument("unknown vertex");
  return it->second;
}

void Graph::add_vertex(VertexId v) {
  if (!adj_.emplace(v, VertexAdj{}).second) throw std::invalid_argument("vertex already present");
}

void Graph::remove_vertex(VertexId v) {
  VertexAdj& va = vertex(v);
  for (const AdjEntry& e : va.nbrs) {
    VertexAdj& other = adj_.at(e.to);
    auto it = std::lower_bound(other.nbrs.begin(), other.nbrs.end(), v,
                               [](const AdjEntry& a, VertexId id) { return a.to < id; });
    other.degree -= it->count;
    other.nbrs.erase(it);
    edges_ -= e.count;
  }
  adj_.erase(v);
}

void Graph::add_edge(VertexId u, VertexId v) {
  if (u == v) throw std::invalid_argument("self-loop forbidden");
  VertexAdj& ua = vertex(u);
  VertexAdj& va = vertex(v);
  auto bump = [](VertexAdj& a, VertexId to) {
    auto it = std::lower_bound(a.nbrs.begin(), a.nbrs.end(), to,
                               [](const AdjEntry& e, VertexId id) { return e.to < id; });
    if (it != a.nbrs.end() && it->to == to) {
      ++it->count;
    } else {
      a.nbrs.insert(it, AdjEntry{to, 1});
    }
    ++a.degree;
  };
  bump(ua, v);
  bump(va, u);
  ++edges_;
}

std::uint32_t Graph::multiplicity(VertexId u, VertexId v) const {
  const VertexAdj& ua = vertex(u);
  auto it = std::lower_bound(ua.nbrs.begin(), ua.nbrs.end(), v,
                             [](const AdjEntry& e, VertexId id) { return e.to < id; });
  if (it == ua.nbrs.end() || it->to != v) return 0;
  return it->count;
}

std::uint64_t Graph::degree(VertexId v) const { return vertex(v).degree; }

const std::vector<Graph::AdjEntry>& Graph::neighbors(VertexId v) const { return vertex(v).nbrs; }

std::vector<VertexId> Graph::vertices() const {
  std::vector<VertexId> out;
  out.reserve(adj_.size());
  for (const auto& [v, _] : adj_) out.push_back(v);
  return out;
}

bool Graph::connected() const {
  if (adj_.empty()) return false;
  std::vector<VertexId> stack{adj_.begin()->first};
  std::map<VertexId, bool> seen;
  seen[stack.back()] = true;
  std::size_t visited = 0;
  while (!stack.empty()) {
    VertexId v = stack.back();
    stack.pop_back();
    ++visited;
    for (const AdjEntry& e : adj_.at(v).nbrs) {
      if (!seen[e.to]) {
        seen[e.to] = true;
        stack.push_back(e.to);
      }
    }
  }
  return visited == adj_.size();
}

VertexId Graph::random_neighbor(VertexId v, Rng& rng) const {
  const VertexAdj& va = vertex(v);
  if (va.degree == 0) throw std::runtime_error("isolated vertex");
  std::uint64_t t = rng.below(va.degree);
  for (const AdjEntry& e : va.nbrs) {
    if (t < e.count) return e.to;
    t -= e.count;
  }
  return va.nbrs.back().to;  // unreachable
}

std::string Graph::to_text() const {
  std::ostringstream out;
  out << adj_.size() << ' ' << edges_ << '\n';
  bool first = true;
  for (const auto& [v, _] : adj_) {
    if (!first) out << ' ';
    out << v;
    first = false;
  }
  out << '\n';
  for (const auto& [v, va] : adj_) {
    for (const AdjEntry& e : va.nbrs) {
      if (e.to < v) continue;  // emit each undirected edge once
      for (std::uint32_t i = 0; i < e.count; ++i) out << v << ' ' << e.to << '\n';
    }
  }
  return out.str();
}

Graph Graph::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t n = 0;
  std::uint64_t m = 0;
  if (!(in >> n >> m)) throw std::invalid_argument("malformed graph header");
  Graph g;
  for (std::size_t i = 0; i < n; ++i) {
    VertexId v;
    if (!(in >> v)) throw std::invalid_argument("malformed vertex list");
    g.add_vertex(v);
  }
  for (std::uint64_t i = 0; i < m; ++i) {
    VertexId u, v;
    if (!(in >> u >> v)) throw std::invalid_argument("malformed edge list");
    g.add_edge(u, v);
  }
  return g;
}

bool Graph::operator==(const Graph& other) const {
  if (adj_.size() != other.adj_.size() || edges_ != other.edges_) return false;
  for (const auto& [v, va] : adj_) {
    auto it = other.adj_.find(v);
    if (it == other.adj_.end()) return false;
    if (va.nbrs.size() != it->second.nbrs.size()) return false;
    for (std::size_t i = 0; i < va.nbrs.size(); ++i) {
      if (va.nbrs[i].to != it->second.nbrs[i].to || va.nbrs[i].count != it->second.nbrs[i].count)
        return false;
    }
  }
  return true;
}

Graph erdos_renyi(std::size_t n, double p, Rng& rng) {
  p = std::min(1.0, std::max(0.0, p));
  Graph g;
  for (std::size_t v = 0; v < n; ++v) g.add_vertex(static_cast<VertexId>(v));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng.chance(p)) g.add_edge(static_cast<VertexId>(u), static_cast<VertexId>(v));
  return g;
}

Graph connected_erdos_renyi(std::size_t n, double p, Rng& rng, int max_attempts) {
  for (int i = 0; i < max_attempts; ++i) {
    Graph g = erdos_renyi(n, p, rng);
    if (g.connected()) return g;
  }
  throw std::runtime_error("failed to draw a connected random graph");
}

}  // namespace overnow
