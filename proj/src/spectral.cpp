#include "overnow/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <vector>

namespace overnow::spectral {

namespace {

constexpr std::size_t kDenseSolverCap = 512;
constexpr std::size_t kExactCutCap = 22;

Eigen::MatrixXd laplacian_matrix(const Graph& g, const std::vector<VertexId>& verts) {
  const std::size_t n = verts.size();
  std::map<VertexId, int> index;
  for (std::size_t i = 0; i < n; ++i) index[verts[i]] = static_cast<int>(i);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    lap(i, i) = static_cast<double>(g.degree(verts[i]));
    for (const Graph::AdjEntry& e : g.neighbors(verts[i])) {
      lap(i, index.at(e.to)) = -static_cast<double>(e.count);
    }
  }
  return lap;
}

// Multiplicity matrix flattened to n*n for the subset enumeration.
std::vector<std::int64_t> multiplicity_table(const Graph& g, const std::vector<VertexId>& verts) {
  const std::size_t n = verts.size();
  std::map<VertexId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index[verts[i]] = i;
  std::vector<std::int64_t> m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const Graph::AdjEntry& e : g.neighbors(verts[i])) {
      m[i * n + index.at(e.to)] = e.count;
    }
  }
  return m;
}

struct CutTables {
  std::vector<std::int64_t> cut;     // edges across (S, complement)
  std::vector<std::int64_t> inside;  // edges with both endpoints in S
};

// Incremental subset sweep: each mask extends mask^lowbit by one vertex.
CutTables enumerate_cuts(const Graph& g, const std::vector<VertexId>& verts) {
  const std::size_t n = verts.size();
  const std::vector<std::int64_t> m = multiplicity_table(g, verts);
  std::vector<std::int64_t> deg(n);
  for (std::size_t i = 0; i < n; ++i) deg[i] = static_cast<std::int64_t>(g.degree(verts[i]));

  const std::size_t total = std::size_t{1} << n;
  CutTables t;
  t.cut.assign(total, 0);
  t.inside.assign(total, 0);
  for (std::size_t mask = 1; mask < total; ++mask) {
    const unsigned v = std::countr_zero(mask);
    const std::size_t rest = mask & (mask - 1);
    std::int64_t cross = 0;
    for (std::size_t r = rest; r != 0; r &= r - 1) {
      cross += m[v * n + std::countr_zero(r)];
    }
    t.cut[mask] = t.cut[rest] + deg[v] - 2 * cross;
    t.inside[mask] = t.inside[rest] + cross;
  }
  return t;
}

void require_exact_size(const Graph& g) {
  if (g.vertex_count() < 2) throw std::invalid_argument("need at least two vertices");
  if (g.vertex_count() > kExactCutCap)
    throw std::invalid_argument("too large for exact cut enumeration");
}

}  // namespace

std::uint64_t max_degree(const Graph& g) {
  std::uint64_t best = 0;
  for (VertexId v : g.vertices()) best = std::max(best, g.degree(v));
  return best;
}

double laplacian_lambda2(const Graph& g) {
  if (g.vertex_count() == 0) throw std::invalid_argument("empty graph");
  if (g.vertex_count() == 1) throw std::invalid_argument("single vertex has no spectral gap");
  if (g.vertex_count() > kDenseSolverCap)
    throw std::invalid_argument("too large for dense eigensolver");
  const std::vector<VertexId> verts = g.vertices();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian_matrix(g, verts),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  double l2 = solver.eigenvalues()(1);
  return l2 < 0.0 && l2 > -1e-9 ? 0.0 : l2;
}

SpectralSummary analyze(const Graph& g) {
  SpectralSummary s;
  s.num_vertices = g.vertex_count();
  s.num_edges = g.edge_count();
  s.max_degree = max_degree(g);
  s.lambda2 = laplacian_lambda2(g);
  return s;
}

double isoperimetric_exact(const Graph& g) {
  require_exact_size(g);
  const std::vector<VertexId> verts = g.vertices();
  const std::size_t n = verts.size();
  const CutTables t = enumerate_cuts(g, verts);
  double best = std::numeric_limits<double>::infinity();
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t mask = 1; mask < total; ++mask) {
    const unsigned size = std::popcount(mask);
    if (2 * size > n) continue;
    best = std::min(best, static_cast<double>(t.cut[mask]) / size);
  }
  return best;
}

double conductance_exact(const Graph& g) {
  require_exact_size(g);
  if (g.edge_count() == 0) throw std::invalid_argument("graph has no edges");
  const std::vector<VertexId> verts = g.vertices();
  const std::size_t n = verts.size();
  const CutTables t = enumerate_cuts(g, verts);
  const std::int64_t total_edges = static_cast<std::int64_t>(g.edge_count());
  double best = std::numeric_limits<double>::infinity();
  const std::size_t total = std::size_t{1} << n;
  for (std::size_t mask = 1; mask + 1 < total; ++mask) {
    const std::int64_t cut = t.cut[mask];
    const std::int64_t vol_s = t.inside[mask] + cut;
    const std::int64_t vol_rest = total_edges - t.inside[mask];  // inside(rest) + cut
    const std::int64_t denom = std::min(vol_s, vol_rest);
    if (denom == 0) {
      // A side with no incident edges at all is a detached piece.
      best = 0.0;
      continue;
    }
    best = std::min(best, static_cast<double>(cut) / static_cast<double>(denom));
  }
  return best;
}

SpectralBound spectral_lower_bound(const Graph& g, Rng& rng) {
  if (g.vertex_count() < 2) throw std::invalid_argument("need at least two vertices");
  const std::uint64_t delta = max_degree(g);
  if (delta == 0) throw std::invalid_argument("graph has no edges");

  if (g.vertex_count() <= kExactCutCap) {
    const double iso = isoperimetric_exact(g);
    return {iso * iso / (2.0 * static_cast<double>(delta)), true};
  }

  // Sampled upper estimate of the isoperimetric constant: singletons plus
  // random subsets. The resulting bound is not certified.
  const std::vector<VertexId> verts = g.vertices();
  const std::size_t n = verts.size();
  double iso = std::numeric_limits<double>::infinity();
  for (VertexId v : verts) iso = std::min(iso, static_cast<double>(g.degree(v)));
  std::map<VertexId, bool> in_s;
  for (int trial = 0; trial < 2000; ++trial) {
    in_s.clear();
    const std::size_t size = 1 + rng.below(n / 2);
    std::vector<VertexId> pool = verts;
    for (std::size_t i = 0; i < size; ++i) {
      std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
      in_s[pool[i]] = true;
    }
    std::int64_t cut = 0;
    for (std::size_t i = 0; i < size; ++i) {
      for (const Graph::AdjEntry& e : g.neighbors(pool[i])) {
        if (!in_s.count(e.to)) cut += e.count;
      }
    }
    iso = std::min(iso, static_cast<double>(cut) / size);
  }
  return {iso * iso / (2.0 * static_cast<double>(delta)), false};
}

}  // namespace overnow::spectral
