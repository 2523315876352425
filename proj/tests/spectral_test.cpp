#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "overnow/spectral.hpp"

using namespace overnow;
using namespace overnow::spectral;

namespace {

Graph complete(int n, VertexId base = 0) {
  Graph g;
  for (int i = 0; i < n; ++i) g.add_vertex(base + i);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(base + i, base + j);
  return g;
}

Graph cycle(int n) {
  Graph g;
  for (int i = 0; i < n; ++i) g.add_vertex(i);
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  return g;
}

Graph star(int leaves) {
  Graph g;
  g.add_vertex(0);
  for (int i = 1; i <= leaves; ++i) {
    g.add_vertex(i);
    g.add_edge(0, i);
  }
  return g;
}

Graph single_edge() {
  Graph g;
  g.add_vertex(0);
  g.add_vertex(1);
  g.add_edge(0, 1);
  return g;
}

}  // namespace

TEST_CASE("lambda2 reference values") {
  CHECK(laplacian_lambda2(complete(4)) == doctest::Approx(4.0).epsilon(1e-9));

  Graph isolated;
  isolated.add_vertex(0);
  isolated.add_vertex(1);
  CHECK(laplacian_lambda2(isolated) == doctest::Approx(0.0));

  // C4 spectrum is 2 - 2cos(2 pi k / 4): second smallest is 2.
  CHECK(laplacian_lambda2(cycle(4)) == doctest::Approx(2.0).epsilon(1e-9));

  Graph empty;
  CHECK_THROWS_WITH(laplacian_lambda2(empty), "empty graph");
  Graph one;
  one.add_vertex(0);
  CHECK_THROWS(laplacian_lambda2(one));
}

TEST_CASE("isoperimetric constant reference values") {
  CHECK(isoperimetric_exact(single_edge()) == doctest::Approx(1.0));
  CHECK(isoperimetric_exact(complete(4)) == doctest::Approx(2.0));
  CHECK(isoperimetric_exact(star(3)) == doctest::Approx(1.0));
  CHECK(isoperimetric_exact(cycle(4)) == doctest::Approx(1.0));

  Graph one;
  one.add_vertex(0);
  CHECK_THROWS(isoperimetric_exact(one));
  Graph big = complete(23);
  CHECK_THROWS_WITH(isoperimetric_exact(big), "too large for exact cut enumeration");
}

TEST_CASE("conductance reference values") {
  // Connected graphs always have an admissible cut under the documented
  // volume convention, so conductance is positive.
  CHECK(conductance_exact(single_edge()) == doctest::Approx(1.0));
  CHECK(conductance_exact(complete(4)) == doctest::Approx(0.8));

  Graph two_edges;
  for (int i = 0; i < 4; ++i) two_edges.add_vertex(i);
  two_edges.add_edge(0, 1);
  two_edges.add_edge(2, 3);
  CHECK(conductance_exact(two_edges) == doctest::Approx(0.0));
}

TEST_CASE("spectral lower bound reference values") {
  Rng rng(1);
  const SpectralBound edge = spectral_lower_bound(single_edge(), rng);
  CHECK(edge.certified);
  CHECK(edge.value == doctest::Approx(0.5));
  CHECK(laplacian_lambda2(single_edge()) >= edge.value);

  const SpectralBound k4 = spectral_lower_bound(complete(4), rng);
  CHECK(k4.value == doctest::Approx(2.0 / 3.0));
  CHECK(laplacian_lambda2(complete(4)) >= k4.value);

  const SpectralBound c4 = spectral_lower_bound(cycle(4), rng);
  CHECK(c4.value == doctest::Approx(0.25));
  CHECK(laplacian_lambda2(cycle(4)) >= c4.value);
}

TEST_CASE("large graphs fall back to a sampled, uncertified bound") {
  Rng rng(123);
  Graph g = connected_erdos_renyi(40, 0.2, rng);
  const SpectralBound bound = spectral_lower_bound(g, rng);
  CHECK_FALSE(bound.certified);
  CHECK(bound.value >= 0.0);

  Graph huge;
  for (int i = 0; i < 513; ++i) huge.add_vertex(i);
  for (int i = 0; i < 512; ++i) huge.add_edge(i, i + 1);
  CHECK_THROWS_WITH(laplacian_lambda2(huge), "too large for dense eigensolver");
}

TEST_CASE("certified bound holds on random connected graphs") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 4 + rng.below(7);
    Graph g = connected_erdos_renyi(n, 0.5, rng);
    const SpectralBound bound = spectral_lower_bound(g, rng);
    REQUIRE(bound.certified);
    CHECK(laplacian_lambda2(g) >= bound.value - 1e-12);
  }
}

TEST_CASE("cut quantities agree with an independent enumeration") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.below(10);  // up to 12 vertices
    Graph g = erdos_renyi(n, 0.45, rng);
    if (trial % 3 == 0 && n >= 3) g.add_edge(0, 1);  // parallel edge exercise
    CHECK(isoperimetric_exact(g) == doctest::Approx(oracles::brute_isoperimetric(g)));
    if (g.edge_count() > 0) {
      CHECK(conductance_exact(g) == doctest::Approx(oracles::brute_conductance(g)));
    }
  }
}

TEST_CASE("lambda2 is invariant under relabeling") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    Graph g = erdos_renyi(n, 0.5, rng);
    // Relabel v -> 1000 + (v * 7 + trial) % n, a permutation when gcd(7,n)=1;
    // fall back to reversing ids otherwise.
    Graph h;
    std::vector<VertexId> relabel(n);
    for (std::size_t v = 0; v < n; ++v)
      relabel[v] = 1000 + static_cast<VertexId>(n - 1 - v);
    for (std::size_t v = 0; v < n; ++v) h.add_vertex(relabel[v]);
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        for (std::uint32_t rep = 0; rep < g.multiplicity(u, v); ++rep)
          h.add_edge(relabel[u], relabel[v]);
    CHECK(laplacian_lambda2(g) == doctest::Approx(laplacian_lambda2(h)).epsilon(1e-9));
  }
}

TEST_CASE("adding an edge never decreases lambda2") {
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + rng.below(8);
    Graph g = erdos_renyi(n, 0.4, rng);
    const double before = laplacian_lambda2(g);
    const VertexId u = rng.below(n);
    VertexId v = rng.below(n);
    if (u == v) v = (v + 1) % n;
    g.add_edge(u, v);
    CHECK(laplacian_lambda2(g) >= before - 1e-9);
  }
}

TEST_CASE("analyze summarises the graph") {
  const SpectralSummary s = analyze(complete(4));
  CHECK(s.lambda2 == doctest::Approx(4.0));
  CHECK(s.max_degree == 3);
  CHECK(s.num_vertices == 4);
  CHECK(s.num_edges == 6);
}
