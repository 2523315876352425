#pragma once

#include <cstdint>

#include "overnow/graph.hpp"

namespace overnow::spectral {

struct SpectralSummary {
  double lambda2 = 0.0;
  std::uint64_t max_degree = 0;
  std::size_t num_vertices = 0;
  std::uint64_t num_edges = 0;
};

std::uint64_t max_degree(const Graph& g);

/// Second-smallest eigenvalue of the multiplicity-weighted Laplacian
/// (L_ii = degree(i), L_ij = -multiplicity(i,j)). Dense symmetric solve,
/// capped at 512 vertices. Zero iff the graph is disconnected.
double laplacian_lambda2(const Graph& g);

SpectralSummary analyze(const Graph& g);

/// Exact isoperimetric constant: min over nonempty S with |S| <= n/2 of
/// cut(S)/|S|, cut counting edge multiplicities. Brute force, 2 <= n <= 22.
double isoperimetric_exact(const Graph& g);

/// Exact conductance under the volume convention used throughout this
/// library: e(S) counts edges with both endpoints in S plus cut edges once,
/// and the ratio denominator is min(e(S), e(complement)) so every connected
/// graph has an admissible cut. Brute force, 2 <= n <= 22.
double conductance_exact(const Graph& g);

struct SpectralBound {
  double value = 0.0;
  /// True when the isoperimetric constant was computed exactly; a sampled
  /// estimate gives an uncertified (possibly invalid) bound.
  bool certified = false;
};

/// Lower bound lambda2 >= I(G)^2 / (2 * max_degree). Exact and certified for
/// n <= 22; for larger graphs I(G) is replaced by a sampled-cut upper
/// estimate and the result is flagged uncertified.
SpectralBound spectral_lower_bound(const Graph& g, Rng& rng);

}  // namespace overnow::spectral
