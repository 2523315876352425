#pragma once

#include <functional>
#include <span>
#include <vector>

#include "overnow/graph.hpp"

namespace overnow::ctrw {

enum class WalkBias {
  uniform,
  /// Clock decrement scaled by a per-vertex weight (cluster size), giving a
  /// weight-proportional stationary distribution. No mixing-time guarantee
  /// is attached to this variant.
  cluster_size_weighted,
};

struct WalkBudget {
  double total_time = 0.0;
  WalkBias bias = WalkBias::uniform;
  /// Scale divisor for the weighted decrement (the squared scale parameter).
  double bias_scale = 1.0;
};

struct WalkOutcome {
  VertexId endpoint = 0;
  std::vector<VertexId> path;  // start first, endpoint last
  std::size_t hops = 0;        // path.size() - 1, always >= 1
  std::vector<double> clock_draws;
};

/// Continuous-time random walk. The walk makes one forced move before the
/// clock is first consulted, then repeatedly draws U in (0,1), decrements the
/// remaining time by log(1/U)/degree (or the weighted variant), and stops at
/// the vertex where the decrement crosses zero.
WalkOutcome ctrw_sample(const Graph& g, VertexId start, const WalkBudget& budget, Rng& rng,
                        const std::function<double(VertexId)>& vertex_weight = {});

/// log^2(n) / lambda2, natural-log convention. `n` may be fractional.
double mixing_budget(double n, double lambda2);

/// Walk budget for the maintained overlay: the certified expansion floor
/// lambda2 >= 1/8 gives 8 * scale^2.
double overlay_walk_budget(int scale);

/// Row of exp(t*Q) for the walk generator Q = -L, i.e. the exact position
/// distribution at time t for a walk started at `start`. Entries follow
/// g.vertices() order. Requires a connected graph with at most 512 vertices.
std::vector<double> exact_walk_distribution(const Graph& g, VertexId start, double t);

/// Total-variation distance between probability vectors of equal length.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace overnow::ctrw
