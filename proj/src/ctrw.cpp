#include "overnow/ctrw.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <stdexcept>

namespace overnow::ctrw {

WalkOutcome ctrw_sample(const Graph& g, VertexId start, const WalkBudget& budget, Rng& rng,
                        const std::function<double(VertexId)>& vertex_weight) {
  if (budget.total_time <= 0.0) throw std::invalid_argument("walk budget must be positive");
  if (!g.has_vertex(start)) throw std::invalid_argument("unknown vertex");
  if (g.degree(start) == 0) throw std::runtime_error("isolated vertex");
  if (budget.bias == WalkBias::cluster_size_weighted && !vertex_weight)
    throw std::invalid_argument("weighted walk needs a vertex weight");

  WalkOutcome out;
  out.path.push_back(start);
  VertexId current = g.random_neighbor(start, rng);
  out.path.push_back(current);

  double remaining = budget.total_time;
  while (true) {
    const double u = rng.open01();
    out.clock_draws.push_back(u);
    const double deg = static_cast<double>(g.degree(current));
    double decrement = std::log(1.0 / u) / deg;
    if (budget.bias == WalkBias::cluster_size_weighted) {
      decrement = std::log(1.0 / u) * vertex_weight(current) / (deg * budget.bias_scale);
    }
    remaining -= decrement;
    if (remaining <= 0.0) break;
    current = g.random_neighbor(current, rng);
    out.path.push_back(current);
  }
  out.endpoint = current;
  out.hops = out.path.size() - 1;
  return out;
}

double mixing_budget(double n, double lambda2) {
  if (n < 2.0) throw std::invalid_argument("need at least two vertices");
  if (lambda2 <= 0.0) throw std::invalid_argument("disconnected graph has no mixing time");
  const double ln_n = std::log(n);
  return ln_n * ln_n / lambda2;
}

double overlay_walk_budget(int scale) {
  if (scale < 1) throw std::invalid_argument("scale must be positive");
  return 8.0 * static_cast<double>(scale) * static_cast<double>(scale);
}

std::vector<double> exact_walk_distribution(const Graph& g, VertexId start, double t) {
  if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
  if (g.vertex_count() == 0) throw std::invalid_argument("empty graph");
  if (g.vertex_count() > 512) throw std::invalid_argument("too large for dense eigensolver");
  if (!g.connected()) throw std::invalid_argument("graph not connected");

  const std::vector<VertexId> verts = g.vertices();
  const std::size_t n = verts.size();
  std::map<VertexId, int> index;
  for (std::size_t i = 0; i < n; ++i) index[verts[i]] = static_cast<int>(i);
  auto it = index.find(start);
  if (it == index.end()) throw std::invalid_argument("unknown vertex");

  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    lap(i, i) = static_cast<double>(g.degree(verts[i]));
    for (const Graph::AdjEntry& e : g.neighbors(verts[i]))
      lap(i, index.at(e.to)) = -static_cast<double>(e.count);
  }

  // exp(-tL) via the symmetric eigendecomposition.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Eigen::VectorXd decay = (-t * solver.eigenvalues().array()).exp();
  Eigen::VectorXd e_start = Eigen::VectorXd::Zero(n);
  e_start(it->second) = 1.0;
  Eigen::VectorXd psi =
      solver.eigenvectors() * (decay.asDiagonal() * (solver.eigenvectors().transpose() * e_start));

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::max(0.0, psi(i));
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::abs(p[i] - q[i]);
  return 0.5 * sum;
}

}  // namespace overnow::ctrw
