#include "connesdist/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace connesdist {

namespace {

using ApplyFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct PowerResult {
  double theta = 0.0;
  long iterations = 0;
  double residual = 0.0;
};

Eigen::VectorXd random_unit(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(dim);
  for (Eigen::Index i = 0; i < dim; ++i) x[i] = normal(rng);
  const double norm = x.norm();
  return norm > 0 ? Eigen::VectorXd(x / norm) : Eigen::VectorXd::Unit(dim, 0);
}

/// Largest eigenvalue of a positive semidefinite self-adjoint map by power
/// iteration, accelerated by a Rayleigh-Ritz step on span{x, Mx, x_prev}.
PowerResult power_largest(const ApplyFn& m, Eigen::Index dim, double rel_tol, long max_iterations,
                          int restarts, std::uint64_t seed) {
  PowerResult best;
  if (dim == 0) return best;
  long total = 0;
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r));
    Eigen::VectorXd x = random_unit(rng, dim);
    Eigen::VectorXd prev = Eigen::VectorXd::Zero(dim);
    bool have_prev = false;
    double theta = 0.0;
    double residual = 0.0;
    while (total < max_iterations) {
      ++total;
      const Eigen::VectorXd y = m(x);
      theta = x.dot(y);
      residual = (y - theta * x).norm();
      if (residual <= rel_tol * std::max(theta, 1e-300)) break;

      // Orthonormal basis of span{x, y, prev}, then a small Ritz problem.
      std::vector<Eigen::VectorXd> basis{x};
      auto add = [&](Eigen::VectorXd v) {
        for (const auto& b : basis) v -= b.dot(v) * b;
        const double n = v.norm();
        if (n > 1e-12) basis.push_back(v / n);
      };
      add(y);
      if (have_prev) add(prev);
      const int k = static_cast<int>(basis.size());
      if (k == 1) break;  // x is already an eigenvector
      // Apply m to each basis vector (reuse y = m(x) for the first column).
      Eigen::MatrixXd mB(dim, k);
      mB.col(0) = y;
      for (int c = 1; c < k; ++c) mB.col(c) = m(basis[c]);
      Eigen::MatrixXd t(k, k);
      for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) t(a, b) = basis[a].dot(mB.col(b));
      }
      t = 0.5 * (t + t.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      const Eigen::VectorXd top = es.eigenvectors().col(k - 1);
      Eigen::VectorXd next = Eigen::VectorXd::Zero(dim);
      for (int c = 0; c < k; ++c) next += top[c] * basis[c];
      const double nn = next.norm();
      if (nn <= 0) break;
      prev = x;
      have_prev = true;
      x = next / nn;
    }
    if (theta > best.theta || r == 0) {
      best.theta = std::max(theta, 0.0);
      best.residual = residual;
    }
  }
  best.iterations = total;
  return best;
}

NormEstimate norm_from_square(const ApplyFn& square, Eigen::Index dim, double tol) {
  const double rel = std::clamp(0.01 * tol, 1e-14, 1e-6);
  const PowerResult p = power_largest(square, dim, rel, 100000, 5, 42);
  NormEstimate est;
  est.value = std::sqrt(std::max(p.theta, 0.0));
  est.iterations = p.iterations;
  est.residual = p.residual;
  est.lower_bound = est.value;
  est.upper_bound = std::sqrt(std::max(p.theta + p.residual, 0.0));
  return est;
}

void check_adjointness(const GraphOperator& op) {
  if (op.domain() != op.codomain() || op.domain_dim() != op.codomain_dim()) {
    throw std::invalid_argument(op.name() + " is not self-adjoint: domain differs from codomain");
  }
  std::mt19937_64 rng(42);
  for (int i = 0; i < 5; ++i) {
    const Eigen::VectorXd x = random_unit(rng, op.domain_dim());
    const Eigen::VectorXd y = random_unit(rng, op.domain_dim());
    const double a = op.apply(x).dot(y);
    const double b = x.dot(op.apply(y));
    if (std::abs(a - b) > 1e-10 * (1.0 + std::abs(a) + std::abs(b))) {
      throw std::invalid_argument(op.name() + " is not self-adjoint");
    }
  }
}

}  // namespace

NormEstimate spectral_norm(const GraphOperator& op, double tol) {
  check_adjointness(op);
  auto square = [&op](const Eigen::VectorXd& x) { return op.apply(op.apply(x)); };
  return norm_from_square(square, op.domain_dim(), tol);
}

NormEstimate operator_norm(const GraphOperator& op, double tol) {
  auto square = [&op](const Eigen::VectorXd& x) { return op.adjoint_apply(op.apply(x)); };
  return norm_from_square(square, op.domain_dim(), tol);
}

std::pair<double, double> adjacency_norm_bounds(const Graph& g) {
  if (g.directed()) {
    throw std::invalid_argument(
        "adjacency norm bounds hold for undirected graphs; for directed graphs bound the "
        "symmetric sum adjacency_sym_op instead");
  }
  const double average = static_cast<double>(g.edge_count()) / g.node_count();
  return {average, static_cast<double>(g.max_degree())};
}

std::vector<NormEstimate> norm_exhaustion(const std::function<Graph(int)>& family, int max_level,
                                          double tol) {
  if (max_level < 1) throw std::invalid_argument("norm exhaustion needs max_level >= 1");
  std::vector<NormEstimate> estimates;
  Graph prev = family(1);
  for (int level = 1; level <= max_level; ++level) {
    const Graph g = level == 1 ? prev : family(level);
    if (level > 1) {
      if (g.node_count() < prev.node_count() || g.directed() != prev.directed()) {
        throw std::invalid_argument("graph family is not nested at level " +
                                    std::to_string(level));
      }
      std::vector<int> head(static_cast<std::size_t>(prev.node_count()));
      for (int i = 0; i < prev.node_count(); ++i) head[static_cast<std::size_t>(i)] = i;
      const Graph induced = induced_subgraph(g, head).graph;
      auto sorted_edges = [](const Graph& gr) {
        std::vector<std::pair<int, int>> e;
        for (const NodePair& p : gr.edges()) e.emplace_back(p.source, p.target);
        std::sort(e.begin(), e.end());
        return e;
      };
      if (sorted_edges(induced) != sorted_edges(prev)) {
        throw std::invalid_argument("graph family is not nested at level " +
                                    std::to_string(level));
      }
      prev = g;
    }
    estimates.push_back(spectral_norm(adjacency_sym_op(g), tol));
  }
  return estimates;
}

}  // namespace connesdist
