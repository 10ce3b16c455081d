#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "connesdist/operators.hpp"

namespace connesdist {

/// Certified norm estimate. `value` is a Rayleigh quotient, hence a true lower
/// bound; `residual` is the final eigen-residual of the squared operator, and
/// `upper_bound` folds it into a matching upper estimate, so
/// lower_bound <= value <= upper_bound + residual always holds.
struct NormEstimate {
  double value = 0.0;
  long iterations = 0;
  double residual = 0.0;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
};

/// Operator norm of a self-adjoint operator by power iteration on its square
/// (deterministic seed, five random restarts, Rayleigh-Ritz acceleration).
/// Throws std::invalid_argument when the operator fails the adjointness
/// sample test.
NormEstimate spectral_norm(const GraphOperator& op, double tol = 1e-9);

/// Largest singular value of an arbitrary operator: power iteration on
/// op* after op. Agrees with spectral_norm on self-adjoint input.
NormEstimate operator_norm(const GraphOperator& op, double tol = 1e-9);

/// (average degree, max degree): certified two-sided bounds on the adjacency
/// norm of an undirected graph. Directed graphs are rejected; bound the
/// symmetric sum adjacency_sym_op instead.
std::pair<double, double> adjacency_norm_bounds(const Graph& g);

/// Adjacency norms (symmetric sum when directed) along a nested graph family;
/// family(level) for level = 1..max_level must contain family(level-1) as the
/// induced subgraph on its first nodes, otherwise std::invalid_argument.
/// The estimates are monotone nondecreasing within 10*tol.
std::vector<NormEstimate> norm_exhaustion(const std::function<Graph(int)>& family, int max_level,
                                          double tol = 1e-9);

}  // namespace connesdist
