#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "connesdist/graph.hpp"
#include "connesdist/operators.hpp"

namespace connesdist {

enum class SolveMethod { Barrier, ProjectedAscent };
enum class SolveStatus { Converged, BoundOnly, Unreachable };

std::string to_string(SolveMethod method);
std::string to_string(SolveStatus status);
SolveMethod solve_method_from_string(const std::string& name);

struct SolverConfig {
  /// Absolute objective tolerance for values up to 10, relative/10 beyond.
  double tol = 1e-8;
  /// Cap on inner iterations (Newton steps / ascent rounds).
  long max_iterations = 100000;
  SolveMethod method = SolveMethod::Barrier;
  std::uint64_t seed = 42;
};

/// Node function with commutator_norm at most 1 + 1e-9, pinned to 0 at the
/// source node of the distance query.
struct AdmissibleFunction {
  VertexVector values;
  double norm = 0.0;
};

struct DistanceResult {
  /// Supremum of f(to) - f(from) over admissible functions (infinity when
  /// the pair is support-disconnected).
  double value = 0.0;
  AdmissibleFunction certificate;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  /// BFS distance along edge orientation; nullopt when orientation-blocked.
  std::optional<int> graph_distance;
  long iterations = 0;
  /// Optimality-gap estimate at termination.
  double residual = 0.0;
  SolveStatus status = SolveStatus::Converged;
};

/// Distance between the endpoints of an isolated chain of n unit bonds:
/// 0, 1, sqrt(n^2/2) for even n, sqrt((n^2+1)/2) for odd n.
double path_closed_form(long n);

struct AprioriBounds {
  /// Objective of the best rescaled distance certificate; always attainable.
  double lower = 0.0;
  /// Jump-chain bound: closed-form chain value (undirected), oriented BFS
  /// distance (directed, when defined), support distance otherwise.
  double upper = 0.0;
  /// True when a strictly smaller optimum is guaranteed (undirected minimal
  /// path longer than one bond; directed with two distinct minimal paths of
  /// length > 1).
  bool strict_upper = false;
  std::optional<int> graph_distance;
};

/// Certified bracket for the distance; throws std::invalid_argument when the
/// pair is support-disconnected.
AprioriBounds apriori_bounds(const Graph& g, int from, int to);

/// Supremum of f(to) - f(from) over node functions with commutator_norm <= 1,
/// solved as a convex program over the per-node quadratic constraints
/// (log-barrier Newton by default, projected gradient ascent as fallback).
DistanceResult connes_distance(const Graph& g, int from, int to, const SolverConfig& cfg = {});

/// Reference value by multi-start projected coordinate ascent, independent of
/// the solver path; intended for graphs up to ~12 nodes. `budget` counts
/// restarts.
double oracle_connes_distance(const Graph& g, int from, int to, int budget = 24);

struct CheckOutcome {
  std::string name;
  bool applicable = false;
  bool passed = true;
  std::string details;
};

struct StructuralReport {
  std::vector<CheckOutcome> checks;
  bool all_passed() const;
};

/// Consistency checks of a converged result against graph surgery: minimal
/// path bound, induced-subgraph monotonicity, tree closed form, pendant
/// extension invariance, and the shortcut upper bound.
StructuralReport structural_checks(const Graph& g, int from, int to, const DistanceResult& result,
                                   const SolverConfig& cfg = {});

/// All ordered pairs; diagonal zero, UNREACHABLE preserved. `threads` > 1
/// distributes pairs over a worker pool; results are assembled by pair index
/// and do not depend on the thread count.
std::vector<std::vector<DistanceResult>> distance_matrix(const Graph& g,
                                                         const SolverConfig& cfg = {},
                                                         int threads = 1);

}  // namespace connesdist
