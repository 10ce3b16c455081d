#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include "connesdist/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "test_util.hpp"

using namespace connesdist;
using testutil::random_graph;

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_estimate_invariants(const NormEstimate& est) {
  CHECK(est.lower_bound == est.value);
  CHECK(est.value <= est.upper_bound + 1e-15);
  CHECK(est.residual >= 0.0);
  CHECK(est.iterations >= 1);
}

}  // namespace

TEST_CASE("path adjacency norms match the closed form") {
  for (int length = 1; length <= 8; ++length) {
    const Graph p = Graph::path(length);
    const NormEstimate est = spectral_norm(adjacency_op(p));
    const double expected = 2.0 * std::cos(kPi / (length + 2));
    CHECK(std::abs(est.value - expected) <= 1e-8);
    check_estimate_invariants(est);
  }
}

TEST_CASE("cycle adjacency norm is 2") {
  for (int length = 3; length <= 6; ++length) {
    const NormEstimate est = spectral_norm(adjacency_op(Graph::cycle(length)));
    CHECK(std::abs(est.value - 2.0) <= 1e-9);
  }
}

TEST_CASE("square operator norms take their known values") {
  const Graph sq = Graph::cycle(4);

  CHECK(std::abs(spectral_norm(adjacency_op(sq)).value - 2.0) <= 1e-9);
  // laplacian spectrum {0,-2,-2,-4}
  CHECK(std::abs(spectral_norm(laplacian_op(sq)).value - 4.0) <= 1e-8);
  // d*d = -2*laplacian has top eigenvalue 8
  CHECK(std::abs(spectral_norm(gram(coboundary_op(sq))).value - 8.0) <= 1e-7);
  CHECK(std::abs(operator_norm(coboundary_op(sq)).value - std::sqrt(8.0)) <= 1e-8);
  CHECK(std::abs(spectral_norm(dirac_op(sq)).value - std::sqrt(8.0)) <= 1e-8);
}

TEST_CASE("operator norm agrees with spectral norm on self-adjoint input") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 4; ++t) {
    const Graph g = random_graph(rng, 9, false);
    const GraphOperator a = adjacency_sym_op(g);
    const double s = spectral_norm(a).value;
    const double o = operator_norm(a).value;
    CHECK(std::abs(s - o) <= 1e-8 * (1.0 + s));
  }
}

TEST_CASE("operator norm handles maps between different spaces") {
  // Lifts on the undirected two-edge path: T*T = diag of degrees (1,2,1).
  const Graph p = Graph::path(2);
  CHECK(std::abs(operator_norm(target_lift_op(p)).value - std::sqrt(2.0)) <= 1e-8);
  CHECK(std::abs(operator_norm(source_lift_op(p)).value - std::sqrt(2.0)) <= 1e-8);
}

TEST_CASE("spectral norm rejects non-self-adjoint operators") {
  CHECK_THROWS_AS(spectral_norm(coboundary_op(Graph::path(2))), std::invalid_argument);
  CHECK_THROWS_AS(spectral_norm(adjacency_out_op(Graph::directed_path(3))),
                  std::invalid_argument);
  CHECK_THROWS_AS(spectral_norm(target_lift_op(Graph::path(2))), std::invalid_argument);
}

TEST_CASE("adjacency norm bounds bracket the true norm") {
  const auto [sq_lo, sq_hi] = adjacency_norm_bounds(Graph::cycle(4));
  CHECK(sq_lo == 2.0);
  CHECK(sq_hi == 2.0);

  const auto [p_lo, p_hi] = adjacency_norm_bounds(Graph::path(2));
  CHECK(std::abs(p_lo - 4.0 / 3.0) <= 1e-15);
  CHECK(p_hi == 2.0);

  const auto [t_lo, t_hi] = adjacency_norm_bounds(Graph::binary_tree(3));
  CHECK(std::abs(t_lo - 28.0 / 15.0) <= 1e-15);
  CHECK(t_hi == 3.0);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 6; ++t) {
    const Graph g = random_graph(rng, 10, false, true, 0.4);
    const auto [lo, hi] = adjacency_norm_bounds(g);
    const double norm = spectral_norm(adjacency_op(g)).value;
    CHECK(lo <= norm + 1e-8);
    CHECK(norm <= hi + 1e-8);
  }

  CHECK_THROWS_AS(adjacency_norm_bounds(Graph::directed_path(2)), std::invalid_argument);
}

TEST_CASE("norm exhaustion is monotone on the path family") {
  const auto family = [](int level) { return Graph::path(level); };
  const std::vector<NormEstimate> ests = norm_exhaustion(family, 6);
  REQUIRE(ests.size() == 6);
  for (int level = 1; level <= 6; ++level) {
    const double expected = 2.0 * std::cos(kPi / (level + 2));
    CHECK(std::abs(ests[static_cast<std::size_t>(level - 1)].value - expected) <= 1e-8);
  }
  for (std::size_t i = 1; i < ests.size(); ++i) {
    CHECK(ests[i].value >= ests[i - 1].value - 1e-8);
  }
}

TEST_CASE("norm exhaustion is monotone on the binary tree family") {
  const auto family = [](int level) { return Graph::binary_tree(level); };
  const std::vector<NormEstimate> ests = norm_exhaustion(family, 4);
  REQUIRE(ests.size() == 4);
  for (std::size_t i = 1; i < ests.size(); ++i) {
    CHECK(ests[i].value >= ests[i - 1].value - 1e-8);
  }
  CHECK(ests.back().value <= 3.0);
  CHECK(ests.front().value >= std::sqrt(2.0) - 1e-8);  // star on 3 nodes
}

TEST_CASE("norm exhaustion accepts a constant family") {
  const auto family = [](int) { return Graph::cycle(5); };
  const std::vector<NormEstimate> ests = norm_exhaustion(family, 3);
  REQUIRE(ests.size() == 3);
  CHECK(std::abs(ests[1].value - ests[0].value) <= 1e-12);
  CHECK(std::abs(ests[2].value - ests[0].value) <= 1e-12);
}

TEST_CASE("norm exhaustion rejects families that are not nested") {
  const auto mismatched = [](int level) {
    return level == 1 ? Graph::cycle(3) : Graph::path(3);
  };
  CHECK_THROWS_AS(norm_exhaustion(mismatched, 2), std::invalid_argument);

  const auto shrinking = [](int level) { return Graph::path(level == 1 ? 3 : 1); };
  CHECK_THROWS_AS(norm_exhaustion(shrinking, 2), std::invalid_argument);

  const auto family = [](int level) { return Graph::path(level); };
  CHECK_THROWS_AS(norm_exhaustion(family, 0), std::invalid_argument);
}
