#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <random>

#include "connesdist/operators.hpp"
#include "test_util.hpp"

using namespace connesdist;
using testutil::random_function;
using testutil::random_graph;

namespace {

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("coboundary takes differences along stored edges") {
  const Graph p = Graph::path(2);
  VertexVector f(3);
  f << 0, 1, 3;
  const EdgeVector df = coboundary(p, f);
  REQUIRE(df.size() == 4);
  CHECK(df[p.edge_index(0, 1)] == 1.0);
  CHECK(df[p.edge_index(1, 0)] == -1.0);
  CHECK(df[p.edge_index(1, 2)] == 2.0);
  CHECK(df[p.edge_index(2, 1)] == -2.0);

  const VertexVector c = VertexVector::Constant(3, 7.0);
  CHECK(coboundary(p, c).cwiseAbs().maxCoeff() == 0.0);
  CHECK(boundary_adjoint(p, coboundary(p, c)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boundary_adjoint is the adjoint of the coboundary") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const Graph g = random_graph(rng, 12, trial % 2 == 0);
    for (int k = 0; k < 10; ++k) {
      const VertexVector f = random_function(rng, g.node_count());
      const EdgeVector h = random_vector(rng, g.edge_count());
      const double lhs = coboundary(g, f).dot(h);
      const double rhs = f.dot(boundary_adjoint(g, h));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + f.norm() * h.norm()));
    }
  }
}

TEST_CASE("adjoint of the antisymmetric bond doubles the difference") {
  // d* b_ik = 2(n_k - n_i) for the antisymmetric bond b_ik = d_ik - d_ki.
  const Graph p = Graph::path(2);
  EdgeVector b = EdgeVector::Zero(p.edge_count());
  b[p.edge_index(1, 2)] = 1.0;
  b[p.edge_index(2, 1)] = -1.0;
  const VertexVector v = boundary_adjoint(p, b);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == -2.0);
  CHECK(v[2] == 2.0);
}

TEST_CASE("cycle indicator around the square is divergence free") {
  const Graph sq = Graph::cycle(4);
  EdgeVector b = EdgeVector::Zero(sq.edge_count());
  for (int i = 0; i < 4; ++i) {
    b[sq.edge_index(i, (i + 1) % 4)] += 1.0;
    b[sq.edge_index((i + 1) % 4, i)] -= 1.0;
  }
  CHECK(boundary_adjoint(sq, b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lift operators factor the degree and adjacency maps") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 8; ++trial) {
    const Graph g = random_graph(rng, 10, true);
    const GraphOperator tl = target_lift_op(g);
    const GraphOperator sl = source_lift_op(g);
    const VertexVector f = random_function(rng, g.node_count());

    const VertexVector vin = tl.adjoint_apply(tl.apply(f));
    const VertexVector vout = sl.adjoint_apply(sl.apply(f));
    CHECK((vin - degree_in_op(g).apply(f)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((vout - degree_out_op(g).apply(f)).cwiseAbs().maxCoeff() <= 1e-13);

    const VertexVector ain = tl.adjoint_apply(sl.apply(f));
    const VertexVector aout = sl.adjoint_apply(tl.apply(f));
    CHECK((ain - adjacency_in_op(g).apply(f)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((aout - adjacency_out_op(g).apply(f)).cwiseAbs().maxCoeff() <= 1e-13);

    // coboundary = target lift minus source lift
    if (g.edge_count() > 0) {
      const EdgeVector df = coboundary(g, f);
      CHECK((df - (tl.apply(f) - sl.apply(f))).cwiseAbs().maxCoeff() == 0.0);
    }

    // the symmetrized adjacency is self-adjoint
    const GraphOperator asym = adjacency_sym_op(g);
    const VertexVector x = random_function(rng, g.node_count());
    const VertexVector y = random_function(rng, g.node_count());
    CHECK(std::abs(asym.apply(x).dot(y) - x.dot(asym.apply(y))) <=
          1e-12 * (1.0 + x.norm() * y.norm()));
  }
}

TEST_CASE("undirected adjacency agrees with both directed variants") {
  std::mt19937_64 rng(31);
  const Graph g = random_graph(rng, 10, false);
  const VertexVector f = random_function(rng, g.node_count());
  const VertexVector a = adjacency_op(g).apply(f);
  CHECK((a - adjacency_in_op(g).apply(f)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - adjacency_out_op(g).apply(f)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((adjacency_sym_op(g).apply(f) - a).cwiseAbs().maxCoeff() == 0.0);

  const Graph d = random_graph(rng, 10, true);
  CHECK_THROWS_AS(adjacency_op(d), std::invalid_argument);
  CHECK_THROWS_AS(degree_op(d), std::invalid_argument);
}

TEST_CASE("directed path adjacency matrices have the textbook form") {
  // 0 -> 1 -> 2: rows of A_out list out-edges, rows of A_in list in-edges.
  const Graph p = Graph::directed_path(2);
  const Eigen::MatrixXd aout = adjacency_out_op(p).dense();
  const Eigen::MatrixXd ain = adjacency_in_op(p).dense();
  const Eigen::Vector3d out_deg(1, 1, 0);
  const Eigen::Vector3d in_deg(0, 1, 1);
  CHECK((aout.rowwise().sum() - out_deg).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ain.rowwise().sum() - in_deg).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ain - aout.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(aout(0, 1) == 1.0);
  CHECK(aout(1, 2) == 1.0);
}

TEST_CASE("square adjacency and degree have the textbook form") {
  const Graph sq = Graph::cycle(4);
  const Eigen::MatrixXd a = adjacency_op(sq).dense();
  CHECK(a.diagonal().cwiseAbs().maxCoeff() == 0.0);
  CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
  for (int i = 0; i < 4; ++i) CHECK(a.row(i).sum() == 2.0);
  const Eigen::MatrixXd v = degree_op(sq).dense();
  CHECK((v - 2.0 * Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian factorization holds on random graphs") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 12; ++trial) {
    const Graph g = random_graph(rng, 14, trial % 2 == 1);
    const double factor = g.directed() ? 1.0 : 2.0;
    const GraphOperator lap = laplacian_op(g);
    const GraphOperator din = degree_in_op(g);
    const GraphOperator dout = degree_out_op(g);
    const GraphOperator ain = adjacency_in_op(g);
    const GraphOperator aout = adjacency_out_op(g);
    for (int k = 0; k < 5; ++k) {
      const VertexVector f = random_function(rng, g.node_count());
      const VertexVector dd = boundary_adjoint(g, coboundary(g, f));
      CHECK((dd + factor * lap.apply(f)).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + f.norm()));
      // d*d = (V_in + V_out) - (A_in + A_out)
      const VertexVector split = din.apply(f) + dout.apply(f) - ain.apply(f) - aout.apply(f);
      CHECK((dd - split).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + f.norm()));
      CHECK(f.dot(dd) >= -1e-12 * (1.0 + f.squaredNorm()));
    }
  }
}

TEST_CASE("square laplacian spectrum is 0,2,2,4") {
  const Graph sq = Graph::cycle(4);
  const Eigen::MatrixXd neg_lap = -laplacian_op(sq).dense();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(neg_lap);
  REQUIRE(eig.info() == Eigen::Success);
  const Eigen::VectorXd ev = eig.eigenvalues();
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ev[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("dirac operator is self-adjoint and block off-diagonal") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 8; ++trial) {
    const Graph g = random_graph(rng, 10, trial % 2 == 0);
    const int n = g.node_count();
    const int m = g.edge_count();
    const GraphOperator d = dirac_op(g);

    const Eigen::VectorXd x = random_vector(rng, n + m);
    const Eigen::VectorXd y = random_vector(rng, n + m);
    CHECK(std::abs(d.apply(x).dot(y) - x.dot(d.apply(y))) <=
          1e-12 * (1.0 + x.norm() * y.norm()));

    // D (f; 0) = (0; df) and D^2 (f; 0) = (d*d f; 0)
    Eigen::VectorXd fx = Eigen::VectorXd::Zero(n + m);
    const VertexVector f = random_function(rng, n);
    fx.head(n) = f;
    const Eigen::VectorXd dfx = d.apply(fx);
    CHECK(dfx.head(n).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd ddfx = d.apply(dfx);
    CHECK((ddfx.head(n) - boundary_adjoint(g, coboundary(g, f))).cwiseAbs().maxCoeff() == 0.0);
    if (m > 0) {
      CHECK((dfx.tail(m) - coboundary(g, f)).cwiseAbs().maxCoeff() == 0.0);
      CHECK(ddfx.tail(m).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("grading anticommutes with the dirac operator and squares to one") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 6; ++trial) {
    const Graph g = random_graph(rng, 9, trial % 2 == 1);
    const GraphOperator d = dirac_op(g);
    const GraphOperator chi = grading_op(g);
    const Eigen::VectorXd x = random_vector(rng, g.node_count() + g.edge_count());
    CHECK((chi.apply(chi.apply(x)) - x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((chi.apply(d.apply(x)) + d.apply(chi.apply(x))).cwiseAbs().maxCoeff() == 0.0);

    // grading commutes with every multiplication operator
    const VertexVector f = random_function(rng, g.node_count());
    const GraphOperator mf = multiplication_op(g, f);
    CHECK((chi.apply(mf.apply(x)) - mf.apply(chi.apply(x))).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("involution conjugates and sandwiches multiplication operators") {
  const Graph g = Graph::path(2);
  const int dim = g.node_count() + g.edge_count();
  std::mt19937_64 rng(67);
  Eigen::VectorXcd x(dim);
  for (int i = 0; i < dim; ++i)
    x[i] = std::complex<double>(random_function(rng, 1)[0], random_function(rng, 1)[0]);

  CHECK((involution(involution(x)) - x).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXcd f(g.node_count());
  f << std::complex<double>(1, 2), std::complex<double>(0, -1), std::complex<double>(3, 0);
  // J f J = conj(f) as multiplication operators
  const Eigen::VectorXcd lhs = involution(multiplication_apply(g, f, involution(x)));
  const Eigen::VectorXcd rhs = multiplication_apply(g, f.conjugate(), x);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("multiplication acts by node value and by edge target value") {
  const Graph p = Graph::path(1);
  VertexVector f(2);
  f << 5, 7;
  const GraphOperator mf = multiplication_op(p, f);
  Eigen::VectorXd x(4);  // two nodes then stored edges (0,1), (1,0)
  x << 1, 1, 1, 1;
  const Eigen::VectorXd y = mf.apply(x);
  CHECK(y[0] == 5.0);
  CHECK(y[1] == 7.0);
  CHECK(y[2 + p.edge_index(0, 1)] == 7.0);
  CHECK(y[2 + p.edge_index(1, 0)] == 5.0);
}

TEST_CASE("commutator with a constant vanishes") {
  std::mt19937_64 rng(71);
  const Graph g = random_graph(rng, 8, false);
  const VertexVector c = VertexVector::Constant(g.node_count(), 4.2);
  const Eigen::VectorXd x = random_vector(rng, g.node_count() + g.edge_count());
  CHECK(commutator_apply(g, c, x).cwiseAbs().maxCoeff() == 0.0);
  CHECK(commutator_norm(g, c) == 0.0);
}

TEST_CASE("commutator on a single bond has one unit entry") {
  const Graph p = Graph::path(1);
  VertexVector f(2);
  f << 0, 1;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  x[0] = 0;
  x[1] = 1;
  const Eigen::VectorXd y = commutator_apply(p, f, x);
  // edge block carries (f_target - f_source) * x_source per stored edge
  CHECK(y[2 + p.edge_index(0, 1)] == 0.0);
  CHECK(y[2 + p.edge_index(1, 0)] == -1.0);
  CHECK(commutator_norm(p, f) == 1.0);

  // skew adjointness for real f
  std::mt19937_64 rng(73);
  const Eigen::VectorXd a = random_vector(rng, 4);
  const Eigen::VectorXd b = random_vector(rng, 4);
  const GraphOperator c = commutator_op(p, f);
  CHECK(std::abs(c.apply(a).dot(b) + a.dot(c.apply(b))) <= 1e-15);
  CHECK((c.adjoint_apply(a) + c.apply(a)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("commutator norm closed forms") {
  const Graph sq = Graph::cycle(4);
  VertexVector f(4);
  const double h = std::sqrt(0.5);
  f << 0.0, h, 2.0 * h, h;
  CHECK(commutator_norm(sq, f) == doctest::Approx(1.0).epsilon(1e-12));

  const Graph dp = Graph::directed_path(5);
  VertexVector k(6);
  for (int i = 0; i < 6; ++i) k[i] = i;
  CHECK(commutator_norm(dp, k) == doctest::Approx(1.0).epsilon(1e-12));

  // out-neighbor grouping: center of a directed out-star sums both jumps
  const Graph star = Graph::build(3, {{0, 1}, {0, 2}}, true);
  VertexVector s(3);
  s << 0, 1, 1;
  CHECK(commutator_norm(star, s) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("antisymmetrize projects onto sign-flipped edge functions") {
  const Graph p = Graph::path(2);
  std::mt19937_64 rng(79);
  const EdgeVector h = random_vector(rng, p.edge_count());
  const EdgeVector b = antisymmetrize(p, h);
  CHECK(b[p.edge_index(0, 1)] == doctest::Approx(-b[p.edge_index(1, 0)]).epsilon(1e-15));
  CHECK(b[p.edge_index(1, 2)] == doctest::Approx(-b[p.edge_index(2, 1)]).epsilon(1e-15));
  // projection: idempotent and orthogonal to the symmetric remainder
  CHECK((antisymmetrize(p, b) - b).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(std::abs((h - b).dot(b)) <= 1e-12 * (1.0 + h.squaredNorm()));
  CHECK_THROWS_AS(antisymmetrize(Graph::directed_path(2), EdgeVector::Zero(2)),
                  std::invalid_argument);
}

TEST_CASE("cycle space dimensions count independent cycles") {
  const Graph sq = Graph::cycle(4);
  const CycleSpace cs = cycle_space_dimension(sq);
  CHECK(cs.components == 1);
  CHECK(cs.range_dim == 3);
  CHECK(cs.kernel_dim == sq.edge_count() - 3);
  CHECK(antisymmetric_cycle_dimension(sq) == 1);

  const Graph tree = Graph::binary_tree(3);
  CHECK(antisymmetric_cycle_dimension(tree) == 0);

  const Graph two = Graph::build(4, {{0, 1}, {2, 3}}, false);
  const CycleSpace cs2 = cycle_space_dimension(two);
  CHECK(cs2.components == 2);
  CHECK(cs2.kernel_dim == cs2.components + two.edge_count() - two.node_count());

  const Graph dp = Graph::directed_path(3);
  const CycleSpace cs3 = cycle_space_dimension(dp);
  CHECK(cs3.kernel_dim == 0);
  CHECK(cs3.range_dim == 3);
}

TEST_CASE("dense materialization respects the size guard") {
  const Graph p = Graph::path(2);
  const GraphOperator d = coboundary_op(p);
  const Eigen::MatrixXd mat = d.dense();
  CHECK(mat.rows() == p.edge_count());
  CHECK(mat.cols() == p.node_count());
  VertexVector f(3);
  f << 2, -1, 0.5;
  CHECK((mat * f - coboundary(p, f)).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("scaled and gram combinators") {
  std::mt19937_64 rng(83);
  const Graph g = random_graph(rng, 8, false);
  const GraphOperator d = coboundary_op(g);
  const GraphOperator half = scaled(d, 0.5);
  const VertexVector f = random_function(rng, g.node_count());
  CHECK((half.apply(f) - 0.5 * d.apply(f)).cwiseAbs().maxCoeff() == 0.0);

  const GraphOperator dd = gram(d);
  CHECK((dd.apply(f) - boundary_adjoint(g, coboundary(g, f))).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.dot(dd.apply(f)) >= 0.0);
}
