#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>

#include "connesdist/graph.hpp"

namespace connesdist {

/// Functions on nodes (indexed by node id) and on stored edges (indexed by
/// stored edge id). Both live in real coordinates; complex arguments go
/// through the complex apply overloads, which split into real and imaginary
/// parts (every operator here has a real matrix).
using VertexVector = Eigen::VectorXd;
using EdgeVector = Eigen::VectorXd;

/// H0 = node space, H1 = edge space, Full = H0 (+) H1 with the H0 block first.
enum class Space { H0, H1, Full };

Eigen::Index space_dim(const Graph& g, Space s);

/// A linear map between graph Hilbert spaces, held as matrix-free apply
/// closures plus a lazily materialized dense matrix for small dimensions.
/// Value-semantic and safe for concurrent reads.
class GraphOperator {
 public:
  using Apply = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  GraphOperator(std::string name, Space domain, Space codomain, Eigen::Index domain_dim,
                Eigen::Index codomain_dim, Apply apply, Apply adjoint_apply);

  const std::string& name() const;
  Space domain() const;
  Space codomain() const;
  Eigen::Index domain_dim() const;
  Eigen::Index codomain_dim() const;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd adjoint_apply(const Eigen::VectorXd& y) const;
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;
  Eigen::VectorXcd adjoint_apply(const Eigen::VectorXcd& y) const;

  /// Dense matrix, computed once and cached; throws std::length_error above
  /// kDenseLimit in either dimension.
  const Eigen::MatrixXd& dense() const;
  static constexpr Eigen::Index kDenseLimit = 8192;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// (df)_ik = f_k - f_i on every stored edge (i,k).
EdgeVector coboundary(const Graph& g, const VertexVector& f);
/// Adjoint of the coboundary: (d*h)_j = sum of h over ingoing edges minus sum
/// of h over outgoing edges.
VertexVector boundary_adjoint(const Graph& g, const EdgeVector& h);

GraphOperator coboundary_op(const Graph& g);  // d : H0 -> H1

/// Lift of a node function to edges by its value at the edge target (adjoint
/// sums over ingoing edges) and at the edge source (adjoint sums over
/// outgoing edges); d = target_lift - source_lift.
GraphOperator target_lift_op(const Graph& g);
GraphOperator source_lift_op(const Graph& g);

GraphOperator adjacency_op(const Graph& g);      // undirected only
GraphOperator adjacency_in_op(const Graph& g);   // (A_in f)_i = sum of f over in-neighbors
GraphOperator adjacency_out_op(const Graph& g);  // (A_out f)_i = sum of f over out-neighbors
/// A for undirected graphs, A_in + A_out (symmetric) for directed ones.
GraphOperator adjacency_sym_op(const Graph& g);

GraphOperator degree_op(const Graph& g);  // undirected only
GraphOperator degree_in_op(const Graph& g);
GraphOperator degree_out_op(const Graph& g);

/// Laplacian with the sign fixed by d*d = -2*laplacian (undirected) and
/// d*d = -laplacian (directed); nonpositive spectrum either way.
GraphOperator laplacian_op(const Graph& g);

/// D = [[0, d*], [d, 0]] on Full; self-adjoint.
GraphOperator dirac_op(const Graph& g);

/// Grading: +1 on the H0 block, -1 on the H1 block; anticommutes with D.
GraphOperator grading_op(const Graph& g);

/// Entrywise complex conjugation on Full (the antilinear involution).
Eigen::VectorXcd involution(const Eigen::VectorXcd& x);

/// Node function acting by multiplication: by f_i on H0 and by the value at
/// the edge target on H1. Commutes with the grading.
GraphOperator multiplication_op(const Graph& g, const VertexVector& f);
Eigen::VectorXcd multiplication_apply(const Graph& g, const Eigen::VectorXcd& f,
                                      const Eigen::VectorXcd& x);

/// [D, f] on Full: the H1 block carries (f_k - f_i) x_i per edge (i,k), the H0
/// block carries -sum over outgoing edges (j,k) of (f_k - f_j) y_jk.
GraphOperator commutator_op(const Graph& g, const VertexVector& f);
Eigen::VectorXd commutator_apply(const Graph& g, const VertexVector& f, const Eigen::VectorXd& x);

/// Operator norm of [D, f] in closed form: max over nodes of the root sum of
/// squares of f-differences to out-neighbors (= all neighbors when
/// undirected). Nodes without outgoing edges contribute nothing.
double commutator_norm(const Graph& g, const VertexVector& f);

/// Orthogonal projection of an edge function onto the antisymmetric part,
/// (h_ik - h_ki)/2 per stored edge. Undirected graphs only.
EdgeVector antisymmetrize(const Graph& g, const EdgeVector& h);

GraphOperator scaled(const GraphOperator& op, double factor);
/// op* after op; self-adjoint and positive on the domain of op.
GraphOperator gram(const GraphOperator& op);

struct CycleSpace {
  Eigen::Index kernel_dim;  // dim Ker(d*) inside H1
  Eigen::Index range_dim;   // dim Rg(d) = rank of d
  int components;           // undirected-support components
};

/// Numerical-rank computation (SVD, relative cutoff 1e-9) of the coboundary.
/// kernel_dim always equals edge_count - (node_count - components).
CycleSpace cycle_space_dimension(const Graph& g);

/// dim of Ker(d*) restricted to the antisymmetric edge subspace; undirected
/// graphs only (bond count - (node_count - components), zero on trees).
Eigen::Index antisymmetric_cycle_dimension(const Graph& g);

/// Nonzero entries of the dense matrix as "row col value" lines.
void write_triplets(const GraphOperator& op, std::ostream& out);

}  // namespace connesdist
