#include "connesdist/operators.hpp"

#include <Eigen/SVD>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace connesdist {

namespace {

std::shared_ptr<const Graph> snapshot(const Graph& g) { return std::make_shared<Graph>(g); }

void check_dim(const char* name, Eigen::Index expected, Eigen::Index got) {
  if (expected != got) {
    throw std::invalid_argument(std::string(name) + ": vector has dimension " +
                                std::to_string(got) + ", expected " + std::to_string(expected));
  }
}

}  // namespace

Eigen::Index space_dim(const Graph& g, Space s) {
  switch (s) {
    case Space::H0:
      return g.node_count();
    case Space::H1:
      return g.edge_count();
    case Space::Full:
      return g.node_count() + g.edge_count();
  }
  throw std::logic_error("unknown space");
}

struct GraphOperator::State {
  std::string name;
  Space domain;
  Space codomain;
  Eigen::Index domain_dim;
  Eigen::Index codomain_dim;
  Apply apply;
  Apply adjoint_apply;
  mutable std::mutex dense_mutex;
  mutable std::unique_ptr<Eigen::MatrixXd> dense;
};

GraphOperator::GraphOperator(std::string name, Space domain, Space codomain,
                             Eigen::Index domain_dim, Eigen::Index codomain_dim, Apply apply,
                             Apply adjoint_apply)
    : state_(std::make_shared<State>()) {
  state_->name = std::move(name);
  state_->domain = domain;
  state_->codomain = codomain;
  state_->domain_dim = domain_dim;
  state_->codomain_dim = codomain_dim;
  state_->apply = std::move(apply);
  state_->adjoint_apply = std::move(adjoint_apply);
}

const std::string& GraphOperator::name() const { return state_->name; }
Space GraphOperator::domain() const { return state_->domain; }
Space GraphOperator::codomain() const { return state_->codomain; }
Eigen::Index GraphOperator::domain_dim() const { return state_->domain_dim; }
Eigen::Index GraphOperator::codomain_dim() const { return state_->codomain_dim; }

Eigen::VectorXd GraphOperator::apply(const Eigen::VectorXd& x) const {
  check_dim(state_->name.c_str(), state_->domain_dim, x.size());
  return state_->apply(x);
}

Eigen::VectorXd GraphOperator::adjoint_apply(const Eigen::VectorXd& y) const {
  check_dim(state_->name.c_str(), state_->codomain_dim, y.size());
  return state_->adjoint_apply(y);
}

Eigen::VectorXcd GraphOperator::apply(const Eigen::VectorXcd& x) const {
  check_dim(state_->name.c_str(), state_->domain_dim, x.size());
  const Eigen::VectorXd re = state_->apply(x.real());
  const Eigen::VectorXd im = state_->apply(x.imag());
  return re + std::complex<double>(0, 1) * im;
}

Eigen::VectorXcd GraphOperator::adjoint_apply(const Eigen::VectorXcd& y) const {
  check_dim(state_->name.c_str(), state_->codomain_dim, y.size());
  const Eigen::VectorXd re = state_->adjoint_apply(y.real());
  const Eigen::VectorXd im = state_->adjoint_apply(y.imag());
  return re + std::complex<double>(0, 1) * im;
}

const Eigen::MatrixXd& GraphOperator::dense() const {
  std::lock_guard<std::mutex> lock(state_->dense_mutex);
  if (!state_->dense) {
    if (state_->domain_dim > kDenseLimit || state_->codomain_dim > kDenseLimit) {
      throw std::length_error(state_->name + ": dense materialization above " +
                              std::to_string(kDenseLimit));
    }
    auto m = std::make_unique<Eigen::MatrixXd>(state_->codomain_dim, state_->domain_dim);
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(state_->domain_dim);
    for (Eigen::Index j = 0; j < state_->domain_dim; ++j) {
      basis[j] = 1.0;
      m->col(j) = state_->apply(basis);
      basis[j] = 0.0;
    }
    state_->dense = std::move(m);
  }
  return *state_->dense;
}

EdgeVector coboundary(const Graph& g, const VertexVector& f) {
  check_dim("coboundary", g.node_count(), f.size());
  EdgeVector h(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    h[e] = f[p.target] - f[p.source];
  }
  return h;
}

VertexVector boundary_adjoint(const Graph& g, const EdgeVector& h) {
  check_dim("boundary_adjoint", g.edge_count(), h.size());
  VertexVector f = VertexVector::Zero(g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    f[p.target] += h[e];
    f[p.source] -= h[e];
  }
  return f;
}

GraphOperator coboundary_op(const Graph& g) {
  auto gp = snapshot(g);
  return GraphOperator(
      "coboundary", Space::H0, Space::H1, g.node_count(), g.edge_count(),
      [gp](const Eigen::VectorXd& f) { return coboundary(*gp, f); },
      [gp](const Eigen::VectorXd& h) { return boundary_adjoint(*gp, h); });
}

GraphOperator target_lift_op(const Graph& g) {
  auto gp = snapshot(g);
  return GraphOperator(
      "target_lift", Space::H0, Space::H1, g.node_count(), g.edge_count(),
      [gp](const Eigen::VectorXd& f) {
        EdgeVector h(gp->edge_count());
        for (int e = 0; e < gp->edge_count(); ++e) h[e] = f[gp->edge(e).target];
        return h;
      },
      [gp](const Eigen::VectorXd& h) {
        VertexVector f = VertexVector::Zero(gp->node_count());
        for (int e = 0; e < gp->edge_count(); ++e) f[gp->edge(e).target] += h[e];
        return f;
      });
}

GraphOperator source_lift_op(const Graph& g) {
  auto gp = snapshot(g);
  return GraphOperator(
      "source_lift", Space::H0, Space::H1, g.node_count(), g.edge_count(),
      [gp](const Eigen::VectorXd& f) {
        EdgeVector h(gp->edge_count());
        for (int e = 0; e < gp->edge_count(); ++e) h[e] = f[gp->edge(e).source];
        return h;
      },
      [gp](const Eigen::VectorXd& h) {
        VertexVector f = VertexVector::Zero(gp->node_count());
        for (int e = 0; e < gp->edge_count(); ++e) f[gp->edge(e).source] += h[e];
        return f;
      });
}

namespace {

// n_i -> sum over in-neighbors when by_target, out-neighbors otherwise;
// both are realized by one pass over the stored edges.
Eigen::VectorXd neighbor_sum(const Graph& g, const Eigen::VectorXd& f, bool toward_target) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.node_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    if (toward_target) {
      out[p.target] += f[p.source];
    } else {
      out[p.source] += f[p.target];
    }
  }
  return out;
}

GraphOperator diagonal_op(const Graph& g, std::string name, Eigen::VectorXd diag) {
  auto d = std::make_shared<Eigen::VectorXd>(std::move(diag));
  auto apply = [d](const Eigen::VectorXd& f) -> Eigen::VectorXd { return d->cwiseProduct(f); };
  return GraphOperator(std::move(name), Space::H0, Space::H0, g.node_count(), g.node_count(),
                       apply, apply);
}

}  // namespace

GraphOperator adjacency_out_op(const Graph& g) {
  auto gp = snapshot(g);
  // (A_out f)_i sums f over out-neighbors of i; rows of the matrix list each
  // node's outgoing edges. The adjoint is the in-variant.
  return GraphOperator(
      "adjacency_out", Space::H0, Space::H0, g.node_count(), g.node_count(),
      [gp](const Eigen::VectorXd& f) { return neighbor_sum(*gp, f, false); },
      [gp](const Eigen::VectorXd& f) { return neighbor_sum(*gp, f, true); });
}

GraphOperator adjacency_in_op(const Graph& g) {
  auto gp = snapshot(g);
  // (A_in f)_i sums f over in-neighbors of i.
  return GraphOperator(
      "adjacency_in", Space::H0, Space::H0, g.node_count(), g.node_count(),
      [gp](const Eigen::VectorXd& f) { return neighbor_sum(*gp, f, true); },
      [gp](const Eigen::VectorXd& f) { return neighbor_sum(*gp, f, false); });
}

GraphOperator adjacency_op(const Graph& g) {
  if (g.directed()) {
    throw std::invalid_argument(
        "adjacency of a directed graph is the in/out pair; use adjacency_in_op, "
        "adjacency_out_op, or their symmetric sum adjacency_sym_op");
  }
  auto gp = snapshot(g);
  auto apply = [gp](const Eigen::VectorXd& f) { return neighbor_sum(*gp, f, true); };
  return GraphOperator("adjacency", Space::H0, Space::H0, g.node_count(), g.node_count(), apply,
                       apply);
}

GraphOperator adjacency_sym_op(const Graph& g) {
  if (!g.directed()) return adjacency_op(g);
  auto gp = snapshot(g);
  auto apply = [gp](const Eigen::VectorXd& f) -> Eigen::VectorXd {
    return neighbor_sum(*gp, f, true) + neighbor_sum(*gp, f, false);
  };
  return GraphOperator("adjacency_sym", Space::H0, Space::H0, g.node_count(), g.node_count(),
                       apply, apply);
}

GraphOperator degree_op(const Graph& g) {
  if (g.directed()) {
    throw std::invalid_argument(
        "degree of a directed graph is the in/out pair; use degree_in_op or degree_out_op");
  }
  Eigen::VectorXd diag(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) diag[i] = g.degree(i);
  return diagonal_op(g, "degree", std::move(diag));
}

GraphOperator degree_in_op(const Graph& g) {
  Eigen::VectorXd diag(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) diag[i] = g.in_degree(i);
  return diagonal_op(g, "degree_in", std::move(diag));
}

GraphOperator degree_out_op(const Graph& g) {
  Eigen::VectorXd diag(g.node_count());
  for (int i = 0; i < g.node_count(); ++i) diag[i] = g.out_degree(i);
  return diagonal_op(g, "degree_out", std::move(diag));
}

GraphOperator laplacian_op(const Graph& g) {
  auto gp = snapshot(g);
  // Undirected: A - V. Directed: (A_in + A_out) - (V_in + V_out); the
  // undirected case is the directed formula halved because both orientations
  // are stored.
  const double half = g.directed() ? 1.0 : 0.5;
  auto apply = [gp, half](const Eigen::VectorXd& f) -> Eigen::VectorXd {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(gp->node_count());
    for (int e = 0; e < gp->edge_count(); ++e) {
      const NodePair& p = gp->edge(e);
      out[p.source] += f[p.target] - f[p.source];
      out[p.target] += f[p.source] - f[p.target];
    }
    return half * out;
  };
  return GraphOperator("laplacian", Space::H0, Space::H0, g.node_count(), g.node_count(), apply,
                       apply);
}

GraphOperator dirac_op(const Graph& g) {
  auto gp = snapshot(g);
  const Eigen::Index n = g.node_count();
  const Eigen::Index m = g.edge_count();
  auto apply = [gp, n, m](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out(n + m);
    out.head(n) = boundary_adjoint(*gp, x.tail(m));
    out.tail(m) = coboundary(*gp, x.head(n));
    return out;
  };
  return GraphOperator("dirac", Space::Full, Space::Full, n + m, n + m, apply, apply);
}

GraphOperator grading_op(const Graph& g) {
  const Eigen::Index n = g.node_count();
  const Eigen::Index m = g.edge_count();
  auto apply = [n, m](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out(n + m);
    out.head(n) = x.head(n);
    out.tail(m) = -x.tail(m);
    return out;
  };
  return GraphOperator("grading", Space::Full, Space::Full, n + m, n + m, apply, apply);
}

Eigen::VectorXcd involution(const Eigen::VectorXcd& x) { return x.conjugate(); }

GraphOperator multiplication_op(const Graph& g, const VertexVector& f) {
  check_dim("multiplication", g.node_count(), f.size());
  auto gp = snapshot(g);
  auto fp = std::make_shared<VertexVector>(f);
  const Eigen::Index n = g.node_count();
  const Eigen::Index m = g.edge_count();
  auto apply = [gp, fp, n, m](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    Eigen::VectorXd out(n + m);
    out.head(n) = fp->cwiseProduct(x.head(n));
    for (int e = 0; e < gp->edge_count(); ++e) {
      out[n + e] = (*fp)[gp->edge(e).target] * x[n + e];
    }
    return out;
  };
  return GraphOperator("multiplication", Space::Full, Space::Full, n + m, n + m, apply, apply);
}

Eigen::VectorXcd multiplication_apply(const Graph& g, const Eigen::VectorXcd& f,
                                      const Eigen::VectorXcd& x) {
  check_dim("multiplication", g.node_count(), f.size());
  check_dim("multiplication", g.node_count() + g.edge_count(), x.size());
  const Eigen::Index n = g.node_count();
  Eigen::VectorXcd out(x.size());
  out.head(n) = f.cwiseProduct(x.head(n));
  for (int e = 0; e < g.edge_count(); ++e) {
    out[n + e] = f[g.edge(e).target] * x[n + e];
  }
  return out;
}

Eigen::VectorXd commutator_apply(const Graph& g, const VertexVector& f, const Eigen::VectorXd& x) {
  check_dim("commutator", g.node_count(), f.size());
  check_dim("commutator", g.node_count() + g.edge_count(), x.size());
  const Eigen::Index n = g.node_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    const double diff = f[p.target] - f[p.source];
    out[n + e] = diff * x[p.source];      // [d, f] block
    out[p.source] -= diff * x[n + e];     // [d*, f] block
  }
  return out;
}

GraphOperator commutator_op(const Graph& g, const VertexVector& f) {
  check_dim("commutator", g.node_count(), f.size());
  auto gp = snapshot(g);
  auto fp = std::make_shared<VertexVector>(f);
  const Eigen::Index dim = g.node_count() + g.edge_count();
  return GraphOperator(
      "commutator", Space::Full, Space::Full, dim, dim,
      [gp, fp](const Eigen::VectorXd& x) { return commutator_apply(*gp, *fp, x); },
      [gp, fp](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        // [D, f] is skew-adjoint for real f.
        return -commutator_apply(*gp, *fp, x);
      });
}

double commutator_norm(const Graph& g, const VertexVector& f) {
  check_dim("commutator_norm", g.node_count(), f.size());
  double best = 0.0;
  for (int i = 0; i < g.node_count(); ++i) {
    double sum = 0.0;
    for (int e : g.out_edges(i)) {
      const double diff = f[g.edge(e).target] - f[i];
      sum += diff * diff;
    }
    best = std::max(best, sum);
  }
  return std::sqrt(best);
}

EdgeVector antisymmetrize(const Graph& g, const EdgeVector& h) {
  if (g.directed()) {
    throw std::invalid_argument("antisymmetrize is defined on undirected graphs only");
  }
  check_dim("antisymmetrize", g.edge_count(), h.size());
  EdgeVector out(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    const int rev = g.edge_index(p.target, p.source);
    out[e] = 0.5 * (h[e] - h[rev]);
  }
  return out;
}

GraphOperator scaled(const GraphOperator& op, double factor) {
  return GraphOperator(
      op.name() + "_scaled", op.domain(), op.codomain(), op.domain_dim(), op.codomain_dim(),
      [op, factor](const Eigen::VectorXd& x) -> Eigen::VectorXd { return factor * op.apply(x); },
      [op, factor](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        return factor * op.adjoint_apply(y);
      });
}

GraphOperator gram(const GraphOperator& op) {
  auto apply = [op](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return op.adjoint_apply(op.apply(x));
  };
  return GraphOperator(op.name() + "_gram", op.domain(), op.domain(), op.domain_dim(),
                       op.domain_dim(), apply, apply);
}

namespace {

Eigen::Index numerical_rank(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd sv = svd.singularValues();
  if (sv.size() == 0 || sv[0] <= 0.0) return 0;
  const double cutoff = 1e-9 * sv[0];
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) ++rank;
  }
  return rank;
}

}  // namespace

CycleSpace cycle_space_dimension(const Graph& g) {
  const Eigen::MatrixXd d = coboundary_op(g).dense();
  const Eigen::Index rank = numerical_rank(d);
  return {g.edge_count() - rank, rank, component_count(g)};
}

Eigen::Index antisymmetric_cycle_dimension(const Graph& g) {
  if (g.directed()) {
    throw std::invalid_argument("antisymmetric cycle dimension needs an undirected graph");
  }
  // Columns are d* of the antisymmetric bond basis (one per bond).
  const Eigen::Index bonds = g.edge_count() / 2;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(g.node_count(), bonds);
  Eigen::Index col = 0;
  for (int e = 0; e < g.edge_count(); ++e) {
    const NodePair& p = g.edge(e);
    if (g.edge_index(p.target, p.source) < e) continue;
    m(p.target, col) += 2.0;
    m(p.source, col) -= 2.0;
    ++col;
  }
  return bonds - numerical_rank(m);
}

void write_triplets(const GraphOperator& op, std::ostream& out) {
  const Eigen::MatrixXd& m = op.dense();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (m(r, c) != 0.0) out << r << " " << c << " " << m(r, c) << "\n";
    }
  }
}

}  // namespace connesdist
