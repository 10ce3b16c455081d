#include "connesdist/connes.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <queue>
#include <random>
#include <stdexcept>
#include <thread>
#include <utility>

namespace connesdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Args>
std::string fmt(const char* pattern, Args... args) {
  char buf[320];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return std::string(buf);
}

/// One quadratic constraint sum_{k in targets} (f_k - f_node)^2 <= 1.
struct StarConstraint {
  int node = 0;
  std::vector<int> targets;
};

std::vector<StarConstraint> build_constraints(const Graph& g) {
  std::vector<StarConstraint> cs;
  for (int u = 0; u < g.node_count(); ++u) {
    const auto& out = g.out_edges(u);
    if (out.empty()) continue;
    StarConstraint c;
    c.node = u;
    c.targets.reserve(out.size());
    for (int e : out) c.targets.push_back(g.edge(e).target);
    cs.push_back(std::move(c));
  }
  return cs;
}

double eval_constraint(const StarConstraint& c, const Eigen::VectorXd& f) {
  double q = 0.0;
  for (int k : c.targets) {
    const double d = f[k] - f[c.node];
    q += d * d;
  }
  return q;
}

double star_norm(const std::vector<StarConstraint>& cs, const Eigen::VectorXd& f) {
  double worst = 0.0;
  for (const auto& c : cs) worst = std::max(worst, eval_constraint(c, f));
  return std::sqrt(worst);
}

/// BFS distances toward `root` along reversed edge orientation (-1 when the
/// root is unreachable).
std::vector<int> distances_into(const Graph& g, int root) {
  std::vector<int> dist(g.node_count(), -1);
  std::queue<int> frontier;
  dist[root] = 0;
  frontier.push(root);
  while (!frontier.empty()) {
    const int u = frontier.front();
    frontier.pop();
    for (int e : g.in_edges(u)) {
      const int v = g.edge(e).source;
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        frontier.push(v);
      }
    }
  }
  return dist;
}

/// One shortest oriented path as a node sequence, or empty when unreachable.
std::vector<int> one_minimal_path(const Graph& g, int from, int to) {
  std::vector<int> parent(g.node_count(), -2);
  std::queue<int> frontier;
  parent[from] = -1;
  frontier.push(from);
  while (!frontier.empty() && parent[to] == -2) {
    const int u = frontier.front();
    frontier.pop();
    for (int e : g.out_edges(u)) {
      const int v = g.edge(e).target;
      if (parent[v] == -2) {
        parent[v] = u;
        frontier.push(v);
      }
    }
  }
  if (parent[to] == -2) return {};
  std::vector<int> path;
  for (int u = to; u != -1; u = parent[u]) path.push_back(u);
  std::reverse(path.begin(), path.end());
  return path;
}

struct BoundData {
  AprioriBounds bounds;
  Eigen::VectorXd best_certificate;  // gauge f[from] = 0, norm <= 1
};

BoundData compute_bounds(const Graph& g, int from, int to) {
  BoundData out;
  out.best_certificate = Eigen::VectorXd::Zero(g.node_count());
  AprioriBounds& b = out.bounds;
  b.graph_distance = graph_distance(g, from, to);

  const auto dsup = support_distances_from(g, from);
  const int sd = dsup[to];
  if (g.directed()) {
    // Every support edge caps the jump across it through its source star,
    // so any support path of sd edges bounds the objective by sd. For
    // oriented reachability sd <= graph distance, so this dominates.
    b.upper = static_cast<double>(sd);
    b.strict_upper = b.graph_distance && *b.graph_distance > 1 &&
                     count_minimal_paths(g, from, to) >= 2;
  } else {
    // A minimal path is an isolated chain after dropping edges, and dropping
    // edges only enlarges the admissible set.
    b.upper = path_closed_form(*b.graph_distance);
    b.strict_upper = *b.graph_distance > 1;
  }

  // Lower bounds from explicit admissible functions: rescale each candidate
  // by its commutator norm, keep the best objective.
  std::vector<Eigen::VectorXd> candidates;
  const int n = g.node_count();
  {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int u = 0; u < n; ++u)
      if (dsup[u] >= 0) f[u] = dsup[u];
    candidates.push_back(std::move(f));
  }
  {
    const auto dto = support_distances_from(g, to);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int u = 0; u < n; ++u)
      if (dto[u] >= 0) f[u] = -dto[u];
    candidates.push_back(std::move(f));
  }
  if (g.directed() && b.graph_distance) {
    const int cap = *b.graph_distance;
    const auto dfwd = distances_from(g, from);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    for (int u = 0; u < n; ++u)
      if (dsup[u] >= 0) f[u] = dfwd[u] >= 0 ? std::min(dfwd[u], cap) : cap;
    candidates.push_back(std::move(f));
    const auto drev = distances_into(g, to);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(n);
    for (int u = 0; u < n; ++u)
      if (dsup[u] >= 0) h[u] = drev[u] >= 0 ? -std::min(drev[u], cap) : -cap;
    candidates.push_back(std::move(h));
  }
  {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    f[to] = 1.0;
    candidates.push_back(std::move(f));
  }

  b.lower = 0.0;
  for (auto& f : candidates) {
    const double objective = f[to] - f[from];
    if (objective <= 0) continue;
    const double nu = commutator_norm(g, f);
    if (nu <= 1e-15) continue;
    const double value = objective / nu;
    if (value > b.lower) {
      b.lower = value;
      f /= nu;
      f.array() -= f[from];
      out.best_certificate = f;
    }
  }
  return out;
}

struct LocalSolve {
  Eigen::VectorXd f;  // local node values with f[s] == 0
  double value = 0.0;
  long iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

/// Log-barrier interior-point solve of
///   maximize f[t]  subject to  q_i(f) <= 1,  f[s] = 0
/// on a support-connected graph. Newton centering with feasibility-guarded
/// backtracking; the barrier weight drops tenfold per round until the duality
/// gap estimate (constraint count times weight) clears the tolerance.
LocalSolve barrier_solve(const Graph& g, int s, int t, const SolverConfig& cfg,
                         double upper_hint) {
  const int n = g.node_count();
  const auto cs = build_constraints(g);
  const int m = static_cast<int>(cs.size());
  LocalSolve out;
  out.f = Eigen::VectorXd::Zero(n);
  if (m == 0 || n < 2) {
    out.converged = true;
    return out;
  }

  std::vector<int> var_of(n, -1);
  {
    int next = 0;
    for (int u = 0; u < n; ++u)
      if (u != s) var_of[u] = next++;
  }
  const int nv = n - 1;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  double mu = 1.0;

  const auto phi = [&](const Eigen::VectorXd& fv) {
    double total = -fv[t];
    for (const auto& c : cs) {
      const double slack = 1.0 - eval_constraint(c, fv);
      if (slack <= 0) return kInf;
      total -= mu * std::log(slack);
    }
    return total;
  };

  const double scale_ref = std::max(1.0, upper_hint / 10.0);
  const double gap_target = std::max(0.3 * cfg.tol * scale_ref, 1e-14);

  long iters = 0;
  bool hit_cap = false;
  Eigen::VectorXd grad(nv), dz(nv), dfull(n);
  Eigen::MatrixXd hess(nv, nv);
  std::vector<std::pair<int, double>> gq;  // sparse constraint gradient

  for (int round = 0; round < 400 && !hit_cap; ++round) {
    const double eps_center = std::max(1e-13, 1e-4 * mu);
    for (int step = 0; step < 500; ++step) {
      if (iters >= cfg.max_iterations) {
        hit_cap = true;
        break;
      }
      ++iters;

      grad.setZero();
      hess.setZero();
      if (var_of[t] >= 0) grad[var_of[t]] -= 1.0;
      for (const auto& c : cs) {
        const double q = eval_constraint(c, f);
        const double slack = 1.0 - q;
        const double w = mu / slack;
        gq.clear();
        double gnode = 0.0;
        const int vi = var_of[c.node];
        for (int k : c.targets) {
          const double diff = f[k] - f[c.node];
          gnode -= 2.0 * diff;
          const int vk = var_of[k];
          if (vk >= 0) gq.emplace_back(vk, 2.0 * diff);
          // curvature of q: unit star Laplacian scaled by 2
          if (vk >= 0) hess(vk, vk) += 2.0 * w;
          if (vi >= 0) hess(vi, vi) += 2.0 * w;
          if (vi >= 0 && vk >= 0) {
            hess(vi, vk) -= 2.0 * w;
            hess(vk, vi) -= 2.0 * w;
          }
        }
        if (vi >= 0) gq.emplace_back(vi, gnode);
        const double w2 = w / slack;
        for (const auto& [va, ga] : gq) {
          grad[va] += w * ga;
          for (const auto& [vb, gb] : gq) hess(va, vb) += w2 * ga * gb;
        }
      }

      dz = -grad;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd sol = ldlt.solve(dz);
      if (!sol.allFinite()) {
        const double ridge = 1e-12 * (hess.trace() / nv + 1.0);
        Eigen::MatrixXd hr = hess;
        hr.diagonal().array() += ridge;
        sol = hr.ldlt().solve(dz);
        if (!sol.allFinite()) break;
      }
      dz = sol;

      const double gdz = grad.dot(dz);
      const double decrement = -gdz;
      if (decrement * 0.5 <= eps_center) break;

      dfull.setZero();
      for (int u = 0; u < n; ++u)
        if (var_of[u] >= 0) dfull[u] = dz[var_of[u]];

      // Largest step keeping every constraint strictly inside.
      double alpha_max = kInf;
      for (const auto& c : cs) {
        double q = 0.0, gdir = 0.0, h2 = 0.0;
        for (int k : c.targets) {
          const double diff = f[k] - f[c.node];
          const double ddiff = dfull[k] - dfull[c.node];
          q += diff * diff;
          gdir += diff * ddiff;
          h2 += ddiff * ddiff;
        }
        const double room = 1.0 - q;
        if (h2 > 0) {
          const double root = (-gdir + std::sqrt(gdir * gdir + h2 * room)) / h2;
          alpha_max = std::min(alpha_max, root);
        } else if (gdir > 0) {
          alpha_max = std::min(alpha_max, room / (2.0 * gdir));
        }
      }
      double alpha = std::min(1.0, 0.995 * alpha_max);
      if (!(alpha > 0)) break;

      const double phi0 = phi(f);
      int halvings = 0;
      while (halvings < 60 && phi(f + alpha * dfull) > phi0 + 0.25 * alpha * gdz) {
        alpha *= 0.5;
        ++halvings;
      }
      if (halvings >= 60) break;
      f += alpha * dfull;
    }
    if (hit_cap) break;
    if (m * mu <= gap_target) break;
    mu *= 0.1;
  }

  out.f = f;
  out.value = f[t];
  out.iterations = iters;
  out.residual = m * mu;
  out.converged = !hit_cap;
  return out;
}

/// Euclidean projection of the star coordinates onto q <= 1, via the
/// eigendecomposition of the local quadratic form and a monotone root solve
/// for the multiplier. Returns true when the point moved.
bool project_star(const StarConstraint& c, Eigen::VectorXd& f) {
  const double q = eval_constraint(c, f);
  if (q <= 1.0 + 1e-15) return false;
  const int td = static_cast<int>(c.targets.size());
  const int p = td + 1;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd y(p);
  y[0] = f[c.node];
  m(0, 0) = td;
  for (int j = 0; j < td; ++j) {
    y[j + 1] = f[c.targets[j]];
    m(0, j + 1) = -1.0;
    m(j + 1, 0) = -1.0;
    m(j + 1, j + 1) = 1.0;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::VectorXd lam = eig.eigenvalues();
  const Eigen::VectorXd u = eig.eigenvectors().transpose() * y;

  const auto residual = [&](double lambda) {
    double total = 0.0;
    for (int a = 0; a < p; ++a) {
      if (lam[a] <= 1e-14) continue;
      const double denom = 1.0 + lambda * lam[a];
      total += lam[a] * u[a] * u[a] / (denom * denom);
    }
    return total;
  };

  double lo = 0.0, hi = 1.0;
  int expand = 0;
  while (residual(hi) > 1.0 && expand++ < 200) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(mid) > 1.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 1e-16 * (1.0 + hi)) break;
  }
  const double lambda = 0.5 * (lo + hi);

  Eigen::VectorXd w(p);
  for (int a = 0; a < p; ++a) w[a] = u[a] / (1.0 + lambda * lam[a]);
  const Eigen::VectorXd x = eig.eigenvectors() * w;
  f[c.node] = x[0];
  for (int j = 0; j < td; ++j) f[c.targets[j]] = x[j + 1];
  return true;
}

/// Cyclic star projections until feasible; a final global rescale guarantees
/// the returned point satisfies every constraint.
void project_feasible(const std::vector<StarConstraint>& cs, Eigen::VectorXd& f,
                      int max_sweeps) {
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (const auto& c : cs) moved = project_star(c, f) || moved;
    if (!moved) return;
  }
  const double nu = star_norm(cs, f);
  if (nu > 1.0) f /= nu;
}

struct KktCertificate {
  Eigen::VectorXd f;  // gauge f[s] = 0, feasible when certified
  double value = 0.0;
  double residual = kInf;
  bool certified = false;
};

/// Active-set Newton solve of the stationarity system for
///   maximize f[t]  subject to  q_i(f) <= 1,  f[s] = 0.
/// The program is convex, so any multiplier vector lambda >= 0 with
///   e_t = sum_i lambda_i grad q_i(f),  q_i(f) = 1 on the active set,
/// certifies f[t] as the global optimum. Dense linear algebra; callers keep
/// the dimension moderate.
KktCertificate kkt_polish(const std::vector<StarConstraint>& cs, int n, int s, int t,
                          const Eigen::VectorXd& start) {
  KktCertificate out;
  out.f = start;
  const int m = static_cast<int>(cs.size());
  if (m == 0 || n < 2) return out;

  std::vector<int> var_of(n, -1);
  int nv = 0;
  for (int u = 0; u < n; ++u)
    if (u != s) var_of[u] = nv++;

  Eigen::VectorXd f = start;
  f.array() -= f[s];
  {
    const double nu = star_norm(cs, f);
    if (nu > 1.0) f /= nu;
  }

  std::vector<char> active(static_cast<std::size_t>(m), 0);
  std::vector<int> act;
  const auto rebuild_act = [&]() {
    act.clear();
    for (int i = 0; i < m; ++i)
      if (active[static_cast<std::size_t>(i)]) act.push_back(i);
  };
  {
    double qmax = -1.0;
    int imax = 0;
    for (int i = 0; i < m; ++i) {
      const double q = eval_constraint(cs[static_cast<std::size_t>(i)], f);
      if (q >= 0.9) active[static_cast<std::size_t>(i)] = 1;
      if (q > qmax) {
        qmax = q;
        imax = i;
      }
    }
    active[static_cast<std::size_t>(imax)] = 1;
    rebuild_act();
  }

  const auto grad_restricted = [&](const StarConstraint& c, const Eigen::VectorXd& fv,
                                   Eigen::VectorXd& grad) {
    grad.setZero();
    const int vi = var_of[c.node];
    double gnode = 0.0;
    for (int k : c.targets) {
      const double diff = fv[k] - fv[c.node];
      gnode -= 2.0 * diff;
      const int vk = var_of[k];
      if (vk >= 0) grad[vk] += 2.0 * diff;
    }
    if (vi >= 0) grad[vi] += gnode;
  };

  Eigen::VectorXd lambda;
  const auto eval_system = [&](const Eigen::VectorXd& fv, const Eigen::VectorXd& lv) {
    Eigen::VectorXd F(nv + static_cast<int>(act.size()));
    Eigen::VectorXd stat = Eigen::VectorXd::Zero(nv);
    stat[var_of[t]] = -1.0;
    Eigen::VectorXd grad(nv);
    for (std::size_t idx = 0; idx < act.size(); ++idx) {
      const auto& c = cs[static_cast<std::size_t>(act[idx])];
      grad_restricted(c, fv, grad);
      stat += lv[static_cast<Eigen::Index>(idx)] * grad;
      F[nv + static_cast<Eigen::Index>(idx)] = eval_constraint(c, fv) - 1.0;
    }
    F.head(nv) = stat;
    return F;
  };

  for (int round = 0; round < 40; ++round) {
    if (act.empty()) {
      // Stationarity needs at least one multiplier; re-seed with the most
      // binding constraint at the current iterate.
      double qmax = -kInf;
      int imax = 0;
      for (int i = 0; i < m; ++i) {
        const double q = eval_constraint(cs[static_cast<std::size_t>(i)], f);
        if (q > qmax) {
          qmax = q;
          imax = i;
        }
      }
      active[static_cast<std::size_t>(imax)] = 1;
      rebuild_act();
    }
    const int a = static_cast<int>(act.size());
    const int dim = nv + a;

    // warm multiplier guess: least squares on the stationarity block
    {
      Eigen::MatrixXd gm(nv, a);
      Eigen::VectorXd grad(nv);
      for (int idx = 0; idx < a; ++idx) {
        grad_restricted(cs[static_cast<std::size_t>(act[static_cast<std::size_t>(idx)])], f, grad);
        gm.col(idx) = grad;
      }
      Eigen::VectorXd c_vec = Eigen::VectorXd::Zero(nv);
      c_vec[var_of[t]] = 1.0;
      lambda = gm.colPivHouseholderQr().solve(c_vec);
      for (int idx = 0; idx < a; ++idx) lambda[idx] = std::max(lambda[idx], 1e-8);
    }

    Eigen::VectorXd F = eval_system(f, lambda);
    for (int it = 0; it < 80; ++it) {
      const double fn = F.norm();
      if (F.lpNorm<Eigen::Infinity>() <= 1e-12) break;

      Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
      Eigen::VectorXd grad(nv);
      for (int idx = 0; idx < a; ++idx) {
        const auto& c = cs[static_cast<std::size_t>(act[static_cast<std::size_t>(idx)])];
        const double w = lambda[idx];
        const int vi = var_of[c.node];
        for (int k : c.targets) {
          const int vk = var_of[k];
          if (vk >= 0) jac(vk, vk) += 2.0 * w;
          if (vi >= 0) jac(vi, vi) += 2.0 * w;
          if (vi >= 0 && vk >= 0) {
            jac(vi, vk) -= 2.0 * w;
            jac(vk, vi) -= 2.0 * w;
          }
        }
        grad_restricted(c, f, grad);
        jac.block(0, nv + idx, nv, 1) = grad;
        jac.block(nv + idx, 0, 1, nv) = grad.transpose();
        jac(nv + idx, nv + idx) = -1e-12;
      }

      const Eigen::VectorXd dx = jac.colPivHouseholderQr().solve(-F);
      if (!dx.allFinite()) break;

      double alpha = 1.0;
      bool accepted = false;
      for (int h = 0; h < 50; ++h) {
        Eigen::VectorXd ftrial = f;
        for (int u = 0; u < n; ++u)
          if (var_of[u] >= 0) ftrial[u] += alpha * dx[var_of[u]];
        const Eigen::VectorXd ltrial = lambda + alpha * dx.tail(a);
        const Eigen::VectorXd ft = eval_system(ftrial, ltrial);
        if (ft.norm() <= (1.0 - 1e-4 * alpha) * fn) {
          f = ftrial;
          lambda = ltrial;
          F = ft;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
    }

    const double resid = F.lpNorm<Eigen::Infinity>();
    int worst_inactive = -1;  // most violated constraint outside the set
    double worst_q = 1.0 + 1e-10;
    int next_inactive = -1;  // largest q outside the set, violated or not
    double next_q = 0.0;
    for (int i = 0; i < m; ++i) {
      if (active[static_cast<std::size_t>(i)]) continue;
      const double q = eval_constraint(cs[static_cast<std::size_t>(i)], f);
      if (q > worst_q) {
        worst_q = q;
        worst_inactive = i;
      }
      if (q > next_q) {
        next_q = q;
        next_inactive = i;
      }
    }
    int most_negative = -1;
    for (int idx = 0; idx < a; ++idx) {
      if (lambda[idx] < -1e-8 && (most_negative < 0 || lambda[idx] < lambda[most_negative]))
        most_negative = idx;
    }

    if (resid <= 1e-10) {
      if (most_negative >= 0) {
        active[static_cast<std::size_t>(act[static_cast<std::size_t>(most_negative)])] = 0;
        rebuild_act();
        continue;
      }
      if (worst_inactive >= 0) {
        active[static_cast<std::size_t>(worst_inactive)] = 1;
        rebuild_act();
        continue;
      }
      const double nu = star_norm(cs, f);
      if (nu > 1.0) f /= nu;
      out.f = f;
      out.value = f[t];
      out.residual = resid;
      out.certified = true;
      return out;
    }

    // Newton stalled: adjust the active set and retry. When nothing is
    // violated, stationarity may still need more multipliers — grow the set
    // with the most nearly active constraint.
    if (most_negative >= 0) {
      active[static_cast<std::size_t>(act[static_cast<std::size_t>(most_negative)])] = 0;
      rebuild_act();
    } else if (worst_inactive >= 0) {
      active[static_cast<std::size_t>(worst_inactive)] = 1;
      rebuild_act();
    } else if (next_inactive >= 0) {
      active[static_cast<std::size_t>(next_inactive)] = 1;
      rebuild_act();
    } else {
      break;
    }
  }

  const double nu = star_norm(cs, f);
  if (nu > 1.0) f /= nu;
  out.f = f;
  out.value = f[t];
  return out;
}

/// Gradient-free ascent fallback: push the target coordinate, project back
/// onto the feasible set, shrink the push whenever it stops paying off.
LocalSolve ascent_solve(const Graph& g, int s, int t, const SolverConfig& cfg) {
  const int n = g.node_count();
  const auto cs = build_constraints(g);
  LocalSolve out;
  out.f = Eigen::VectorXd::Zero(n);
  if (cs.empty() || n < 2) {
    out.converged = true;
    return out;
  }

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd best = f;
  double best_val = 0.0;
  double alpha = 0.5;
  const double alpha_floor = std::max(1e-14, 0.02 * cfg.tol);
  long iters = 0;
  while (iters < cfg.max_iterations && alpha > alpha_floor) {
    ++iters;
    Eigen::VectorXd trial = f;
    trial[t] += alpha;
    project_feasible(cs, trial, 400);
    trial.array() -= trial[s];
    if (trial[t] > best_val + 1e-15) {
      best_val = trial[t];
      best = trial;
      f = trial;
    } else {
      alpha *= 0.7;
      f = best;
    }
  }

  out.f = best;
  out.value = best_val;
  out.iterations = iters;
  out.residual = std::max(alpha, 1e-16);
  out.converged = false;

  // The push/project loop stalls near corners of the feasible set, so it only
  // supplies a warm start; convergence is claimed when a Newton solve of the
  // optimality conditions certifies the point. Skipped on very large systems
  // where the dense certificate solve would dominate the runtime.
  if (n + static_cast<int>(cs.size()) <= 2000) {
    const KktCertificate cert = kkt_polish(cs, n, s, t, best);
    if (cert.certified && cert.value + 1e-9 >= best_val) {
      out.f = cert.f;
      out.value = cert.value;
      out.residual = cert.residual;
      out.converged = true;
    }
  }
  return out;
}

DistanceResult zero_result(const Graph& g) {
  DistanceResult r;
  r.certificate.values = VertexVector::Zero(g.node_count());
  r.certificate.norm = 0.0;
  r.graph_distance = 0;
  r.status = SolveStatus::Converged;
  return r;
}

}  // namespace

std::string to_string(SolveMethod method) {
  switch (method) {
    case SolveMethod::Barrier:
      return "barrier";
    case SolveMethod::ProjectedAscent:
      return "projected_ascent";
  }
  throw std::logic_error("unknown solve method");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return "CONVERGED";
    case SolveStatus::BoundOnly:
      return "BOUND_ONLY";
    case SolveStatus::Unreachable:
      return "UNREACHABLE";
  }
  throw std::logic_error("unknown solve status");
}

SolveMethod solve_method_from_string(const std::string& name) {
  if (name == "barrier") return SolveMethod::Barrier;
  if (name == "projected_ascent") return SolveMethod::ProjectedAscent;
  throw std::invalid_argument("unknown method '" + name +
                              "' (expected barrier or projected_ascent)");
}

double path_closed_form(long n) {
  if (n < 0) throw std::invalid_argument("path_closed_form: negative length");
  const double dn = static_cast<double>(n);
  if (n % 2 == 0) return std::sqrt(dn * dn / 2.0);
  return std::sqrt((dn * dn + 1.0) / 2.0);
}

AprioriBounds apriori_bounds(const Graph& g, int from, int to) {
  g.check_node(from);
  g.check_node(to);
  if (from == to) {
    AprioriBounds b;
    b.graph_distance = 0;
    return b;
  }
  if (!support_connected(g, from, to))
    throw std::invalid_argument("apriori_bounds: nodes are support-disconnected");
  return compute_bounds(g, from, to).bounds;
}

DistanceResult connes_distance(const Graph& g, int from, int to, const SolverConfig& cfg) {
  g.check_node(from);
  g.check_node(to);
  if (from == to) return zero_result(g);

  DistanceResult r;
  r.certificate.values = VertexVector::Zero(g.node_count());
  if (!support_connected(g, from, to)) {
    r.value = kInf;
    r.lower_bound = kInf;
    r.upper_bound = kInf;
    r.status = SolveStatus::Unreachable;
    return r;
  }

  BoundData bd = compute_bounds(g, from, to);
  r.lower_bound = bd.bounds.lower;
  r.upper_bound = bd.bounds.upper;
  r.graph_distance = bd.bounds.graph_distance;

  const auto comp = component_of(g, from);
  const auto sub = induced_subgraph(g, comp);
  const int s = sub.old_to_new[from];
  const int t = sub.old_to_new[to];

  const LocalSolve ls = cfg.method == SolveMethod::Barrier
                            ? barrier_solve(sub.graph, s, t, cfg, bd.bounds.upper)
                            : ascent_solve(sub.graph, s, t, cfg);

  r.iterations = ls.iterations;
  r.residual = ls.residual;
  r.status = ls.converged ? SolveStatus::Converged : SolveStatus::BoundOnly;

  VertexVector values = VertexVector::Zero(g.node_count());
  for (int u = 0; u < static_cast<int>(sub.new_to_old.size()); ++u)
    values[sub.new_to_old[u]] = ls.f[u];
  r.value = ls.value;
  if (r.value < bd.bounds.lower) {
    // The certificate behind the lower bound beats the solve; report it.
    r.value = bd.bounds.lower;
    values = bd.best_certificate;
  }
  r.certificate.values = values;
  r.certificate.norm = commutator_norm(g, values);
  return r;
}

double oracle_connes_distance(const Graph& g, int from, int to, int budget) {
  g.check_node(from);
  g.check_node(to);
  if (g.node_count() > 12)
    throw std::invalid_argument("oracle_connes_distance: graph too large (over 12 nodes)");
  if (from == to) return 0.0;
  if (!support_connected(g, from, to))
    throw std::invalid_argument("oracle_connes_distance: nodes are support-disconnected");

  const auto comp = component_of(g, from);
  const auto sub = induced_subgraph(g, comp);
  const Graph& gg = sub.graph;
  const int s = sub.old_to_new[from];
  const int t = sub.old_to_new[to];
  const int n = gg.node_count();
  const auto cs = build_constraints(gg);

  std::vector<std::vector<int>> touching(n);
  for (int ci = 0; ci < static_cast<int>(cs.size()); ++ci) {
    touching[cs[ci].node].push_back(ci);
    for (int k : cs[ci].targets) touching[k].push_back(ci);
  }

  std::vector<int> order;
  for (int u = 0; u < n; ++u)
    if (u != s) order.push_back(u);

  std::mt19937_64 rng(0xC0FFEEULL);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Exact single-coordinate move: target coordinate to the top of its
  // feasible interval, any other to the slack-maximizing point inside it.
  const auto move_coordinate = [&](Eigen::VectorXd& f, int u) {
    if (touching[u].empty()) return;
    double lo = -kInf, hi = kInf;
    double sum_a = 0.0, sum_b = 0.0;
    for (int ci : touching[u]) {
      const auto& c = cs[ci];
      double a, bq, cq;
      if (c.node == u) {
        a = static_cast<double>(c.targets.size());
        bq = 0.0;
        cq = 0.0;
        for (int k : c.targets) {
          bq -= 2.0 * f[k];
          cq += f[k] * f[k];
        }
      } else {
        a = 1.0;
        bq = -2.0 * f[c.node];
        cq = f[c.node] * f[c.node];
        for (int k : c.targets) {
          if (k == u) continue;
          const double d = f[k] - f[c.node];
          cq += d * d;
        }
      }
      sum_a += a;
      sum_b += bq;
      double disc = bq * bq - 4.0 * a * (cq - 1.0);
      if (disc < 0) disc = 0;
      const double sq = std::sqrt(disc);
      lo = std::max(lo, (-bq - sq) / (2.0 * a));
      hi = std::min(hi, (-bq + sq) / (2.0 * a));
    }
    if (lo > hi) return;
    if (u == t) {
      f[u] = hi;
    } else {
      const double z = sum_a > 0 ? -sum_b / (2.0 * sum_a) : f[u];
      f[u] = std::clamp(z, lo, hi);
    }
  };

  // Coordinate ascent supplies feasible points (hence lower bounds) from
  // several starts; a Newton solve of the optimality conditions then turns
  // the best ones into a certified optimum. Convexity makes any certified
  // stationary point the global maximum, and the feasible values double as a
  // cross-check that the certificate is not an artifact.
  double best = 0.0;
  bool have_cert = false;
  double cert_value = 0.0;
  for (int r = 0; r < std::max(1, budget); ++r) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
    if (r == 1) {
      const auto dist = support_distances_from(gg, s);
      for (int u = 0; u < n; ++u) f[u] = dist[u];
      const double nu = star_norm(cs, f);
      if (nu > 1e-12) f /= nu;
    } else if (r >= 2) {
      for (int u = 0; u < n; ++u) f[u] = gauss(rng);
      f.array() -= f[s];
      const double nu = star_norm(cs, f);
      if (nu > 1e-12)
        f *= 0.999 / nu;
      else
        f.setZero();
    }

    double prev = f[t];
    int calm = 0;
    for (int sweep = 0; sweep < 800; ++sweep) {
      std::shuffle(order.begin(), order.end(), rng);
      for (int u : order) move_coordinate(f, u);
      const double nu = star_norm(cs, f);
      if (nu > 1e-12 && std::abs(nu - 1.0) > 1e-13) f /= nu;
      const double val = f[t] - f[s];
      if (std::abs(val - prev) < 1e-13) {
        if (++calm >= 3) break;
      } else {
        calm = 0;
      }
      prev = val;
    }
    best = std::max(best, f[t] - f[s]);

    if (!have_cert) {
      const KktCertificate cert = kkt_polish(cs, n, s, t, f);
      if (cert.certified) {
        have_cert = true;
        cert_value = cert.value;
      }
    }
    if (have_cert && r >= 2) break;
  }

  if (!have_cert)
    throw std::runtime_error("oracle_connes_distance: failed to certify an optimum");
  if (cert_value + 1e-7 < best)
    throw std::runtime_error("oracle_connes_distance: certificate contradicted by a feasible point");
  return std::max(cert_value, best);
}

bool StructuralReport::all_passed() const {
  for (const auto& c : checks)
    if (c.applicable && !c.passed) return false;
  return true;
}

StructuralReport structural_checks(const Graph& g, int from, int to,
                                   const DistanceResult& result, const SolverConfig& cfg) {
  StructuralReport report;
  const double slack = 1e-6 + 10.0 * cfg.tol;
  const bool solved = result.status != SolveStatus::Unreachable && std::isfinite(result.value);
  const bool distinct = from != to;
  const auto path = solved && distinct ? one_minimal_path(g, from, to) : std::vector<int>{};

  {
    CheckOutcome c;
    c.name = "minimal_path_bound";
    c.applicable = solved && distinct && !path.empty();
    if (c.applicable) {
      const int len = static_cast<int>(path.size()) - 1;
      const double bound = g.directed() ? static_cast<double>(len) : path_closed_form(len);
      c.passed = result.value <= bound + slack;
      c.details = fmt("value=%.10g chain_bound=%.10g", result.value, bound);
    } else {
      c.details = "needs a finite oriented path between distinct endpoints";
    }
    report.checks.push_back(std::move(c));
  }

  {
    CheckOutcome c;
    c.name = "induced_path_monotone";
    c.applicable = solved && distinct && !path.empty();
    if (c.applicable) {
      try {
        const auto sub = induced_subgraph(g, path);
        const auto r2 =
            connes_distance(sub.graph, sub.old_to_new[from], sub.old_to_new[to], cfg);
        c.passed = result.value <= r2.value + slack;
        c.details = fmt("value=%.10g induced_value=%.10g", result.value, r2.value);
      } catch (const std::exception& ex) {
        c.passed = false;
        c.details = ex.what();
      }
    } else {
      c.details = "needs a finite oriented path between distinct endpoints";
    }
    report.checks.push_back(std::move(c));
  }

  {
    CheckOutcome c;
    c.name = "tree_closed_form";
    bool is_tree = false;
    if (solved && distinct && !g.directed()) {
      const auto comp = component_of(g, from);
      const auto sub = induced_subgraph(g, comp);
      is_tree = sub.graph.edge_count() == 2 * (sub.graph.node_count() - 1);
    }
    c.applicable = is_tree && result.graph_distance.has_value();
    if (c.applicable) {
      const double expect = path_closed_form(*result.graph_distance);
      c.passed = std::abs(result.value - expect) <= slack;
      c.details = fmt("value=%.10g chain_value=%.10g", result.value, expect);
    } else {
      c.details = "component is not an undirected tree";
    }
    report.checks.push_back(std::move(c));
  }

  {
    CheckOutcome c;
    c.name = "pendant_invariance";
    c.applicable = solved && distinct && result.status == SolveStatus::Converged;
    if (c.applicable) {
      try {
        const int anchor = path.empty() ? to : path[path.size() / 2];
        std::vector<NodePair> edges;
        for (int e = 0; e < g.edge_count(); ++e) {
          const auto& p = g.edge(e);
          if (!g.directed() && p.source > p.target) continue;
          edges.push_back(p);
        }
        edges.push_back({anchor, g.node_count()});
        const Graph g2 = Graph::build(g.node_count() + 1, edges, g.directed());
        const auto r2 = connes_distance(g2, from, to, cfg);
        c.passed = std::abs(r2.value - result.value) <= 1e-6;
        c.details = fmt("value=%.10g pendant_value=%.10g anchor=%d", result.value,
                        r2.value, anchor);
      } catch (const std::exception& ex) {
        c.passed = false;
        c.details = ex.what();
      }
    } else {
      c.details = "needs a converged finite value";
    }
    report.checks.push_back(std::move(c));
  }

  {
    CheckOutcome c;
    c.name = "shortcut_bound";
    c.applicable = solved && distinct && result.status == SolveStatus::Converged &&
                   result.value > 1.0 + 1e-9;
    if (c.applicable) {
      try {
        const int l = static_cast<int>(std::ceil(result.value - 1e-9)) - 1;
        std::vector<NodePair> edges;
        for (int e = 0; e < g.edge_count(); ++e) {
          const auto& p = g.edge(e);
          if (!g.directed() && p.source > p.target) continue;
          edges.push_back(p);
        }
        int fresh = g.node_count();
        int prev = from;
        for (int step = 1; step < l; ++step) {
          edges.push_back({prev, fresh});
          prev = fresh++;
        }
        edges.push_back({prev, to});
        const Graph g2 = Graph::build(fresh, edges, g.directed());
        const auto r2 = connes_distance(g2, from, to, cfg);
        c.passed = r2.value <= l + 1e-6;
        c.details = fmt("shortcut_length=%d new_value=%.10g old_value=%.10g", l, r2.value,
                        result.value);
      } catch (const std::exception& ex) {
        c.passed = false;
        c.details = ex.what();
      }
    } else {
      c.details = "needs a converged value above 1";
    }
    report.checks.push_back(std::move(c));
  }

  return report;
}

std::vector<std::vector<DistanceResult>> distance_matrix(const Graph& g,
                                                         const SolverConfig& cfg,
                                                         int threads) {
  const int n = g.node_count();
  std::vector<std::vector<DistanceResult>> out(n);
  for (int i = 0; i < n; ++i) out[i].resize(n);
  for (int i = 0; i < n; ++i) out[i][i] = zero_result(g);

  struct PairIdx {
    int i, j;
  };
  std::vector<PairIdx> pairs;
  pairs.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pairs.push_back({i, j});

  int tn = std::clamp(threads, 1, 256);
  tn = static_cast<int>(std::min<size_t>(tn, std::max<size_t>(pairs.size(), 1)));

  if (tn <= 1) {
    for (const auto& p : pairs) out[p.i][p.j] = connes_distance(g, p.i, p.j, cfg);
    return out;
  }

  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(tn);
  for (int w = 0; w < tn; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t k = next.fetch_add(1);
        if (k >= pairs.size() || failed.load()) return;
        try {
          out[pairs[k].i][pairs[k].j] = connes_distance(g, pairs[k].i, pairs[k].j, cfg);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace connesdist
