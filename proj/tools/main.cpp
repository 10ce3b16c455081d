// Command line front end: distance queries, distance matrices, operator norm
// estimates, graph generators, and structural self-checks over edge-list
// files. All reports are JSON on stdout; exit codes are 0 (ok), 1 (usage or
// input error), 2 (no finite distance for the requested pair), 3 (solver or
// check failure).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "connesdist/connes.hpp"
#include "connesdist/edgelist.hpp"
#include "connesdist/graph.hpp"
#include "connesdist/operators.hpp"
#include "connesdist/spectral.hpp"

using nlohmann::ordered_json;
using namespace connesdist;

namespace {

/// Round to 12 significant digits so reruns and platforms agree byte for byte.
double snap12(double v) {
  if (!std::isfinite(v)) return v;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

ordered_json number_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return snap12(v);
}

ordered_json graph_summary(const Graph& g) {
  ordered_json j;
  j["nodes"] = g.node_count();
  j["directed"] = g.directed();
  j["edges"] = g.edge_count();
  if (g.directed()) {
    j["max_in_degree"] = g.max_in_degree();
    j["max_out_degree"] = g.max_out_degree();
  } else {
    j["bonds"] = g.edge_count() / 2;
    j["max_degree"] = g.max_degree();
  }
  return j;
}

struct SolveOptions {
  double tol = 1e-8;
  long max_iterations = 100000;
  std::string method = "barrier";
  std::uint64_t seed = 42;

  SolverConfig config() const {
    SolverConfig cfg;
    cfg.tol = tol;
    cfg.max_iterations = max_iterations;
    cfg.method = solve_method_from_string(method);
    cfg.seed = seed;
    return cfg;
  }
};

void add_solve_options(CLI::App* cmd, SolveOptions& opts) {
  cmd->add_option("--tol", opts.tol, "objective tolerance (absolute up to 10, relative/10 beyond)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-iterations", opts.max_iterations, "inner iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--method", opts.method, "solver backend")
      ->check(CLI::IsMember({"barrier", "projected_ascent"}))
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "seed for randomized fallbacks")->capture_default_str();
}

double elapsed_ms(std::chrono::steady_clock::time_point start) {
  const auto dt = std::chrono::steady_clock::now() - start;
  return std::chrono::duration<double, std::milli>(dt).count();
}

ordered_json result_json(const DistanceResult& r, bool with_certificate) {
  ordered_json j;
  j["status"] = to_string(r.status);
  j["value"] = number_or_null(r.value);
  j["lower_bound"] = number_or_null(r.lower_bound);
  j["upper_bound"] = number_or_null(r.upper_bound);
  j["graph_distance"] = r.graph_distance ? ordered_json(*r.graph_distance) : ordered_json(nullptr);
  j["iterations"] = r.iterations;
  j["residual"] = number_or_null(r.residual);
  if (with_certificate) {
    ordered_json cert;
    std::vector<double> vals(r.certificate.values.data(),
                             r.certificate.values.data() + r.certificate.values.size());
    for (auto& v : vals) v = snap12(v);
    cert["values"] = vals;
    cert["norm"] = number_or_null(r.certificate.norm);
    j["certificate"] = std::move(cert);
  }
  return j;
}

int status_exit_code(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged:
      return 0;
    case SolveStatus::Unreachable:
      return 2;
    case SolveStatus::BoundOnly:
      return 3;
  }
  return 1;
}

int run_dist(const std::string& file, int from, int to, const SolveOptions& opts,
             bool with_certificate, bool timing) {
  const Graph g = load_edge_list_file(file);
  const SolverConfig cfg = opts.config();
  const auto start = std::chrono::steady_clock::now();
  const DistanceResult r = connes_distance(g, from, to, cfg);
  const double ms = elapsed_ms(start);

  ordered_json out;
  out["schema_version"] = 1;
  out["command"] = "dist";
  out["graph"] = graph_summary(g);
  out["from"] = from;
  out["to"] = to;
  out["method"] = to_string(cfg.method);
  out["tol"] = snap12(cfg.tol);
  out.update(result_json(r, with_certificate));
  if (timing) out["timing_ms"] = snap12(ms);
  std::cout << out.dump(2) << "\n";
  return status_exit_code(r.status);
}

int run_matrix(const std::string& file, int threads, bool jsonl, const SolveOptions& opts,
               bool timing) {
  const Graph g = load_edge_list_file(file);
  const SolverConfig cfg = opts.config();

  int tn = threads;
  if (const char* env = std::getenv("CONNES_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap >= 1) tn = std::min<long>(tn, cap);
  }

  const auto start = std::chrono::steady_clock::now();
  const auto results = distance_matrix(g, cfg, tn);
  const double ms = elapsed_ms(start);
  const int n = g.node_count();

  if (jsonl) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const auto& r = results[i][j];
        ordered_json line;
        line["from"] = i;
        line["to"] = j;
        line["value"] = number_or_null(r.value);
        line["status"] = to_string(r.status);
        line["graph_distance"] =
            r.graph_distance ? ordered_json(*r.graph_distance) : ordered_json(nullptr);
        std::cout << line.dump() << "\n";
      }
    }
    return 0;
  }

  ordered_json out;
  out["schema_version"] = 1;
  out["command"] = "matrix";
  out["graph"] = graph_summary(g);
  out["method"] = to_string(cfg.method);
  out["tol"] = snap12(cfg.tol);
  ordered_json values = ordered_json::array();
  ordered_json statuses = ordered_json::array();
  for (int i = 0; i < n; ++i) {
    ordered_json vrow = ordered_json::array();
    ordered_json srow = ordered_json::array();
    for (int j = 0; j < n; ++j) {
      vrow.push_back(number_or_null(results[i][j].value));
      srow.push_back(to_string(results[i][j].status));
    }
    values.push_back(std::move(vrow));
    statuses.push_back(std::move(srow));
  }
  out["values"] = std::move(values);
  out["statuses"] = std::move(statuses);
  if (timing) out["timing_ms"] = snap12(ms);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_norm(const std::string& file, const std::string& opname, double tol, bool timing) {
  const Graph g = load_edge_list_file(file);

  GraphOperator op = [&]() -> GraphOperator {
    if (opname == "adjacency") return adjacency_op(g);
    if (opname == "adjacency_sym") return adjacency_sym_op(g);
    if (opname == "adjacency_in") return adjacency_in_op(g);
    if (opname == "adjacency_out") return adjacency_out_op(g);
    if (opname == "laplacian") return laplacian_op(g);
    if (opname == "dirac") return dirac_op(g);
    if (opname == "coboundary") return coboundary_op(g);
    throw std::invalid_argument("unknown operator '" + opname + "'");
  }();

  const bool self_adjoint =
      opname != "coboundary" && (!g.directed() || (opname != "adjacency_in" && opname != "adjacency_out"));
  const auto start = std::chrono::steady_clock::now();
  const NormEstimate est = self_adjoint ? spectral_norm(op, tol) : operator_norm(op, tol);
  const double ms = elapsed_ms(start);

  ordered_json out;
  out["schema_version"] = 1;
  out["command"] = "norm";
  out["graph"] = graph_summary(g);
  out["operator"] = opname;
  out["value"] = number_or_null(est.value);
  out["lower_bound"] = number_or_null(est.lower_bound);
  out["upper_bound"] = number_or_null(est.upper_bound);
  out["iterations"] = est.iterations;
  out["residual"] = number_or_null(est.residual);
  if (!g.directed() && (opname == "adjacency" || opname == "adjacency_sym")) {
    const auto [avg, vmax] = adjacency_norm_bounds(g);
    out["degree_bounds"] = {number_or_null(avg), number_or_null(static_cast<double>(vmax))};
  }
  if (timing) out["timing_ms"] = snap12(ms);
  std::cout << out.dump(2) << "\n";
  return 0;
}

int run_gen(const std::string& kind, const std::vector<long>& params,
            const std::string& out_path) {
  const auto need = [&](size_t count) {
    if (params.size() != count)
      throw std::invalid_argument("generator '" + kind + "' expects " + std::to_string(count) +
                                  " parameter(s), got " + std::to_string(params.size()));
  };
  const auto as_int = [](long v) {
    if (v < 0 || v > 1000000) throw std::invalid_argument("generator parameter out of range");
    return static_cast<int>(v);
  };

  Graph g = [&]() -> Graph {
    if (kind == "path") {
      need(1);
      return Graph::path(as_int(params[0]));
    }
    if (kind == "cycle") {
      need(1);
      return Graph::cycle(as_int(params[0]));
    }
    if (kind == "directed_path") {
      need(1);
      return Graph::directed_path(as_int(params[0]));
    }
    if (kind == "directed_lattice_2d") {
      need(2);
      return Graph::directed_lattice_2d(as_int(params[0]), as_int(params[1]));
    }
    if (kind == "binary_tree") {
      need(1);
      return Graph::binary_tree(as_int(params[0]));
    }
    throw std::invalid_argument("unknown generator '" + kind +
                                "' (expected path, cycle, directed_path, "
                                "directed_lattice_2d, or binary_tree)");
  }();

  if (out_path.empty()) {
    save_edge_list(g, std::cout);
    return 0;
  }
  save_edge_list_file(g, out_path);
  ordered_json out;
  out["schema_version"] = 1;
  out["command"] = "gen";
  out["kind"] = kind;
  out["graph"] = graph_summary(g);
  out["out"] = out_path;
  std::cout << out.dump(2) << "\n";
  return 0;
}

ordered_json check_json(const std::string& name, bool applicable, bool passed,
                        const std::string& details) {
  ordered_json cj;
  cj["name"] = name;
  cj["applicable"] = applicable;
  cj["passed"] = passed;
  cj["details"] = details;
  return cj;
}

/// Operator-identity suite over the whole graph: adjoint pairing, Laplacian
/// factorization, grading anticommutation, closed-form commutator norms, and
/// the cycle-space dimension count.
ordered_json identity_checks(const Graph& g, std::uint64_t seed, bool& all_ok) {
  ordered_json checks = ordered_json::array();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto randv = [&](Eigen::Index dim) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v[i] = gauss(rng);
    return v;
  };
  const int n = g.node_count();
  const int m = g.edge_count();
  char buf[160];

  {
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd f = randv(n);
      const Eigen::VectorXd h = randv(m);
      const double lhs = coboundary(g, f).dot(h);
      const double rhs = f.dot(boundary_adjoint(g, h));
      worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + f.norm() * h.norm()));
    }
    const bool ok = worst <= 1e-12;
    all_ok = all_ok && ok;
    std::snprintf(buf, sizeof buf, "max scaled pairing residual %.3g", worst);
    checks.push_back(check_json("adjoint_pairing", true, ok, buf));
  }
  {
    const GraphOperator lap = laplacian_op(g);
    const double factor = g.directed() ? 1.0 : 2.0;
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd f = randv(n);
      const Eigen::VectorXd r =
          boundary_adjoint(g, coboundary(g, f)) + factor * lap.apply(f);
      worst = std::max(worst, r.cwiseAbs().maxCoeff() / (1.0 + f.norm()));
    }
    const bool ok = worst <= 1e-12;
    all_ok = all_ok && ok;
    std::snprintf(buf, sizeof buf, "max scaled factorization residual %.3g", worst);
    checks.push_back(check_json("laplacian_factorization", true, ok, buf));
  }
  {
    const GraphOperator d = dirac_op(g);
    const GraphOperator chi = grading_op(g);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = randv(n + m);
      const Eigen::VectorXd r = chi.apply(d.apply(x)) + d.apply(chi.apply(x));
      worst = std::max(worst, r.cwiseAbs().maxCoeff());
    }
    const bool ok = worst == 0.0;
    all_ok = all_ok && ok;
    std::snprintf(buf, sizeof buf, "max anticommutator entry %.3g", worst);
    checks.push_back(check_json("grading_anticommute", true, ok, buf));
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd f = randv(n);
      const double closed = commutator_norm(g, f);
      const double iterated = operator_norm(commutator_op(g, f), 1e-10).value;
      worst = std::max(worst, std::abs(closed - iterated));
    }
    const bool ok = worst <= 1e-8;
    all_ok = all_ok && ok;
    std::snprintf(buf, sizeof buf, "max closed-form vs iterated gap %.3g", worst);
    checks.push_back(check_json("commutator_norm_closed_form", true, ok, buf));
  }
  {
    const CycleSpace cs = cycle_space_dimension(g);
    const long expect = static_cast<long>(m) - (n - cs.components);
    const bool ok = cs.kernel_dim == expect;
    all_ok = all_ok && ok;
    std::snprintf(buf, sizeof buf, "kernel dim %ld, edge count minus spanning rank %ld",
                  static_cast<long>(cs.kernel_dim), expect);
    checks.push_back(check_json("cycle_space_dimension", true, ok, buf));
  }
  return checks;
}

/// One representative pair per support component: its smallest node id
/// against the support-farthest node (smallest id tie-break).
std::vector<std::pair<int, int>> representative_pairs(const Graph& g) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> seen(g.node_count(), false);
  for (int u = 0; u < g.node_count(); ++u) {
    if (seen[u]) continue;
    const auto comp = component_of(g, u);
    for (int v : comp) seen[v] = true;
    if (comp.size() < 2) continue;
    const auto dist = support_distances_from(g, u);
    int far = u;
    for (int v : comp)
      if (dist[v] > dist[far]) far = v;
    pairs.emplace_back(u, far);
  }
  return pairs;
}

int run_verify(const std::string& file, int from, int to, bool have_pair,
               const SolveOptions& opts, bool timing) {
  const Graph g = load_edge_list_file(file);
  const SolverConfig cfg = opts.config();
  const auto start = std::chrono::steady_clock::now();

  bool all_ok = true;
  ordered_json checks = identity_checks(g, opts.seed, all_ok);

  std::vector<std::pair<int, int>> pairs;
  if (have_pair)
    pairs.emplace_back(from, to);
  else
    pairs = representative_pairs(g);

  bool unreachable_pair = false;
  bool solver_trouble = false;
  ordered_json pair_reports = ordered_json::array();
  for (const auto& [a, b] : pairs) {
    const DistanceResult r = connes_distance(g, a, b, cfg);
    ordered_json pj;
    pj["from"] = a;
    pj["to"] = b;
    pj.update(result_json(r, false));
    if (r.status == SolveStatus::Unreachable) {
      unreachable_pair = true;
    } else {
      if (r.status == SolveStatus::BoundOnly) solver_trouble = true;
      const StructuralReport report = structural_checks(g, a, b, r, cfg);
      ordered_json pcs = ordered_json::array();
      for (const auto& c : report.checks)
        pcs.push_back(check_json(c.name, c.applicable, c.passed, c.details));
      pj["checks"] = std::move(pcs);
      all_ok = all_ok && report.all_passed();
    }
    pair_reports.push_back(std::move(pj));
  }

  const double ms = elapsed_ms(start);
  ordered_json out;
  out["schema_version"] = 1;
  out["command"] = "verify";
  out["graph"] = graph_summary(g);
  out["method"] = to_string(cfg.method);
  out["tol"] = snap12(cfg.tol);
  out["identity_checks"] = std::move(checks);
  out["pairs"] = std::move(pair_reports);
  out["all_passed"] = all_ok;
  if (timing) out["timing_ms"] = snap12(ms);
  std::cout << out.dump(2) << "\n";

  if (!all_ok || solver_trouble) return 3;
  if (have_pair && unreachable_pair) return 2;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral distance and operator calculus on finite graphs"};
  app.require_subcommand(1);

  std::string file, out_path, opname = "adjacency", kind;
  int from = 0, to = 0, threads = 1;
  bool with_certificate = false, timing = false, jsonl = false;
  double norm_tol = 1e-9;
  std::vector<long> gen_params;
  SolveOptions dist_opts, matrix_opts, verify_opts;

  auto* dist = app.add_subcommand("dist", "distance between two nodes");
  dist->add_option("file", file, "edge-list file")->required();
  dist->add_option("--from", from, "source node id")->required();
  dist->add_option("--to", to, "target node id")->required();
  add_solve_options(dist, dist_opts);
  dist->add_flag("--certificate", with_certificate, "include the optimizing node function");
  dist->add_flag("--timing", timing, "include wall-clock timing");

  auto* matrix = app.add_subcommand("matrix", "all-pairs distance matrix");
  matrix->add_option("file", file, "edge-list file")->required();
  matrix->add_option("--threads", threads, "worker threads (capped by CONNES_THREADS)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  matrix->add_flag("--jsonl", jsonl, "one JSON record per ordered pair");
  add_solve_options(matrix, matrix_opts);
  matrix->add_flag("--timing", timing, "include wall-clock timing");

  auto* norm = app.add_subcommand("norm", "operator norm estimate");
  norm->add_option("file", file, "edge-list file")->required();
  norm->add_option("--op", opname, "operator name")
      ->check(CLI::IsMember({"adjacency", "adjacency_sym", "adjacency_in", "adjacency_out",
                             "laplacian", "dirac", "coboundary"}))
      ->capture_default_str();
  norm->add_option("--tol", norm_tol, "relative accuracy of the estimate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  norm->add_flag("--timing", timing, "include wall-clock timing");

  auto* gen = app.add_subcommand("gen", "write a generated graph as an edge list");
  gen->add_option("kind", kind,
                  "path | cycle | directed_path | directed_lattice_2d | binary_tree")
      ->required();
  gen->add_option("params", gen_params, "generator parameters");
  gen->add_option("--out", out_path, "output file (stdout when omitted)");

  auto* verify = app.add_subcommand("verify", "operator-identity and structural-check suites");
  verify->add_option("file", file, "edge-list file")->required();
  auto* vfrom = verify->add_option("--from", from, "source node id (default: auto-picked pairs)");
  auto* vto = verify->add_option("--to", to, "target node id");
  vfrom->needs(vto);
  vto->needs(vfrom);
  add_solve_options(verify, verify_opts);
  verify->add_flag("--timing", timing, "include wall-clock timing");

  int rc = 0;
  dist->callback([&] { rc = run_dist(file, from, to, dist_opts, with_certificate, timing); });
  matrix->callback([&] { rc = run_matrix(file, threads, jsonl, matrix_opts, timing); });
  norm->callback([&] { rc = run_norm(file, opname, norm_tol, timing); });
  gen->callback([&] { rc = run_gen(kind, gen_params, out_path); });
  verify->callback([&] {
    rc = run_verify(file, from, to, static_cast<bool>(*vfrom), verify_opts, timing);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return rc;
}
