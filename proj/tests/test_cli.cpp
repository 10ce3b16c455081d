// End-to-end checks of the command line tool: every suite runs the installed
// binary through std::system and inspects exit code, stdout, and stderr.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string temp_root() {
  static std::string root = [] {
    char tmpl[] = "/tmp/connes_cli_XXXXXX";
    const char* dir = mkdtemp(tmpl);
    REQUIRE(dir != nullptr);
    return std::string(dir);
  }();
  return root;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
  const std::string out_file = temp_root() + "/stdout.txt";
  const std::string err_file = temp_root() + "/stderr.txt";
  const std::string cmd =
      env + (env.empty() ? "" : " ") + CLI_BIN + " " + args + " >" + out_file + " 2>" + err_file;
  const int raw = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  return r;
}

std::string write_file(const std::string& name, const std::string& body) {
  const std::string path = temp_root() + "/" + name;
  std::ofstream out(path);
  out << body;
  REQUIRE(out.good());
  return path;
}

std::string square_file() {
  static std::string path = [] {
    const RunResult r = run_cli("gen cycle 4 --out " + temp_root() + "/square.edges");
    REQUIRE(r.exit_code == 0);
    return temp_root() + "/square.edges";
  }();
  return path;
}

}  // namespace

TEST_CASE("gen writes an edge list and reports the graph shape") {
  const RunResult gen = run_cli("gen binary_tree 3 --out " + temp_root() + "/bt3.edges");
  REQUIRE(gen.exit_code == 0);
  const json j = json::parse(gen.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "gen");
  CHECK(j["kind"] == "binary_tree");
  CHECK(j["graph"]["nodes"] == 15);
  CHECK(j["graph"]["bonds"] == 14);
  CHECK(j["graph"]["directed"] == false);

  const RunResult stdout_gen = run_cli("gen path 2");
  REQUIRE(stdout_gen.exit_code == 0);
  CHECK(stdout_gen.out == "directed false\nnodes 3\nedge 0 1\nedge 1 2\n");

  CHECK(run_cli("gen moebius 3").exit_code == 1);
  CHECK(run_cli("gen path 1 2").exit_code == 1);
}

TEST_CASE("dist reports the square diagonal") {
  const RunResult r = run_cli("dist " + square_file() + " --from 0 --to 2");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "dist");
  CHECK(j["status"] == "CONVERGED");
  CHECK(std::abs(j["value"].get<double>() - std::sqrt(2.0)) <= 1e-6);
  CHECK(j["graph_distance"] == 2);
  CHECK(j["graph"]["nodes"] == 4);
  CHECK(j["graph"]["bonds"] == 4);
  CHECK(j["method"] == "barrier");
  CHECK(!j.contains("timing_ms"));
  CHECK(!j.contains("certificate"));
}

TEST_CASE("dist reruns are byte-identical without timing") {
  const std::string args = "dist " + square_file() + " --from 0 --to 2";
  const RunResult first = run_cli(args);
  const RunResult second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.out == second.out);

  const RunResult timed = run_cli(args + " --timing");
  const json j = json::parse(timed.out);
  CHECK(j.contains("timing_ms"));
  CHECK(j["timing_ms"].get<double>() >= 0.0);
}

TEST_CASE("dist emits a feasible certificate on request") {
  const RunResult r = run_cli("dist " + square_file() + " --from 0 --to 2 --certificate");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j.contains("certificate"));
  const auto values = j["certificate"]["values"].get<std::vector<double>>();
  REQUIRE(values.size() == 4);
  CHECK(values[0] == 0.0);
  CHECK(std::abs(values[2] - j["value"].get<double>()) <= 1e-6);
  CHECK(j["certificate"]["norm"].get<double>() <= 1.0 + 1e-9);
}

TEST_CASE("dist supports the fallback method") {
  const RunResult r =
      run_cli("dist " + square_file() + " --from 0 --to 2 --method projected_ascent");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["method"] == "projected_ascent");
  CHECK(std::abs(j["value"].get<double>() - std::sqrt(2.0)) <= 1e-5);

  CHECK(run_cli("dist " + square_file() + " --from 0 --to 2 --method simplex").exit_code == 1);
}

TEST_CASE("usage and input failures exit with 1") {
  CHECK(run_cli("dist").exit_code == 1);
  CHECK(run_cli("frobnicate x").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);

  const RunResult missing = run_cli("dist /nonexistent.edges --from 0 --to 1");
  CHECK(missing.exit_code == 1);
  CHECK(missing.err.find("error:") != std::string::npos);

  const std::string bad = write_file("bad.edges", "directed false\nedge 0 0\n");
  const RunResult loop = run_cli("dist " + bad + " --from 0 --to 1");
  CHECK(loop.exit_code == 1);
  CHECK(loop.err.find("error:") != std::string::npos);
}

TEST_CASE("disconnected pairs exit with 2") {
  const std::string split =
      write_file("split.edges", "directed false\nnodes 4\nedge 0 1\nedge 2 3\n");
  const RunResult r = run_cli("dist " + split + " --from 0 --to 2");
  CHECK(r.exit_code == 2);
  const json j = json::parse(r.out);
  CHECK(j["status"] == "UNREACHABLE");
  CHECK(j["value"].is_null());
  CHECK(j["graph_distance"].is_null());
}

TEST_CASE("matrix output is thread-count independent") {
  const RunResult gen = run_cli("gen path 3 --out " + temp_root() + "/p3.edges");
  REQUIRE(gen.exit_code == 0);
  const std::string file = temp_root() + "/p3.edges";

  const RunResult serial = run_cli("matrix " + file);
  const RunResult threaded = run_cli("matrix " + file + " --threads 4");
  REQUIRE(serial.exit_code == 0);
  REQUIRE(threaded.exit_code == 0);
  CHECK(serial.out == threaded.out);

  // The environment cap may reduce the pool but never the output.
  const RunResult capped = run_cli("matrix " + file + " --threads 4", "CONNES_THREADS=1");
  CHECK(capped.out == serial.out);

  const json j = json::parse(serial.out);
  REQUIRE(j["values"].size() == 4);
  CHECK(j["values"][0][0] == 0.0);
  CHECK(std::abs(j["values"][0][3].get<double>() - std::sqrt(5.0)) <= 1e-6);
  CHECK(j["statuses"][0][3] == "CONVERGED");

  const RunResult jsonl = run_cli("matrix " + file + " --jsonl");
  REQUIRE(jsonl.exit_code == 0);
  int lines = 0;
  std::istringstream ss(jsonl.out);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const json rec = json::parse(line);
    CHECK(rec.contains("from"));
    CHECK(rec.contains("value"));
    ++lines;
  }
  CHECK(lines == 16);
}

TEST_CASE("norm brackets the adjacency norm of the binary tree") {
  REQUIRE(run_cli("gen binary_tree 3 --out " + temp_root() + "/bt3.edges").exit_code == 0);
  const RunResult r = run_cli("norm " + temp_root() + "/bt3.edges");
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "norm");
  CHECK(j["operator"] == "adjacency");
  const double value = j["value"].get<double>();
  REQUIRE(j.contains("degree_bounds"));
  const double avg = j["degree_bounds"][0].get<double>();
  const double vmax = j["degree_bounds"][1].get<double>();
  CHECK(std::abs(avg - 28.0 / 15.0) <= 1e-9);
  CHECK(vmax == 3.0);
  CHECK(value >= avg - 1e-9);
  CHECK(value <= vmax + 1e-9);
}

TEST_CASE("norm covers the named operators") {
  const std::string file = square_file();
  const auto value_of = [&](const std::string& op) {
    const RunResult r = run_cli("norm " + file + " --op " + op);
    REQUIRE(r.exit_code == 0);
    return json::parse(r.out)["value"].get<double>();
  };
  CHECK(std::abs(value_of("adjacency") - 2.0) <= 1e-6);
  CHECK(std::abs(value_of("laplacian") - 4.0) <= 1e-6);
  CHECK(std::abs(value_of("dirac") - std::sqrt(8.0)) <= 1e-6);
  CHECK(std::abs(value_of("coboundary") - std::sqrt(8.0)) <= 1e-6);
  CHECK(run_cli("norm " + file + " --op resolvent").exit_code == 1);
}

TEST_CASE("verify runs both check suites") {
  const RunResult r = run_cli("verify " + square_file());
  REQUIRE(r.exit_code == 0);
  const json j = json::parse(r.out);
  CHECK(j["command"] == "verify");
  CHECK(j["all_passed"] == true);
  REQUIRE(j["identity_checks"].size() == 5);
  for (const auto& c : j["identity_checks"]) {
    CHECK(c["passed"] == true);
  }
  REQUIRE(j["pairs"].size() == 1);
  CHECK(j["pairs"][0]["status"] == "CONVERGED");
  CHECK(j["pairs"][0]["checks"].size() == 5);

  const RunResult pinned = run_cli("verify " + square_file() + " --from 0 --to 2");
  REQUIRE(pinned.exit_code == 0);
  const json pj = json::parse(pinned.out);
  CHECK(pj["pairs"][0]["from"] == 0);
  CHECK(pj["pairs"][0]["to"] == 2);

  CHECK(run_cli("verify " + square_file() + " --from 0").exit_code == 1);

  const std::string split =
      write_file("split2.edges", "directed false\nnodes 4\nedge 0 1\nedge 2 3\n");
  CHECK(run_cli("verify " + split + " --from 0 --to 2").exit_code == 2);
  CHECK(run_cli("verify " + split).exit_code == 0);
}

TEST_CASE("verify passes on a directed lattice") {
  const RunResult gen = run_cli("gen directed_lattice_2d 2 2 --out " + temp_root() + "/lat.edges");
  REQUIRE(gen.exit_code == 0);
  const RunResult r = run_cli("verify " + temp_root() + "/lat.edges");
  REQUIRE(r.exit_code == 0);
  CHECK(json::parse(r.out)["all_passed"] == true);
}
