#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "consflow/io.hpp"

using namespace consflow;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "consflow_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("CONSFLOW_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "CONSFLOW_BIN must point at the consflow binary");
  const fs::path out = work_dir() / "stdout.txt";
  const fs::path err = work_dir() / "stderr.txt";
  const std::string cmd = std::string(bin) + " " + args + " > " +
                          out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WEXITSTATUS(status);
  result.out = slurp(out);
  result.err = slurp(err);
  return result;
}

// Identity 2x2 fixture with b = (1, 2) on the two-vertex path.
struct Fixture {
  std::string matrix;
  std::string rhs;
  std::string graph;
};

Fixture identity_fixture() {
  const fs::path dir = work_dir();
  Fixture f{(dir / "I2.mtx").string(), (dir / "b2.txt").string(),
            (dir / "p2.edges").string()};
  write_matrix_market_file(f.matrix, DenseMatrix::identity(2));
  write_rhs_file(f.rhs, DenseVector{1, 2});
  write_edge_list_file(f.graph, generate(Topology::path, 2, 0));
  return f;
}

std::string json_field(const std::string& doc, const std::string& key) {
  const std::string needle = "\"" + key + "\":";
  const auto pos = doc.find(needle);
  if (pos == std::string::npos) return {};
  auto end = doc.find_first_of(",}\n", pos + needle.size());
  std::string value = doc.substr(pos + needle.size(), end - pos - needle.size());
  // Trim spaces and a leading space after the colon.
  while (!value.empty() && value.front() == ' ') value.erase(value.begin());
  return value;
}

}  // namespace

TEST_CASE("solve: identity fixture exits 0 with the expected solution") {
  const Fixture f = identity_fixture();
  const fs::path summary = work_dir() / "solve_summary.json";
  const CliResult r = run_cli("solve --matrix " + f.matrix + " --rhs " + f.rhs +
                              " --graph " + f.graph + " --summary " +
                              summary.string());
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("solution:") != std::string::npos);
  const std::string doc = slurp(summary);
  CHECK(json_field(doc, "converged") == "true");
  CHECK(doc.find("\"solution\": [0.99999999") != std::string::npos);
}

TEST_CASE("solve: disconnected graph is a setup error") {
  const Fixture f = identity_fixture();
  const fs::path graph = work_dir() / "disconnected.edges";
  {
    std::ofstream out(graph);
    out << "# two isolated vertices cannot appear in an edge list,\n"
           "# so use a 4-vertex graph with two components\n"
           "0 1\n2 3\n";
  }
  const fs::path matrix4 = work_dir() / "I4.mtx";
  const fs::path rhs4 = work_dir() / "b4.txt";
  write_matrix_market_file(matrix4.string(), DenseMatrix::identity(4));
  write_rhs_file(rhs4.string(), DenseVector{1, 2, 3, 4});
  const CliResult r = run_cli("solve --matrix " + matrix4.string() + " --rhs " +
                              rhs4.string() + " --graph " + graph.string());
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("disconnected") != std::string::npos);
}

TEST_CASE("solve: exhausting the step budget exits 2") {
  const Fixture f = identity_fixture();
  const CliResult r = run_cli("solve --matrix " + f.matrix + " --rhs " + f.rhs +
                              " --graph " + f.graph + " --max-steps 1");
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("not converged") != std::string::npos);
}

TEST_CASE("usage errors exit 1, help exits 0") {
  CHECK(run_cli("solve").exit_code == 1);  // missing required flags
  CHECK(run_cli("frobnicate").exit_code == 1);
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("solve --help").exit_code == 0);
}

TEST_CASE("solve: missing input file fails fast") {
  const Fixture f = identity_fixture();
  const CliResult r = run_cli("solve --matrix " + f.matrix +
                              " --rhs /nonexistent/b.txt --graph " + f.graph);
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("error:") != std::string::npos);
}

TEST_CASE("graph gen: deterministic bytes and valid single-vertex output") {
  const fs::path g1 = work_dir() / "r20a.edges";
  const fs::path g2 = work_dir() / "r20b.edges";
  CHECK(run_cli("graph gen --topology random_connected --n 20 --seed 7 --out " +
                g1.string())
            .exit_code == 0);
  CHECK(run_cli("graph gen --topology random_connected --n 20 --seed 7 --out " +
                g2.string())
            .exit_code == 0);
  CHECK(slurp(g1) == slurp(g2));
  CHECK(!slurp(g1).empty());

  const fs::path cycle = work_dir() / "c4.edges";
  CHECK(run_cli("graph gen --topology cycle --n 4 --out " + cycle.string())
            .exit_code == 0);
  CHECK(read_edge_list_file(cycle.string()).edge_count() == 4);

  const fs::path single = work_dir() / "p1.edges";
  CHECK(run_cli("graph gen --topology path --n 1 --out " + single.string())
            .exit_code == 0);
  CHECK(read_edge_list_file(single.string()).vertex_count() == 1);

  CHECK(run_cli("graph gen --topology path --n 0").exit_code == 1);
}

TEST_CASE("solve: traces are byte-identical across reruns") {
  const Fixture f = identity_fixture();
  const fs::path t1 = work_dir() / "trace1.jsonl";
  const fs::path t2 = work_dir() / "trace2.jsonl";
  const std::string base = "solve --matrix " + f.matrix + " --rhs " + f.rhs +
                           " --graph " + f.graph +
                           " --variant restoring --init free-random --seed 11 "
                           "--record-every 1 --trace ";
  CHECK(run_cli(base + t1.string()).exit_code == 0);
  CHECK(run_cli(base + t2.string()).exit_code == 0);
  const std::string bytes = slurp(t1);
  CHECK(bytes == slurp(t2));
  CHECK(!bytes.empty());
}

TEST_CASE("track: zero drift reproduces the solve summary") {
  const Fixture f = identity_fixture();
  const fs::path s_solve = work_dir() / "s_solve.json";
  const fs::path s_track = work_dir() / "s_track.json";
  const std::string shared = " --matrix " + f.matrix + " --rhs " + f.rhs +
                             " --graph " + f.graph +
                             " --variant restoring --init free-random --seed 3"
                             " --summary ";
  CHECK(run_cli("solve" + shared + s_solve.string()).exit_code == 0);
  CHECK(run_cli("track" + shared + s_track.string() + " --drift-amplitude 0")
            .exit_code == 0);
  const std::string solve_doc = slurp(s_solve);
  const std::string track_doc = slurp(s_track);
  for (const char* key : {"converged", "steps", "solution", "residual", "spread"}) {
    CHECK(json_field(solve_doc, key) == json_field(track_doc, key));
  }
  CHECK(json_field(track_doc, "steady_state_lag") != "");
}

TEST_CASE("track: plain variant plus drift is refused") {
  const Fixture f = identity_fixture();
  const CliResult r = run_cli("track --matrix " + f.matrix + " --rhs " + f.rhs +
                              " --graph " + f.graph +
                              " --variant plain --drift-amplitude 0.5 "
                              "--drift-omega 0.1");
  CHECK(r.exit_code == 1);
  CHECK(r.err.find("manifolds move") != std::string::npos);
}

TEST_CASE("track: seeded drift run reports a finite steady-state lag") {
  const Fixture f = identity_fixture();
  const fs::path summary = work_dir() / "s_drift.json";
  const CliResult r = run_cli("track --matrix " + f.matrix + " --rhs " + f.rhs +
                              " --graph " + f.graph +
                              " --variant restoring --max-steps 2000"
                              " --drift-amplitude 0.5 --drift-omega 0.2"
                              " --summary " + summary.string());
  CHECK(r.exit_code == 0);
  const std::string lag = json_field(slurp(summary), "steady_state_lag");
  REQUIRE(!lag.empty());
  CHECK(std::stod(lag) > 0.0);
  CHECK(std::stod(lag) < 10.0);
}

TEST_CASE("analyze: fixture report and rank guard") {
  const Fixture f = identity_fixture();
  const fs::path report = work_dir() / "report.json";
  const CliResult r = run_cli("analyze --matrix " + f.matrix + " --graph " +
                              f.graph + " --summary " + report.string());
  CHECK(r.exit_code == 0);
  const std::string doc = slurp(report);
  CHECK(json_field(doc, "lambda2") == "2");
  CHECK(json_field(doc, "theorem2_holds") == "true");
  CHECK(json_field(doc, "equilibrium_dim") == "2");

  const fs::path dup = work_dir() / "dup.mtx";
  write_matrix_market_file(dup.string(), DenseMatrix{{1, 0}, {1, 0}});
  const CliResult bad =
      run_cli("analyze --matrix " + dup.string() + " --graph " + f.graph);
  CHECK(bad.exit_code == 1);
  CHECK(bad.err.find("rank deficient") != std::string::npos);
}

TEST_CASE("analyze: graph subreport for a path-3 fixture") {
  const fs::path matrix3 = work_dir() / "I3.mtx";
  const fs::path graph3 = work_dir() / "p3.edges";
  write_matrix_market_file(matrix3.string(), DenseMatrix::identity(3));
  write_edge_list_file(graph3.string(), generate(Topology::path, 3, 0));
  const fs::path report = work_dir() / "p3_report.json";
  CHECK(run_cli("analyze --matrix " + matrix3.string() + " --graph " +
                graph3.string() + " --summary " + report.string())
            .exit_code == 0);
  const std::string doc = slurp(report);
  CHECK(json_field(doc, "diameter") == "2");
  // Path-3 spectrum {0,1,3}.
  CHECK(std::stod(json_field(doc, "lambda2")) == doctest::Approx(1.0));
}

TEST_CASE("a config file presets flags and the command line overrides it") {
  const Fixture f = identity_fixture();
  const fs::path ini = work_dir() / "defaults.ini";
  {
    std::ofstream out(ini);
    out << "[solve]\n"
           "variant=restoring\n"
           "init=free-random\n"
           "seed=9\n"
           "tol=1e-6\n";
  }
  const std::string tail = " solve --matrix " + f.matrix + " --rhs " + f.rhs +
                           " --graph " + f.graph + " --summary ";
  const fs::path s1 = work_dir() / "cfg1.json";
  CHECK(run_cli("--config " + ini.string() + tail + s1.string()).exit_code == 0);
  const std::string doc1 = slurp(s1);
  CHECK(json_field(doc1, "variant") == "\"restoring\"");
  CHECK(json_field(doc1, "seed") == "9");
  CHECK(json_field(doc1, "convergence_tol") == "9.9999999999999995e-07");

  const fs::path s2 = work_dir() / "cfg2.json";
  CHECK(run_cli("--config " + ini.string() + tail + s2.string() + " --tol 1e-4")
            .exit_code == 0);
  CHECK(json_field(slurp(s2), "convergence_tol") == "0.0001");
}

TEST_CASE("sweep: emits one record per entry") {
  const fs::path out = work_dir() / "sweep.jsonl";
  const CliResult r = run_cli(
      "sweep --topologies path,cycle --sizes 3,4 --seeds 1 --out " + out.string());
  CHECK(r.exit_code == 0);
  const std::string doc = slurp(out);
  CHECK(std::count(doc.begin(), doc.end(), '\n') == 4);
  CHECK(doc.find("\"theorem2_holds\":true") != std::string::npos);
}
