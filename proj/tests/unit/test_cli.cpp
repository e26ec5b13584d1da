#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <doctest.h>

#include "commands.hpp"
#include "config.hpp"
#include "csv.hpp"
#include "experiments.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("rcdnet_test_" + name + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int config_error_line(const std::string& text) {
  try {
    rcdnet::parse_config(text);
  } catch (const rcdnet::ConfigError& e) {
    return e.line();
  }
  FAIL("config accepted: " << text);
  return -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(RCDNET_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kSmallSolve = R"(topology:
  kind: complete
  n: 12
objective:
  family: quad_logistic
  seed: 4
run:
  tau: [2, 3]
  distribution: inverse_lipschitz
  seeds: 4
  iterations: 600
)";

rcdnet::CommandContext quiet(const fs::path& dir) { return {dir, true, nullptr}; }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config errors carry line numbers and fields") {
  CHECK(config_error_line("topology:\n  kind: complete\n  n: 1\n") == 3);
  CHECK(config_error_line("topology:\n  kind: hypercube\n  n: 4\n") == 2);
  CHECK(config_error_line("topology:\n  kind: ring\n  n: 4\n  colour: red\n") == 4);
  CHECK(config_error_line("topology:\n  kind: ring\n  n: 4\nrun:\n  tau: [2, 9]\n") == 5);
  CHECK(config_error_line("topology:\n  kind: ring\n  n: 4\nrun:\n  seeds: many\n") == 5);
  try {
    rcdnet::parse_config("topology:\n  kind: ring\n  n: 4\n  edge_prob: 2\n");
    FAIL("accepted");
  } catch (const rcdnet::ConfigError& e) {
    CHECK(e.field() == "topology.edge_prob");
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  CHECK_THROWS_AS(rcdnet::parse_config("topology: [1, 2"), rcdnet::ConfigError);
  CHECK_THROWS_AS(rcdnet::load_config("/nonexistent/config.yaml"), std::exception);
}

TEST_CASE("config defaults and shipped configs parse") {
  const auto c = rcdnet::parse_config("topology:\n  kind: complete\n  n: 10\n");
  CHECK(c.run.seeds == 20);
  CHECK(c.run.taus == std::vector<int>{2});
  CHECK(c.run.distribution == rcdnet::DistKind::inverse_lipschitz);
  for (const auto& entry : fs::directory_iterator(RCDNET_CONFIG_DIR))
    CHECK_NOTHROW(rcdnet::load_config(entry.path()));
}

TEST_CASE("csv round trip") {
  TempDir dir("csv");
  rcdnet::CsvTable t;
  t.add_meta("name", "trace");
  t.add_meta("f_star", 0.1 + 0.2);
  t.columns = {"k", "value"};
  t.rows = {{0, 1.0 / 3}, {1, -2.5e-300}, {2, 1e300}, {3, std::nan("")}};
  rcdnet::write_csv_atomic(t, dir.path / "t.csv");
  const auto back = rcdnet::read_csv(dir.path / "t.csv");
  CHECK(back.meta == t.meta);
  CHECK(back.columns == t.columns);
  REQUIRE(back.rows.size() == 4);
  for (int r = 0; r < 3; ++r) CHECK(back.rows[r] == t.rows[r]);
  CHECK(std::isnan(back.rows[3][1]));
  CHECK(std::stod(*back.find_meta("f_star")) == 0.1 + 0.2);
  CHECK(slurp(dir.path / "t.csv").rfind("# ", 0) == 0);
  for (const auto& e : fs::directory_iterator(dir.path)) CHECK(e.path().filename() == "t.csv");
}

TEST_CASE("solve: deterministic output, aggregate equals mean of per-seed files") {
  TempDir a("solve_a"), b("solve_b");
  const auto config = rcdnet::parse_config(kSmallSolve);
  rcdnet::cmd_solve(config, quiet(a.path));
  rcdnet::cmd_solve(config, quiet(b.path));
  for (const auto& e : fs::directory_iterator(a.path))
    CHECK(slurp(e.path()) == slurp(b.path / e.path().filename()));

  for (int tau : {2, 3}) {
    const auto agg = rcdnet::read_csv(a.path / ("solve_tau" + std::to_string(tau) + ".csv"));
    CHECK(agg.columns == std::vector<std::string>{"k", "k_over_N", "gap_mean", "gap_min", "gap_max",
                                                  "bound_thm1", "bound_thm3"});
    std::vector<rcdnet::CsvTable> runs;
    for (int s = 0; s < 4; ++s)
      runs.push_back(rcdnet::read_csv(a.path / ("solve_tau" + std::to_string(tau) + "_seed" +
                                                std::to_string(s) + ".csv")));
    const auto gap = runs[0].column("gap");
    const auto mean = agg.column("gap_mean");
    for (std::size_t r = 0; r < agg.rows.size(); ++r) {
      double sum = 0.0, lo = 1e300, hi = -1e300;
      for (const auto& run : runs) {
        REQUIRE(run.rows.size() == agg.rows.size());
        sum += run.rows[r][gap];
        lo = std::min(lo, run.rows[r][gap]);
        hi = std::max(hi, run.rows[r][gap]);
      }
      CHECK(agg.rows[r][mean] == doctest::Approx(sum / 4).epsilon(1e-14).scale(0.0));
      CHECK(agg.rows[r][agg.column("gap_min")] == lo);
      CHECK(agg.rows[r][agg.column("gap_max")] == hi);
      if (agg.rows[r][0] > 0) CHECK(agg.rows[r][mean] <= agg.rows[r][agg.column("bound_thm3")]);
    }
  }
}

TEST_CASE("design: report and distribution files") {
  TempDir dir("design");
  const auto config = rcdnet::parse_config(R"(topology:
  kind: complete
  n: 5
objective:
  family: quadratic
run:
  tau: [2]
design:
  iterations: 100
  export_sdp: true
)");
  rcdnet::cmd_design(config, quiet(dir.path));
  const auto report = rcdnet::read_csv(dir.path / "design_tau2.csv");
  const auto lam = report.column("lambda2");
  for (const auto& row : report.rows) CHECK(row[lam] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(fs::exists(dir.path / "sdp_rate_tau2.dat-s"));
  CHECK(fs::exists(dir.path / "sdp_lambda2_tau2.dat-s"));
  const auto p = rcdnet::read_distribution_csv(dir.path / "dist_tau2_uniform.csv");
  CHECK(p.probabilities().size() == 10);
}

TEST_CASE("feasibility and compare write their columns") {
  TempDir dir("feas");
  auto config = rcdnet::load_config(fs::path(RCDNET_CONFIG_DIR) / "feasibility_balls.yaml");
  config.run.seeds = 3;
  config.run.iterations = 500;
  rcdnet::cmd_feasibility(config, quiet(dir.path));
  const auto t = rcdnet::read_csv(dir.path / "feasibility_tau2.csv");
  CHECK(t.columns == std::vector<std::string>{"k", "infeas_mean", "infeas_bound", "subopt_mean", "subopt_bound"});
  for (const auto& row : t.rows)
    if (row[0] > 0) CHECK(row[1] <= row[2]);

  auto cmp = rcdnet::parse_config(kSmallSolve);
  cmp.run.seeds = 2;
  rcdnet::cmd_compare(cmp, quiet(dir.path));
  const auto c = rcdnet::read_csv(dir.path / "compare.csv");
  CHECK(c.columns.size() == 6);
  CHECK(std::stod(*c.find_meta("residual_projected_gradient")) <= 1e-9);
  CHECK(std::stod(*c.find_meta("residual_rcd_max")) <= 1e-9);
}

TEST_CASE("binary exit codes") {
  TempDir dir("exit");
  const auto cfg = dir.path / "c.yaml";
  std::ofstream(cfg) << kSmallSolve;
  const auto bad = dir.path / "bad.yaml";
  std::ofstream(bad) << "topology:\n  kind: ring\n  n: 1\n";
  const std::string out = " --out-dir " + (dir.path / "out").string();

  CHECK(run_binary("solve --quiet --seeds 2 --config " + cfg.string() + out) == 0);
  CHECK(fs::exists(dir.path / "out" / "solve_tau2.csv"));
  CHECK(run_binary("solve --quiet --config " + bad.string() + out) == 2);
  CHECK(run_binary("solve --quiet --tau 40 --config " + cfg.string() + out) == 2);
  CHECK(run_binary("solve --quiet --seeds 0 --config " + cfg.string() + out) == 2);
  CHECK(run_binary("frobnicate --config " + cfg.string()) == 2);
  CHECK(run_binary("solve") == 2);

  // Empty intersection: the dual diverges and the run aborts.
  const auto apart = dir.path / "apart.yaml";
  std::ofstream(apart) << R"(topology:
  kind: complete
  n: 2
run:
  seeds: 1
  iterations: 100000
feasibility:
  v0: [0]
  sets:
    - {kind: box, lo: [0], hi: [1]}
    - {kind: box, lo: [5], hi: [6]}
)";
  CHECK(run_binary("feasibility --quiet --config " + apart.string() + out) == 3);
}

}
