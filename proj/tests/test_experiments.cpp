#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "pesinlab/errors.hpp"
#include "pesinlab/experiments.hpp"

using namespace pesinlab;
namespace fs = std::filesystem;

namespace {

LabConfig small_doubling_config() {
  return parse_config_text(R"({
    "map": {"kind": "doubling"},
    "measures": [
      {"kind": "lebesgue", "name": "leb"},
      {"kind": "dirac", "name": "dirac0", "point": 0.0}
    ],
    "experiment": {
      "n_points": 400, "times": [50, 200, 800], "epsilons": [0.05, 0.1],
      "schedule": [4, 6, 8, 10, 12], "decay_points": 20000, "target": "dirac0",
      "orbit_len": 100000
    },
    "rng": {"seed": 42},
    "workers": 2,
    "output": {"dir": "out", "format": "both"}
  })");
}

std::string cli_path() {
  if (const char* p = std::getenv("PESINLAB_BIN")) return p;
  return "";
}

int run_cli(const std::string& args) {
  const std::string cmd = cli_path() + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, validation") {
  const LabConfig cfg = small_doubling_config();
  CHECK(cfg.map.kind == "doubling");
  CHECK(cfg.seed == 42);
  CHECK(cfg.workers == 2);
  CHECK(cfg.measures.size() == 2);
  CHECK(cfg.exp.times.size() == 3);

  CHECK_THROWS_AS(parse_config_text("{not json"), LabError);
  CHECK_THROWS_AS(parse_config_text(R"({"output": {"format": "xml"}})"), LabError);
  CHECK_THROWS_AS(parse_config_text(R"({"workers": 0})"), LabError);
  CHECK_THROWS_AS(build_system(parse_config_text(R"({"map": {"kind": "wat"}})").map),
                  LabError);
  // torus block wires factor sub-specs
  const LabConfig tc = parse_config_text(
      R"({"torus": {"left": {"kind": "example1"}, "right": {"kind": "example2"}}})");
  CHECK(tc.map.kind == "torus");
  const BuiltSystem t = build_system(tc.map);
  CHECK(t.is_torus());
  CHECK(t.product_skeletons.size() == 2);
}

TEST_CASE("measure specs resolve against the system") {
  const LabConfig cfg = parse_config_text(R"({
    "map": {"kind": "example2"},
    "measures": [
      {"kind": "mu_K", "name": "inner", "skeleton_label": "K2", "depth": 14},
      {"kind": "empirical", "name": "emp", "x0": 0.3, "n": 50}
    ]})");
  const BuiltSystem sys = build_system(cfg.map);
  const Measure inner = build_measure(cfg.measures[0], sys);
  CHECK(inner.kind == Measure::Kind::cantor_bernoulli);
  CHECK(inner.depth == 14);
  CHECK(inner.name == "inner");
  const Measure emp = build_measure(cfg.measures[1], sys);
  CHECK(emp.px.size() == 50);
  MeasureSpec bad;
  bad.kind = "mu_K";
  bad.skeleton_label = "nope";
  CHECK_THROWS_AS(build_measure(bad, sys), LabError);
}

TEST_CASE("validate command summarizes residuals and conjugacy") {
  LabConfig cfg = parse_config_text(R"({"map": {"kind": "example1"}})");
  const LabReport rep = cmd_validate(cfg);
  CHECK(rep.summary["maps"][0]["lambda"].get<double>() == 2.0);
  CHECK(rep.summary["maps"][0]["degree"].get<int>() == 3);
  CHECK(rep.summary["gap_conjugacy"]["max_gap_residual"].get<double>() <= 1e-12);
  // infeasible parameters surface as ParamsInfeasible
  LabConfig bad = parse_config_text(R"({"map": {"kind": "example1", "k": 1}})");
  CHECK_THROWS_AS(cmd_validate(bad), LabError);
}

TEST_CASE("cantor-report emits the recursion table") {
  LabConfig cfg = parse_config_text(R"({"map": {"kind": "affine3", "N": 12}})");
  const LabReport rep = cmd_cantor_report(cfg);
  REQUIRE(rep.tables.size() == 1);
  const auto& t = rep.tables[0];
  CHECK(t.header == std::vector<std::string>{"generation", "L_n", "m_A_n", "alpha_n", "gap_len"});
  REQUIRE(t.rows.size() == 12);
  // m_A_n column follows 2 (2/3)^n
  for (int n = 1; n <= 12; ++n) {
    const double m = std::stod(t.rows[static_cast<std::size_t>(n - 1)][2]);
    CHECK(m == doctest::Approx(2.0 * std::pow(2.0 / 3.0, n)).epsilon(1e-14));
  }
  // example-1 defaults: the final mass row stays consistent with the identity
  LabConfig e1 = parse_config_text(R"({"map": {"kind": "example1"}})");
  const LabReport r1 = cmd_cantor_report(e1);
  const auto& rows = r1.tables[0].rows;
  REQUIRE(rows.size() == 24);
  const double m24 = std::stod(rows[23][2]);
  const double total = r1.summary["totals"][0]["total_measure"].get<double>();
  CHECK(m24 > total);
  CHECK(m24 < 1.1);
  CHECK(total == doctest::Approx(1.0887664832879433).epsilon(1e-12));
}

TEST_CASE("pesin-check covers each configured measure") {
  LabConfig cfg = small_doubling_config();
  cfg.exp.orbit_len = 100000;
  const LabReport rep = cmd_pesin_check(cfg);
  REQUIRE(rep.summary["reports"].size() == 2);
  for (const auto& r : rep.summary["reports"]) CHECK(r["ruelle_ok"].get<bool>());
  CHECK(rep.summary["reports"][1]["defect"].get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("basin-scan fractions behave and are worker-invariant") {
  LabConfig cfg = small_doubling_config();
  cfg.workers = 1;
  const LabReport one = cmd_basin_scan(cfg);
  cfg.workers = 4;
  const LabReport four = cmd_basin_scan(cfg);
  CHECK(one.tables[0].to_string() == four.tables[0].to_string());
  CHECK(one.summary.dump() == four.summary.dump());
  // Lebesgue fraction at the largest time under eps = 0.1 is near 1,
  // the Dirac candidate attracts nothing
  double leb_frac = -1, dirac_frac = -1;
  for (const auto& row : one.tables[0].rows)
    if (row[0] == "800" && row[1] == "0.1") {
      if (row[2] == "leb") leb_frac = std::stod(row[3]);
      if (row[2] == "dirac0") dirac_frac = std::stod(row[3]);
    }
  CHECK(leb_frac >= 0.95);
  CHECK(dirac_frac <= 0.01);
}

TEST_CASE("decay-rate: monotone fractions toward a defect-positive target") {
  LabConfig cfg = small_doubling_config();
  const LabReport rep = cmd_decay_rate(cfg);
  const auto& rows = rep.tables[0].rows;
  REQUIRE(rows.size() == 5);
  double prev = 1e9;
  for (const auto& row : rows) {
    const double f = std::stod(row[1]);
    CHECK(f < prev);
    prev = f;
  }
  CHECK(rep.summary["fit"]["target_defect_r"].get<double>() ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.summary["fit"]["rate"].get<double>() > 0.0);

  // negative control: Lebesgue is pseudo-physical here, no decay
  LabConfig neg = small_doubling_config();
  neg.exp.target = "leb";
  const LabReport nrep = cmd_decay_rate(neg);
  const auto& nrows = nrep.tables[0].rows;
  CHECK(std::stod(nrows.back()[1]) >= std::stod(nrows.front()[1]));
}

TEST_CASE("distortion table shows the dichotomy side by side") {
  LabConfig cfg = parse_config_text(
      R"({"map": {"kind": "example1"}, "experiment": {"generations": 8}})");
  const LabReport rep = cmd_distortion(cfg);
  const auto& rows = rep.tables[0].rows;
  REQUIRE(rows.size() == 16);
  for (int n = 1; n <= 8; ++n) {
    CHECK(rows[static_cast<std::size_t>(n - 1)][0] == "affine3");
    CHECK(std::stod(rows[static_cast<std::size_t>(n - 1)][4]) == 1.0);
  }
  CHECK(std::stod(rows[15][4]) > 2.0);   // example1 ratio at n = 8
  CHECK(std::stod(rows[15][5]) > 1.088); // its atom mass stays positive
}

TEST_CASE("reports are written to disk in the requested formats") {
  LabConfig cfg = parse_config_text(R"({"map": {"kind": "doubling"}})");
  const LabReport rep = cmd_validate(cfg);
  const std::string dir = (fs::temp_directory_path() / "pesinlab_wr_test").string();
  fs::remove_all(dir);
  const auto files = write_report(rep, dir, "both");
  CHECK(files.size() == 2);
  for (const auto& f : files) CHECK(fs::exists(f));
  fs::remove_all(dir);
}

TEST_CASE("CLI exit codes") {
  if (cli_path().empty()) {
    MESSAGE("PESINLAB_BIN not set; skipping CLI process tests");
    return;
  }
  const auto dir = fs::temp_directory_path() / "pesinlab_cli_test";
  fs::create_directories(dir);
  const std::string good = (dir / "good.json").string();
  write_text_file(good, R"({"map": {"kind": "example1"},
    "output": {"dir": ")" + (dir / "out").string() + R"("}})");
  CHECK(run_cli("validate --config " + good) == 0);

  const std::string infeasible = (dir / "bad.json").string();
  write_text_file(infeasible, R"({"map": {"kind": "example1", "k": 1}})");
  CHECK(run_cli("validate --config " + infeasible) == 2);
  CHECK(run_cli("cantor-report --config " + infeasible) == 2);

  const std::string nomeasures = (dir / "nm.json").string();
  write_text_file(nomeasures, R"({"map": {"kind": "doubling"}})");
  CHECK(run_cli("pesin-check --config " + nomeasures) == 3);

  CHECK(run_cli("validate --config " + (dir / "missing.json").string()) == 2);
  fs::remove_all(dir);
}

TEST_CASE("CLI seed precedence: flag beats env beats config") {
  if (cli_path().empty()) return;
  const auto dir = fs::temp_directory_path() / "pesinlab_seed_test";
  fs::create_directories(dir);
  const std::string cfg = (dir / "cfg.json").string();
  write_text_file(cfg, R"({
    "map": {"kind": "doubling"},
    "measures": [{"kind": "lebesgue", "name": "leb"}],
    "experiment": {"n_points": 200, "times": [64], "epsilons": [0.05]},
    "rng": {"seed": 42}})");
  auto scan = [&](const std::string& prefix, const std::string& extra,
                  const std::string& out) {
    const std::string cmd = prefix + cli_path() + " basin-scan --config " + cfg + " " +
                            extra + " --out " + (dir / out).string() + " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    return read_text_file((dir / out / "basin_scan.csv").string());
  };
  const std::string by_flag = scan("", "--seed 7", "flag");
  const std::string by_env = scan("PESINLAB_SEED=7 ", "", "env");
  const std::string by_cfg = scan("", "", "cfg");
  const std::string flag_wins = scan("PESINLAB_SEED=9 ", "--seed 7", "both");
  CHECK(by_flag == by_env);
  CHECK(by_flag == flag_wins);
  CHECK(by_flag != by_cfg);
  fs::remove_all(dir);
}
