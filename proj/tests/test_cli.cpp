#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "doctest.h"
#include "json.hpp"
#include "result_table.hpp"
#include "run_config.hpp"

using namespace chsbs_cli;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig small_config() {
  RunConfig c;
  c.states = {"vacuum", "fock:2", "thermal"};
  c.scan_table_points = 12;
  c.vertex_points = 5;
  return c;
}

}  // namespace

TEST_CASE("config text round trip, including randomized values") {
  RunConfig c;
  CHECK(parse_config_text(to_config_text(c)) == c);

  std::mt19937 gen(99);
  std::uniform_real_distribution<double> u(-12.0, 2.0);
  for (int i = 0; i < 50; ++i) {
    c.gtilde = std::pow(10.0, u(gen));
    c.inverse_tau = std::pow(10.0, u(gen)) * 0.37;
    c.corr_rel_tol = std::pow(10.0, u(gen));
    c.gamma_points = 3 + i;
    const RunConfig back = parse_config_text(to_config_text(c));
    CHECK(back == c);
  }
}

TEST_CASE("config parser rejects unknown, repeated and malformed keys") {
  CHECK_THROWS_AS(parse_config_text("model.gtlde = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model.gtilde = 0.1\nmodel.gtilde = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model.gtilde = abc\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("model.gtilde\n"), ConfigError);
  try {
    parse_config_text("# comment\nmodel.gtilde = 0.1\nfit.nu_points = 2.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "fit.nu_points");
  }
}

TEST_CASE("validation names the offending key and canonicalizes states") {
  RunConfig c;
  c.convention = "sideways";
  try {
    validate_config(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "kernel.convention");
  }
  c = RunConfig{};
  c.states = {"fock:0", " mix:{1:0.25, 3:0.75} "};
  validate_config(c);
  CHECK(c.states.size() == 2);
  c.states = {"fock:1", "fock:1"};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
  c.states = {"fock:-1"};
  CHECK_THROWS_AS(validate_config(c), ConfigError);
}

TEST_CASE("JSON config, flat and nested, matches the text form") {
  const RunConfig text = parse_config_text(
      "model.gtilde = 0.01\nmodel.delta_c = 5\nkernel.convention = eq-bs-u-freq\nstates.list = vacuum, fock:2\n");
  const RunConfig nested = parse_config(
      R"({"model": {"gtilde": 0.01, "delta_c": 5}, "kernel": {"convention": "eq-bs-u-freq"},
          "states": ["vacuum", "fock:2"]})");
  const RunConfig flat = parse_config(
      R"({"model.gtilde": 0.01, "model.delta_c": 5, "kernel.convention": "eq-bs-u-freq",
          "states.list": ["vacuum", "fock:2"]})");
  CHECK(nested == text);
  CHECK(flat == text);
  CHECK_THROWS_AS(parse_config(R"({"model": {"colour": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
}

TEST_CASE("CSV round trip with quoting and non-finite values") {
  ResultTable t{"tc", "delta_c", {}};
  ResultRow a{"mix:{0:0.5,2:0.5}", "T_c", std::nan(""), 0.1 + 0.2, 1e-300, -0.0, INFINITY, 7, "find_tc",
              "note with \"quotes\", commas\nand a newline"};
  ResultRow b{"vacuum", "gamma", 1e-3, 1.0 / 3.0, std::nan(""), 1e-6, 1e-3, 24, "fit_gamma", ""};
  t.rows = {a, b};
  const std::string csv = to_csv(t);
  CHECK(csv.find("\r\n") != std::string::npos);
  const auto back = parse_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == a);
  CHECK(back[1] == b);
  CHECK_THROWS(parse_csv("wrong,header\r\n"));
}

TEST_CASE("JSON output carries the schema version and the config") {
  ResultTable t{"xi", "input", {{"vacuum", "xi", 1e-3, 63.4, std::nan(""), 3.0, 10.0, 12, "correlation_length", ""}}};
  const auto j = nlohmann::json::parse(to_json(t, to_config_text(RunConfig{})));
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["command"] == "xi");
  CHECK(j["energy_unit"] == "input");
  CHECK(j["config"]["model.gtilde"] == "0.025");
  CHECK(j["rows"][0]["uncertainty"].is_null());
  CHECK(j["rows"][0]["value"].get<double>() == 63.4);
}

TEST_CASE("plot script references only the CSV it was given") {
  ResultTable t{"scan", "delta_c", {{"vacuum", "M", 0.1, 0.9, 0, 0, 0, 0, "critical_function", ""}}};
  const std::string gp = to_plot_script(t, "scan.csv");
  CHECK(gp.find("file = 'scan.csv'") != std::string::npos);
  CHECK(gp.find(".json") == std::string::npos);
}

TEST_CASE("emit writes the requested files and fails on an unusable directory") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "chsbs_cli_emit_test";
  fs::remove_all(dir);
  ResultTable t{"tc", "delta_c", {{"vacuum", "T_c", NAN, 0.05, 0, 0, 0, 1, "find_tc", ""}}};
  const auto files = emit(t, "plot-script", dir.string(), "");
  CHECK(files == std::vector<std::string>{"tc.csv", "tc.gp"});
  CHECK(parse_csv(slurp(dir / "tc.csv")) == t.rows);
  std::ofstream(dir / "blocker") << "x";
  CHECK_THROWS(emit(t, "csv", (dir / "blocker").string(), ""));
  fs::remove_all(dir);
}

TEST_CASE("commands are deterministic across thread counts") {
  RunConfig c = small_config();
  validate_config(c);
  for (const std::string cmd : {"tc", "exponents", "vertex", "scan"}) {
    INFO(cmd);
    const auto one = run_command(cmd, c, {1, false, false});
    const auto four = run_command(cmd, c, {4, false, false});
    CHECK(to_csv(one.table) == to_csv(four.table));
    CHECK(one.exit_code == kExitOk);
  }
}

TEST_CASE("tc rows: Fock-diagonal states share the vacuum T_c; units follow delta_c") {
  RunConfig c = small_config();
  c.delta_c = 2.0;
  c.fermi_energy = 200.0;
  c.inverse_tau = 0.1;
  c.gtilde = 0.0125;
  validate_config(c);
  const auto scaled = run_command("tc", c, {2, false, false});
  c.energy_unit = "input";
  const auto raw = run_command("tc", c, {2, false, false});
  REQUIRE(scaled.table.rows.size() == raw.table.rows.size());
  CHECK(scaled.table.rows[0].value == doctest::Approx(raw.table.rows[0].value / 2.0).epsilon(1e-14));
  CHECK(scaled.table.rows[2].value == raw.table.rows[2].value / 2.0);
  CHECK(scaled.table.rows[0].value == scaled.table.rows[2].value);  // vacuum vs fock:2
}

TEST_CASE("thermal T_c sits within 1e-4 of vacuum when delta_c >> T_c") {
  RunConfig c = small_config();
  c.states = {"vacuum", "fock:1", "fock:5", "thermal"};
  validate_config(c);
  const auto r = run_command("tc", c, {4, false, false});
  std::vector<double> tc;
  for (const auto& row : r.table.rows)
    if (row.quantity == "T_c") tc.push_back(row.value);
  REQUIRE(tc.size() == 4);
  CHECK(tc[0] == tc[1]);
  CHECK(tc[0] == tc[2]);
  CHECK(tc[3] > tc[0]);
  CHECK(tc[3] / tc[0] - 1.0 < 1e-4);
}

TEST_CASE("rejected fits give NaN rows, a warning, and exit 3 only when strict") {
  RunConfig c = small_config();
  c.states = {"vacuum"};
  c.gamma_t_min = 0.05;  // far outside the asymptotic window
  c.gamma_t_max = 0.9;
  validate_config(c);
  const auto lax = run_command("exponents", c, {1, false, false});
  const auto& g = lax.table.rows[0];
  CHECK(g.quantity == "gamma");
  CHECK(std::isnan(g.value));
  CHECK(g.note.rfind("rejected", 0) == 0);
  CHECK(!lax.warnings.empty());
  CHECK(lax.exit_code == kExitOk);
  CHECK(run_command("exponents", c, {1, true, false}).exit_code == kExitNumerical);
}

TEST_CASE("verify command: clean run passes, injected fault fails") {
  RunConfig c = small_config();
  validate_config(c);
  const auto ok = run_command("verify", c, {1, false, false});
  CHECK(ok.exit_code == kExitOk);
  CHECK(ok.table.rows.size() > 20);
  const auto bad = run_command("verify", c, {1, false, true});
  CHECK(bad.exit_code == kExitVerifyFailed);
}

TEST_CASE("xi ratio of Fock(n) approaches sqrt(n+1)") {
  RunConfig c = small_config();
  c.states = {"fock:0", "fock:3"};
  validate_config(c);
  const auto r = run_command("xi", c, {2, false, false});
  double ratio0 = 0, ratio3 = 0;
  for (const auto& row : r.table.rows) {
    if (row.quantity != "xi_ratio") continue;
    (row.state == "fock:0" ? ratio0 : ratio3) = row.value;
  }
  CHECK(ratio0 == 1.0);
  CHECK(ratio3 == doctest::Approx(2.0).epsilon(1e-6));
}
