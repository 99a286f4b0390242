// JSON config parsing and the experiment runner: strict field validation,
// presets, and deterministic result files.

#include "sptq/run_config.hpp"

#include "sptq/calibration.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using namespace sptq;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_dir(const char* leaf) {
  const auto dir = std::filesystem::temp_directory_path() / "sptq-config-tests" / leaf;
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("defaults from an empty config") {
  const RunConfig cfg = parse_config("{}");
  CHECK(cfg.experiment.empty());
  CHECK_FALSE(cfg.exact);
  CHECK(cfg.theta_points == 181);
  CHECK(cfg.counting.pair_rate == 4000.0);
  CHECK(cfg.imperfections.is_ideal());
  CHECK(cfg.blocked == "T");
}

TEST_CASE("unknown and ill-typed fields name themselves") {
  try {
    parse_config(R"({"bogus": 1})");
    FAIL("unknown field accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "bogus");
  }

  try {
    parse_config(R"({"counting": {"pair_rate_hz": "fast"}})");
    FAIL("ill-typed field accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "counting.pair_rate_hz");
  }

  try {
    parse_config(R"({"imperfections": {"plate_loss": 0.1}})");
    FAIL("unknown nested field accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "imperfections.plate_loss");
  }

  try {
    parse_config(R"({"scan": {"momentum_port": 2}})");
    FAIL("bad port accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "scan.momentum_port");
  }

  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment": "teleportation"})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scan": {"blocked": "X"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"scan": {"theta_points": 3}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"imperfections": {"bs_reflectivity": 1.5}})"),
                  ConfigError);
}

TEST_CASE("exact mode excludes a counting section") {
  CHECK_NOTHROW(parse_config(R"({"exact": true})"));
  CHECK_NOTHROW(parse_config(R"({"counting": {"rng_seed": 7}})"));
  try {
    parse_config(R"({"exact": true, "counting": {"rng_seed": 7}})");
    FAIL("conflicting modes accepted");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "exact");
  }
}

TEST_CASE("imperfection preset and overrides") {
  const RunConfig paper = parse_config(R"({"imperfections": {"preset": "paper"}})");
  const ImperfectionSet want = paper_imperfections();
  CHECK(paper.imperfections.pbs_transmission_h ==
        doctest::Approx(want.pbs_transmission_h).epsilon(1e-15));
  CHECK(paper.imperfections.gate_error_mean ==
        doctest::Approx(want.gate_error_mean).epsilon(1e-15));
  CHECK(paper.imperfections.envelope_contrast ==
        doctest::Approx(want.envelope_contrast).epsilon(1e-15));

  // Overrides sit on top of the preset.
  const RunConfig tweaked = parse_config(
      R"({"imperfections": {"preset": "paper", "bs_reflectivity": 0.48}})");
  CHECK(tweaked.imperfections.bs_reflectivity == 0.48);
  CHECK(tweaked.imperfections.gate_error_mean ==
        doctest::Approx(want.gate_error_mean).epsilon(1e-15));

  const RunConfig inf = parse_config(
      R"({"imperfections": {"coherence_length_m": "infinite"}})");
  CHECK(std::isinf(inf.imperfections.coherence_length));
  CHECK_THROWS_AS(parse_config(R"({"imperfections": {"preset": "perfect"}})"), ConfigError);
}

TEST_CASE("running the truth table writes both result files") {
  RunConfig cfg;
  cfg.experiment = "truth-table";
  cfg.exact = true;
  cfg.output_dir = temp_dir("tt");
  const RunOutput out = run_experiment(cfg);

  const std::string csv = slurp(out.table_path);
  int lines = 0;
  for (char ch : csv)
    if (ch == '\n') ++lines;
  CHECK(lines == 17);  // header + 16 rows
  CHECK(csv.rfind("input_index,input_label,output_index,output_label,probability", 0) == 0);

  const nlohmann::json doc = nlohmann::json::parse(slurp(out.result_path));
  CHECK(doc["experiment"] == "truth-table");
  CHECK(doc["exact"] == true);
  CHECK(doc.contains("library_version"));
  CHECK(doc["rng_algorithm"] == "mt19937_64/ptrs-poisson");
  const auto err = doc["results"]["row_error"];
  REQUIRE(err.size() == 4);
  for (const auto& e : err) CHECK(e.get<double>() == 0.0);
}

TEST_CASE("same config and seed give byte-identical outputs") {
  RunConfig cfg;
  cfg.experiment = "pol-scan";
  cfg.counting.rng_seed = 777;
  cfg.theta_points = 46;

  cfg.output_dir = temp_dir("runA");
  const RunOutput a = run_experiment(cfg);
  cfg.output_dir = temp_dir("runB");
  const RunOutput b = run_experiment(cfg);
  CHECK(slurp(a.table_path) == slurp(b.table_path));

  // The JSON differs only in the echoed output directory.
  nlohmann::json da = nlohmann::json::parse(slurp(a.result_path));
  nlohmann::json db = nlohmann::json::parse(slurp(b.result_path));
  da["config"].erase("output_dir");
  db["config"].erase("output_dir");
  CHECK(da == db);

  cfg.counting.rng_seed = 778;
  cfg.output_dir = temp_dir("runC");
  const RunOutput c = run_experiment(cfg);
  CHECK(slurp(a.table_path) != slurp(c.table_path));
}

TEST_CASE("experiment dispatch summaries") {
  RunConfig cfg;
  cfg.exact = true;

  cfg.experiment = "swap";
  cfg.output_dir = temp_dir("swap");
  nlohmann::json doc = nlohmann::json::parse(slurp(run_experiment(cfg).result_path));
  CHECK(doc["results"]["fidelity_to_target"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));

  cfg.experiment = "ghz";
  cfg.output_dir = temp_dir("ghz");
  doc = nlohmann::json::parse(slurp(run_experiment(cfg).result_path));
  CHECK(doc["results"]["fidelity_to_target"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-12));

  cfg.experiment = "momentum-check";
  cfg.blocked = "T";
  cfg.output_dir = temp_dir("mc");
  doc = nlohmann::json::parse(slurp(run_experiment(cfg).result_path));
  CHECK(doc["results"]["p_signal_top"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["results"]["coincidence_probability"].get<double>() ==
        doctest::Approx(0.5).epsilon(1e-12));

  cfg.experiment = "pol-scan";
  cfg.output_dir = temp_dir("scan");
  doc = nlohmann::json::parse(slurp(run_experiment(cfg).result_path));
  CHECK(doc["results"]["visibility"]["value"].get<double>() ==
        doctest::Approx(1.0).epsilon(1e-9));
  CHECK(doc["results"]["fit"]["converged"] == true);

  // Ideal fringe visibility at the default 25 degree analysis angle is
  // sin(50 deg).
  cfg.experiment = "ifo-scan";
  cfg.output_dir = temp_dir("ifo");
  doc = nlohmann::json::parse(slurp(run_experiment(cfg).result_path));
  CHECK(doc["results"]["visibility"]["value"].get<double>() ==
        doctest::Approx(std::sin(50.0 * std::numbers::pi / 180.0)).epsilon(1e-6));

  cfg.experiment = "visibility-curve";
  cfg.curve_theta_points = 7;
  cfg.ifo.time_points = 101;
  cfg.output_dir = temp_dir("curve");
  doc = nlohmann::json::parse(slurp(run_experiment(cfg).result_path));
  CHECK(doc["results"]["crossing_angle_deg"].get<double>() ==
        doctest::Approx(45.0).epsilon(1e-6));
  CHECK(std::abs(doc["results"]["crossing_shift_deg"].get<double>()) < 1e-6);

  cfg.experiment = "";
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("config file loading") {
  const std::string dir = temp_dir("load");
  const std::string path = dir + "/cfg.json";
  {
    std::ofstream out(path);
    out << R"({"experiment": "truth-table", "exact": true})";
  }
  const RunConfig cfg = load_config(path);
  CHECK(cfg.experiment == "truth-table");
  CHECK(cfg.exact);
  CHECK_THROWS_AS(load_config(dir + "/missing.json"), IoError);
}
