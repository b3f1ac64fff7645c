#include <cmath>
#include <sstream>

#include "doctest.h"
#include "mecc/experiments.hpp"
#include "support.hpp"

using namespace mecc;

namespace {

const char* kDefaultConfig =
    "# paper-style defaults\n"
    "layout.user_ap_distance_m = 250\n"
    "layout.helper_distance_m  = 120\n"
    "radio.bandwidth_mhz = 1\n"
    "radio.noise_dbm = -70\n"
    "task.block_length_s = 0.1\n"
    "task.bits_mbit = 0.02\n"
    "sweep.variable = T\n"
    "sweep.start = 0.02\n"
    "sweep.step = 0.04\n"
    "sweep.stop = 0.1\n"
    "schemes = local,joint\n";

ExperimentConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_SUITE_BEGIN("experiments");

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watts(-70) == doctest::Approx(1e-10).epsilon(1e-12));
  CHECK(dbm_to_watts(40) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(db_to_linear(-60) == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("config parsing") {
  SUBCASE("defaults plus overrides") {
    const ExperimentConfig cfg = config_from(kDefaultConfig);
    CHECK(cfg.helper_distance_m == 120);
    CHECK(cfg.task_mbit == doctest::Approx(0.02));
    REQUIRE(cfg.sweep_variable.has_value());
    CHECK(*cfg.sweep_variable == SweepVariable::block_length);
    CHECK(cfg.schemes.size() == 2);
  }

  SUBCASE("unknown key is a config error") {
    CHECK_THROWS_AS(config_from("task.bogus = 1\n"), ConfigError);
  }

  SUBCASE("bad number is a config error") {
    CHECK_THROWS_AS(config_from("task.bits_mbit = lots\n"), ConfigError);
  }

  SUBCASE("duplicate key is a config error") {
    CHECK_THROWS_AS(config_from("radio.noise_dbm = -70\nradio.noise_dbm = -60\n"), ConfigError);
  }

  SUBCASE("helper outside the segment is a config error") {
    CHECK_THROWS_AS(config_from("layout.helper_distance_m = 300\n"), ConfigError);
  }

  SUBCASE("empty scheme list parses") {
    const ExperimentConfig cfg = config_from("schemes =\n");
    CHECK(cfg.schemes.empty());
  }

  SUBCASE("full-block benchmark switch") {
    CHECK_FALSE(config_from("").communication_coop_full_block);
    CHECK(config_from("schemes.communication_coop_full_block = true\n")
              .communication_coop_full_block);
    CHECK_THROWS_AS(config_from("schemes.communication_coop_full_block = maybe\n"),
                    ConfigError);
  }
}

TEST_CASE("scenario construction from the layout") {
  const ExperimentConfig cfg = config_from("");
  const Scenario s = build_scenario(cfg);
  CHECK(std::fabs(s.gain_user_helper - 5.787037037e-10) < 1e-13);
  CHECK(std::fabs(s.gain_helper_ap - 4.551661356e-10) < 1e-12);
  CHECK(s.gain_user_ap == doctest::Approx(6.4e-11).epsilon(1e-9));
  CHECK(s.noise_ap_w == doctest::Approx(1e-10).epsilon(1e-12));
  CHECK(s.p_user_max_w == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(s.task_bits == doctest::Approx(2e4));
  CHECK(s.block_length_s == doctest::Approx(0.1));
}

TEST_CASE("sweep value enumeration") {
  const ExperimentConfig cfg = config_from(kDefaultConfig);
  const std::vector<double> v = sweep_values(cfg);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == doctest::Approx(0.02));
  CHECK(v[1] == doctest::Approx(0.06));
  CHECK(v[2] == doctest::Approx(0.1));
}

TEST_CASE("sweep runs and is byte-identical across runs") {
  ExperimentConfig cfg = config_from(kDefaultConfig);
  cfg.sweep_step = 0.08;  // two points keep this test quick
  const auto rows1 = run_sweep(cfg);
  const auto rows2 = run_sweep(cfg);
  REQUIRE(rows1.size() == 2);
  std::ostringstream a, b;
  write_sweep_csv(cfg, rows1, a);
  write_sweep_csv(cfg, rows2, b);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("\r") == std::string::npos);

  // One header plus one line per sweep point.
  int lines = 0;
  for (char c : a.str()) lines += c == '\n';
  CHECK(lines == 3);
}

TEST_CASE("empty scheme list yields a header-only csv") {
  ExperimentConfig cfg = config_from(kDefaultConfig);
  cfg.schemes.clear();
  const auto rows = run_sweep(cfg);
  CHECK(rows.empty());
  std::ostringstream out;
  write_sweep_csv(cfg, rows, out);
  int lines = 0;
  for (char c : out.str()) lines += c == '\n';
  CHECK(lines == 1);
  CHECK(out.str().substr(0, 14) == "sweep_variable");
}

TEST_CASE("float formatting round-trips") {
  for (double v : {8e-4, 0.1, 5.787037037037037e-10, 1.0 / 3.0, 2e4}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}

TEST_CASE("feasibility table") {
  ExperimentConfig cfg = config_from(kDefaultConfig);
  const auto rows = run_feasibility(cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(row.l_max_bits > 0);
    CHECK(row.requested_bits == doctest::Approx(2e4));
    CHECK(row.feasible);
  }
  std::ostringstream out;
  write_feasibility_csv(cfg, rows, out);
  CHECK(out.str().find("l_max_bits") != std::string::npos);
}

TEST_SUITE_END();
