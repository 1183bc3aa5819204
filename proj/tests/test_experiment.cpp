#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coexim/experiment.hpp"

using namespace coexim;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  return json::parse(in);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// A fast little sweep spec built on the shipped default-parameter preset.
exp::ExperimentSpec tiny_spec() {
  json spec;
  spec["base"] = load_json_file("configs/smart_home.json");
  spec["base"]["sim_duration_s"] = 3000.0;
  spec["base"]["warmup_s"] = 300.0;
  spec["base"]["sensor"]["count_per_apartment"] = 5;
  spec["base"]["layout"]["rows"] = 1;
  spec["base"]["layout"]["cols"] = 2;
  spec["sweep"] = json::array(
      {{{"path", "sensor.count_per_apartment"}, {"values", {5, 10}}},
       {{"path", "mac"},
        {"values",
         json::array({{{"scheme", "uncoordinated"}},
                      {{"scheme", "coordinated"}, {"reuse_factor", 2}}})}}});
  spec["replications"] = 2;
  spec["seed_base"] = 400;
  spec["overlay_analytic"] = true;
  return exp::parse_spec(spec);
}

}  // namespace

TEST_CASE("default preset parses to the documented values") {
  const json j = load_json_file("configs/smart_home.json");
  const sim::SimConfig c = exp::parse_sim_config(j);
  CHECK(c.layout.rows == 3);
  CHECK(c.layout.cols == 3);
  CHECK(c.layout.apartment_side_m == 20.0);
  CHECK(c.pathloss.carrier_freq_mhz == 868.0);
  CHECK(c.pathloss.ext_wall_loss_db == 20.0);
  CHECK(c.pathloss.int_wall_loss_db == 10.0);
  CHECK(c.sensor.count_per_apartment == 20);
  CHECK(c.sensor.period_s == 900.0);
  CHECK(c.sensor.payload_bits == 600.0);
  CHECK(c.sensor.data_rate_bps == 100000.0);
  CHECK(c.sensor.tx_power_mw == 10.0);
  CHECK(c.actuator.count_per_apartment == 10);
  CHECK(c.interference_threshold_w == 5e-9);
  CHECK(c.mac.kind == sim::MacKind::Uncoordinated);
}

TEST_CASE("density sweep spec loads and its base matches the preset") {
  const exp::ExperimentSpec s = exp::load_spec("configs/density_sweep.json");
  CHECK(s.axes.size() == 2);
  CHECK(s.axes[0].path == "sensor.count_per_apartment");
  CHECK(s.axes[1].path == "mac");
  CHECK(s.replications == 3);
  const sim::SimConfig base = exp::parse_sim_config(s.base_config);
  CHECK(base.sensor.period_s == 900.0);
  CHECK(base.mac.kind == sim::MacKind::Uncoordinated);
  CHECK(base.retrial.max_transmissions == 1);
}

TEST_CASE("unknown keys are rejected with a suggestion") {
  json j = load_json_file("configs/smart_home.json");
  j["interference_treshold_w"] = 1e-9;  // typo alongside the real key
  try {
    exp::parse_sim_config(j);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("interference_treshold_w") != std::string::npos);
    CHECK(msg.find("did you mean 'interference_threshold_w'") != std::string::npos);
  }

  json j2 = load_json_file("configs/smart_home.json");
  j2["sensor_cnt"] = 12;
  try {
    exp::parse_sim_config(j2);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("did you mean 'sensor'") != std::string::npos);
  }

  json j3 = load_json_file("configs/smart_home.json");
  j3["sensor"]["cont_per_apartment"] = 12;
  try {
    exp::parse_sim_config(j3);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("count_per_apartment") != std::string::npos);
  }
}

TEST_CASE("semantic validation lists every violated invariant") {
  json j = load_json_file("configs/smart_home.json");
  j["mac"] = {{"scheme", "coordinated"}, {"reuse_factor", 0}};
  j["interference_threshold_w"] = 0.0;
  try {
    exp::parse_sim_config(j);
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("reuse_factor") != std::string::npos);
    CHECK(msg.find("interference_threshold_w") != std::string::npos);
  }
}

TEST_CASE("spec parse failures carry position and path diagnostics") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "coexim_test_spec";
  fs::create_directories(dir);
  const fs::path bad = dir / "bad.json";
  {
    std::ofstream out(bad);
    out << "{\n  \"base\": {\n";  // truncated
  }
  try {
    exp::load_spec(bad.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("bad.json:") != std::string::npos);  // file:line:col prefix
  }
  // a sweep axis must point at an existing config field
  json spec;
  spec["base"] = load_json_file("configs/smart_home.json");
  spec["sweep"] = json::array({{{"path", "sensor.not_a_field"}, {"values", {1, 2}}}});
  CHECK_THROWS_AS(exp::parse_spec(spec), std::invalid_argument);
  fs::remove_all(dir);
}

TEST_CASE("one-replication sweep row equals a direct run") {
  exp::ExperimentSpec s = tiny_spec();
  s.replications = 1;
  s.axes.resize(1);
  s.axes[0].values.resize(1);
  const exp::SweepResult r = exp::run_sweep(s, 1);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].error.empty());

  sim::SimConfig direct = exp::parse_sim_config(s.base_config);
  direct.sensor.count_per_apartment = 5;
  direct.seed = s.seed_base;
  const sim::KpiReport expect = sim::run(direct);
  CHECK(exp::report_to_json(expect).dump() == exp::report_to_json(r.rows[0].report).dump());
}

TEST_CASE("sweep emits byte-identical output across runs and worker counts") {
  namespace fs = std::filesystem;
  const exp::ExperimentSpec s = tiny_spec();
  const fs::path dir = fs::temp_directory_path() / "coexim_test_emit";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const exp::SweepResult r1 = exp::run_sweep(s, 1);
  const exp::SweepResult r2 = exp::run_sweep(s, 1);
  const exp::SweepResult r3 = exp::run_sweep(s, 3);
  exp::emit(s, r1, (dir / "a_").string());
  exp::emit(s, r2, (dir / "b_").string());
  exp::emit(s, r3, (dir / "c_").string());

  const std::string a = slurp(dir / "a_results.csv");
  CHECK(a == slurp(dir / "b_results.csv"));
  CHECK(a == slurp(dir / "c_results.csv"));
  CHECK(slurp(dir / "a_manifest.json") == slurp(dir / "b_manifest.json"));
  CHECK(slurp(dir / "a_summary.csv") == slurp(dir / "c_summary.csv"));

  // header names the sweep axes and the analytic overlay columns
  CHECK(a.find("sensor.count_per_apartment") != std::string::npos);
  CHECK(a.find("p_suc_analytic") != std::string::npos);
  CHECK(a.rfind("point,replication,seed", 0) == 0);
  // 2 points x 2 macs x 2 replications rows plus the header
  CHECK(std::count(a.begin(), a.end(), '\n') == 9);

  fs::remove_all(dir);
}

TEST_CASE("emitted spec round-trips through load_spec") {
  namespace fs = std::filesystem;
  const exp::ExperimentSpec s = tiny_spec();
  const fs::path dir = fs::temp_directory_path() / "coexim_test_roundtrip";
  fs::remove_all(dir);
  fs::create_directories(dir);
  exp::SweepResult empty;
  for (const auto& a : s.axes) empty.axis_paths.push_back(a.path);
  exp::emit(s, empty, (dir / "rt_").string());

  const exp::ExperimentSpec back = exp::load_spec((dir / "rt_spec.json").string());
  CHECK(back.raw.dump() == s.raw.dump());
  CHECK(back.seed_base == s.seed_base);
  CHECK(back.replications == s.replications);
  CHECK(back.axes.size() == s.axes.size());
  fs::remove_all(dir);
}

TEST_CASE("a failing sweep point is recorded per row and the sweep continues") {
  exp::ExperimentSpec s = tiny_spec();
  s.replications = 1;
  s.axes.resize(1);
  s.axes[0].values = {json(5), json(-3)};  // the second point cannot validate
  const exp::SweepResult r = exp::run_sweep(s, 1);
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[0].error.empty());
  CHECK(!r.rows[1].error.empty());
  CHECK(r.rows[1].report.generated == 0);
}

TEST_CASE("analytic overlay reflects the access scheme") {
  sim::SimConfig c = exp::parse_sim_config(load_json_file("configs/smart_home.json"));
  const exp::AnalyticOverlay unc = exp::analytic_overlay(c);

  sim::SimConfig coord = c;
  coord.mac.kind = sim::MacKind::CentralizedCoordinated;
  coord.mac.reuse_factor = 9;
  const exp::AnalyticOverlay co = exp::analytic_overlay(coord);

  // the K=9 pattern on a 3x3 grid removes every tier-1 co-slot neighbor but
  // compresses the in-apartment contention
  CHECK(unc.p_suc < 1.0);
  CHECK(co.p_suc < 1.0);
  CHECK(unc.capacity > 0.0);
  CHECK(co.capacity > 0.0);
  CHECK(co.capacity < unc.capacity);  // per-slot capacity at K=9

  analytics::TrafficProfile p = exp::base_profile(coord);
  CHECK(p.devices_per_network == 30);
  CHECK(p.mean_airtime == doctest::Approx(0.006).epsilon(1e-12));
  CHECK(p.reuse_factor == 9);
}

TEST_CASE("config hash is stable and key-order independent") {
  json a = {{"x", 1}, {"y", 2}};
  json b = {{"y", 2}, {"x", 1}};
  CHECK(exp::config_hash(a) == exp::config_hash(b));
  b["x"] = 3;
  CHECK(exp::config_hash(a) != exp::config_hash(b));
  CHECK(exp::config_hash(a).size() == 16);
}
