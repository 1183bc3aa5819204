#include "coexim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace coexim::exp {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw std::invalid_argument(path + ": " + msg);
}

int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Object reader that tracks which keys were consumed; finish() rejects
// leftovers with a nearest-key suggestion so config typos fail closed.
class ObjReader {
 public:
  ObjReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  const json* find(const char* key) {
    allowed_.emplace_back(key);
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  const json& req(const char* key) {
    const json* p = find(key);
    if (!p) fail(path_, std::string("missing required key '") + key + "'");
    return *p;
  }

  double req_num(const char* key) { return as_num(req(key), key); }
  double opt_num(const char* key, double def) {
    const json* p = find(key);
    return p ? as_num(*p, key) : def;
  }
  int req_int(const char* key) { return as_int(req(key), key); }
  int opt_int(const char* key, int def) {
    const json* p = find(key);
    return p ? as_int(*p, key) : def;
  }
  std::uint64_t opt_u64(const char* key, std::uint64_t def) {
    const json* p = find(key);
    if (!p) return def;
    if (!p->is_number_unsigned() && !p->is_number_integer())
      fail(path_, std::string("key '") + key + "' must be an integer");
    return p->get<std::uint64_t>();
  }
  bool opt_bool(const char* key, bool def) {
    const json* p = find(key);
    if (!p) return def;
    if (!p->is_boolean()) fail(path_, std::string("key '") + key + "' must be a boolean");
    return p->get<bool>();
  }
  std::string req_str(const char* key) {
    const json& v = req(key);
    if (!v.is_string()) fail(path_, std::string("key '") + key + "' must be a string");
    return v.get<std::string>();
  }
  std::string opt_str(const char* key, const std::string& def) {
    const json* p = find(key);
    if (!p) return def;
    if (!p->is_string()) fail(path_, std::string("key '") + key + "' must be a string");
    return p->get<std::string>();
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (seen_.count(it.key())) continue;
      // suggest the nearest known key when the miss is plausibly a typo
      std::string best;
      int best_d = std::max(2, static_cast<int>(it.key().size()) / 2) + 1;
      for (const auto& k : allowed_) {
        const int d = edit_distance(it.key(), k);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      std::string msg = "unknown key '" + it.key() + "'";
      if (!best.empty()) msg += " (did you mean '" + best + "'?)";
      fail(path_, msg);
    }
  }

  const std::string& path() const { return path_; }

 private:
  double as_num(const json& v, const char* key) const {
    if (!v.is_number()) fail(path_, std::string("key '") + key + "' must be a number");
    return v.get<double>();
  }
  int as_int(const json& v, const char* key) const {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      fail(path_, std::string("key '") + key + "' must be an integer");
    return v.get<int>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
  std::vector<std::string> allowed_;
};

propagation::BuildingLayout parse_layout(const json& j, const std::string& path) {
  ObjReader r(j, path);
  propagation::BuildingLayout L;
  L.rows = r.opt_int("rows", L.rows);
  L.cols = r.opt_int("cols", L.cols);
  L.floors = r.opt_int("floors", L.floors);
  L.apartment_side_m = r.opt_num("apartment_side_m", L.apartment_side_m);
  L.floor_height_m = r.opt_num("floor_height_m", L.floor_height_m);
  L.rooms_per_side = r.opt_int("rooms_per_side", L.rooms_per_side);
  r.finish();
  return L;
}

propagation::PathlossParams parse_pathloss(const json& j, const std::string& path) {
  ObjReader r(j, path);
  propagation::PathlossParams p;
  p.carrier_freq_mhz = r.opt_num("carrier_freq_mhz", p.carrier_freq_mhz);
  p.pathloss_exponent = r.opt_num("pathloss_exponent", p.pathloss_exponent);
  p.floor_loss_db = r.opt_num("floor_loss_db", p.floor_loss_db);
  p.ext_wall_loss_db = r.opt_num("ext_wall_loss_db", p.ext_wall_loss_db);
  p.int_wall_loss_db = r.opt_num("int_wall_loss_db", p.int_wall_loss_db);
  p.antenna_gain_db = r.opt_num("antenna_gain_db", p.antenna_gain_db);
  p.hw_loss_db = r.opt_num("hw_loss_db", p.hw_loss_db);
  p.min_distance_m = r.opt_num("min_distance_m", p.min_distance_m);
  r.finish();
  return p;
}

sim::TrafficClassConfig parse_traffic_class(const json& j, const std::string& path) {
  ObjReader r(j, path);
  sim::TrafficClassConfig t;
  t.count_per_apartment = r.req_int("count_per_apartment");
  const std::string mode = r.opt_str("mode", "periodic");
  if (mode == "periodic") {
    t.mode = sim::TrafficMode::Periodic;
    t.period_s = r.req_num("period_s");
  } else if (mode == "poisson") {
    t.mode = sim::TrafficMode::Poisson;
    t.rate_per_s = r.req_num("rate_per_s");
  } else {
    fail(path, "mode must be 'periodic' or 'poisson'");
  }
  t.payload_bits = r.opt_num("payload_bits", t.payload_bits);
  t.overhead_bits = r.opt_num("overhead_bits", t.overhead_bits);
  t.data_rate_bps = r.opt_num("data_rate_bps", t.data_rate_bps);
  t.tx_power_mw = r.opt_num("tx_power_mw", t.tx_power_mw);
  r.finish();
  return t;
}

analytics::EnergyProfile parse_energy(const json& j, const std::string& path) {
  ObjReader r(j, path);
  analytics::EnergyProfile e;
  e.battery_energy_j = r.opt_num("battery_j", e.battery_energy_j);
  e.switch_energy_j = r.opt_num("switch_energy_j", e.switch_energy_j);
  e.circuit_power_w = r.opt_num("circuit_power_w", e.circuit_power_w);
  e.process_time_s = r.opt_num("process_time_s", e.process_time_s);
  e.listen_time_s = r.opt_num("listen_time_s", e.listen_time_s);
  e.ack_time_s = r.opt_num("ack_time_s", e.ack_time_s);
  e.pa_inverse_efficiency = r.opt_num("pa_inverse_efficiency", e.pa_inverse_efficiency);
  e.tx_power_w = r.opt_num("tx_power_w", e.tx_power_w);
  e.payload_bits = r.opt_num("payload_bits", e.payload_bits);
  e.overhead_bits = r.opt_num("overhead_bits", e.overhead_bits);
  e.data_rate_bps = r.opt_num("data_rate_bps", e.data_rate_bps);
  e.report_period_s = r.opt_num("report_period_s", e.report_period_s);
  r.finish();
  return e;
}

sim::MacScheme parse_mac(const json& j, const std::string& path) {
  ObjReader r(j, path);
  sim::MacScheme m;
  const std::string scheme = r.req_str("scheme");
  if (scheme == "uncoordinated") {
    m.kind = sim::MacKind::Uncoordinated;
  } else if (scheme == "coordinated") {
    m.kind = sim::MacKind::CentralizedCoordinated;
    m.reuse_factor = r.req_int("reuse_factor");
    if (const json* a = r.find("subframe_assignment")) {
      if (!a->is_array()) fail(path, "subframe_assignment must be an array");
      for (const auto& v : *a) m.subframe_assignment.push_back(v.get<int>());
    }
  } else if (scheme == "mab") {
    m.kind = sim::MacKind::DistributedMab;
    m.reuse_factor = r.req_int("reuse_factor");
    m.exploration_weight = r.opt_num("exploration_weight", m.exploration_weight);
    const std::string scope = r.opt_str("learner_scope", "gateway");
    if (scope == "gateway")
      m.learner_scope = sim::LearnerScope::Gateway;
    else if (scope == "device")
      m.learner_scope = sim::LearnerScope::Device;
    else
      fail(path, "learner_scope must be 'gateway' or 'device'");
    const std::string vm = r.opt_str("value_mode", "cumulative");
    if (vm == "cumulative")
      m.value_mode = bandit::Ucb1::ValueMode::Cumulative;
    else if (vm == "mean")
      m.value_mode = bandit::Ucb1::ValueMode::Mean;
    else
      fail(path, "value_mode must be 'cumulative' or 'mean'");
  } else {
    fail(path, "scheme must be 'uncoordinated', 'coordinated' or 'mab'");
  }
  r.finish();
  return m;
}

sim::RetrialPolicy parse_retrial(const json& j, const std::string& path) {
  ObjReader r(j, path);
  sim::RetrialPolicy p;
  const std::string mode = r.opt_str("mode", "backoff");
  if (mode == "backoff") {
    p.mode = sim::RetrialPolicy::Mode::FixedBackoff;
    p.backoff_s = r.opt_num("backoff_s", p.backoff_s);
  } else if (mode == "poisson") {
    p.mode = sim::RetrialPolicy::Mode::Poisson;
    p.rate_per_s = r.req_num("rate_per_s");
  } else {
    fail(path, "mode must be 'backoff' or 'poisson'");
  }
  p.max_transmissions = r.req_int("max_transmissions");
  r.finish();
  return p;
}

sim::OverlayParams parse_overlay(const json& j, const std::string& path) {
  ObjReader r(j, path);
  sim::OverlayParams o;
  o.i_adjacent = r.opt_num("i_adjacent", o.i_adjacent);
  o.i_diagonal = r.opt_num("i_diagonal", o.i_diagonal);
  o.target_success = r.opt_num("target_success", o.target_success);
  r.finish();
  return o;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string axis_cell(const json& v) {
  if (v.is_number()) return fmt_double(v.get<double>());
  if (v.is_string()) return csv_cell(v.get<std::string>());
  return csv_cell(v.dump());
}

}  // namespace

sim::SimConfig parse_sim_config(const json& j) {
  ObjReader r(j, "config");
  sim::SimConfig c;
  c.layout = parse_layout(r.req("layout"), "config.layout");
  c.pathloss = parse_pathloss(r.req("pathloss"), "config.pathloss");
  c.sensor = parse_traffic_class(r.req("sensor"), "config.sensor");
  c.actuator = parse_traffic_class(r.req("actuator"), "config.actuator");
  c.energy = parse_energy(r.req("energy"), "config.energy");
  c.mac = parse_mac(r.req("mac"), "config.mac");
  c.interference_threshold_w = r.req_num("interference_threshold_w");
  c.frame_length_s = r.req_num("frame_length_s");
  c.retrial = parse_retrial(r.req("retrial"), "config.retrial");
  c.ack_timeout_s = r.req_num("ack_timeout_s");
  c.sim_duration_s = r.req_num("sim_duration_s");
  c.warmup_s = r.opt_num("warmup_s", -1.0);
  c.seed = r.opt_u64("seed", 1);
  c.record_packet_trace = r.opt_bool("record_packet_trace", false);
  c.record_bandit_rounds = r.opt_bool("record_bandit_rounds", false);
  if (const json* o = r.find("overlay")) c.overlay = parse_overlay(*o, "config.overlay");
  r.finish();
  c.validate();
  return c;
}

json sim_config_to_json(const sim::SimConfig& c) {
  json j;
  j["layout"] = {{"rows", c.layout.rows},
                 {"cols", c.layout.cols},
                 {"floors", c.layout.floors},
                 {"apartment_side_m", c.layout.apartment_side_m},
                 {"floor_height_m", c.layout.floor_height_m},
                 {"rooms_per_side", c.layout.rooms_per_side}};
  j["pathloss"] = {{"carrier_freq_mhz", c.pathloss.carrier_freq_mhz},
                   {"pathloss_exponent", c.pathloss.pathloss_exponent},
                   {"floor_loss_db", c.pathloss.floor_loss_db},
                   {"ext_wall_loss_db", c.pathloss.ext_wall_loss_db},
                   {"int_wall_loss_db", c.pathloss.int_wall_loss_db},
                   {"antenna_gain_db", c.pathloss.antenna_gain_db},
                   {"hw_loss_db", c.pathloss.hw_loss_db},
                   {"min_distance_m", c.pathloss.min_distance_m}};
  auto traffic = [](const sim::TrafficClassConfig& t) {
    json o = {{"count_per_apartment", t.count_per_apartment},
              {"payload_bits", t.payload_bits},
              {"overhead_bits", t.overhead_bits},
              {"data_rate_bps", t.data_rate_bps},
              {"tx_power_mw", t.tx_power_mw}};
    if (t.mode == sim::TrafficMode::Periodic) {
      o["mode"] = "periodic";
      o["period_s"] = t.period_s;
    } else {
      o["mode"] = "poisson";
      o["rate_per_s"] = t.rate_per_s;
    }
    return o;
  };
  j["sensor"] = traffic(c.sensor);
  j["actuator"] = traffic(c.actuator);
  j["energy"] = {{"battery_j", c.energy.battery_energy_j},
                 {"switch_energy_j", c.energy.switch_energy_j},
                 {"circuit_power_w", c.energy.circuit_power_w},
                 {"process_time_s", c.energy.process_time_s},
                 {"listen_time_s", c.energy.listen_time_s},
                 {"ack_time_s", c.energy.ack_time_s},
                 {"pa_inverse_efficiency", c.energy.pa_inverse_efficiency},
                 {"tx_power_w", c.energy.tx_power_w},
                 {"payload_bits", c.energy.payload_bits},
                 {"overhead_bits", c.energy.overhead_bits},
                 {"data_rate_bps", c.energy.data_rate_bps},
                 {"report_period_s", c.energy.report_period_s}};
  switch (c.mac.kind) {
    case sim::MacKind::Uncoordinated:
      j["mac"] = {{"scheme", "uncoordinated"}};
      break;
    case sim::MacKind::CentralizedCoordinated:
      j["mac"] = {{"scheme", "coordinated"}, {"reuse_factor", c.mac.reuse_factor}};
      if (!c.mac.subframe_assignment.empty())
        j["mac"]["subframe_assignment"] = c.mac.subframe_assignment;
      break;
    case sim::MacKind::DistributedMab:
      j["mac"] = {{"scheme", "mab"},
                  {"reuse_factor", c.mac.reuse_factor},
                  {"exploration_weight", c.mac.exploration_weight},
                  {"learner_scope",
                   c.mac.learner_scope == sim::LearnerScope::Gateway ? "gateway" : "device"},
                  {"value_mode",
                   c.mac.value_mode == bandit::Ucb1::ValueMode::Cumulative ? "cumulative"
                                                                           : "mean"}};
      break;
  }
  j["interference_threshold_w"] = c.interference_threshold_w;
  j["frame_length_s"] = c.frame_length_s;
  if (c.retrial.mode == sim::RetrialPolicy::Mode::FixedBackoff) {
    j["retrial"] = {{"mode", "backoff"},
                    {"backoff_s", c.retrial.backoff_s},
                    {"max_transmissions", c.retrial.max_transmissions}};
  } else {
    j["retrial"] = {{"mode", "poisson"},
                    {"rate_per_s", c.retrial.rate_per_s},
                    {"max_transmissions", c.retrial.max_transmissions}};
  }
  j["ack_timeout_s"] = c.ack_timeout_s;
  j["sim_duration_s"] = c.sim_duration_s;
  if (c.warmup_s >= 0) j["warmup_s"] = c.warmup_s;
  j["seed"] = c.seed;
  if (c.record_packet_trace) j["record_packet_trace"] = true;
  if (c.record_bandit_rounds) j["record_bandit_rounds"] = true;
  return j;
}

ExperimentSpec parse_spec(const json& j) {
  ObjReader r(j, "spec");
  ExperimentSpec s;
  s.raw = j;
  s.base_config = r.req("base");
  parse_sim_config(s.base_config);  // fail early with full diagnostics
  if (const json* sweep = r.find("sweep")) {
    if (!sweep->is_array()) fail("spec.sweep", "expected an array of axes");
    int i = 0;
    for (const auto& axis : *sweep) {
      const std::string apath = "spec.sweep[" + std::to_string(i++) + "]";
      ObjReader ar(axis, apath);
      SweepAxis a;
      a.path = ar.req_str("path");
      const json& vals = ar.req("values");
      if (!vals.is_array() || vals.empty()) fail(apath, "values must be a non-empty array");
      for (const auto& v : vals) a.values.push_back(v);
      ar.finish();
      const json::json_pointer ptr("/" + [&] {
        std::string p = a.path;
        std::replace(p.begin(), p.end(), '.', '/');
        return p;
      }());
      if (!s.base_config.contains(ptr))
        fail(apath, "path '" + a.path + "' does not exist in the base config");
      s.axes.push_back(std::move(a));
    }
  }
  s.replications = r.opt_int("replications", 1);
  if (s.replications < 1) fail("spec", "replications must be >= 1");
  s.seed_base = r.opt_u64("seed_base", 1);
  if (const json* out = r.find("outputs")) {
    ObjReader orr(*out, "spec.outputs");
    s.outputs.kpi_table = orr.opt_bool("kpi_table", true);
    s.outputs.summary = orr.opt_bool("summary", true);
    s.outputs.long_format = orr.opt_bool("long_format", false);
    s.outputs.bandit_trajectories = orr.opt_bool("bandit_trajectories", false);
    orr.finish();
  }
  s.overlay_analytic = r.opt_bool("overlay_analytic", false);
  r.finish();
  return s;
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open spec file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // parse_error byte offset -> line:column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << path << ":" << line << ":" << col << ": " << e.what();
    throw std::runtime_error(os.str());
  }
  try {
    return parse_spec(j);
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

analytics::TrafficProfile base_profile(const sim::SimConfig& cfg) {
  analytics::TrafficProfile p;
  const double ns = cfg.sensor.count_per_apartment;
  const double na = cfg.actuator.count_per_apartment;
  const double ls = ns > 0 ? 1.0 / cfg.sensor.mean_interval_s() : 0.0;
  const double la = na > 0 ? 1.0 / cfg.actuator.mean_interval_s() : 0.0;
  p.devices_per_network = static_cast<int>(ns + na);
  p.arrival_rate = (ns * ls + na * la) / std::max(1.0, ns + na);
  p.retrial_rate =
      cfg.retrial.mode == sim::RetrialPolicy::Mode::Poisson ? cfg.retrial.rate_per_s : 0.0;
  p.mean_airtime = cfg.sensor.count_per_apartment > 0 ? cfg.sensor.airtime_s()
                                                      : cfg.actuator.airtime_s();
  p.reuse_factor = cfg.mac.kind == sim::MacKind::Uncoordinated ? 1 : cfg.mac.reuse_factor;
  p.max_transmissions = cfg.retrial.max_transmissions;
  p.backoff_time = cfg.retrial.mode == sim::RetrialPolicy::Mode::FixedBackoff
                       ? cfg.retrial.backoff_s
                       : 1.0 / cfg.retrial.rate_per_s;
  p.tx_plus_ack_time = p.mean_airtime + cfg.ack_timeout_s;
  return p;
}

AnalyticOverlay analytic_overlay(const sim::SimConfig& cfg) {
  const auto& L = cfg.layout;
  analytics::TrafficProfile p = base_profile(cfg);

  // Mean success probability over apartments, with co-slot tier-1 neighbor
  // classes from the subframe assignment. MAB is assessed at its converged
  // ideal (no co-slot tier-1 neighbors).
  const int apartments = L.num_apartments();
  std::vector<int> assign(apartments, 0);
  const bool all_shared = cfg.mac.kind == sim::MacKind::Uncoordinated || p.reuse_factor == 1;
  if (cfg.mac.kind == sim::MacKind::CentralizedCoordinated) {
    for (int a = 0; a < apartments; ++a) {
      assign[a] = cfg.mac.subframe_assignment.empty() ? a % p.reuse_factor
                                                      : cfg.mac.subframe_assignment[a];
    }
  }
  double p_sum = 0.0;
  for (int a = 0; a < apartments; ++a) {
    double n_adj = 0, n_diag = 0;
    if (all_shared || cfg.mac.kind == sim::MacKind::CentralizedCoordinated) {
      for (int nb : L.side_neighbors(a))
        if (all_shared || assign[nb] == assign[a]) n_adj += 1;
      for (int nb : L.diagonal_neighbors(a))
        if (all_shared || assign[nb] == assign[a]) n_diag += 1;
    }
    analytics::TrafficProfile q = p;
    if (n_adj > 0) q.neighbor_groups.push_back({n_adj, cfg.overlay.i_adjacent});
    if (n_diag > 0) q.neighbor_groups.push_back({n_diag, cfg.overlay.i_diagonal});
    p_sum += analytics::success_prob_coordinated(q);
  }
  const double p_suc = p_sum / apartments;

  AnalyticOverlay o;
  o.p_suc = p_suc;
  o.expected_delay_s = analytics::expected_delay(p_suc, p);
  o.outage = analytics::outage_prob(p_suc, p.max_transmissions);
  o.lifetime_days = analytics::battery_lifetime_days(cfg.energy, p_suc);
  o.capacity = analytics::system_capacity(cfg.overlay.target_success, p);
  return o;
}

SweepResult run_sweep(const ExperimentSpec& spec, int jobs) {
  SweepResult result;
  for (const auto& a : spec.axes) result.axis_paths.push_back(a.path);

  // Enumerate sweep points (last axis fastest) and pre-validate each point's
  // config once; per-point failures become row errors, the sweep continues.
  std::size_t points = 1;
  for (const auto& a : spec.axes) points *= a.values.size();
  struct Point {
    std::vector<json> axis_values;
    std::optional<sim::SimConfig> cfg;
    std::string error;
  };
  std::vector<Point> grid(points);
  for (std::size_t pi = 0; pi < points; ++pi) {
    json cfg_json = spec.base_config;
    std::size_t rem = pi;
    std::vector<json> vals(spec.axes.size());
    for (std::size_t ax = spec.axes.size(); ax-- > 0;) {
      const auto& axis = spec.axes[ax];
      const std::size_t idx = rem % axis.values.size();
      rem /= axis.values.size();
      vals[ax] = axis.values[idx];
      std::string ppath = axis.path;
      std::replace(ppath.begin(), ppath.end(), '.', '/');
      cfg_json[json::json_pointer("/" + ppath)] = axis.values[idx];
    }
    grid[pi].axis_values = std::move(vals);
    try {
      grid[pi].cfg = parse_sim_config(cfg_json);
    } catch (const std::exception& e) {
      grid[pi].error = e.what();
    }
  }

  const std::size_t total = points * static_cast<std::size_t>(spec.replications);
  result.rows.resize(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      const std::size_t pi = i / spec.replications;
      const int rep = static_cast<int>(i % spec.replications);
      SweepRow& row = result.rows[i];
      row.point_index = static_cast<int>(pi);
      row.axis_values = grid[pi].axis_values;
      row.replication = rep;
      row.seed = spec.seed_base + static_cast<std::uint64_t>(rep);
      if (!grid[pi].error.empty()) {
        row.error = grid[pi].error;
        continue;
      }
      try {
        sim::SimConfig cfg = *grid[pi].cfg;
        cfg.seed = row.seed;
        if (spec.outputs.bandit_trajectories) cfg.record_bandit_rounds = true;
        row.report = sim::run(cfg);
        if (spec.overlay_analytic) row.overlay = analytic_overlay(cfg);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(total)));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return result;
}

namespace {

const char* kKpiColumns =
    "generated,delivered,lost,in_flight,attempts,plr,outage_ratio,attempt_success_rate,"
    "delay_mean_s,delay_p95_s,mean_cycle_energy_j,lifetime_days";

void write_kpi_cells(std::ostream& os, const sim::KpiReport& r) {
  os << r.generated << ',' << r.delivered << ',' << r.lost << ',' << r.in_flight << ','
     << r.attempts << ',' << fmt_double(r.packet_loss_ratio) << ','
     << fmt_double(r.outage_ratio) << ',' << fmt_double(r.attempt_success_rate) << ','
     << fmt_double(r.delay_mean_s) << ',' << fmt_double(r.delay_p95_s) << ','
     << fmt_double(r.mean_cycle_energy_j) << ',' << fmt_double(r.projected_lifetime_days);
}

}  // namespace

void emit(const ExperimentSpec& spec, const SweepResult& result, const std::string& out_prefix) {
  namespace fs = std::filesystem;
  const fs::path prefix(out_prefix);
  if (prefix.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(prefix.parent_path(), ec);
  }
  auto open = [&](const std::string& name) {
    auto path = out_prefix + name;
    auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!f->good()) throw std::runtime_error("cannot open output file: " + path);
    return f;
  };

  // Open every target before writing the first byte.
  auto csv = open("results.csv");
  auto manifest = open("manifest.json");
  auto spec_out = open("spec.json");
  std::unique_ptr<std::ofstream> summary, longf, banditf;
  if (spec.outputs.summary && spec.replications > 1) summary = open("summary.csv");
  if (spec.outputs.long_format) longf = open("long.csv");
  if (spec.outputs.bandit_trajectories) banditf = open("bandit.csv");

  const bool overlay = spec.overlay_analytic;
  *csv << "point,replication,seed";
  for (const auto& p : result.axis_paths) *csv << ',' << csv_cell(p);
  *csv << ',' << kKpiColumns;
  if (overlay)
    *csv << ",p_suc_analytic,delay_analytic_s,outage_analytic,lifetime_analytic_days,"
            "capacity_analytic";
  *csv << ",error\n";
  for (const auto& row : result.rows) {
    *csv << row.point_index << ',' << row.replication << ',' << row.seed;
    for (const auto& v : row.axis_values) *csv << ',' << axis_cell(v);
    *csv << ',';
    write_kpi_cells(*csv, row.report);
    if (overlay) {
      if (row.overlay) {
        *csv << ',' << fmt_double(row.overlay->p_suc) << ','
             << fmt_double(row.overlay->expected_delay_s) << ','
             << fmt_double(row.overlay->outage) << ',' << fmt_double(row.overlay->lifetime_days)
             << ',' << fmt_double(row.overlay->capacity);
      } else {
        *csv << ",,,,,";
      }
    }
    *csv << ',' << csv_cell(row.error) << '\n';
  }

  if (summary) {
    *summary << "point";
    for (const auto& p : result.axis_paths) *summary << ',' << csv_cell(p);
    *summary << ",runs,failed,plr_pooled,plr_mean,plr_stderr,delay_mean_s,lifetime_days,"
                "attempt_success_rate\n";
    for (std::size_t i = 0; i < result.rows.size();) {
      const int point = result.rows[i].point_index;
      std::vector<const SweepRow*> rows;
      while (i < result.rows.size() && result.rows[i].point_index == point)
        rows.push_back(&result.rows[i++]);
      std::uint64_t lost = 0, completed = 0;
      std::vector<double> plrs;
      double delay = 0, life = 0, asr = 0;
      int ok = 0, failed = 0;
      for (const auto* r : rows) {
        if (!r->error.empty()) {
          ++failed;
          continue;
        }
        ++ok;
        lost += r->report.lost;
        completed += r->report.delivered + r->report.lost;
        plrs.push_back(r->report.packet_loss_ratio);
        delay += r->report.delay_mean_s;
        life += r->report.projected_lifetime_days;
        asr += r->report.attempt_success_rate;
      }
      double mean = 0, se = 0;
      if (ok > 0) {
        for (double p : plrs) mean += p;
        mean /= ok;
        if (ok > 1) {
          double var = 0;
          for (double p : plrs) var += (p - mean) * (p - mean);
          se = std::sqrt(var / (ok - 1) / ok);
        }
      }
      *summary << point;
      for (const auto& v : rows.front()->axis_values) *summary << ',' << axis_cell(v);
      *summary << ',' << ok << ',' << failed << ','
               << fmt_double(completed ? static_cast<double>(lost) / completed : 0.0) << ','
               << fmt_double(mean) << ',' << fmt_double(se) << ','
               << fmt_double(ok ? delay / ok : 0.0) << ',' << fmt_double(ok ? life / ok : 0.0)
               << ',' << fmt_double(ok ? asr / ok : 0.0) << '\n';
    }
  }

  if (longf) {
    *longf << "point,replication,seed";
    for (const auto& p : result.axis_paths) *longf << ',' << csv_cell(p);
    *longf << ",metric,value\n";
    for (const auto& row : result.rows) {
      if (!row.error.empty()) continue;
      auto put = [&](const char* metric, double value) {
        *longf << row.point_index << ',' << row.replication << ',' << row.seed;
        for (const auto& v : row.axis_values) *longf << ',' << axis_cell(v);
        *longf << ',' << metric << ',' << fmt_double(value) << '\n';
      };
      put("plr", row.report.packet_loss_ratio);
      put("outage_ratio", row.report.outage_ratio);
      put("attempt_success_rate", row.report.attempt_success_rate);
      put("delay_mean_s", row.report.delay_mean_s);
      put("delay_p95_s", row.report.delay_p95_s);
      put("lifetime_days", row.report.projected_lifetime_days);
      if (row.overlay) {
        put("p_suc_analytic", row.overlay->p_suc);
        put("capacity_analytic", row.overlay->capacity);
      }
    }
  }

  if (banditf) {
    *banditf << "point,replication,seed,learner,frame,arm,reward\n";
    for (const auto& row : result.rows) {
      for (const auto& b : row.report.bandit_rounds) {
        *banditf << row.point_index << ',' << row.replication << ',' << row.seed << ','
                 << b.learner << ',' << b.frame << ',' << b.arm << ',' << (b.reward ? 1 : 0)
                 << '\n';
      }
    }
  }

  json man;
  man["tool"] = kToolName;
  man["version"] = kToolVersion;
  man["config_hash"] = config_hash(spec.raw);
  man["replications"] = spec.replications;
  man["seed_base"] = spec.seed_base;
  man["points"] = result.rows.empty() ? 0 : result.rows.back().point_index + 1;
  man["rows"] = result.rows.size();
  man["axes"] = result.axis_paths;
  *manifest << man.dump(2) << '\n';

  *spec_out << spec.raw.dump(2) << '\n';
}

json report_to_json(const sim::KpiReport& r) {
  json j;
  j["generated"] = r.generated;
  j["delivered"] = r.delivered;
  j["lost"] = r.lost;
  j["in_flight"] = r.in_flight;
  j["attempts"] = r.attempts;
  j["attempts_delivered"] = r.attempts_delivered;
  j["packet_loss_ratio"] = r.packet_loss_ratio;
  j["outage_ratio"] = r.outage_ratio;
  j["attempt_success_rate"] = r.attempt_success_rate;
  j["delay_mean_s"] = r.delay_mean_s;
  j["delay_p95_s"] = r.delay_p95_s;
  j["mean_cycle_energy_j"] = r.mean_cycle_energy_j;
  j["projected_lifetime_days"] = r.projected_lifetime_days;
  j["subframe_utilization"] = r.subframe_utilization;
  j["generated_by_class"] = {r.generated_by_class[0], r.generated_by_class[1]};
  j["delivered_by_class"] = {r.delivered_by_class[0], r.delivered_by_class[1]};
  j["lost_by_class"] = {r.lost_by_class[0], r.lost_by_class[1]};
  j["attempts_by_class"] = {r.attempts_by_class[0], r.attempts_by_class[1]};
  j["attempts_delivered_by_class"] = {r.attempts_delivered_by_class[0],
                                      r.attempts_delivered_by_class[1]};
  if (!r.learner_visits.empty()) j["learner_visits"] = r.learner_visits;
  if (!r.bandit_rounds.empty()) j["bandit_rounds_recorded"] = r.bandit_rounds.size();
  if (!r.packet_trace.empty()) j["packet_trace_rows"] = r.packet_trace.size();
  return j;
}

void write_packet_trace_csv(const sim::KpiReport& r, const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f.good()) throw std::runtime_error("cannot open trace file: " + path);
  f << "packet,node,apartment,class,created,attempt,start,end,outcome,delivered,completed\n";
  for (const auto& p : r.packet_trace) {
    int k = 0;
    for (const auto& a : p.attempts) {
      const char* out = a.outcome == sim::AttemptOutcome::Delivered ? "delivered"
                        : a.outcome == sim::AttemptOutcome::IntraCollision
                            ? "intra_collision"
                            : "interference_loss";
      f << p.packet_id << ',' << p.node_id << ',' << p.apartment << ',' << p.device_class << ','
        << fmt_double(p.created) << ',' << k++ << ',' << fmt_double(a.start) << ','
        << fmt_double(a.end) << ',' << out << ',' << (p.delivered ? 1 : 0) << ','
        << fmt_double(p.completed) << '\n';
    }
  }
}

std::string config_hash(const json& j) {
  const std::string s = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace coexim::exp
