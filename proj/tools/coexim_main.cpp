#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "coexim/experiment.hpp"

namespace {

using coexim::exp::kToolVersion;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  return nlohmann::json::parse(in);
}

void apply_mode(coexim::sim::SimConfig& cfg, const std::string& mode) {
  if (mode.empty()) return;
  if (mode == "uncoordinated") {
    cfg.mac.kind = coexim::sim::MacKind::Uncoordinated;
  } else if (mode == "coordinated") {
    cfg.mac.kind = coexim::sim::MacKind::CentralizedCoordinated;
    if (cfg.mac.reuse_factor < 1) cfg.mac.reuse_factor = 1;
  } else if (mode == "mab") {
    cfg.mac.kind = coexim::sim::MacKind::DistributedMab;
    if (cfg.mac.reuse_factor < 1) cfg.mac.reuse_factor = 1;
  } else {
    throw std::runtime_error("unknown mode: " + mode);
  }
  cfg.validate();
}

std::ostream& out_stream(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary | std::ios::trunc);
  if (!file.good()) throw std::runtime_error("cannot open output file: " + path);
  return file;
}

int cmd_analytic(const std::string& config_path, const std::string& out_path, double target,
                 bool tradeoff, double i1, double i2, const std::string& reuse_csv) {
  const auto cfg = coexim::exp::parse_sim_config(load_json(config_path));
  auto profile = coexim::exp::base_profile(cfg);
  std::ofstream file;
  std::ostream& os = out_stream(out_path, file);

  if (tradeoff) {
    std::vector<int> reuse;
    std::stringstream ss(reuse_csv);
    for (std::string tok; std::getline(ss, tok, ',');) reuse.push_back(std::stoi(tok));
    const auto curve = coexim::analytics::tradeoff_curve(
        profile, cfg.energy, reuse, coexim::analytics::tier1_neighbor_map(i1, i2));
    os << "reuse_factor,p_suc,p_fail,expected_delay_s,outage,lifetime_days,capacity\n";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      const auto& p = curve[i];
      os << reuse[i] << ',' << p.success_prob << ',' << 1.0 - p.success_prob << ','
         << p.expected_delay_s << ',' << p.outage_prob << ',' << p.lifetime_days << ','
         << p.capacity << '\n';
    }
    return 0;
  }

  const auto overlay = coexim::exp::analytic_overlay(cfg);
  coexim::analytics::TrafficProfile iso = profile;
  os << "metric,value\n";
  os << "p_suc_isolated," << coexim::analytics::success_prob_isolated(iso) << '\n';
  os << "p_suc_mean," << overlay.p_suc << '\n';
  os << "expected_delay_s," << overlay.expected_delay_s << '\n';
  os << "outage," << overlay.outage << '\n';
  os << "lifetime_days," << overlay.lifetime_days << '\n';
  os << "capacity_at_target," << coexim::analytics::system_capacity(target, profile) << '\n';
  return 0;
}

int cmd_simulate(const std::string& config_path, std::int64_t seed, const std::string& mode,
                 const std::string& out_path, const std::string& trace_path) {
  auto cfg = coexim::exp::parse_sim_config(load_json(config_path));
  apply_mode(cfg, mode);
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (!trace_path.empty()) cfg.record_packet_trace = true;
  const auto report = coexim::sim::run(cfg);
  if (!trace_path.empty()) coexim::exp::write_packet_trace_csv(report, trace_path);
  std::ofstream file;
  std::ostream& os = out_stream(out_path, file);
  os << coexim::exp::report_to_json(report).dump(2) << '\n';
  return 0;
}

int cmd_sweep(const std::string& spec_path, std::int64_t seed, const std::string& out_prefix,
              int jobs, bool overlay) {
  auto spec = coexim::exp::load_spec(spec_path);
  if (seed >= 0) spec.seed_base = static_cast<std::uint64_t>(seed);
  if (overlay) spec.overlay_analytic = true;
  const auto result = coexim::exp::run_sweep(spec, jobs);
  coexim::exp::emit(spec, result, out_prefix);
  int failures = 0;
  for (const auto& row : result.rows) {
    if (!row.error.empty()) {
      std::cerr << "run " << row.point_index << "/" << row.replication
                << " failed: " << row.error << '\n';
      ++failures;
    }
  }
  std::cerr << "sweep: " << result.rows.size() - failures << "/" << result.rows.size()
            << " runs ok, output at " << out_prefix << "*\n";
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coexim: coexisting indoor IoT networks, simulated and in closed form"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_path, trace_path, mode, reuse_csv = "1,2,3,4";
  std::int64_t seed = -1;
  double target = 0.99, i1 = 1.0, i2 = 1.0;
  bool tradeoff = false, overlay = false;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  auto* analytic = app.add_subcommand("analytic", "closed-form KPI tables and tradeoff curve");
  analytic->add_option("--config", config_path, "simulation config (JSON)")->required();
  analytic->add_option("--out", out_path, "output file ('-' for stdout)");
  analytic->add_option("--target-psuc", target, "success target for the capacity row");
  analytic->add_flag("--tradeoff", tradeoff, "emit the reliability-delay curve over reuse factors");
  analytic->add_option("--i1", i1, "collision multiplicity of side neighbors");
  analytic->add_option("--i2", i2, "collision multiplicity of diagonal neighbors");
  analytic->add_option("--reuse", reuse_csv, "comma-separated reuse factors for --tradeoff");

  auto* simulate = app.add_subcommand("simulate", "run one simulation");
  simulate->add_option("--config", config_path, "simulation config (JSON)")->required();
  simulate->add_option("--seed", seed, "seed override");
  simulate->add_option("--mode", mode, "override access scheme: uncoordinated|coordinated|mab");
  simulate->add_option("--out", out_path, "KPI report file ('-' for stdout)");
  simulate->add_option("--trace", trace_path, "also write a per-packet trace CSV");

  auto* sweep = app.add_subcommand("sweep", "run an experiment spec");
  sweep->add_option("--config", config_path, "experiment spec (JSON)")->required();
  sweep->add_option("--seed", seed, "seed base override");
  sweep->add_option("--out", out_path, "output prefix, e.g. out/run1_")->required();
  sweep->add_option("--jobs", jobs, "concurrent runs");
  sweep->add_flag("--overlay-analytic", overlay, "force analytic overlay columns");

  CLI11_PARSE(app, argc, argv);

  try {
    if (analytic->parsed())
      return cmd_analytic(config_path, out_path, target, tradeoff, i1, i2, reuse_csv);
    if (simulate->parsed()) return cmd_simulate(config_path, seed, mode, out_path, trace_path);
    if (sweep->parsed()) return cmd_sweep(config_path, seed, out_path, jobs, overlay);
  } catch (const std::exception& e) {
    std::cerr << "coexim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
