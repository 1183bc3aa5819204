#include "coexim/analytics.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coexim::analytics {

namespace {

void throw_if(const std::vector<std::string>& v, const char* what) {
  if (v.empty()) return;
  std::ostringstream os;
  os << what << ":";
  for (const auto& s : v) os << " [" << s << "]";
  throw std::invalid_argument(os.str());
}

double contention_rate(const TrafficProfile& p) {
  return std::max(p.arrival_rate, p.retrial_rate);
}

// exp(-2*T*K*(M-1 + sum_g N_g*M/i_g)*max(lambda, vartheta)) with real M.
double success_core(double devices, int reuse, const TrafficProfile& p,
                    const std::vector<NeighborGroup>& groups) {
  double contenders = devices - 1.0;
  for (const auto& g : groups) contenders += g.count * devices / g.multiplicity;
  return std::exp(-2.0 * p.mean_airtime * reuse * contenders * contention_rate(p));
}

}  // namespace

std::vector<std::string> TrafficProfile::violations() const {
  std::vector<std::string> v;
  if (!(arrival_rate > 0)) v.push_back("arrival_rate must be > 0");
  if (retrial_rate < 0) v.push_back("retrial_rate must be >= 0");
  if (!(mean_airtime > 0)) v.push_back("mean_airtime must be > 0");
  if (devices_per_network < 1) v.push_back("devices_per_network must be >= 1");
  if (reuse_factor < 1) v.push_back("reuse_factor must be >= 1");
  for (const auto& g : neighbor_groups) {
    if (g.count < 0) v.push_back("neighbor group count must be >= 0");
    if (!(g.multiplicity >= 1)) v.push_back("neighbor group multiplicity must be >= 1");
  }
  if (max_transmissions < 1) v.push_back("max_transmissions must be >= 1");
  if (backoff_time < 0) v.push_back("backoff_time must be >= 0");
  if (tx_plus_ack_time < 0) v.push_back("tx_plus_ack_time must be >= 0");
  return v;
}

void TrafficProfile::validate() const { throw_if(violations(), "invalid traffic profile"); }

std::vector<std::string> EnergyProfile::violations() const {
  std::vector<std::string> v;
  if (battery_energy_j < 0) v.push_back("battery_energy_j must be >= 0");
  if (switch_energy_j < 0) v.push_back("switch_energy_j must be >= 0");
  if (circuit_power_w < 0) v.push_back("circuit_power_w must be >= 0");
  if (process_time_s < 0) v.push_back("process_time_s must be >= 0");
  if (listen_time_s < 0) v.push_back("listen_time_s must be >= 0");
  if (ack_time_s < 0) v.push_back("ack_time_s must be >= 0");
  if (pa_inverse_efficiency < 0) v.push_back("pa_inverse_efficiency must be >= 0");
  if (tx_power_w < 0) v.push_back("tx_power_w must be >= 0");
  if (payload_bits < 0) v.push_back("payload_bits must be >= 0");
  if (overhead_bits < 0) v.push_back("overhead_bits must be >= 0");
  if (!(data_rate_bps > 0)) v.push_back("data_rate_bps must be > 0");
  if (!(report_period_s > 0)) v.push_back("report_period_s must be > 0");
  return v;
}

void EnergyProfile::validate() const { throw_if(violations(), "invalid energy profile"); }

double success_prob_isolated(const TrafficProfile& p) {
  p.validate();
  return success_core(p.devices_per_network, p.reuse_factor, p, {});
}

double success_prob_isolated_at(double devices, const TrafficProfile& p) {
  p.validate();
  if (!(devices >= 1)) throw std::invalid_argument("devices must be >= 1");
  return success_core(devices, p.reuse_factor, p, {});
}

double success_prob_coordinated(const TrafficProfile& p) {
  p.validate();
  return success_core(p.devices_per_network, p.reuse_factor, p, p.neighbor_groups);
}

double success_prob_uncoordinated(const TrafficProfile& p) {
  p.validate();
  return success_core(p.devices_per_network, 1, p, p.neighbor_groups);
}

double expected_delay(double p_suc, const TrafficProfile& p) {
  p.validate();
  if (!(p_suc > 0) || p_suc > 1)
    throw std::invalid_argument("expected_delay requires p_suc in (0, 1]");
  const double attempt = p.tx_plus_ack_time;
  double d = 0.0;
  for (int k = 0; k <= p.max_transmissions; ++k) {
    d += (k * (attempt + p.backoff_time) + attempt) * p_suc * std::pow(1.0 - p_suc, k);
  }
  return d;
}

double outage_prob(double p_suc, int max_tx) {
  if (p_suc < 0 || p_suc > 1) throw std::invalid_argument("p_suc must be in [0, 1]");
  if (max_tx < 1) throw std::invalid_argument("max_tx must be >= 1");
  double delivered = 0.0;
  for (int k = 0; k < max_tx; ++k) delivered += p_suc * std::pow(1.0 - p_suc, k);
  const double sum_form = 1.0 - delivered;
  const double closed_form = std::pow(1.0 - p_suc, max_tx);
  assert(std::fabs(sum_form - closed_form) < 1e-9);
  (void)sum_form;
  return closed_form;
}

double system_capacity(double target_p_suc, const TrafficProfile& p) {
  p.validate();
  if (!(target_p_suc > 0) || target_p_suc > 1)
    throw std::invalid_argument("system_capacity requires target_p_suc in (0, 1]");
  return 1.0 + std::log(1.0 / target_p_suc) /
                   (2.0 * p.mean_airtime * p.reuse_factor * contention_rate(p));
}

double energy_per_transmission(const EnergyProfile& e) {
  e.validate();
  return (e.circuit_power_w + e.pa_inverse_efficiency * e.tx_power_w) * e.airtime_s();
}

double energy_per_cycle(const EnergyProfile& e, double p_suc) {
  if (!(p_suc > 0) || p_suc > 1)
    throw std::invalid_argument("energy_per_cycle requires p_suc in (0, 1]");
  return e.switch_energy_j + e.circuit_power_w * e.process_time_s +
         e.circuit_power_w * e.listen_time_s +
         (energy_per_transmission(e) + e.circuit_power_w * e.ack_time_s) / p_suc;
}

double battery_lifetime_days(const EnergyProfile& e, double p_suc) {
  e.validate();
  const double cycle = energy_per_cycle(e, p_suc);
  if (!(cycle > 0)) throw std::invalid_argument("per-cycle energy must be > 0");
  return e.battery_energy_j / cycle * e.report_period_s / 86400.0;
}

NeighborMap tier1_neighbor_map(double i_adjacent, double i_diagonal) {
  return {
      {1, {{4.0, i_adjacent}, {4.0, i_diagonal}}},
      {2, {{4.0, i_diagonal}}},
      {3, {{2.0, i_adjacent}}},
      {4, {}},
  };
}

std::vector<KpiPoint> tradeoff_curve(const TrafficProfile& base, const EnergyProfile& energy,
                                     const std::vector<int>& reuse_values,
                                     const NeighborMap& neighbor_map) {
  base.validate();
  energy.validate();
  std::vector<KpiPoint> out;
  out.reserve(reuse_values.size());
  for (int k : reuse_values) {
    auto it = neighbor_map.find(k);
    if (it == neighbor_map.end()) {
      throw std::invalid_argument("tradeoff_curve: no neighbor groups supplied for reuse factor " +
                                  std::to_string(k));
    }
    TrafficProfile p = base;
    p.reuse_factor = k;
    p.neighbor_groups = it->second;
    const double p_suc = success_prob_coordinated(p);
    // Mean wait for the owning subframe from a uniformly random instant,
    // with immediate access inside the subframe: F*(K-1)^2/(2K^2) for a
    // frame of K subframes, each one attempt long.
    const double subframe = p.tx_plus_ack_time;
    p.tx_plus_ack_time += k <= 1 ? 0.0 : subframe * (k - 1.0) * (k - 1.0) / (2.0 * k);
    KpiPoint pt;
    pt.success_prob = p_suc;
    pt.expected_delay_s = expected_delay(p_suc, p);
    pt.outage_prob = outage_prob(p_suc, p.max_transmissions);
    pt.lifetime_days = battery_lifetime_days(energy, p_suc);
    pt.capacity = system_capacity(p_suc, p);
    out.push_back(pt);
  }
  return out;
}

}  // namespace coexim::analytics
