#pragma once

#include <map>
#include <string>
#include <vector>

// Closed-form KPI engine for grant-free access under slotted coordination:
// success probability, expected delay, outage, system capacity, energy per
// transmission, battery lifetime, and the reliability-delay tradeoff curve
// over the resource reuse factor.
namespace coexim::analytics {

// A class of interfering neighbor networks: `count` networks whose
// transmissions destroy a reception at the gateway of interest only when at
// least `multiplicity` of them transmit concurrently.
struct NeighborGroup {
  double count = 0.0;         // N_g
  double multiplicity = 1.0;  // i_g >= 1
};

struct TrafficProfile {
  double arrival_rate = 1.0 / 900.0;  // lambda, packets/s per device
  double retrial_rate = 0.0;          // vartheta, packets/s (Poisson retrials)
  double mean_airtime = 0.006;        // T bar, s
  int devices_per_network = 1;        // M
  int reuse_factor = 1;               // K, subframes per frame
  std::vector<NeighborGroup> neighbor_groups;
  int max_transmissions = 1;     // K_max
  double backoff_time = 0.0;     // D_bo, s
  double tx_plus_ack_time = 0.0; // per-attempt transmit + ACK-listen duration, s

  std::vector<std::string> violations() const;
  void validate() const;
};

struct EnergyProfile {
  double battery_energy_j = 3600.0;    // E_0
  double switch_energy_j = 1e-3;       // E_sw
  double circuit_power_w = 1e-3;       // P_c
  double process_time_s = 5.0;         // T_p
  double listen_time_s = 0.0;          // T_lis
  double ack_time_s = 5.0;             // T_ack
  double pa_inverse_efficiency = 3.0;  // alpha
  double tx_power_w = 0.01;            // P_t
  double payload_bits = 600.0;         // D_u
  double overhead_bits = 0.0;          // D_oh
  double data_rate_bps = 100e3;        // R_s
  double report_period_s = 900.0;      // T_r

  double airtime_s() const { return (payload_bits + overhead_bits) / data_rate_bps; }
  std::vector<std::string> violations() const;
  void validate() const;
};

struct KpiPoint {
  double success_prob = 1.0;
  double expected_delay_s = 0.0;
  double outage_prob = 0.0;
  double lifetime_days = 0.0;
  double capacity = 1.0;
};

// P_suc ~= exp(-2*T*K*(M-1)*max(lambda, vartheta)): contention inside the
// network only, no interfering neighbors.
double success_prob_isolated(const TrafficProfile& p);

// Same expression with a real-valued device count (used for the capacity
// round trip).
double success_prob_isolated_at(double devices, const TrafficProfile& p);

// P_suc ~= exp(-2*T*K*(M-1 + sum_g N_g*M/i_g)*max(lambda, vartheta)):
// adds the co-slot neighbor classes. Reduces exactly to the isolated form
// when all groups are empty.
double success_prob_coordinated(const TrafficProfile& p);

// Uncoordinated access evaluates the coordinated expression at K = 1.
double success_prob_uncoordinated(const TrafficProfile& p);

// Expected delay over up to K_max+1 transmissions:
//   sum_{k=0}^{K_max} [k*(D_u + D_bo) + D_u] * p * (1-p)^k
// with D_u = tx_plus_ack_time. Rejects p_suc = 0.
double expected_delay(double p_suc, const TrafficProfile& p);

// Outage after max_tx (re)transmissions: 1 - sum_{k=0}^{max_tx-1} p*(1-p)^k,
// which collapses to (1-p)^max_tx.
double outage_prob(double p_suc, int max_tx);

// Real-valued device count sustaining a target success probability:
//   C = 1 + ln(1/P) / (2*T*K*max(lambda, vartheta)).
// Substituting C back as M into the isolated expression recovers the target.
double system_capacity(double target_p_suc, const TrafficProfile& p);

// E_dt = (P_c + alpha*P_t) * (D_u + D_oh) / R_s, joules per transmission.
double energy_per_transmission(const EnergyProfile& e);

// Mean energy of one reporting cycle at per-attempt success probability p:
//   E_cycle = E_sw + P_c*T_p + P_c*T_lis + (1/p)*(E_dt + P_c*T_ack).
double energy_per_cycle(const EnergyProfile& e, double p_suc);

// Lifetime in days: (E_0 / E_cycle) * T_r. Rejects p_suc = 0.
double battery_lifetime_days(const EnergyProfile& e, double p_suc);

// Surviving co-slot neighbor classes per reuse factor. Caller-supplied: the
// mapping depends on the slot assignment pattern, not on the formulas.
using NeighborMap = std::map<int, std::vector<NeighborGroup>>;

// The 8 tier-1 neighbors of a square apartment split into 4 side-sharing and
// 4 diagonal ones, thinned by the natural grid coloring per reuse factor:
// K=1 keeps all 8, K=2 (checkerboard) keeps the 4 diagonals, K=3 (stripes)
// keeps 2 side neighbors, K=4 keeps none.
NeighborMap tier1_neighbor_map(double i_adjacent, double i_diagonal);

// One KpiPoint per reuse factor. The per-attempt duration is extended by the
// mean wait for the owning subframe (subframe length taken as the attempt
// duration), so delay grows with K while reliability follows the surviving
// neighbor classes.
std::vector<KpiPoint> tradeoff_curve(const TrafficProfile& base, const EnergyProfile& energy,
                                     const std::vector<int>& reuse_values,
                                     const NeighborMap& neighbor_map);

}  // namespace coexim::analytics
