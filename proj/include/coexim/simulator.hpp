#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "coexim/analytics.hpp"
#include "coexim/bandit.hpp"
#include "coexim/propagation.hpp"

// Discrete-event engine: packet generation, MAC gating under uncoordinated /
// centrally coordinated / bandit-learned access, interference-threshold
// reception, retransmission and backoff, ideal ACKs, and per-device energy
// accounting. A run is single-threaded and bit-deterministic for a given
// config; independent runs share no mutable state.
namespace coexim::sim {

enum class MacKind { Uncoordinated, CentralizedCoordinated, DistributedMab };
enum class LearnerScope { Gateway, Device };

struct MacScheme {
  MacKind kind = MacKind::Uncoordinated;
  int reuse_factor = 1;  // K, subframes per frame (gated schemes)
  // Apartment -> subframe for centralized coordination; empty means
  // apartment index mod K.
  std::vector<int> subframe_assignment;
  double exploration_weight = 0.5;  // alpha, MAB
  LearnerScope learner_scope = LearnerScope::Gateway;
  bandit::Ucb1::ValueMode value_mode = bandit::Ucb1::ValueMode::Cumulative;
};

enum class TrafficMode { Periodic, Poisson };

struct TrafficClassConfig {
  int count_per_apartment = 0;
  TrafficMode mode = TrafficMode::Periodic;
  double period_s = 900.0;    // periodic reporting interval (random phase per node)
  double rate_per_s = 0.0;    // Poisson arrival rate
  double payload_bits = 600.0;
  double overhead_bits = 0.0;
  double data_rate_bps = 100e3;
  double tx_power_mw = 10.0;

  double airtime_s() const { return (payload_bits + overhead_bits) / data_rate_bps; }
  double mean_interval_s() const {
    return mode == TrafficMode::Periodic ? period_s : 1.0 / rate_per_s;
  }
};

struct RetrialPolicy {
  enum class Mode { FixedBackoff, Poisson };
  Mode mode = Mode::FixedBackoff;
  double backoff_s = 1.0;    // D_bo
  double rate_per_s = 0.1;   // vartheta
  int max_transmissions = 1; // attempts per packet before outage
};

// Analytic-overlay knobs carried with the config (consumed by the experiment
// front end, not by the engine).
struct OverlayParams {
  double i_adjacent = 1.0;
  double i_diagonal = 1.0;
  double target_success = 0.99;
};

struct SimConfig {
  propagation::BuildingLayout layout;
  propagation::PathlossParams pathloss;
  TrafficClassConfig sensor{.count_per_apartment = 20};
  TrafficClassConfig actuator{.count_per_apartment = 0};
  analytics::EnergyProfile energy;
  MacScheme mac;
  double interference_threshold_w = 5e-9;
  double frame_length_s = 900.0;
  RetrialPolicy retrial;
  double ack_timeout_s = 5.0;
  double sim_duration_s = 10000.0;
  double warmup_s = -1.0;  // < 0: 10% of sim_duration
  std::uint64_t seed = 1;
  bool record_packet_trace = false;
  bool record_bandit_rounds = false;
  OverlayParams overlay;

  double warmup_or_default() const {
    return warmup_s < 0.0 ? 0.1 * sim_duration_s : warmup_s;
  }
  std::vector<std::string> violations() const;
  void validate() const;  // throws std::invalid_argument listing every violation
};

enum class AttemptOutcome { Delivered, IntraCollision, InterferenceLoss };

struct AttemptTrace {
  double start = 0.0;
  double end = 0.0;
  AttemptOutcome outcome = AttemptOutcome::Delivered;
};

struct PacketTrace {
  int packet_id = 0;
  int node_id = 0;
  int apartment = 0;
  int device_class = 0;  // 0 sensor, 1 actuator
  double created = 0.0;
  bool delivered = false;
  double completed = 0.0;
  std::vector<AttemptTrace> attempts;
};

struct BanditRound {
  int learner = 0;
  std::int64_t frame = 0;
  int arm = 0;
  bool reward = false;
};

struct KpiReport {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t lost = 0;       // terminal losses after max transmissions
  std::uint64_t in_flight = 0;  // generated - delivered - lost
  std::uint64_t attempts = 0;
  std::uint64_t attempts_delivered = 0;
  double packet_loss_ratio = 0.0;     // lost / (delivered + lost)
  double outage_ratio = 0.0;          // identical accounting; kept explicit
  double attempt_success_rate = 0.0;  // attempts_delivered / attempts
  double delay_mean_s = 0.0;
  double delay_p95_s = 0.0;
  double mean_cycle_energy_j = 0.0;       // sensors, per completed report
  double projected_lifetime_days = 0.0;   // E_0 / mean cycle energy * report interval
  std::vector<double> subframe_utilization;  // share of attempts per subframe
  std::uint64_t generated_by_class[2] = {0, 0};
  std::uint64_t delivered_by_class[2] = {0, 0};
  std::uint64_t lost_by_class[2] = {0, 0};
  std::uint64_t attempts_by_class[2] = {0, 0};
  std::uint64_t attempts_delivered_by_class[2] = {0, 0};
  std::vector<std::vector<std::int64_t>> learner_visits;  // MAB: per learner, per arm
  std::vector<PacketTrace> packet_trace;                  // when record_packet_trace
  std::vector<BanditRound> bandit_rounds;                 // when record_bandit_rounds
};

// --- pure pieces of the engine, exposed for direct testing ---

struct TxWindow {
  double start = 0.0;
  double end = 0.0;
};

// Earliest occurrence of the given subframe whose window ends after `ready`.
TxWindow next_window(double ready, int subframe, int reuse, double frame_len);

struct OverlapSample {
  double start = 0.0;
  double end = 0.0;
  double power_w = 0.0;  // received power at the victim's gateway
  int node = 0;
};

// Outcome of one attempt: any same-apartment overlap collides; otherwise the
// attempt is lost if the aggregate out-of-apartment interference exceeds the
// threshold at any instant of [start, end].
AttemptOutcome resolve_attempt(double start, double end, bool intra_overlap,
                               std::span<const OverlapSample> interferers,
                               double threshold_w);

// Energy of one reporting cycle that took `attempts` transmissions.
double cycle_energy_j(int attempts, const analytics::EnergyProfile& e);

KpiReport run(const SimConfig& config);

}  // namespace coexim::sim
