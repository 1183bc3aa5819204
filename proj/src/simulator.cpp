#include "coexim/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "coexim/random.hpp"

namespace coexim::sim {

namespace {

constexpr double kDeviceHeightM = 1.0;

// Event kinds; on a time tie the queue orders by (node, kind, seq). Frame
// boundaries use node -1 so that bandit rounds close before anything else
// happens at that instant.
enum EventKind : std::int8_t {
  kTxEnd = 0,
  kTxStart = 1,
  kArrival = 2,
  kGateRetry = 3,
  kFrameBoundary = 4,
};

struct Event {
  double time;
  std::int32_t node;
  std::int8_t kind;
  std::uint64_t seq;
  std::int64_t payload;  // packet id, attempt id or frame index
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.node != b.node) return a.node > b.node;
    if (a.kind != b.kind) return a.kind > b.kind;
    return a.seq > b.seq;
  }
};

struct EngineNode {
  int apartment = 0;
  int device_class = 0;  // 0 sensor, 1 actuator
  propagation::Vec3 pos;
  double tx_power_mw = 10.0;
  double airtime = 0.0;
  TrafficMode mode = TrafficMode::Periodic;
  double period = 0.0;
  double rate = 0.0;
  std::mt19937_64 rng;
};

struct PacketState {
  std::int32_t node = 0;
  std::int32_t attempts = 0;
  double created = 0.0;
  bool counted = false;
  bool done = false;
  std::int64_t gate_frame = 0;  // frame of the pending/last attempt (MAB)
};

struct ActiveTx {
  std::int32_t packet = 0;
  std::int32_t node = 0;
  std::int32_t apartment = 0;
  double start = 0.0;
  double end = 0.0;
  std::int64_t frame = 0;
  std::int32_t subframe = 0;
  bool intra = false;
  std::vector<OverlapSample> overlaps;
};

struct LearnerRound {
  int arm = 0;
  int started = 0;
  int resolved = 0;
  bool ok = true;
};

struct Learner {
  bandit::Ucb1 policy;
  std::int64_t selected_frame = -1;
  int arm = 0;
  std::int64_t next_close = 0;
  std::map<std::int64_t, LearnerRound> rounds;
};

class Engine {
 public:
  explicit Engine(const SimConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    frame_ = cfg_.frame_length_s;
    reuse_ = cfg_.mac.kind == MacKind::Uncoordinated ? 1 : cfg_.mac.reuse_factor;
    subframe_ = frame_ / reuse_;
    gated_ = cfg_.mac.kind != MacKind::Uncoordinated && reuse_ > 1;
    mab_ = cfg_.mac.kind == MacKind::DistributedMab;
    warmup_ = cfg_.warmup_or_default();
    build_topology();
    init_busy();
    if (mab_) build_learners();
  }

  KpiReport run() {
    seed_arrivals();
    if (mab_) push(frame_, -1, kFrameBoundary, 1);
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      now_ = ev.time;
      switch (ev.kind) {
        case kArrival: on_arrival(ev.node); break;
        case kTxStart: on_tx_start(ev.payload); break;
        case kTxEnd: on_tx_end(ev.payload); break;
        case kGateRetry: gate(static_cast<std::int32_t>(ev.payload), now_); break;
        case kFrameBoundary: on_boundary(ev.payload); break;
      }
    }
    // Close any rounds still open at the end of the run.
    for (std::size_t i = 0; i < learners_.size(); ++i)
      close_rounds(static_cast<int>(i), std::numeric_limits<std::int64_t>::max());
    return finish();
  }

 private:
  // --- setup ---

  void build_topology() {
    const auto& L = cfg_.layout;
    const int apartments = L.num_apartments();
    gw_pos_.reserve(apartments);
    for (int a = 0; a < apartments; ++a) gw_pos_.push_back(L.apartment_center(a));

    for (int a = 0; a < apartments; ++a) {
      std::mt19937_64 place(rnd::mix_seed(cfg_.seed, 0xA11, a));
      const int f = a / (L.rows * L.cols);
      const int r = (a / L.cols) % L.rows;
      const int c = a % L.cols;
      const double x0 = c * L.apartment_side_m, y0 = r * L.apartment_side_m;
      const double z = f * L.floor_height_m + kDeviceHeightM;
      auto add = [&](const TrafficClassConfig& tc, int cls) {
        for (int i = 0; i < tc.count_per_apartment; ++i) {
          EngineNode n;
          n.apartment = a;
          n.device_class = cls;
          n.pos = {x0 + rnd::uniform01(place) * L.apartment_side_m,
                   y0 + rnd::uniform01(place) * L.apartment_side_m, z};
          n.tx_power_mw = tc.tx_power_mw;
          n.airtime = tc.airtime_s();
          n.mode = tc.mode;
          n.period = tc.period_s;
          n.rate = tc.rate_per_s;
          n.rng.seed(rnd::mix_seed(cfg_.seed, 0xB0B, nodes_.size()));
          nodes_.push_back(std::move(n));
        }
      };
      add(cfg_.sensor, 0);
      add(cfg_.actuator, 1);
    }

    // Received power (W) of every node at every gateway, fixed per run.
    const int n = static_cast<int>(nodes_.size());
    rx_w_.resize(static_cast<std::size_t>(n) * apartments);
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < apartments; ++a) {
        rx_w_[static_cast<std::size_t>(i) * apartments + a] =
            propagation::received_power_mw(nodes_[i].tx_power_mw, nodes_[i].pos, gw_pos_[a],
                                           cfg_.pathloss, L) *
            1e-3;
      }
    }

    assign_.resize(apartments);
    for (int a = 0; a < apartments; ++a) {
      assign_[a] = cfg_.mac.subframe_assignment.empty() ? a % reuse_
                                                        : cfg_.mac.subframe_assignment[a];
    }
  }

  void init_busy() { busy_until_.assign(nodes_.size(), 0.0); }

  void build_learners() {
    const int count = cfg_.mac.learner_scope == LearnerScope::Gateway
                          ? cfg_.layout.num_apartments()
                          : static_cast<int>(nodes_.size());
    learners_.reserve(count);
    for (int i = 0; i < count; ++i) {
      learners_.push_back(Learner{bandit::Ucb1(reuse_, cfg_.mac.exploration_weight,
                                               cfg_.mac.value_mode, /*warn_nonstandard=*/i == 0),
                                  -1, 0, 0, {}});
    }
  }

  int learner_of(int node) const {
    return cfg_.mac.learner_scope == LearnerScope::Gateway ? nodes_[node].apartment : node;
  }

  void seed_arrivals() {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      EngineNode& n = nodes_[i];
      const double first = n.mode == TrafficMode::Periodic
                               ? rnd::uniform01(n.rng) * n.period
                               : rnd::exp_draw(n.rng, n.rate);
      if (first < cfg_.sim_duration_s) push(first, static_cast<std::int32_t>(i), kArrival, 0);
    }
  }

  void push(double t, std::int32_t node, std::int8_t kind, std::int64_t payload) {
    queue_.push(Event{t, node, kind, seq_++, payload});
  }

  std::int64_t frame_index(double t) const {
    return static_cast<std::int64_t>(std::floor(t / frame_ + 1e-9));
  }

  // --- traffic ---

  void on_arrival(std::int32_t node) {
    EngineNode& n = nodes_[node];
    const std::int32_t pid = static_cast<std::int32_t>(packets_.size());
    PacketState p;
    p.node = node;
    p.created = now_;
    p.counted = now_ >= warmup_;
    packets_.push_back(p);
    ++outstanding_;
    if (p.counted) {
      ++generated_;
      ++generated_cls_[n.device_class];
    }
    if (cfg_.record_packet_trace) {
      PacketTrace t;
      t.packet_id = pid;
      t.node_id = node;
      t.apartment = n.apartment;
      t.device_class = n.device_class;
      t.created = now_;
      traces_.push_back(std::move(t));
    }
    gate(pid, now_);
    const double next =
        n.mode == TrafficMode::Periodic ? now_ + n.period : now_ + rnd::exp_draw(n.rng, n.rate);
    if (next < cfg_.sim_duration_s) push(next, node, kArrival, 0);
  }

  // --- MAC gate: decide the transmission instant for a packet ready at t ---

  void gate(std::int32_t pid, double ready) {
    PacketState& p = packets_[pid];
    EngineNode& n = nodes_[p.node];
    if (!gated_) {
      p.gate_frame = frame_index(ready);
      push(ready, p.node, kTxStart, pid);
      return;
    }
    if (cfg_.mac.kind == MacKind::CentralizedCoordinated) {
      TxWindow w = next_window(ready, assign_[n.apartment], reuse_, frame_);
      double latest = w.end - n.airtime;
      double tx;
      if (ready > w.start && ready <= latest) {
        tx = ready;  // already inside the window: plain ALOHA immediacy
      } else {
        if (ready > latest) {  // tail of the window: wait a whole frame
          w.start += frame_;
          w.end += frame_;
          latest += frame_;
        }
        // deferred packets spread uniformly over the window, never at the edge
        tx = w.start + rnd::uniform01(n.rng) * (latest - w.start);
      }
      p.gate_frame = frame_index(tx);
      push(tx, p.node, kTxStart, pid);
      return;
    }
    // Distributed MAB: the owning learner picks one subframe per frame.
    const std::int64_t f = frame_index(ready);
    const int li = learner_of(p.node);
    const int arm = arm_for(li, f);
    const double w0 = f * frame_ + arm * subframe_;
    const double latest = w0 + subframe_ - n.airtime;
    if (ready > latest) {
      // Own subframe no longer reachable this frame; the next frame's arm is
      // not known until its boundary, so re-gate there.
      push((f + 1) * frame_, p.node, kGateRetry, pid);
      return;
    }
    const double tx = ready > w0 ? ready : w0 + rnd::uniform01(n.rng) * (latest - w0);
    p.gate_frame = f;
    LearnerRound& r = learners_[li].rounds[f];
    r.arm = arm;
    push(tx, p.node, kTxStart, pid);
  }

  int arm_for(int li, std::int64_t frame) {
    Learner& l = learners_[li];
    close_rounds(li, frame);
    if (l.selected_frame != frame) {
      l.arm = l.policy.select();
      l.selected_frame = frame;
    }
    return l.arm;
  }

  // Applies, in frame order, every completed round strictly before `frame`.
  void close_rounds(int li, std::int64_t frame) {
    Learner& l = learners_[li];
    while (l.next_close < frame) {
      auto it = l.rounds.find(l.next_close);
      if (it == l.rounds.end()) {
        ++l.next_close;
        continue;
      }
      LearnerRound& r = it->second;
      if (r.started == 0) {
        l.rounds.erase(it);
        ++l.next_close;
        continue;
      }
      if (r.resolved < r.started) break;  // attempts still in the air
      l.policy.update(r.arm, r.ok);
      if (cfg_.record_bandit_rounds)
        bandit_rounds_.push_back(BanditRound{li, it->first, r.arm, r.ok});
      l.rounds.erase(it);
      ++l.next_close;
    }
  }

  void on_boundary(std::int64_t frame) {
    for (std::size_t i = 0; i < learners_.size(); ++i)
      close_rounds(static_cast<int>(i), frame);
    if (now_ < cfg_.sim_duration_s || outstanding_ > 0)
      push((frame + 1) * frame_, -1, kFrameBoundary, frame + 1);
  }

  // --- air interface ---

  int subframe_of(double t) const {
    if (!gated_) return 0;
    const double off = t - frame_index(t) * frame_;
    return std::clamp(static_cast<int>(off / subframe_), 0, reuse_ - 1);
  }

  void on_tx_start(std::int64_t pid32) {
    const auto pid = static_cast<std::int32_t>(pid32);
    PacketState& p = packets_[pid];
    const EngineNode& n = nodes_[p.node];
    const int apartments = cfg_.layout.num_apartments();

    // Half-duplex radio: one transmission (plus its ACK listen) at a time.
    // A start that lands inside the node's own busy interval re-gates.
    if (now_ < busy_until_[p.node]) {
      gate(pid, busy_until_[p.node]);
      return;
    }
    busy_until_[p.node] = now_ + n.airtime + cfg_.ack_timeout_s;

    ActiveTx a;
    a.packet = pid;
    a.node = p.node;
    a.apartment = n.apartment;
    a.start = now_;
    a.end = now_ + n.airtime;
    a.frame = p.gate_frame;
    a.subframe = subframe_of(now_);
    for (auto& [oid, o] : active_) {
      if (o.apartment == a.apartment) {
        o.intra = true;
        a.intra = true;
      } else {
        o.overlaps.push_back(
            {a.start, a.end, rx_w_[static_cast<std::size_t>(a.node) * apartments + o.apartment],
             a.node});
        a.overlaps.push_back(
            {o.start, o.end, rx_w_[static_cast<std::size_t>(o.node) * apartments + a.apartment],
             o.node});
      }
    }
    ++p.attempts;
    if (mab_) ++learners_[learner_of(p.node)].rounds[p.gate_frame].started;
    const std::int64_t id = next_attempt_++;
    active_.emplace(id, std::move(a));
    push(now_ + n.airtime, p.node, kTxEnd, id);
  }

  void on_tx_end(std::int64_t id) {
    auto it = active_.find(id);
    ActiveTx a = std::move(it->second);
    active_.erase(it);
    const AttemptOutcome out =
        resolve_attempt(a.start, a.end, a.intra, a.overlaps, cfg_.interference_threshold_w);
    const bool delivered = out == AttemptOutcome::Delivered;
    PacketState& p = packets_[a.packet];

    if (p.counted) {
      ++attempts_;
      ++attempts_cls_[nodes_[p.node].device_class];
      if (delivered) {
        ++attempts_ok_;
        ++attempts_ok_cls_[nodes_[p.node].device_class];
      }
      util_counts_[a.subframe] += 1;
    }
    if (cfg_.record_packet_trace) traces_[a.packet].attempts.push_back({a.start, a.end, out});

    if (mab_) {
      const int li = learner_of(p.node);
      LearnerRound& r = learners_[li].rounds[a.frame];
      ++r.resolved;
      r.ok = r.ok && delivered;
      close_rounds(li, frame_index(now_));
    }

    const double known_at = a.end + cfg_.ack_timeout_s;
    if (delivered) {
      terminal(a.packet, true, known_at);
    } else if (p.attempts >= cfg_.retrial.max_transmissions) {
      terminal(a.packet, false, known_at);
    } else {
      EngineNode& n = nodes_[p.node];
      const double wait = cfg_.retrial.mode == RetrialPolicy::Mode::FixedBackoff
                              ? cfg_.retrial.backoff_s
                              : rnd::exp_draw(n.rng, cfg_.retrial.rate_per_s);
      gate(a.packet, known_at + wait);
    }
  }

  void terminal(std::int32_t pid, bool delivered, double completed) {
    PacketState& p = packets_[pid];
    assert(!p.done);
    p.done = true;
    --outstanding_;
    const EngineNode& n = nodes_[p.node];
    if (p.counted) {
      if (delivered) {
        ++delivered_;
        ++delivered_cls_[n.device_class];
        delays_.push_back(completed - p.created);
      } else {
        ++lost_;
        ++lost_cls_[n.device_class];
      }
      if (n.device_class == 0) {
        cycle_energy_sum_ += cycle_energy_j(p.attempts, cfg_.energy);
        ++cycle_count_;
      }
    }
    if (cfg_.record_packet_trace) {
      traces_[pid].delivered = delivered;
      traces_[pid].completed = completed;
    }
  }

  // --- reporting ---

  KpiReport finish() {
    KpiReport r;
    r.generated = generated_;
    r.delivered = delivered_;
    r.lost = lost_;
    r.in_flight = generated_ - delivered_ - lost_;
    r.attempts = attempts_;
    r.attempts_delivered = attempts_ok_;
    const std::uint64_t completed = delivered_ + lost_;
    r.packet_loss_ratio = completed ? static_cast<double>(lost_) / completed : 0.0;
    r.outage_ratio = r.packet_loss_ratio;
    r.attempt_success_rate = attempts_ ? static_cast<double>(attempts_ok_) / attempts_ : 0.0;
    if (!delays_.empty()) {
      std::sort(delays_.begin(), delays_.end());
      double sum = 0.0;
      for (double d : delays_) sum += d;
      r.delay_mean_s = sum / delays_.size();
      const std::size_t i95 =
          static_cast<std::size_t>(std::ceil(0.95 * delays_.size())) - 1;
      r.delay_p95_s = delays_[std::min(i95, delays_.size() - 1)];
    }
    if (cycle_count_ > 0) {
      r.mean_cycle_energy_j = cycle_energy_sum_ / cycle_count_;
      r.projected_lifetime_days = cfg_.energy.battery_energy_j / r.mean_cycle_energy_j *
                                  cfg_.sensor.mean_interval_s() / 86400.0;
    }
    std::uint64_t util_total = 0;
    for (auto c : util_counts_) util_total += c;
    r.subframe_utilization.assign(reuse_, 0.0);
    if (util_total) {
      for (int k = 0; k < reuse_; ++k)
        r.subframe_utilization[k] = static_cast<double>(util_counts_[k]) / util_total;
    }
    for (int c = 0; c < 2; ++c) {
      r.generated_by_class[c] = generated_cls_[c];
      r.delivered_by_class[c] = delivered_cls_[c];
      r.lost_by_class[c] = lost_cls_[c];
      r.attempts_by_class[c] = attempts_cls_[c];
      r.attempts_delivered_by_class[c] = attempts_ok_cls_[c];
    }
    for (const Learner& l : learners_) {
      std::vector<std::int64_t> visits(reuse_);
      for (int k = 0; k < reuse_; ++k) visits[k] = l.policy.visit_count(k);
      r.learner_visits.push_back(std::move(visits));
    }
    r.packet_trace = std::move(traces_);
    r.bandit_rounds = std::move(bandit_rounds_);
    return r;
  }

  SimConfig cfg_;
  double frame_ = 0.0, subframe_ = 0.0, warmup_ = 0.0, now_ = 0.0;
  int reuse_ = 1;
  bool gated_ = false, mab_ = false;

  std::vector<propagation::Vec3> gw_pos_;
  std::vector<EngineNode> nodes_;
  std::vector<double> rx_w_;
  std::vector<int> assign_;
  std::vector<double> busy_until_;
  std::vector<Learner> learners_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  std::vector<PacketState> packets_;
  std::map<std::int64_t, ActiveTx> active_;
  std::int64_t next_attempt_ = 0;
  std::int64_t outstanding_ = 0;

  std::uint64_t generated_ = 0, delivered_ = 0, lost_ = 0;
  std::uint64_t attempts_ = 0, attempts_ok_ = 0;
  std::uint64_t generated_cls_[2] = {0, 0}, delivered_cls_[2] = {0, 0}, lost_cls_[2] = {0, 0};
  std::uint64_t attempts_cls_[2] = {0, 0}, attempts_ok_cls_[2] = {0, 0};
  std::vector<std::uint64_t> util_counts_ = std::vector<std::uint64_t>(256, 0);
  std::vector<double> delays_;
  double cycle_energy_sum_ = 0.0;
  std::uint64_t cycle_count_ = 0;
  std::vector<PacketTrace> traces_;
  std::vector<BanditRound> bandit_rounds_;
};

}  // namespace

TxWindow next_window(double ready, int subframe, int reuse, double frame_len) {
  const double sub = frame_len / reuse;
  const auto frame = static_cast<std::int64_t>(std::floor(ready / frame_len + 1e-9));
  double start = frame * frame_len + subframe * sub;
  double end = start + sub;
  if (ready >= end) {
    start += frame_len;
    end += frame_len;
  }
  return {start, end};
}

AttemptOutcome resolve_attempt(double start, double end, bool intra_overlap,
                               std::span<const OverlapSample> interferers, double threshold_w) {
  if (intra_overlap) return AttemptOutcome::IntraCollision;
  // Peak of the piecewise-constant aggregate over [start, end]; entries and
  // exits are the only change points. Removals are processed before
  // additions at equal times (half-open transmission intervals).
  std::vector<std::tuple<double, double, int>> edges;
  edges.reserve(interferers.size() * 2);
  for (const auto& s : interferers) {
    const double lo = std::max(s.start, start);
    const double hi = std::min(s.end, end);
    if (hi <= lo) continue;
    edges.emplace_back(lo, s.power_w, s.node);
    edges.emplace_back(hi, -s.power_w, s.node);
  }
  std::sort(edges.begin(), edges.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });
  double level = 0.0, peak = 0.0;
  for (const auto& [t, dp, node] : edges) {
    level += dp;
    peak = std::max(peak, level);
  }
  return peak > threshold_w ? AttemptOutcome::InterferenceLoss : AttemptOutcome::Delivered;
}

double cycle_energy_j(int attempts, const analytics::EnergyProfile& e) {
  return e.switch_energy_j + e.circuit_power_w * e.process_time_s +
         e.circuit_power_w * e.listen_time_s +
         attempts * (analytics::energy_per_transmission(e) + e.circuit_power_w * e.ack_time_s);
}

std::vector<std::string> SimConfig::violations() const {
  std::vector<std::string> v;
  for (auto& s : layout.violations()) v.push_back("layout: " + s);
  for (auto& s : pathloss.violations()) v.push_back("pathloss: " + s);
  for (auto& s : energy.violations()) v.push_back("energy: " + s);

  auto check_class = [&](const TrafficClassConfig& tc, const char* name) {
    if (tc.count_per_apartment < 0)
      v.push_back(std::string(name) + ": count_per_apartment must be >= 0");
    if (tc.count_per_apartment == 0) return;
    if (tc.mode == TrafficMode::Periodic && !(tc.period_s > 0))
      v.push_back(std::string(name) + ": period_s must be > 0");
    if (tc.mode == TrafficMode::Poisson && !(tc.rate_per_s > 0))
      v.push_back(std::string(name) + ": rate_per_s must be > 0");
    if (!(tc.payload_bits + tc.overhead_bits > 0))
      v.push_back(std::string(name) + ": packet must have at least one bit");
    if (!(tc.data_rate_bps > 0)) v.push_back(std::string(name) + ": data_rate_bps must be > 0");
    if (!(tc.tx_power_mw > 0)) v.push_back(std::string(name) + ": tx_power_mw must be > 0");
  };
  check_class(sensor, "sensor");
  check_class(actuator, "actuator");
  if (sensor.count_per_apartment + actuator.count_per_apartment <= 0)
    v.push_back("no traffic sources configured");

  if (!(interference_threshold_w > 0)) v.push_back("interference_threshold_w must be > 0");
  if (!(frame_length_s > 0)) v.push_back("frame_length_s must be > 0");
  if (!(sim_duration_s > 0)) v.push_back("sim_duration_s must be > 0");
  if (warmup_s >= sim_duration_s) v.push_back("warmup_s must be below sim_duration_s");
  if (ack_timeout_s < 0) v.push_back("ack_timeout_s must be >= 0");
  if (retrial.max_transmissions < 1) v.push_back("retrial: max_transmissions must be >= 1");
  if (retrial.mode == RetrialPolicy::Mode::FixedBackoff && retrial.backoff_s < 0)
    v.push_back("retrial: backoff_s must be >= 0");
  if (retrial.mode == RetrialPolicy::Mode::Poisson && !(retrial.rate_per_s > 0))
    v.push_back("retrial: rate_per_s must be > 0");

  if (mac.kind != MacKind::Uncoordinated) {
    if (mac.reuse_factor < 1) v.push_back("mac: reuse_factor must be >= 1");
    if (mac.reuse_factor >= 1 && mac.reuse_factor <= 256 && layout.violations().empty()) {
      const double sub = frame_length_s / mac.reuse_factor;
      const double longest =
          std::max(sensor.count_per_apartment > 0 ? sensor.airtime_s() : 0.0,
                   actuator.count_per_apartment > 0 ? actuator.airtime_s() : 0.0);
      if (mac.reuse_factor > 1 && !(sub > longest))
        v.push_back("mac: subframe length must exceed the longest packet airtime");
    }
    if (mac.reuse_factor > 256) v.push_back("mac: reuse_factor above 256 is not supported");
  }
  if (mac.kind == MacKind::CentralizedCoordinated && !mac.subframe_assignment.empty()) {
    if (static_cast<int>(mac.subframe_assignment.size()) != layout.num_apartments()) {
      v.push_back("mac: subframe_assignment must list one subframe per apartment");
    } else {
      for (int s : mac.subframe_assignment) {
        if (s < 0 || s >= mac.reuse_factor) {
          v.push_back("mac: subframe_assignment entries must lie in [0, reuse_factor)");
          break;
        }
      }
    }
  }
  if (mac.kind == MacKind::DistributedMab && !(mac.exploration_weight > 0))
    v.push_back("mac: exploration_weight must be > 0");
  return v;
}

void SimConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::ostringstream os;
  os << "invalid simulation config:";
  for (const auto& s : v) os << " [" << s << "]";
  throw std::invalid_argument(os.str());
}

KpiReport run(const SimConfig& config) {
  Engine e(config);
  return e.run();
}

}  // namespace coexim::sim
