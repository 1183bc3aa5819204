#pragma once

#include <cstdint>
#include <vector>

namespace coexim::bandit {

// UCB1-style policy over K arms with binary rewards.
//
//   V_k(t) = Z_k(t) + sqrt(alpha * ln(t) / T_k(t)),   A(t) = argmax_k V_k(t)
//
// Z_k is the accumulated (not averaged) reward, T_k the visit count
// (initialized to 1), t the round counter starting at 1. ValueMode::Mean
// swaps Z_k for Z_k/T_k, the textbook variant, for comparison runs.
// Ties break to the lowest arm index.
class Ucb1 {
 public:
  enum class ValueMode { Cumulative, Mean };

  Ucb1(int num_arms, double exploration_weight, ValueMode mode = ValueMode::Cumulative,
       bool warn_nonstandard = true);

  // Pure: repeated calls without update() return the same arm.
  int select() const;
  void update(int arm, bool reward);

  double value(int arm) const;  // V_k at the current round

  int num_arms() const { return num_arms_; }
  std::int64_t round() const { return round_; }
  double cumulative_reward(int arm) const { return cum_reward_.at(arm); }
  std::int64_t visit_count(int arm) const { return visit_count_.at(arm); }
  double exploration_weight() const { return alpha_; }
  ValueMode mode() const { return mode_; }

  bool operator==(const Ucb1&) const = default;

 private:
  int num_arms_;
  double alpha_;
  ValueMode mode_;
  std::int64_t round_ = 1;
  std::vector<double> cum_reward_;        // Z_k
  std::vector<std::int64_t> visit_count_; // T_k
};

}  // namespace coexim::bandit
