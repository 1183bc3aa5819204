#include "coexim/bandit.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>

namespace coexim::bandit {

Ucb1::Ucb1(int num_arms, double exploration_weight, ValueMode mode, bool warn_nonstandard)
    : num_arms_(num_arms),
      alpha_(exploration_weight),
      mode_(mode),
      cum_reward_(num_arms > 0 ? num_arms : 0, 0.0),
      visit_count_(num_arms > 0 ? num_arms : 0, 1) {
  if (num_arms_ < 1) throw std::invalid_argument("Ucb1 needs at least one arm");
  if (!(alpha_ > 0)) throw std::invalid_argument("exploration weight must be > 0");
  if (alpha_ >= 1.0 && warn_nonstandard) {
    std::cerr << "coexim: exploration weight " << alpha_
              << " is outside the nominal (0,1) range; proceeding\n";
  }
}

double Ucb1::value(int arm) const {
  const double base =
      mode_ == ValueMode::Cumulative
          ? cum_reward_.at(arm)
          : cum_reward_.at(arm) / static_cast<double>(visit_count_.at(arm));
  return base + std::sqrt(alpha_ * std::log(static_cast<double>(round_)) /
                          static_cast<double>(visit_count_.at(arm)));
}

int Ucb1::select() const {
  int best = 0;
  double best_v = value(0);
  for (int k = 1; k < num_arms_; ++k) {
    const double v = value(k);
    if (v > best_v) {  // ties keep the lowest index
      best_v = v;
      best = k;
    }
  }
  return best;
}

void Ucb1::update(int arm, bool reward) {
  if (arm < 0 || arm >= num_arms_) throw std::invalid_argument("Ucb1 arm index out of range");
  cum_reward_[arm] += reward ? 1.0 : 0.0;
  visit_count_[arm] += 1;
  round_ += 1;
}

}  // namespace coexim::bandit
