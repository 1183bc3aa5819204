#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "coexim/analytics.hpp"
#include "coexim/random.hpp"

using namespace coexim::analytics;
using coexim::rnd::uniform01;

namespace {

TrafficProfile base_profile() {
  TrafficProfile p;
  p.arrival_rate = 1.0 / 900.0;
  p.retrial_rate = 0.0;
  p.mean_airtime = 0.5;
  p.devices_per_network = 2;
  p.reuse_factor = 1;
  p.max_transmissions = 1;
  p.backoff_time = 1.0;
  p.tx_plus_ack_time = 1.0;
  return p;
}

// The worked single-shot energy setup: 1 s airtime, 1 mW circuit, 10 mW PA at
// inverse efficiency 3, 5 s ack listen, 5 min reports.
EnergyProfile worked_energy() {
  EnergyProfile e;
  e.battery_energy_j = 3600.0;
  e.switch_energy_j = 1e-3;
  e.circuit_power_w = 1e-3;
  e.process_time_s = 5.0;
  e.listen_time_s = 0.0;
  e.ack_time_s = 5.0;
  e.pa_inverse_efficiency = 3.0;
  e.tx_power_w = 0.01;
  e.payload_bits = 100000.0;
  e.overhead_bits = 0.0;
  e.data_rate_bps = 100000.0;
  e.report_period_s = 300.0;
  return e;
}

}  // namespace

TEST_CASE("success probability: single device never collides") {
  TrafficProfile p = base_profile();
  p.devices_per_network = 1;
  CHECK(success_prob_isolated(p) == 1.0);
}

TEST_CASE("success probability: two-device scalar value") {
  TrafficProfile p = base_profile();
  // exp(-2*0.5*1*1*(1/900))
  CHECK(success_prob_isolated(p) == doctest::Approx(std::exp(-1.0 / 900.0)).epsilon(1e-12));
  CHECK(success_prob_isolated(p) == doctest::Approx(0.99889).epsilon(1e-4));
}

TEST_CASE("success probability: doubling airtime squares the contention factor") {
  std::mt19937_64 g(11);
  for (int i = 0; i < 100; ++i) {
    TrafficProfile p = base_profile();
    p.mean_airtime = 0.01 + uniform01(g);
    p.devices_per_network = 2 + static_cast<int>(uniform01(g) * 30);
    p.arrival_rate = 0.0001 + 0.01 * uniform01(g);
    TrafficProfile q = p;
    q.mean_airtime *= 2.0;
    CHECK(success_prob_isolated(q) ==
          doctest::Approx(std::pow(success_prob_isolated(p), 2.0)).epsilon(1e-10));
  }
}

TEST_CASE("success probability: strictly decreasing in load parameters") {
  TrafficProfile p = base_profile();
  p.devices_per_network = 10;
  const double base = success_prob_isolated(p);
  TrafficProfile q = p;
  q.devices_per_network = 11;
  CHECK(success_prob_isolated(q) < base);
  q = p;
  q.mean_airtime *= 1.5;
  CHECK(success_prob_isolated(q) < base);
  q = p;
  q.arrival_rate *= 1.5;
  CHECK(success_prob_isolated(q) < base);
  q = p;
  q.reuse_factor = 2;
  CHECK(success_prob_isolated(q) < base);
  q = p;
  q.neighbor_groups = {{1.0, 1.0}};
  CHECK(success_prob_coordinated(q) < base);
  // the retrial rate only matters once it exceeds the arrival rate
  q = p;
  q.retrial_rate = p.arrival_rate * 3.0;
  CHECK(success_prob_isolated(q) < base);
}

TEST_CASE("coordinated success: zero neighbors reduces to the isolated form bitwise") {
  std::mt19937_64 g(5);
  for (int i = 0; i < 200; ++i) {
    TrafficProfile p = base_profile();
    p.mean_airtime = 0.01 + uniform01(g);
    p.devices_per_network = 1 + static_cast<int>(uniform01(g) * 40);
    p.reuse_factor = 1 + static_cast<int>(uniform01(g) * 8);
    p.arrival_rate = 1e-4 + 0.01 * uniform01(g);
    p.neighbor_groups.clear();
    CHECK(success_prob_coordinated(p) == success_prob_isolated(p));
  }
}

TEST_CASE("coordinated success: eight neighbors scalar value") {
  TrafficProfile p = base_profile();
  p.mean_airtime = 0.25;
  p.devices_per_network = 1;
  p.reuse_factor = 1;
  p.neighbor_groups = {{8.0, 1.0}};
  // exp(-2*0.25*(0 + 8*1)*(1/900))
  CHECK(success_prob_coordinated(p) == doctest::Approx(std::exp(-4.0 / 900.0)).epsilon(1e-12));
  CHECK(success_prob_coordinated(p) == doctest::Approx(0.99557).epsilon(1e-4));
}

TEST_CASE("uncoordinated success: reuse factor forced to one") {
  TrafficProfile p = base_profile();
  p.reuse_factor = 4;
  p.neighbor_groups = {{8.0, 2.0}};
  TrafficProfile k1 = p;
  k1.reuse_factor = 1;
  CHECK(success_prob_uncoordinated(p) == success_prob_coordinated(k1));
}

TEST_CASE("expected delay: immediate success and the two-term expansion") {
  TrafficProfile p = base_profile();
  p.tx_plus_ack_time = 1.0;
  p.backoff_time = 1.0;
  p.max_transmissions = 1;
  CHECK(expected_delay(1.0, p) == doctest::Approx(1.0).epsilon(1e-12));
  // 0.5*1 + 0.5*0.5*(1*(1+1)+1) = 1.25
  CHECK(expected_delay(0.5, p) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK_THROWS_AS(expected_delay(0.0, p), std::invalid_argument);
}

TEST_CASE("expected delay: strictly decreasing in success probability") {
  // With the retry cap high enough to hold the whole geometric mass the
  // truncated sum is monotone; a tight cap clips the low-p tail instead.
  TrafficProfile p = base_profile();
  p.max_transmissions = 400;
  double prev = 1e300;
  for (double ps = 0.05; ps <= 1.0; ps += 0.05) {
    const double d = expected_delay(ps, p);
    CHECK(d < prev);
    prev = d;
  }
  // the truncated form drops mass at small p instead of diverging
  p.max_transmissions = 3;
  CHECK(expected_delay(1e-3, p) < expected_delay(0.9, p));
}

TEST_CASE("outage: boundary values and hand evaluation") {
  CHECK(outage_prob(1.0, 1) == 0.0);
  CHECK(outage_prob(1.0, 7) == 0.0);
  CHECK(outage_prob(0.5, 2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(outage_prob(0.3, 1) == doctest::Approx(0.7).epsilon(1e-12));
  CHECK_THROWS_AS(outage_prob(-0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(outage_prob(0.5, 0), std::invalid_argument);
}

TEST_CASE("outage: truncated geometric sum equals the closed form") {
  std::mt19937_64 g(99);
  for (int i = 0; i < 1000; ++i) {
    const double ps = uniform01(g);
    const int k = 1 + static_cast<int>(uniform01(g) * 20);
    double sum = 0.0;
    for (int j = 0; j < k; ++j) sum += ps * std::pow(1.0 - ps, j);
    CHECK(std::fabs((1.0 - sum) - outage_prob(ps, k)) < 1e-12);
  }
}

TEST_CASE("capacity: scalar value and the round trip into the success expression") {
  TrafficProfile p = base_profile();
  p.mean_airtime = 0.25;
  p.reuse_factor = 1;
  CHECK(system_capacity(1.0, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(system_capacity(0.99, p) ==
        doctest::Approx(1.0 + std::log(1.0 / 0.99) * 900.0 / 0.5).epsilon(1e-12));
  CHECK(system_capacity(0.99, p) == doctest::Approx(19.09).epsilon(1e-3));
  CHECK_THROWS_AS(system_capacity(0.0, p), std::invalid_argument);

  std::mt19937_64 g(123);
  for (int i = 0; i < 100; ++i) {
    TrafficProfile q = base_profile();
    q.mean_airtime = 0.01 + uniform01(g);
    q.reuse_factor = 1 + static_cast<int>(uniform01(g) * 8);
    q.arrival_rate = 1e-4 + 0.01 * uniform01(g);
    q.retrial_rate = uniform01(g) * 0.02;
    const double target = 0.01 + 0.99 * uniform01(g);
    const double c = system_capacity(target, q);
    CHECK(c >= 1.0);
    CHECK(std::fabs(success_prob_isolated_at(c, q) - target) < 1e-9);
  }
}

TEST_CASE("energy per transmission: worked value, circuit-only case, linearity") {
  EnergyProfile e = worked_energy();
  CHECK(energy_per_transmission(e) == doctest::Approx(0.031).epsilon(1e-12));
  EnergyProfile zero_pa = e;
  zero_pa.tx_power_w = 0.0;
  CHECK(energy_per_transmission(zero_pa) ==
        doctest::Approx(e.circuit_power_w * e.airtime_s()).epsilon(1e-12));
  EnergyProfile twice = e;
  twice.payload_bits *= 2.0;
  CHECK(energy_per_transmission(twice) ==
        doctest::Approx(2.0 * energy_per_transmission(e)).epsilon(1e-12));
}

TEST_CASE("battery lifetime: worked 295/160-day values") {
  const EnergyProfile e = worked_energy();
  // denominator 1 + 5 + 36 mJ at p=1, 1 + 5 + 72 mJ at p=0.5
  const double days_p1 = battery_lifetime_days(e, 1.0);
  const double days_p05 = battery_lifetime_days(e, 0.5);
  CHECK(std::fabs(days_p1 - 295.0) <= 3.0);
  CHECK(std::fabs(days_p05 - 160.0) <= 2.0);
  CHECK_THROWS_AS(battery_lifetime_days(e, 0.0), std::invalid_argument);
}

TEST_CASE("battery lifetime: monotone in success probability and battery size") {
  const EnergyProfile e = worked_energy();
  double prev = 0.0;
  for (double ps = 0.1; ps <= 1.0; ps += 0.1) {
    const double d = battery_lifetime_days(e, ps);
    CHECK(d > prev);
    prev = d;
  }
  EnergyProfile big = e;
  big.battery_energy_j *= 2.0;
  CHECK(battery_lifetime_days(big, 0.7) ==
        doctest::Approx(2.0 * battery_lifetime_days(e, 0.7)).epsilon(1e-12));
}

TEST_CASE("tradeoff curve: reductions, crossover and delay growth") {
  TrafficProfile p = base_profile();
  p.mean_airtime = 0.25;
  p.devices_per_network = 10;
  p.max_transmissions = 3;
  p.backoff_time = 1.0;
  p.tx_plus_ack_time = 0.3;
  const EnergyProfile e = worked_energy();
  const auto nm = tier1_neighbor_map(1.0, 1.0);
  const auto curve = tradeoff_curve(p, e, {1, 2, 3, 4}, nm);
  REQUIRE(curve.size() == 4);

  // K=1 with all 8 neighbors is the uncoordinated point
  TrafficProfile unc = p;
  unc.neighbor_groups = nm.at(1);
  CHECK(curve[0].success_prob == doctest::Approx(success_prob_uncoordinated(unc)).epsilon(1e-12));

  // K=4 has no tier-1 interferers left: the isolated expression at K=4
  TrafficProfile k4 = p;
  k4.reuse_factor = 4;
  CHECK(curve[3].success_prob == doctest::Approx(success_prob_isolated(k4)).epsilon(1e-12));

  // with i1=i2=1 the failure probability rises from K=1 to K=2 and K=4 is best
  const double f1 = 1.0 - curve[0].success_prob;
  const double f2 = 1.0 - curve[1].success_prob;
  const double f4 = 1.0 - curve[3].success_prob;
  CHECK(f2 > f1);
  for (const auto& pt : curve) CHECK(f4 <= 1.0 - pt.success_prob + 1e-15);

  // delay strictly increasing in the reuse factor
  for (std::size_t i = 1; i < curve.size(); ++i)
    CHECK(curve[i].expected_delay_s > curve[i - 1].expected_delay_s);

  NeighborMap missing = nm;
  missing.erase(3);
  CHECK_THROWS_AS(tradeoff_curve(p, e, {1, 2, 3, 4}, missing), std::invalid_argument);
}

TEST_CASE("profile validation collects violations") {
  TrafficProfile p = base_profile();
  p.arrival_rate = 0.0;
  p.reuse_factor = 0;
  try {
    p.validate();
    FAIL("expected a validation error");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("arrival_rate") != std::string::npos);
    CHECK(msg.find("reuse_factor") != std::string::npos);
  }
}
