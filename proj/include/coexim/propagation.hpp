#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

// Indoor propagation model for a multi-apartment building: per-link pathloss
// with floor and wall attenuation, received power, and aggregate interference
// at a gateway.
//
// Pathloss in dB for a link of length d (km) at carrier f (MHz):
//
//   PL(d) = 20*log10(f) + 10*delta*log10(d) + 34.4
//           + K_f*L_f          (only when the endpoints are on different floors)
//           + K_we*L_we + K_wi*L_wi   (only when they are on the same floor)
//
// K_f, K_we, K_wi are the floor / external-wall / internal-wall crossing
// counts along the straight segment between the endpoints. External walls
// separate apartments; internal walls subdivide an apartment into rooms on a
// regular sub-grid.
namespace coexim::propagation {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double distance_m(const Vec3& a, const Vec3& b);

struct PathlossParams {
  double carrier_freq_mhz = 868.0;  // f
  double pathloss_exponent = 3.0;   // delta
  double floor_loss_db = 15.0;      // L_f, per floor crossed
  double ext_wall_loss_db = 20.0;   // L_we, per apartment-separating wall
  double int_wall_loss_db = 10.0;   // L_wi, per room-separating wall
  double antenna_gain_db = 0.0;     // A_tr
  double hw_loss_db = 0.0;          // L_tr
  double min_distance_m = 1.0;      // clamp floor for the log term

  std::vector<std::string> violations() const;
  void validate() const;
};

// Regular grid of square apartments, `floors` storeys tall. Internal walls
// split every apartment into rooms_per_side x rooms_per_side rooms.
struct BuildingLayout {
  int rows = 3;
  int cols = 3;
  int floors = 1;
  double apartment_side_m = 20.0;
  double floor_height_m = 3.0;
  int rooms_per_side = 2;

  std::vector<std::string> violations() const;
  void validate() const;

  int num_apartments() const { return rows * cols * floors; }
  bool contains(const Vec3& p) const;
  // Apartment index for a position (boundary points map to the lower cell);
  // throws std::invalid_argument outside the building envelope.
  int apartment_of(const Vec3& p) const;
  // Horizontal center of the apartment at device height (1 m above floor).
  Vec3 apartment_center(int apartment) const;

  // Tier-1 neighborhoods on the same floor.
  std::vector<int> side_neighbors(int apartment) const;
  std::vector<int> diagonal_neighbors(int apartment) const;
};

enum class NodeRole { Sensor, Actuator, Gateway };

struct NodePlacement {
  int node_id = 0;
  int apartment_id = 0;
  Vec3 position;
  NodeRole role = NodeRole::Sensor;
  double tx_power_mw = 10.0;
};

struct WallCounts {
  int external = 0;
  int internal = 0;
  int floors = 0;
};

// Crossing counts along the straight segment a->b. Symmetric in (a, b);
// throws std::invalid_argument if either endpoint is outside the building.
WallCounts wall_counts(const Vec3& a, const Vec3& b, const BuildingLayout& layout);

double pathloss_db(const Vec3& a, const Vec3& b, const PathlossParams& params,
                   const BuildingLayout& layout);

double mw_to_dbm(double mw);
double dbm_to_mw(double dbm);

// Link budget: P_r(dBm) = P_t(dBm) + A_tr - L_tr - PL.
double rx_power_dbm(double ptx_mw, double pathloss_db, const PathlossParams& params);

// Received power in linear mW over the modeled link.
double received_power_mw(double ptx_mw, const Vec3& a, const Vec3& b,
                         const PathlossParams& params, const BuildingLayout& layout);

// Aggregate interference at a gateway in watts from a set of concurrently
// transmitting nodes (tx power in mW per entry). The intended transmitter
// must not be in the set.
double interference_at_w(const NodePlacement& gateway,
                         std::span<const std::pair<NodePlacement, double>> active,
                         const PathlossParams& params, const BuildingLayout& layout);

}  // namespace coexim::propagation
