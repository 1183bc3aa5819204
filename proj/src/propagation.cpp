#include "coexim/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace coexim::propagation {

namespace {

// Device reference height above the floor slab.
constexpr double kDeviceHeightM = 1.0;

void throw_if(const std::vector<std::string>& v, const char* what) {
  if (v.empty()) return;
  std::ostringstream os;
  os << what << ":";
  for (const auto& s : v) os << " [" << s << "]";
  throw std::invalid_argument(os.str());
}

// Number of grid planes k*pitch, k in [k_lo, k_hi], strictly between a and b.
// Planes whose index is a multiple of `skip_every` are not counted (used to
// exclude apartment lines from the room grid).
int plane_crossings(double a, double b, double pitch, int k_lo, int k_hi, int skip_every) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  int k0 = static_cast<int>(std::floor(lo / pitch)) + 1;
  int k1 = static_cast<int>(std::ceil(hi / pitch)) - 1;
  k0 = std::max(k0, k_lo);
  k1 = std::min(k1, k_hi);
  int n = 0;
  for (int k = k0; k <= k1; ++k) {
    if (skip_every > 0 && k % skip_every == 0) continue;
    const double plane = k * pitch;
    if (lo < plane && plane < hi) ++n;
  }
  return n;
}

}  // namespace

double distance_m(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

std::vector<std::string> PathlossParams::violations() const {
  std::vector<std::string> v;
  if (!(carrier_freq_mhz > 0)) v.push_back("carrier_freq_mhz must be > 0");
  if (!(pathloss_exponent >= 1)) v.push_back("pathloss_exponent must be >= 1");
  if (floor_loss_db < 0) v.push_back("floor_loss_db must be >= 0");
  if (ext_wall_loss_db < 0) v.push_back("ext_wall_loss_db must be >= 0");
  if (int_wall_loss_db < 0) v.push_back("int_wall_loss_db must be >= 0");
  if (hw_loss_db < 0) v.push_back("hw_loss_db must be >= 0");
  if (!(min_distance_m > 0)) v.push_back("min_distance_m must be > 0");
  return v;
}

void PathlossParams::validate() const { throw_if(violations(), "invalid pathloss params"); }

std::vector<std::string> BuildingLayout::violations() const {
  std::vector<std::string> v;
  if (rows < 1 || cols < 1 || floors < 1) v.push_back("rows, cols and floors must be >= 1");
  if (!(apartment_side_m > 0)) v.push_back("apartment_side_m must be > 0");
  if (!(floor_height_m > 0)) v.push_back("floor_height_m must be > 0");
  if (rooms_per_side < 1) v.push_back("rooms_per_side must be >= 1");
  return v;
}

void BuildingLayout::validate() const { throw_if(violations(), "invalid building layout"); }

bool BuildingLayout::contains(const Vec3& p) const {
  return p.x >= 0 && p.x <= cols * apartment_side_m && p.y >= 0 &&
         p.y <= rows * apartment_side_m && p.z >= 0 && p.z <= floors * floor_height_m;
}

int BuildingLayout::apartment_of(const Vec3& p) const {
  if (!contains(p)) throw std::invalid_argument("position outside the building envelope");
  auto cell = [](double v, double pitch, int n) {
    return std::clamp(static_cast<int>(std::floor(v / pitch)), 0, n - 1);
  };
  const int c = cell(p.x, apartment_side_m, cols);
  const int r = cell(p.y, apartment_side_m, rows);
  const int f = cell(p.z, floor_height_m, floors);
  return (f * rows + r) * cols + c;
}

Vec3 BuildingLayout::apartment_center(int apartment) const {
  if (apartment < 0 || apartment >= num_apartments())
    throw std::invalid_argument("apartment index out of range");
  const int f = apartment / (rows * cols);
  const int r = (apartment / cols) % rows;
  const int c = apartment % cols;
  return {(c + 0.5) * apartment_side_m, (r + 0.5) * apartment_side_m,
          f * floor_height_m + kDeviceHeightM};
}

std::vector<int> BuildingLayout::side_neighbors(int apartment) const {
  const int f = apartment / (rows * cols);
  const int r = (apartment / cols) % rows;
  const int c = apartment % cols;
  std::vector<int> out;
  static constexpr int d[4][2] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  for (auto& [dr, dc] : d) {
    const int nr = r + dr, nc = c + dc;
    if (nr >= 0 && nr < rows && nc >= 0 && nc < cols) out.push_back((f * rows + nr) * cols + nc);
  }
  return out;
}

std::vector<int> BuildingLayout::diagonal_neighbors(int apartment) const {
  const int f = apartment / (rows * cols);
  const int r = (apartment / cols) % rows;
  const int c = apartment % cols;
  std::vector<int> out;
  static constexpr int d[4][2] = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  for (auto& [dr, dc] : d) {
    const int nr = r + dr, nc = c + dc;
    if (nr >= 0 && nr < rows && nc >= 0 && nc < cols) out.push_back((f * rows + nr) * cols + nc);
  }
  return out;
}

WallCounts wall_counts(const Vec3& a, const Vec3& b, const BuildingLayout& layout) {
  if (!layout.contains(a) || !layout.contains(b))
    throw std::invalid_argument("position outside the building envelope");
  const double side = layout.apartment_side_m;
  const double room = side / layout.rooms_per_side;
  const int rs = layout.rooms_per_side;
  WallCounts w;
  // Apartment-separating grid lines (the building shell is not counted; both
  // endpoints are inside).
  w.external = plane_crossings(a.x, b.x, side, 1, layout.cols - 1, 0) +
               plane_crossings(a.y, b.y, side, 1, layout.rows - 1, 0);
  // Room grid, skipping indices that coincide with apartment lines.
  if (rs > 1) {
    w.internal = plane_crossings(a.x, b.x, room, 1, layout.cols * rs - 1, rs) +
                 plane_crossings(a.y, b.y, room, 1, layout.rows * rs - 1, rs);
  }
  w.floors = plane_crossings(a.z, b.z, layout.floor_height_m, 1, layout.floors - 1, 0);
  return w;
}

double pathloss_db(const Vec3& a, const Vec3& b, const PathlossParams& params,
                   const BuildingLayout& layout) {
  const WallCounts w = wall_counts(a, b, layout);
  const double d_km = std::max(distance_m(a, b), params.min_distance_m) / 1000.0;
  double pl = 20.0 * std::log10(params.carrier_freq_mhz) +
              10.0 * params.pathloss_exponent * std::log10(d_km) + 34.4;
  if (w.floors > 0) {
    pl += w.floors * params.floor_loss_db;  // cross-floor link: floor losses only
  } else {
    pl += w.external * params.ext_wall_loss_db + w.internal * params.int_wall_loss_db;
  }
  return pl;
}

double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }
double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

double rx_power_dbm(double ptx_mw, double pathloss_db, const PathlossParams& params) {
  return mw_to_dbm(ptx_mw) + params.antenna_gain_db - params.hw_loss_db - pathloss_db;
}

double received_power_mw(double ptx_mw, const Vec3& a, const Vec3& b,
                         const PathlossParams& params, const BuildingLayout& layout) {
  if (!(ptx_mw > 0)) throw std::invalid_argument("transmit power must be > 0");
  return dbm_to_mw(rx_power_dbm(ptx_mw, pathloss_db(a, b, params, layout), params));
}

double interference_at_w(const NodePlacement& gateway,
                         std::span<const std::pair<NodePlacement, double>> active,
                         const PathlossParams& params, const BuildingLayout& layout) {
  if (gateway.role != NodeRole::Gateway)
    throw std::invalid_argument("interference_at_w: receiver is not a gateway");
  double sum_w = 0.0;
  for (const auto& [node, ptx_mw] : active) {
    sum_w += received_power_mw(ptx_mw, node.position, gateway.position, params, layout) * 1e-3;
  }
  return sum_w;
}

}  // namespace coexim::propagation
