#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace wbnsim {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double distance(const Vec2& a, const Vec2& b);

enum class Role : std::uint8_t { Leader, Replica, Miner, Client };
enum class Fault : std::uint8_t { Honest, Crashed, Byzantine };

struct Node {
  std::int32_t id = 0;
  Vec2 position{};
  double tx_power_dbm = 20.0;
  Role role = Role::Replica;
  Fault fault = Fault::Honest;
  bool operator==(const Node&) const = default;
};

// Distances below this are clamped before the log-distance law is applied,
// so co-located radios see a finite loss.
inline constexpr double kMinDistanceM = 1.0;

// Log-distance propagation, no fading:
//   PL(d) = reference_loss_db + 10 * pathloss_exponent * log10(max(d, 1 m)).
// A link is up when the received power clears rx_sensitivity_dbm and, while a
// jammer is active, the signal-to-interference ratio clears sir_threshold_db.
// Both comparisons are inclusive. noise_floor_dbm is carried for
// configuration completeness; link outcomes are interference-limited and do
// not consult it.
struct ChannelParams {
  double pathloss_exponent = 2.5;
  double reference_loss_db = 0.0;
  double rx_sensitivity_dbm = -std::numeric_limits<double>::infinity();
  double sir_threshold_db = -std::numeric_limits<double>::infinity();
  double noise_floor_dbm = -std::numeric_limits<double>::infinity();
};

struct Jammer {
  Vec2 position{};
  double tx_power_dbm = 20.0;
  bool active = true;
};

struct Deployment {
  std::vector<Node> nodes;  // ascending id, node 0 first
  double coverage_radius_m = 0.0;
  std::uint64_t seed = 0;
};

// Uniform placement over a disk of the given radius: node 0 (the leader) sits
// at the origin, the rest are area-uniform (r = R*sqrt(u), theta = 2*pi*u').
// Throws std::invalid_argument for n == 0 or radius <= 0.
Deployment place_nodes(std::uint32_t n, double radius_m, std::uint64_t seed,
                       double tx_power_dbm = 20.0);

// Density-driven placement: n = round(lambda * pi * radius^2) by default, or a
// seeded Poisson draw of that mean when poisson is set. At least one node is
// always placed. Throws std::invalid_argument for lambda <= 0 or radius <= 0.
Deployment place_nodes_density(double lambda, double radius_m,
                               std::uint64_t seed, bool poisson = false,
                               double tx_power_dbm = 20.0);

double received_power_dbm(const Node& tx, const Vec2& rx_position,
                          const ChannelParams& ch);

double jammer_power_dbm(const Jammer& jam, const Vec2& rx_position,
                        const ChannelParams& ch);

// One-hop detectability. Crashed transmitters never deliver. An inactive (or
// absent) jammer leaves only the sensitivity test.
bool link_ok(const Node& tx, const Node& rx, const ChannelParams& ch,
             const Jammer* jam = nullptr);

// Ids of every other node reachable from tx in one hop, ascending.
std::vector<std::int32_t> coverage_set(const Node& tx, const Deployment& dep,
                                       const ChannelParams& ch,
                                       const Jammer* jam = nullptr);

struct FloodResult {
  std::vector<std::int32_t> reached;  // ascending, source excluded
  std::uint32_t transmissions = 0;    // broadcasting nodes, source included
  bool operator==(const FloodResult&) const = default;
};

// Breadth-first flooding: each node re-broadcasts a message at most once, in
// FIFO order with ties broken by ascending id. Flooding stops as soon as every
// node holds the message; nodes still queued at that point never transmit.
// Crashed nodes can be reached but never re-broadcast.
FloodResult flood_reach(const Node& source, const Deployment& dep,
                        const ChannelParams& ch, const Jammer* jam = nullptr);

}  // namespace wbnsim
