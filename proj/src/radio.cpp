#include "wbnsim/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wbnsim/rng.hpp"

namespace wbnsim {

double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

namespace {

double pathloss_db(double d, const ChannelParams& ch) {
  const double clamped = std::max(d, kMinDistanceM);
  return ch.reference_loss_db +
         10.0 * ch.pathloss_exponent * std::log10(clamped);
}

Deployment place(std::uint32_t n, double radius_m, std::uint64_t seed,
                 double tx_power_dbm, Rng& rng) {
  Deployment dep;
  dep.coverage_radius_m = radius_m;
  dep.seed = seed;
  dep.nodes.reserve(n);
  dep.nodes.push_back(Node{0, Vec2{0.0, 0.0}, tx_power_dbm, Role::Leader,
                           Fault::Honest});
  for (std::uint32_t i = 1; i < n; ++i) {
    const double r = radius_m * std::sqrt(rng.uniform01());
    const double theta = 2.0 * std::numbers::pi * rng.uniform01();
    dep.nodes.push_back(Node{static_cast<std::int32_t>(i),
                             Vec2{r * std::cos(theta), r * std::sin(theta)},
                             tx_power_dbm, Role::Replica, Fault::Honest});
  }
  return dep;
}

}  // namespace

Deployment place_nodes(std::uint32_t n, double radius_m, std::uint64_t seed,
                       double tx_power_dbm) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (!(radius_m > 0.0)) throw std::invalid_argument("radius must be > 0");
  Rng rng(seed);
  return place(n, radius_m, seed, tx_power_dbm, rng);
}

Deployment place_nodes_density(double lambda, double radius_m,
                               std::uint64_t seed, bool poisson,
                               double tx_power_dbm) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  if (!(radius_m > 0.0)) throw std::invalid_argument("radius must be > 0");
  const double mean = lambda * std::numbers::pi * radius_m * radius_m;
  Rng rng(seed);
  std::uint64_t n;
  if (poisson) {
    // The count draw comes first so the position stream only depends on it.
    n = rng.poisson(mean);
  } else {
    n = static_cast<std::uint64_t>(std::llround(mean));
  }
  n = std::max<std::uint64_t>(n, 1);
  return place(static_cast<std::uint32_t>(n), radius_m, seed, tx_power_dbm,
               rng);
}

double received_power_dbm(const Node& tx, const Vec2& rx_position,
                          const ChannelParams& ch) {
  return tx.tx_power_dbm - pathloss_db(distance(tx.position, rx_position), ch);
}

double jammer_power_dbm(const Jammer& jam, const Vec2& rx_position,
                        const ChannelParams& ch) {
  return jam.tx_power_dbm -
         pathloss_db(distance(jam.position, rx_position), ch);
}

bool link_ok(const Node& tx, const Node& rx, const ChannelParams& ch,
             const Jammer* jam) {
  if (tx.fault == Fault::Crashed) return false;
  const double rp = received_power_dbm(tx, rx.position, ch);
  if (rp < ch.rx_sensitivity_dbm) return false;
  if (jam != nullptr && jam->active) {
    const double ip = jammer_power_dbm(*jam, rx.position, ch);
    if (rp - ip < ch.sir_threshold_db) return false;
  }
  return true;
}

std::vector<std::int32_t> coverage_set(const Node& tx, const Deployment& dep,
                                       const ChannelParams& ch,
                                       const Jammer* jam) {
  std::vector<std::int32_t> out;
  for (const Node& rx : dep.nodes) {
    if (rx.id == tx.id) continue;
    if (link_ok(tx, rx, ch, jam)) out.push_back(rx.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

FloodResult flood_reach(const Node& source, const Deployment& dep,
                        const ChannelParams& ch, const Jammer* jam) {
  const std::size_t n = dep.nodes.size();
  std::size_t source_index = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (dep.nodes[i].id == source.id) {
      source_index = i;
      break;
    }
  }
  if (source_index == n) {
    throw std::invalid_argument("flood source is not part of the deployment");
  }

  std::vector<char> holds(n, 0);
  holds[source_index] = 1;
  std::size_t aware = 1;

  std::vector<std::size_t> queue{source_index};
  std::size_t head = 0;
  FloodResult result;
  while (head < queue.size() && aware < n) {
    const std::size_t i = queue[head++];
    ++result.transmissions;
    for (std::size_t j = 0; j < n; ++j) {
      if (holds[j]) continue;
      if (!link_ok(dep.nodes[i], dep.nodes[j], ch, jam)) continue;
      holds[j] = 1;
      ++aware;
      if (dep.nodes[j].fault != Fault::Crashed) queue.push_back(j);
    }
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (holds[j] && j != source_index) {
      result.reached.push_back(dep.nodes[j].id);
    }
  }
  std::sort(result.reached.begin(), result.reached.end());
  return result;
}

}  // namespace wbnsim
