#include "wbnsim/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace wbnsim {

std::uint64_t comm_complexity(Mechanism m, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  switch (m) {
    case Mechanism::PBFT:
      return 2 * n * n + n;
    case Mechanism::Raft:
    case Mechanism::PoW:
      return 2 * n;
  }
  throw std::invalid_argument("unknown mechanism");
}

std::uint64_t spectrum_requirement(Mechanism m, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  switch (m) {
    case Mechanism::PBFT:
      return 2 * n + 1;
    case Mechanism::Raft:
      return n + 1;
    case Mechanism::PoW:
      return 2;
  }
  throw std::invalid_argument("unknown mechanism");
}

ViabilityResult min_viable_power(std::uint32_t f, double lambda,
                                 const ChannelParams& ch) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  const double population = 3.0 * f + 1.0;
  const double r_star = std::sqrt(population / (std::numbers::pi * lambda));
  const auto power_for_range = [&](double d) {
    return ch.rx_sensitivity_dbm + ch.reference_loss_db +
           10.0 * ch.pathloss_exponent *
               std::log10(std::max(d, kMinDistanceM));
  };
  ViabilityResult out;
  out.r_star_m = r_star;
  out.p1_star_dbm = power_for_range(r_star);
  out.p2_star_dbm = power_for_range(2.0 * r_star);
  return out;
}

ViabilityResult min_viable_power(std::uint32_t f, double lambda,
                                 const ChannelParams& ch, double r_max_m) {
  const ViabilityResult out = min_viable_power(f, lambda, ch);
  if (out.r_star_m > r_max_m) {
    throw InfeasibleError("required radius exceeds the deployment limit");
  }
  return out;
}

double binomial_tail_ge(std::uint32_t n, std::uint32_t k, double p) {
  if (k == 0) return 1.0;
  if (k > n) return 0.0;
  p = std::clamp(p, 0.0, 1.0);
  if (p == 0.0) return 0.0;
  if (p == 1.0) return 1.0;
  const double lp = std::log(p);
  const double lq = std::log1p(-p);
  const double lgn = std::lgamma(static_cast<double>(n) + 1.0);
  double sum = 0.0;
  for (std::uint32_t i = k; i <= n; ++i) {
    const double term = lgn - std::lgamma(static_cast<double>(i) + 1.0) -
                        std::lgamma(static_cast<double>(n - i) + 1.0) +
                        static_cast<double>(i) * lp +
                        static_cast<double>(n - i) * lq;
    sum += std::exp(term);
  }
  return std::clamp(sum, 0.0, 1.0);
}

double IntervalModel::per_link_success(double v) const {
  if (v <= 0.0) return 0.0;
  return -std::expm1(-v / tau_s);
}

double IntervalModel::round_duration(double v, std::uint32_t n) const {
  return v * static_cast<double>(spectrum_requirement(Mechanism::PBFT, n));
}

double p_round(double v, std::uint32_t n, std::uint32_t f,
               const IntervalModel& model) {
  if (v < 0.0) throw std::invalid_argument("interval must be >= 0");
  if (static_cast<std::uint64_t>(n) < 3ull * f + 1ull) {
    throw std::invalid_argument("PBFT requires n >= 3f+1");
  }
  const double p = model.per_link_success(v);
  const double quorum_t = binomial_tail_ge(n - 1, 2 * f, p);
  const double q = p * quorum_t * quorum_t;
  return binomial_tail_ge(n, 2 * f + 1, q);
}

double throughput(double v, std::uint32_t n, std::uint32_t f,
                  const IntervalModel& model) {
  if (!(v > 0.0)) throw std::invalid_argument("interval must be > 0");
  const double pr = p_round(v, n, f, model);
  return static_cast<double>(model.block_txns) * pr /
         model.round_duration(v, n);
}

double latency(double v, std::uint32_t n, std::uint32_t f,
               const IntervalModel& model) {
  if (!(v > 0.0)) throw std::invalid_argument("interval must be > 0");
  const double pr = p_round(v, n, f, model);
  if (pr <= 0.0) {
    throw DivergentLatencyError("round success probability is zero");
  }
  return model.round_duration(v, n) / pr;
}

OptimalInterval optimal_interval(std::uint32_t n, std::uint32_t f,
                                 const IntervalModel& model,
                                 std::span<const double> v_grid) {
  if (v_grid.empty()) throw std::invalid_argument("v grid is empty");
  for (std::size_t i = 1; i < v_grid.size(); ++i) {
    if (!(v_grid[i] > v_grid[i - 1])) {
      throw std::invalid_argument("v grid must be strictly ascending");
    }
  }
  OptimalInterval best{v_grid.front(), throughput(v_grid.front(), n, f, model)};
  for (std::size_t i = 1; i < v_grid.size(); ++i) {
    const double tps = throughput(v_grid[i], n, f, model);
    if (tps > best.tps_star) {
      best = {v_grid[i], tps};
    }
  }
  return best;
}

}  // namespace wbnsim
