#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>

#include "wbnsim/consensus.hpp"
#include "wbnsim/radio.hpp"

namespace wbnsim {

// Receiver-side message events for one fully-connected round of n nodes:
// 2n^2+n for PBFT, 2n for Raft and PoW. Throws std::invalid_argument for
// n == 0. Exact in 64-bit integers through n = 10^6 and beyond.
std::uint64_t comm_complexity(Mechanism m, std::uint64_t n);

// Spectrum resources (slots) one round occupies: 2n+1 for PBFT, n+1 for
// Raft (client request included), 2 for PoW. Throws std::invalid_argument
// for n == 0.
std::uint64_t spectrum_requirement(Mechanism m, std::uint64_t n);

struct ViabilityResult {
  double p1_star_dbm = 0.0;  // minimum per-node power, single-hop network
  double p2_star_dbm = 0.0;  // same with the diameter as the worst-case hop
  double r_star_m = 0.0;     // radius holding the 3f+1 quorum population
};

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Minimum transmit power for a byzantine-tolerant network of density lambda
// (nodes/m^2): the deployment radius must hold 3f+1 expected nodes,
//   r* = sqrt((3f+1) / (pi * lambda)),
// and every node must close a link over r* (p1*) or over the 2r* diameter
// (p2*) against the channel's sensitivity. Distances are clamped at 1 m like
// every other use of the propagation law. Throws std::invalid_argument for
// lambda <= 0.
ViabilityResult min_viable_power(std::uint32_t f, double lambda,
                                 const ChannelParams& ch);

// Same, but throws InfeasibleError when r* exceeds r_max_m.
ViabilityResult min_viable_power(std::uint32_t f, double lambda,
                                 const ChannelParams& ch, double r_max_m);

// Exact upper binomial tail P[Bin(n, p) >= k], evaluated by summing exact
// log-space terms (no normal approximation).
double binomial_tail_ge(std::uint32_t n, std::uint32_t k, double p);

// Slot-duration model for a PBFT network: within a slot of duration v a
// given link delivers with p(v) = 1 - exp(-v / tau_s). A round spends
// 2n+1 slots, so duration(v) = v * (2n+1).
struct IntervalModel {
  double tau_s = 1.0;            // mean link-delivery time
  std::uint32_t block_txns = 1;  // transactions carried per confirmed block

  double per_link_success(double v) const;
  double round_duration(double v, std::uint32_t n) const;
};

// Probability one round confirms: each node needs its critical reception
// (the request for the leader, the pre-prepare for a replica) plus prepare
// and commit quorums of 2f peers, q = p * T^2 with
// T = P[Bin(n-1, p) >= 2f]; the round needs 2f+1 confirming nodes,
// P_round = P[Bin(n, q) >= 2f+1]. Throws std::invalid_argument when
// n < 3f+1 or v < 0.
double p_round(double v, std::uint32_t n, std::uint32_t f,
               const IntervalModel& model);

// Confirmed transactions per second: block_txns * P_round / duration.
// Throws std::invalid_argument for v <= 0.
double throughput(double v, std::uint32_t n, std::uint32_t f,
                  const IntervalModel& model);

class DivergentLatencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mean time to a confirmed round with geometric retry: duration / P_round.
// Throws DivergentLatencyError when P_round underflows to zero.
double latency(double v, std::uint32_t n, std::uint32_t f,
               const IntervalModel& model);

struct OptimalInterval {
  double v_star_s = 0.0;
  double tps_star = 0.0;
};

// Grid argmax of throughput; ties keep the smallest v. The grid must be
// non-empty and strictly ascending (std::invalid_argument otherwise).
OptimalInterval optimal_interval(std::uint32_t n, std::uint32_t f,
                                 const IntervalModel& model,
                                 std::span<const double> v_grid);

}  // namespace wbnsim
