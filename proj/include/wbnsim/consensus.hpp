#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbnsim/radio.hpp"

namespace wbnsim {

enum class Mechanism : std::uint8_t { PoW, PBFT, Raft };

std::string mechanism_name(Mechanism m);

// Byzantine node behavior. SilentDrop nodes never transmit; ConflictingVote
// nodes transmit on the honest schedule but their messages never count toward
// any quorum.
enum class ByzantineBehavior : std::uint8_t { SilentDrop, ConflictingVote };

struct ConsensusConfig {
  Mechanism mechanism = Mechanism::PBFT;
  std::uint32_t fault_budget = 0;       // f, tolerated faulty nodes
  double interval_s = 1.0;              // slot duration v
  std::uint32_t max_slots_timeout = 0;  // 0 = unlimited
  ByzantineBehavior byzantine_behavior = ByzantineBehavior::SilentDrop;
};

// Raised when a config cannot run on the given deployment (node count below
// the mechanism's minimum for f, or a slot budget too small to ever finish).
class ConfigMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by the PoW round when the client's broadcast reaches no miner.
class NoMinerReachedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Stage : std::uint8_t {
  ClientRequest,
  PrePrepare,
  Prepare,
  Commit,
  Downlink,
  Uplink,
  TxRelay,
  BlockBroadcast,
  Reply,
};

std::string stage_name(Stage s);

// The client station, co-located with the leader at the origin. It is not a
// consensus node; it appears in traces as sender of the request and recipient
// of broadcasts it overhears and of the final reply.
inline constexpr std::int32_t kClientId = -1;

struct StageEvent {
  Stage stage{};
  std::uint32_t slot = 0;           // 0-based slot index
  std::int32_t sender = 0;          // kClientId for the request
  std::vector<std::int32_t> recipients;  // delivered-to ids, ascending
  bool operator==(const StageEvent&) const = default;
};

// Per-round accounting. The message counters cover each mechanism's
// consensus-and-replication window so that under a perfect channel they
// reconcile with the closed forms in the analytics module:
//   PBFT: tx over {pre-prepare, prepare, commit}; rx over the same stages,
//         client copies included -> tx = 2N+1, rx = 2N^2+N.
//   Raft: tx over {downlink, uplinks}; spectrum and rx additionally include
//         the client request -> tx = N, spectrum = N+1, rx = 2N.
//   PoW:  tx over {tx relay, block broadcast}; rx over the same two
//         broadcasts -> tx = 2, rx = 2N.
// The reply slot is traced and counted in slots_elapsed but never in the
// message counters. Every network transmission reaches at most N-1 peers
// plus the listening client, so rx_events <= tx_events * N, except that
// Raft's window adds the one client-request delivery: <= tx_events * N + 1.
struct RoundResult {
  bool success = false;
  std::uint32_t confirming_nodes = 0;
  std::uint64_t tx_events = 0;
  std::uint64_t rx_events = 0;
  std::uint64_t spectrum_slots = 0;
  std::uint64_t slots_elapsed = 0;
  std::vector<StageEvent> stage_trace;
  bool operator==(const RoundResult&) const = default;
};

// Minimum confirming nodes for a successful round: 2f+1 for PBFT,
// floor(N/2)+1 for Raft and PoW. Throws std::invalid_argument when n is
// below the mechanism's minimum (3f+1 for PBFT, 2f+1 otherwise, and >= 1).
std::uint32_t quorum(Mechanism m, std::uint32_t f, std::uint32_t n);

// One slotted consensus round over the deployment. The deployment's fault
// marks drive behavior: crashed nodes neither send nor receive; byzantine
// nodes follow cfg.byzantine_behavior. seed feeds mechanism-internal
// randomness (PoW mining draws); PBFT and Raft rounds are seed-independent.
RoundResult run_round(const Deployment& dep, const ConsensusConfig& cfg,
                      const ChannelParams& ch, std::uint64_t seed,
                      const Jammer* jam = nullptr);

RoundResult run_pbft(const Deployment& dep, const ConsensusConfig& cfg,
                     const ChannelParams& ch, const Jammer* jam = nullptr);

RoundResult run_raft(const Deployment& dep, const ConsensusConfig& cfg,
                     const ChannelParams& ch, const Jammer* jam = nullptr);

RoundResult run_pow(const Deployment& dep, const ConsensusConfig& cfg,
                    const ChannelParams& ch, std::uint64_t seed,
                    const Jammer* jam = nullptr);

}  // namespace wbnsim
