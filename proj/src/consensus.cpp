#include "wbnsim/consensus.hpp"

#include <limits>
#include <utility>

#include "wbnsim/analytics.hpp"
#include "wbnsim/rng.hpp"

namespace wbnsim {

std::string mechanism_name(Mechanism m) {
  switch (m) {
    case Mechanism::PoW:
      return "PoW";
    case Mechanism::PBFT:
      return "PBFT";
    case Mechanism::Raft:
      return "Raft";
  }
  return "?";
}

std::string stage_name(Stage s) {
  switch (s) {
    case Stage::ClientRequest:
      return "client_request";
    case Stage::PrePrepare:
      return "pre_prepare";
    case Stage::Prepare:
      return "prepare";
    case Stage::Commit:
      return "commit";
    case Stage::Downlink:
      return "downlink";
    case Stage::Uplink:
      return "uplink";
    case Stage::TxRelay:
      return "tx_relay";
    case Stage::BlockBroadcast:
      return "block_broadcast";
    case Stage::Reply:
      return "reply";
  }
  return "?";
}

std::uint32_t quorum(Mechanism m, std::uint32_t f, std::uint32_t n) {
  if (n < 1) throw ConfigMismatchError("n must be >= 1");
  const std::uint64_t n64 = n;
  switch (m) {
    case Mechanism::PBFT:
      if (n64 < 3ull * f + 1ull) {
        throw ConfigMismatchError("PBFT requires n >= 3f+1");
      }
      return 2 * f + 1;
    case Mechanism::Raft:
      if (n64 < 2ull * f + 1ull) {
        throw ConfigMismatchError("Raft requires n >= 2f+1");
      }
      return n / 2 + 1;
    case Mechanism::PoW:
      if (n64 < 2ull * f + 1ull) {
        throw ConfigMismatchError("PoW requires n >= 2f+1");
      }
      return n / 2 + 1;
  }
  throw std::invalid_argument("unknown mechanism");
}

namespace {

Node make_client(const Deployment& dep) {
  // Co-located with the leader, same radio, never faulty.
  Node c = dep.nodes.front();
  c.id = kClientId;
  c.role = Role::Client;
  c.fault = Fault::Honest;
  return c;
}

struct RoundContext {
  const Deployment& dep;
  const ConsensusConfig& cfg;
  const ChannelParams& ch;
  const Jammer* jam;
  Node client;
  RoundResult result{};
  bool timed_out = false;

  bool slot_available() const {
    return cfg.max_slots_timeout == 0 ||
           result.slots_elapsed < cfg.max_slots_timeout;
  }

  bool can_transmit(const Node& n) const {
    if (n.fault == Fault::Crashed) return false;
    if (n.fault == Fault::Byzantine &&
        cfg.byzantine_behavior == ByzantineBehavior::SilentDrop) {
      return false;
    }
    return true;
  }

  // One broadcast slot. Returns indices into dep.nodes of the consensus
  // nodes the message reached. The flags say which accounting windows the
  // slot belongs to; client_listens folds a successful client reception into
  // rx_events and the trace.
  std::vector<std::size_t> broadcast(Stage stage, const Node& sender,
                                     bool in_spectrum, bool in_tx, bool in_rx,
                                     bool client_listens) {
    std::vector<std::size_t> delivered;
    if (!slot_available()) {
      timed_out = true;
      return delivered;
    }
    StageEvent ev;
    ev.stage = stage;
    ev.slot = static_cast<std::uint32_t>(result.slots_elapsed++);
    ev.sender = sender.id;
    if (in_spectrum) ++result.spectrum_slots;
    if (in_tx) ++result.tx_events;
    if (client_listens && link_ok(sender, client, ch, jam)) {
      if (in_rx) ++result.rx_events;
      ev.recipients.push_back(kClientId);
    }
    for (std::size_t j = 0; j < dep.nodes.size(); ++j) {
      const Node& rx = dep.nodes[j];
      if (rx.id == sender.id) continue;
      if (rx.fault == Fault::Crashed) continue;  // crashed radios are dark
      if (!link_ok(sender, rx, ch, jam)) continue;
      delivered.push_back(j);
      if (in_rx) ++result.rx_events;
      ev.recipients.push_back(rx.id);
    }
    result.stage_trace.push_back(std::move(ev));
    return delivered;
  }

  // One unicast slot; true when the message was delivered.
  bool unicast(Stage stage, const Node& sender, const Node& target,
               bool in_spectrum, bool in_tx, bool in_rx) {
    if (!slot_available()) {
      timed_out = true;
      return false;
    }
    StageEvent ev;
    ev.stage = stage;
    ev.slot = static_cast<std::uint32_t>(result.slots_elapsed++);
    ev.sender = sender.id;
    const bool delivered =
        target.fault != Fault::Crashed && link_ok(sender, target, ch, jam);
    if (in_spectrum) ++result.spectrum_slots;
    if (in_tx) ++result.tx_events;
    if (delivered) {
      if (in_rx) ++result.rx_events;
      ev.recipients.push_back(target.id);
    }
    result.stage_trace.push_back(std::move(ev));
    return delivered;
  }
};

void validate_round(const Deployment& dep, const ConsensusConfig& cfg,
                    Mechanism m) {
  if (dep.nodes.empty()) throw ConfigMismatchError("deployment has no nodes");
  if (!(cfg.interval_s > 0.0)) {
    throw std::invalid_argument("interval must be > 0");
  }
  const auto n = static_cast<std::uint32_t>(dep.nodes.size());
  quorum(m, cfg.fault_budget, n);  // node-count check
  if (cfg.max_slots_timeout != 0 &&
      cfg.max_slots_timeout < spectrum_requirement(m, n)) {
    throw ConfigMismatchError(
        "max_slots_timeout is below the round's spectrum requirement");
  }
}

}  // namespace

RoundResult run_pbft(const Deployment& dep, const ConsensusConfig& cfg,
                     const ChannelParams& ch, const Jammer* jam) {
  validate_round(dep, cfg, Mechanism::PBFT);
  const std::size_t n = dep.nodes.size();
  const std::uint32_t f = cfg.fault_budget;
  const std::uint32_t q =
      quorum(Mechanism::PBFT, f, static_cast<std::uint32_t>(n));

  RoundContext ctx{dep, cfg, ch, jam, make_client(dep)};
  const Node& leader = dep.nodes.front();

  // Request: traced and timed, outside the message-accounting windows.
  const bool request_delivered =
      ctx.unicast(Stage::ClientRequest, ctx.client, leader, false, false,
                  false);

  std::vector<char> holds(n, 0);  // valid pre-prepare held
  std::vector<std::uint32_t> prepares_from_others(n, 0);
  std::vector<std::uint32_t> commits_from_others(n, 0);
  std::vector<char> commit_sent(n, 0);

  if (request_delivered && ctx.can_transmit(leader)) {
    const auto rcpt =
        ctx.broadcast(Stage::PrePrepare, leader, true, true, true, true);
    // Only an honest leader's pre-prepare is valid; a conflicting one still
    // burns the slot but nobody acts on it.
    if (leader.fault == Fault::Honest) {
      holds[0] = 1;
      for (const auto j : rcpt) holds[j] = 1;
    }
  }

  // Prepare: every holder of the valid pre-prepare broadcasts once.
  for (std::size_t i = 0; i < n && !ctx.timed_out; ++i) {
    if (!holds[i] || !ctx.can_transmit(dep.nodes[i])) continue;
    const auto rcpt =
        ctx.broadcast(Stage::Prepare, dep.nodes[i], true, true, true, true);
    if (dep.nodes[i].fault == Fault::Honest) {
      for (const auto j : rcpt) ++prepares_from_others[j];
    }
  }

  // Commit: holders that collected 2f valid prepares from distinct others.
  for (std::size_t i = 0; i < n && !ctx.timed_out; ++i) {
    if (!holds[i] || prepares_from_others[i] < 2 * f) continue;
    if (!ctx.can_transmit(dep.nodes[i])) continue;
    const auto slots_before = ctx.result.slots_elapsed;
    const auto rcpt =
        ctx.broadcast(Stage::Commit, dep.nodes[i], true, true, true, true);
    if (ctx.result.slots_elapsed == slots_before) break;  // budget exhausted
    commit_sent[i] = 1;
    if (dep.nodes[i].fault == Fault::Honest) {
      for (const auto j : rcpt) ++commits_from_others[j];
    }
  }

  // A node confirms with its own commit sent plus 2f valid commits from
  // others: 2f+1 commits counting its own. Only honest confirmations count.
  std::uint32_t confirming = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (dep.nodes[i].fault != Fault::Honest) continue;
    if (commit_sent[i] && commits_from_others[i] >= 2 * f) ++confirming;
  }
  ctx.result.confirming_nodes = confirming;
  ctx.result.success = !ctx.timed_out && confirming >= q;
  if (ctx.result.success) {
    ctx.unicast(Stage::Reply, leader, ctx.client, false, false, false);
  }
  return std::move(ctx.result);
}

RoundResult run_raft(const Deployment& dep, const ConsensusConfig& cfg,
                     const ChannelParams& ch, const Jammer* jam) {
  validate_round(dep, cfg, Mechanism::Raft);
  const std::size_t n = dep.nodes.size();

  RoundContext ctx{dep, cfg, ch, jam, make_client(dep)};
  const Node& leader = dep.nodes.front();

  // The request shares the band with consensus traffic here, so it counts
  // toward spectrum and rx (but nobody in the network transmitted it).
  const bool request_delivered =
      ctx.unicast(Stage::ClientRequest, ctx.client, leader, true, false, true);

  std::vector<char> dl_ok(n, 0);
  std::uint32_t votes = 0;
  const bool leader_active = request_delivered && ctx.can_transmit(leader);
  if (leader_active) {
    const auto rcpt =
        ctx.broadcast(Stage::Downlink, leader, true, true, true, true);
    if (leader.fault == Fault::Honest) {
      for (const auto j : rcpt) dl_ok[j] = 1;
    }
    // Uplink acks, ascending id, one slot each; only followers that heard
    // the downlink respond.
    for (const auto j : rcpt) {
      if (ctx.timed_out) break;
      const Node& follower = dep.nodes[j];
      if (!ctx.can_transmit(follower)) continue;
      const auto slots_before = ctx.result.slots_elapsed;
      const bool acked =
          ctx.unicast(Stage::Uplink, follower, leader, true, true, true);
      if (ctx.result.slots_elapsed == slots_before) break;
      if (acked && dl_ok[j] && follower.fault == Fault::Honest) ++votes;
    }
  }

  const bool leader_counts = leader_active && leader.fault == Fault::Honest;
  ctx.result.confirming_nodes = leader_counts ? votes + 1 : votes;
  ctx.result.success =
      !ctx.timed_out && leader_counts && 2ull * (votes + 1ull) > n;
  if (ctx.result.success) {
    ctx.unicast(Stage::Reply, leader, ctx.client, false, false, false);
  }
  return std::move(ctx.result);
}

RoundResult run_pow(const Deployment& dep, const ConsensusConfig& cfg,
                    const ChannelParams& ch, std::uint64_t seed,
                    const Jammer* jam) {
  validate_round(dep, cfg, Mechanism::PoW);
  const std::size_t n = dep.nodes.size();

  RoundContext ctx{dep, cfg, ch, jam, make_client(dep)};

  // The client broadcasts the transaction; outside the accounting windows.
  const auto request_rcpt = ctx.broadcast(Stage::ClientRequest, ctx.client,
                                          false, false, false, false);
  if (request_rcpt.empty()) {
    throw NoMinerReachedError("client broadcast reached no miner");
  }
  std::vector<char> holds_tx(n, 0);
  for (const auto j : request_rcpt) holds_tx[j] = 1;

  // The lowest-id capable receiver re-broadcasts the transaction exactly
  // once; everyone it reaches also becomes a potential miner.
  std::size_t relayer = n;
  for (const auto j : request_rcpt) {
    if (ctx.can_transmit(dep.nodes[j])) {
      relayer = j;
      break;
    }
  }
  if (relayer < n) {
    const auto rcpt =
        ctx.broadcast(Stage::TxRelay, dep.nodes[relayer], true, true, true,
                      true);
    for (const auto j : rcpt) holds_tx[j] = 1;
  }

  // Seeded mining race among transaction holders: draws are taken in
  // ascending id order, the strictly smallest wins, ties go to the lower id.
  Rng rng(seed);
  std::size_t winner = n;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!holds_tx[i]) continue;
    const double t = rng.exponential(1.0);
    if (t < best) {
      best = t;
      winner = i;
    }
  }

  std::vector<char> holds_block(n, 0);
  holds_block[winner] = 1;
  if (ctx.can_transmit(dep.nodes[winner])) {
    const auto rcpt = ctx.broadcast(Stage::BlockBroadcast, dep.nodes[winner],
                                    true, true, true, true);
    for (const auto j : rcpt) holds_block[j] = 1;
  }

  std::uint32_t holders = 0;
  for (std::size_t i = 0; i < n; ++i) holders += holds_block[i];
  ctx.result.confirming_nodes = holders;
  ctx.result.success = !ctx.timed_out && 2ull * holders > n;
  if (ctx.result.success) {
    ctx.unicast(Stage::Reply, dep.nodes[winner], ctx.client, false, false,
                false);
  }
  return std::move(ctx.result);
}

RoundResult run_round(const Deployment& dep, const ConsensusConfig& cfg,
                      const ChannelParams& ch, std::uint64_t seed,
                      const Jammer* jam) {
  switch (cfg.mechanism) {
    case Mechanism::PBFT:
      return run_pbft(dep, cfg, ch, jam);
    case Mechanism::Raft:
      return run_raft(dep, cfg, ch, jam);
    case Mechanism::PoW:
      return run_pow(dep, cfg, ch, seed, jam);
  }
  throw std::invalid_argument("unknown mechanism");
}

}  // namespace wbnsim
