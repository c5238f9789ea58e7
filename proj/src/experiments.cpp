#include "wbnsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

#include "wbnsim/version.hpp"

namespace wbnsim {

std::vector<double> log_grid(double lo, double hi, std::uint32_t points) {
  if (!(lo > 0.0)) throw std::invalid_argument("grid lo must be > 0");
  if (!(hi >= lo)) throw std::invalid_argument("grid hi must be >= lo");
  if (points == 0) throw std::invalid_argument("grid needs at least 1 point");
  std::vector<double> out;
  out.reserve(points);
  if (points == 1) {
    out.push_back(lo);
    return out;
  }
  const double llo = std::log(lo);
  const double lhi = std::log(hi);
  for (std::uint32_t i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    out.push_back(std::exp(llo + t * (lhi - llo)));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::uint32_t resolve_threads(std::uint32_t requested, std::size_t units) {
  const std::size_t cap = std::max<std::size_t>(units, 1);
  if (requested != 0) {
    return static_cast<std::uint32_t>(std::min<std::size_t>(requested, cap));
  }
  std::size_t n = std::max(1u, std::thread::hardware_concurrency());
  n = std::min<std::size_t>(n, 8);
  if (const char* env = std::getenv("WBNSIM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != nullptr && *end == '\0' && v >= 1) {
      n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
  }
  return static_cast<std::uint32_t>(std::min(n, cap));
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> base_metadata(const std::string& experiment) {
  return {std::string("wbnsim ") + kVersion, "experiment=" + experiment};
}

std::string join_u32(const std::vector<std::uint32_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string join_mechs(const std::vector<Mechanism>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += mechanism_name(xs[i]);
  }
  return out;
}

}  // namespace

SweepTable run_complexity_sweep(const SweepSpec& spec) {
  if (spec.n_min < 1) throw std::invalid_argument("n_min must be >= 1");
  if (spec.n_max < spec.n_min) {
    throw std::invalid_argument("n_max must be >= n_min");
  }
  if (spec.mechanisms.empty()) {
    throw std::invalid_argument("mechanism list is empty");
  }
  SweepTable table;
  table.metadata = base_metadata("complexity");
  table.metadata.push_back("mechanisms=" + join_mechs(spec.mechanisms));
  table.metadata.push_back("n_max=" + std::to_string(spec.n_max));
  table.metadata.push_back("n_min=" + std::to_string(spec.n_min));
  table.header = {"mechanism", "n", "complexity", "spectrum"};
  for (const Mechanism m : spec.mechanisms) {
    for (std::uint32_t n = spec.n_min; n <= spec.n_max; ++n) {
      table.rows.push_back(
          {mechanism_name(m), static_cast<std::int64_t>(n),
           static_cast<std::int64_t>(comm_complexity(m, n)),
           static_cast<std::int64_t>(spectrum_requirement(m, n))});
    }
  }
  return table;
}

SweepTable run_viability_sweep(const SweepSpec& spec) {
  if (spec.lambda_grid.empty()) {
    throw std::invalid_argument("lambda grid is empty");
  }
  if (!(spec.r_max_m > 0.0)) throw std::invalid_argument("r_max must be > 0");
  SweepTable table;
  table.metadata = base_metadata("viability");
  table.metadata.push_back(std::string("adaptive_f=") +
                           (spec.adaptive_f ? "1" : "0"));
  table.metadata.push_back("f_list=" + join_u32(spec.f_list));
  table.metadata.push_back("pathloss_exponent=" +
                           fmt(spec.channel.pathloss_exponent));
  table.metadata.push_back("r_max=" + fmt(spec.r_max_m));
  table.metadata.push_back("rx_sensitivity_dbm=" +
                           fmt(spec.channel.rx_sensitivity_dbm));
  table.header = {"f_mode", "f",       "lambda",  "r_star_m",
                  "p1_star_dbm", "p2_star_dbm", "feasible"};

  const auto emit = [&](const std::string& mode, std::uint32_t f,
                        double lambda) {
    const ViabilityResult v = min_viable_power(f, lambda, spec.channel);
    const bool feasible = v.r_star_m <= spec.r_max_m;
    table.rows.push_back({mode, static_cast<std::int64_t>(f), lambda,
                          v.r_star_m, v.p1_star_dbm, v.p2_star_dbm,
                          static_cast<std::int64_t>(feasible ? 1 : 0)});
  };

  for (const std::uint32_t f : spec.f_list) {
    for (const double lambda : spec.lambda_grid) emit("fixed", f, lambda);
  }
  if (spec.adaptive_f) {
    for (const double lambda : spec.lambda_grid) {
      const double population =
          lambda * std::numbers::pi * spec.r_max_m * spec.r_max_m;
      const double f_real = std::floor((population - 1.0) / 3.0);
      const auto f = static_cast<std::uint32_t>(std::max(0.0, f_real));
      emit("adaptive", f, lambda);
    }
  }
  return table;
}

SweepTable run_jamming_experiment(const SweepSpec& spec) {
  if (spec.n_nodes < 2) {
    throw std::invalid_argument("jamming experiment needs n >= 2");
  }
  if (spec.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (spec.sir_list_db.empty()) {
    throw std::invalid_argument("sir threshold list is empty");
  }
  for (const double sir : spec.sir_list_db) {
    if (!std::isfinite(sir)) {
      throw std::invalid_argument("sir thresholds must be finite");
    }
  }

  SweepTable table;
  table.metadata = base_metadata("jam");
  table.metadata.push_back("base_seed=" + std::to_string(spec.base_seed));
  table.metadata.push_back("jammer_active=" +
                           std::string(spec.jammer.active ? "1" : "0"));
  table.metadata.push_back("jammer_power_dbm=" +
                           fmt(spec.jammer.tx_power_dbm));
  table.metadata.push_back("jammer_x=" + fmt(spec.jammer.position.x));
  table.metadata.push_back("jammer_y=" + fmt(spec.jammer.position.y));
  table.metadata.push_back("n=" + std::to_string(spec.n_nodes));
  table.metadata.push_back("pathloss_exponent=" +
                           fmt(spec.channel.pathloss_exponent));
  table.metadata.push_back("radius=" + fmt(spec.radius_m));
  table.metadata.push_back("trials=" + std::to_string(spec.trials));
  table.metadata.push_back("tx_power_dbm=" + fmt(spec.tx_power_dbm));
  table.header = {"sir_db", "trial", "seed", "success", "votes",
                  "vote_fraction"};

  const std::size_t units =
      static_cast<std::size_t>(spec.sir_list_db.size()) * spec.trials;
  table.rows.resize(units);

  ConsensusConfig cfg;
  cfg.mechanism = Mechanism::Raft;
  cfg.fault_budget = 0;
  quorum(Mechanism::Raft, 0, spec.n_nodes);  // fail fast before spawning

  const auto run_unit = [&](std::size_t unit) {
    const std::size_t sir_index = unit / spec.trials;
    const std::uint32_t trial =
        static_cast<std::uint32_t>(unit % spec.trials);
    const std::uint64_t seed = spec.base_seed + trial;
    Deployment dep =
        spec.poisson_placement
            ? place_nodes_density(
                  static_cast<double>(spec.n_nodes) /
                      (std::numbers::pi * spec.radius_m * spec.radius_m),
                  spec.radius_m, seed, true, spec.tx_power_dbm)
            : place_nodes(spec.n_nodes, spec.radius_m, seed,
                          spec.tx_power_dbm);
    ChannelParams ch = spec.channel;
    ch.sir_threshold_db = spec.sir_list_db[sir_index];
    const RoundResult rr = run_raft(dep, cfg, ch, &spec.jammer);
    const std::uint32_t votes =
        rr.confirming_nodes > 0 ? rr.confirming_nodes - 1 : 0;
    const std::size_t n = dep.nodes.size();
    const double fraction =
        n > 1 ? static_cast<double>(votes) / static_cast<double>(n - 1) : 1.0;
    table.rows[unit] = {ch.sir_threshold_db,
                        static_cast<std::int64_t>(trial),
                        static_cast<std::int64_t>(seed),
                        static_cast<std::int64_t>(rr.success ? 1 : 0),
                        static_cast<std::int64_t>(votes), fraction};
  };

  const std::uint32_t workers = resolve_threads(spec.threads, units);
  if (workers <= 1) {
    for (std::size_t u = 0; u < units; ++u) run_unit(u);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::uint32_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t u = w; u < units; u += workers) run_unit(u);
      });
    }
    for (auto& t : pool) t.join();
  }
  return table;
}

SweepTable run_jamming_map(const SweepSpec& spec, double sir_db,
                           std::uint64_t seed) {
  if (spec.n_nodes < 2) {
    throw std::invalid_argument("jamming map needs n >= 2");
  }
  Deployment dep =
      place_nodes(spec.n_nodes, spec.radius_m, seed, spec.tx_power_dbm);
  ChannelParams ch = spec.channel;
  ch.sir_threshold_db = sir_db;

  SweepTable table;
  table.metadata = base_metadata("jam_map");
  table.metadata.push_back("seed=" + std::to_string(seed));
  table.metadata.push_back("sir_db=" + fmt(sir_db));
  table.header = {"id", "x", "y", "dist_m", "dl_ok", "ul_ok", "vote"};
  const Node& leader = dep.nodes.front();
  for (std::size_t i = 1; i < dep.nodes.size(); ++i) {
    const Node& node = dep.nodes[i];
    const bool dl = link_ok(leader, node, ch, &spec.jammer);
    const bool ul = link_ok(node, leader, ch, &spec.jammer);
    table.rows.push_back({static_cast<std::int64_t>(node.id), node.position.x,
                          node.position.y,
                          distance(leader.position, node.position),
                          static_cast<std::int64_t>(dl ? 1 : 0),
                          static_cast<std::int64_t>(ul ? 1 : 0),
                          static_cast<std::int64_t>((dl && ul) ? 1 : 0)});
  }
  return table;
}

SweepTable run_interval_sweep(const SweepSpec& spec) {
  if (spec.v_grid.empty()) throw std::invalid_argument("v grid is empty");
  SweepTable table;
  table.metadata = base_metadata("interval");
  table.metadata.push_back("block_txns=" +
                           std::to_string(spec.interval_model.block_txns));
  table.metadata.push_back("f_list=" + join_u32(spec.f_list));
  table.metadata.push_back("n_list=" + join_u32(spec.n_list));
  table.metadata.push_back("tau=" + fmt(spec.interval_model.tau_s));
  table.header = {"n",   "f",          "v_s",      "p_round",
                  "throughput_tps", "latency_s", "divergent"};
  for (const std::uint32_t n : spec.n_list) {
    for (const std::uint32_t f : spec.f_list) {
      if (static_cast<std::uint64_t>(n) < 3ull * f + 1ull) continue;
      for (const double v : spec.v_grid) {
        const double pr = p_round(v, n, f, spec.interval_model);
        const double tps = throughput(v, n, f, spec.interval_model);
        const bool divergent = pr <= 0.0;
        const double lat =
            divergent ? std::numeric_limits<double>::infinity()
                      : spec.interval_model.round_duration(v, n) / pr;
        table.rows.push_back({static_cast<std::int64_t>(n),
                              static_cast<std::int64_t>(f), v, pr, tps, lat,
                              static_cast<std::int64_t>(divergent ? 1 : 0)});
      }
    }
  }
  return table;
}

SweepTable run_interval_summary(const SweepSpec& spec) {
  if (spec.v_grid.empty()) throw std::invalid_argument("v grid is empty");
  SweepTable table;
  table.metadata = base_metadata("interval_summary");
  table.metadata.push_back("block_txns=" +
                           std::to_string(spec.interval_model.block_txns));
  table.metadata.push_back("f_list=" + join_u32(spec.f_list));
  table.metadata.push_back("n_list=" + join_u32(spec.n_list));
  table.metadata.push_back("tau=" + fmt(spec.interval_model.tau_s));
  table.header = {"n", "f", "v_star_s", "tps_star", "latency_at_v_star_s"};
  for (const std::uint32_t n : spec.n_list) {
    for (const std::uint32_t f : spec.f_list) {
      if (static_cast<std::uint64_t>(n) < 3ull * f + 1ull) continue;
      const OptimalInterval best =
          optimal_interval(n, f, spec.interval_model, spec.v_grid);
      const double pr = p_round(best.v_star_s, n, f, spec.interval_model);
      const double lat =
          pr > 0.0 ? spec.interval_model.round_duration(best.v_star_s, n) / pr
                   : std::numeric_limits<double>::infinity();
      table.rows.push_back({static_cast<std::int64_t>(n),
                            static_cast<std::int64_t>(f), best.v_star_s,
                            best.tps_star, lat});
    }
  }
  return table;
}

SweepTable round_trace_table(const RoundResult& result) {
  SweepTable table;
  table.metadata = base_metadata("round");
  table.metadata.push_back("confirming_nodes=" +
                           std::to_string(result.confirming_nodes));
  table.metadata.push_back("rx_events=" + std::to_string(result.rx_events));
  table.metadata.push_back("slots_elapsed=" +
                           std::to_string(result.slots_elapsed));
  table.metadata.push_back("spectrum_slots=" +
                           std::to_string(result.spectrum_slots));
  table.metadata.push_back(std::string("success=") +
                           (result.success ? "1" : "0"));
  table.metadata.push_back("tx_events=" + std::to_string(result.tx_events));
  table.header = {"slot", "stage", "sender", "recipients"};
  for (const StageEvent& ev : result.stage_trace) {
    std::string recipients;
    for (std::size_t i = 0; i < ev.recipients.size(); ++i) {
      if (i) recipients += ';';
      recipients += std::to_string(ev.recipients[i]);
    }
    table.rows.push_back({static_cast<std::int64_t>(ev.slot),
                          stage_name(ev.stage),
                          static_cast<std::int64_t>(ev.sender), recipients});
  }
  return table;
}

}  // namespace wbnsim
