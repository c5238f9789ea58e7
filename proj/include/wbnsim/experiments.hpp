#pragma once

#include <cstdint>
#include <vector>

#include "wbnsim/analytics.hpp"
#include "wbnsim/consensus.hpp"
#include "wbnsim/csv.hpp"
#include "wbnsim/radio.hpp"

namespace wbnsim {

// Geometric grid from lo to hi inclusive; points >= 1, lo > 0, hi >= lo.
std::vector<double> log_grid(double lo, double hi, std::uint32_t points);

// Worker count for trial-parallel sweeps: an explicit request wins, else the
// WBNSIM_THREADS environment variable caps hardware concurrency. Results
// never depend on the resolved count — each trial derives its seed from
// base_seed + trial index and writes its own preallocated row.
std::uint32_t resolve_threads(std::uint32_t requested, std::size_t units);

struct SweepSpec {
  // shared
  std::uint64_t base_seed = 1;
  std::uint32_t trials = 100;
  std::uint32_t threads = 0;  // 0 = resolve from the environment
  ChannelParams channel{};
  Jammer jammer{};
  double tx_power_dbm = 20.0;

  // complexity sweep
  std::vector<Mechanism> mechanisms{Mechanism::PBFT, Mechanism::Raft,
                                    Mechanism::PoW};
  std::uint32_t n_min = 2;
  std::uint32_t n_max = 100;

  // viability sweep
  std::vector<std::uint32_t> f_list{1, 2, 3};
  bool adaptive_f = false;  // adds f = floor((lambda*pi*r_max^2 - 1)/3) rows
  std::vector<double> lambda_grid{};
  double r_max_m = 1000.0;

  // jamming experiment
  std::uint32_t n_nodes = 300;
  double radius_m = 100.0;
  std::vector<double> sir_list_db{-12.0, -10.0, -8.0, -6.0, -4.0};
  bool poisson_placement = false;

  // interval sweep
  std::vector<std::uint32_t> n_list{10, 15};
  std::vector<double> v_grid{};
  IntervalModel interval_model{};
};

// Closed-form complexity/spectrum rows for every mechanism and
// n in [n_min, n_max].
SweepTable run_complexity_sweep(const SweepSpec& spec);

// Minimum-power rows over lambda_grid for each f in f_list, then (when
// adaptive_f) for the density-matched fault budget. Infeasible points are
// kept with feasible=0.
SweepTable run_viability_sweep(const SweepSpec& spec);

// Monte Carlo leader-based rounds under a jammer: one row per
// (sir threshold, trial). Placement depends only on base_seed + trial, so a
// trial sees the same geometry at every threshold. Trials run in parallel;
// output is independent of the thread count.
SweepTable run_jamming_experiment(const SweepSpec& spec);

// Per-node link diagnosis for one placement at one SIR threshold.
SweepTable run_jamming_map(const SweepSpec& spec, double sir_db,
                           std::uint64_t seed);

// Analytic slot-duration rows for each (n, f, v); combinations with
// n < 3f+1 are skipped. Divergent-latency rows are kept, flagged, with
// latency serialized as inf.
SweepTable run_interval_sweep(const SweepSpec& spec);

// Grid-optimal interval and peak throughput per (n, f).
SweepTable run_interval_summary(const SweepSpec& spec);

// One consensus round serialized stage by stage.
SweepTable round_trace_table(const RoundResult& result);

}  // namespace wbnsim
