#include "wbnsim/analytics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "wbnsim/experiments.hpp"
#include "wbnsim/rng.hpp"

using namespace wbnsim;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ChannelParams viability_channel() {
  ChannelParams ch;
  ch.pathloss_exponent = 4.0;
  ch.reference_loss_db = 0.0;
  ch.rx_sensitivity_dbm = -84.5;
  return ch;
}

}  // namespace

TEST_CASE("closed forms: spot values and N=1 hand arithmetic") {
  CHECK(comm_complexity(Mechanism::PBFT, 10) == 210);
  CHECK(comm_complexity(Mechanism::PBFT, 100) == 20100);
  CHECK(comm_complexity(Mechanism::Raft, 10) == 20);
  CHECK(comm_complexity(Mechanism::PoW, 10) == 20);
  CHECK(spectrum_requirement(Mechanism::PBFT, 10) == 21);
  CHECK(spectrum_requirement(Mechanism::PBFT, 100) == 201);
  CHECK(spectrum_requirement(Mechanism::Raft, 10) == 11);
  CHECK(spectrum_requirement(Mechanism::PoW, 1) == 2);
  CHECK(spectrum_requirement(Mechanism::PoW, 1000000) == 2);

  CHECK(comm_complexity(Mechanism::PBFT, 1) == 3);
  CHECK(comm_complexity(Mechanism::Raft, 1) == 2);
  CHECK(comm_complexity(Mechanism::PoW, 1) == 2);
  CHECK(spectrum_requirement(Mechanism::PBFT, 1) == 3);
  CHECK(spectrum_requirement(Mechanism::Raft, 1) == 2);

  // top of the supported range stays exact in 64-bit arithmetic
  CHECK(comm_complexity(Mechanism::PBFT, 1000000) == 2000001000000ull);
  CHECK(comm_complexity(Mechanism::Raft, 1000000) == 2000000ull);
  CHECK(spectrum_requirement(Mechanism::PBFT, 1000000) == 2000001ull);

  CHECK_THROWS_AS(comm_complexity(Mechanism::PBFT, 0), std::invalid_argument);
  CHECK_THROWS_AS(spectrum_requirement(Mechanism::Raft, 0),
                  std::invalid_argument);
}

TEST_CASE("viability: vanishing log term at one-meter radius") {
  // lambda chosen so r* = sqrt(1 / (pi * lambda)) = 1 m at f = 0
  const double lambda = 1.0 / std::numbers::pi;
  const ViabilityResult v = min_viable_power(0, lambda, viability_channel());
  CHECK(v.r_star_m == doctest::Approx(1.0));
  CHECK(v.p1_star_dbm == doctest::Approx(-84.5));
}

TEST_CASE("viability: reference point f=100 lambda=0.1") {
  const ViabilityResult v = min_viable_power(100, 0.1, viability_channel());
  CHECK(v.r_star_m == doctest::Approx(30.953).epsilon(1e-3));
  CHECK(v.p1_star_dbm == doctest::Approx(-24.9).epsilon(1e-2));
  // the diameter figure costs exactly 10*gamma*log10(2) more decibels
  CHECK(v.p2_star_dbm - v.p1_star_dbm ==
        doctest::Approx(40.0 * std::log10(2.0)));
}

TEST_CASE("viability: monte carlo population check at r_star") {
  // mean node count of a density-lambda Poisson deployment over a disk of
  // radius r_star must recover the 3f+1 quorum population within 2%
  const std::uint32_t f = 100;
  const double lambda = 0.1;
  const ViabilityResult v = min_viable_power(f, lambda, viability_channel());
  double total = 0.0;
  const int seeds = 1000;
  for (int s = 0; s < seeds; ++s) {
    total += static_cast<double>(
        place_nodes_density(lambda, v.r_star_m, 7000 + s, true).nodes.size());
  }
  const double mean = total / seeds;
  const double target = 3.0 * f + 1.0;
  CHECK(std::abs(mean - target) / target < 0.02);
}

TEST_CASE("viability: monotone in density and fault budget") {
  const ChannelParams ch = viability_channel();
  const std::vector<double> grid = log_grid(1e-4, 1e-1, 25);
  for (const std::uint32_t f : {100u, 1000u}) {
    double last = kInf;
    for (const double lambda : grid) {
      const double p1 = min_viable_power(f, lambda, ch).p1_star_dbm;
      CHECK(p1 <= last);
      last = p1;
    }
  }
  for (const double lambda : grid) {
    CHECK(min_viable_power(1000, lambda, ch).p1_star_dbm >=
          min_viable_power(100, lambda, ch).p1_star_dbm);
  }
}

TEST_CASE("viability: r_star scale invariance and the feasibility gate") {
  const ChannelParams ch = viability_channel();
  const std::vector<double> grid = log_grid(1e-4, 1e-1, 25);
  const double reference =
      min_viable_power(100, grid.front(), ch).r_star_m *
      std::sqrt(grid.front());
  for (const double lambda : grid) {
    const double scaled =
        min_viable_power(100, lambda, ch).r_star_m * std::sqrt(lambda);
    CHECK(std::abs(scaled - reference) <= 1e-9 * reference);
  }

  CHECK_THROWS_AS(min_viable_power(1000, 1e-4, ch, 1000.0), InfeasibleError);
  CHECK_NOTHROW(min_viable_power(100, 1e-3, ch, 1000.0));
  CHECK_THROWS_AS(min_viable_power(0, 0.0, ch), std::invalid_argument);
}

TEST_CASE("binomial tail: hand values and monotonicity") {
  CHECK(binomial_tail_ge(5, 0, 0.3) == 1.0);
  CHECK(binomial_tail_ge(5, 6, 0.9) == 0.0);
  CHECK(binomial_tail_ge(5, 2, 0.5) == doctest::Approx(0.8125).epsilon(1e-12));
  CHECK(binomial_tail_ge(3, 3, 0.5) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK(binomial_tail_ge(10, 1, 0.0) == 0.0);
  CHECK(binomial_tail_ge(10, 10, 1.0) == 1.0);
  double last = 0.0;
  for (double p = 0.0; p <= 1.0001; p += 0.05) {
    const double tail = binomial_tail_ge(20, 8, std::min(p, 1.0));
    CHECK(tail >= last - 1e-15);
    last = tail;
  }
}

TEST_CASE("interval model: per-link success curve") {
  const IntervalModel m{1.0, 1};
  CHECK(m.per_link_success(0.0) == 0.0);
  CHECK(m.per_link_success(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(m.per_link_success(100.0) == 1.0);  // saturates in double precision
  double last = 0.0;
  for (double v = 0.01; v < 10.0; v *= 1.5) {
    const double p = m.per_link_success(v);
    CHECK(p > last);
    CHECK(p < 1.0 + 1e-15);
    last = p;
  }
  CHECK(m.round_duration(2.0, 10) == doctest::Approx(42.0));
}

TEST_CASE("p_round: limits, monotonicity and argument checking") {
  const IntervalModel m{1.0, 1};
  CHECK(p_round(0.0, 10, 1, m) == 0.0);
  CHECK(p_round(100.0, 10, 1, m) == doctest::Approx(1.0));
  double last = -1.0;
  for (double v = 0.01; v <= 100.0; v *= 2.0) {
    const double pr = p_round(v, 10, 2, m);
    CHECK(pr >= last);
    last = pr;
  }
  // stricter fault budgets cannot raise the round probability
  for (double v : {0.3, 1.0, 3.0}) {
    CHECK(p_round(v, 10, 1, m) >= p_round(v, 10, 2, m));
    CHECK(p_round(v, 10, 2, m) >= p_round(v, 10, 3, m));
  }
  CHECK_THROWS_AS(p_round(1.0, 3, 1, m), std::invalid_argument);
  CHECK_THROWS_AS(p_round(-1.0, 10, 1, m), std::invalid_argument);
}

TEST_CASE("p_round: matches a per-link bernoulli monte carlo within 3 sigma") {
  const IntervalModel model{1.0, 1};
  struct Case {
    std::uint32_t n;
    std::uint32_t f;
    double v;
  };
  for (const Case c : {Case{4, 1, 2.0}, Case{10, 3, 2.0}, Case{4, 1, 1.0},
                       Case{10, 3, 3.0}}) {
    const double analytic = p_round(c.v, c.n, c.f, model);
    const double p = model.per_link_success(c.v);
    Rng rng(987654321 + c.n * 1000 + c.f);
    const int trials = 10000;
    int hits = 0;
    for (int t = 0; t < trials; ++t) {
      std::uint32_t confirming = 0;
      for (std::uint32_t node = 0; node < c.n; ++node) {
        // critical reception, then a prepare and a commit quorum of 2f,
        // every message delivery an independent bernoulli link
        bool ok = rng.uniform01() < p;
        for (int stage = 0; stage < 2; ++stage) {
          std::uint32_t got = 0;
          for (std::uint32_t peer = 0; peer + 1 < c.n; ++peer) {
            if (rng.uniform01() < p) ++got;
          }
          if (got < 2 * c.f) ok = false;
        }
        if (ok) ++confirming;
      }
      if (confirming >= 2 * c.f + 1) ++hits;
    }
    const double mc = static_cast<double>(hits) / trials;
    const double sigma =
        std::sqrt(std::max(analytic * (1.0 - analytic), 1e-12) / trials);
    CHECK(std::abs(mc - analytic) <= 3.0 * sigma + 1e-9);
  }
}

TEST_CASE("throughput: vanishes at both interval extremes") {
  const IntervalModel m{1.0, 1};
  CHECK(throughput(1e-6, 10, 1, m) < 1e-30);
  CHECK(throughput(1e9, 10, 1, m) < 1e-9);
  CHECK_THROWS_AS(throughput(0.0, 10, 1, m), std::invalid_argument);
}

TEST_CASE("throughput: interior optimum for n=10 f=1") {
  const IntervalModel m{1.0, 1};
  const std::vector<double> grid = log_grid(0.01, 100.0, 201);
  const OptimalInterval best = optimal_interval(10, 1, m, grid);
  CHECK(best.v_star_s > grid.front());
  CHECK(best.v_star_s < grid.back());
  CHECK(best.tps_star > throughput(best.v_star_s / 2.0, 10, 1, m));
  CHECK(best.tps_star > throughput(best.v_star_s * 2.0, 10, 1, m));
}

TEST_CASE("optimal interval: orderings across fault budgets") {
  const IntervalModel m{1.0, 1};
  const std::vector<double> grid = log_grid(0.01, 100.0, 81);
  const OptimalInterval f1 = optimal_interval(10, 1, m, grid);
  const OptimalInterval f2 = optimal_interval(10, 2, m, grid);
  const OptimalInterval f3 = optimal_interval(10, 3, m, grid);
  CHECK(f1.v_star_s <= f2.v_star_s);
  CHECK(f2.v_star_s <= f3.v_star_s);
  CHECK(f1.tps_star >= f2.tps_star);
  CHECK(f2.tps_star >= f3.tps_star);
}

TEST_CASE("optimal interval: tie-break and degenerate grids") {
  // an infinite link timescale never delivers: constant zero throughput,
  // so the tie-break picks the smallest grid point
  const IntervalModel degenerate{kInf, 1};
  const std::vector<double> grid{1.0, 2.0, 3.0};
  const OptimalInterval flat = optimal_interval(10, 1, degenerate, grid);
  CHECK(flat.v_star_s == 1.0);
  CHECK(flat.tps_star == 0.0);

  const IntervalModel m{1.0, 1};
  const std::vector<double> single{2.5};
  CHECK(optimal_interval(10, 1, m, single).v_star_s == 2.5);

  const std::vector<double> empty;
  CHECK_THROWS_AS(optimal_interval(10, 1, m, empty), std::invalid_argument);
  const std::vector<double> unsorted{1.0, 1.0, 2.0};
  CHECK_THROWS_AS(optimal_interval(10, 1, m, unsorted),
                  std::invalid_argument);
}

TEST_CASE("latency: ratio identity, saturation and divergence") {
  const IntervalModel m{1.0, 1};
  // saturated channel: a success every round, latency equals the duration
  CHECK(p_round(100.0, 10, 1, m) == 1.0);
  CHECK(latency(100.0, 10, 1, m) == m.round_duration(100.0, 10));

  // exact identity latency * P_round = duration wherever defined
  for (const double v : {0.2, 0.5, 1.0, 3.0}) {
    const double pr = p_round(v, 10, 2, m);
    CHECK(latency(v, 10, 2, m) * pr ==
          doctest::Approx(m.round_duration(v, 10)).epsilon(1e-12));
  }

  // bisect to the half-success interval: latency there is twice the duration
  double lo = 0.1;
  double hi = 10.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (p_round(mid, 10, 2, m) < 0.5 ? lo : hi) = mid;
  }
  const double v_half = 0.5 * (lo + hi);
  CHECK(latency(v_half, 10, 2, m) ==
        doctest::Approx(2.0 * m.round_duration(v_half, 10)).epsilon(1e-6));

  CHECK_THROWS_AS(latency(1e-9, 10, 3, m), DivergentLatencyError);
  CHECK_THROWS_AS(latency(0.0, 10, 1, m), std::invalid_argument);
}

TEST_CASE("latency at the optimum grows with the fault budget (n=15)") {
  const IntervalModel m{1.0, 1};
  const std::vector<double> grid = log_grid(0.01, 100.0, 81);
  double last = 0.0;
  for (const std::uint32_t f : {1u, 2u, 3u}) {
    const OptimalInterval best = optimal_interval(15, f, m, grid);
    const double lat = latency(best.v_star_s, 15, f, m);
    CHECK(lat > last);
    last = lat;
  }
}
