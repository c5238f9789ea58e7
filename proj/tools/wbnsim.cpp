#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wbnsim/config.hpp"
#include "wbnsim/consensus.hpp"
#include "wbnsim/csv.hpp"
#include "wbnsim/experiments.hpp"
#include "wbnsim/version.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string preset;
  std::string out_path;
  std::string seed;
  std::string trials;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommonArgs* args) {
  sub->add_option("--config", args->config_path,
                  "key=value config file applied over the defaults");
  sub->add_option("--preset", args->preset,
                  "named parameter set (fig2|fig3|fig4|fig5); must match "
                  "the subcommand");
  sub->add_option("--out", args->out_path, "output CSV path");
  sub->add_option("--seed", args->seed, "base seed for trial randomness");
  sub->add_option("--trials", args->trials, "Monte Carlo trials");
  sub->add_option("--set", args->sets,
                  "key=value override, highest precedence; repeatable");
}

wbnsim::RunConfig resolve(const std::string& experiment,
                          const CommonArgs& args) {
  wbnsim::RunConfig cfg = wbnsim::default_config(experiment);
  if (!args.preset.empty()) {
    const std::string owner = wbnsim::preset_experiment(args.preset);
    if (owner != experiment) {
      throw wbnsim::ConfigError("preset '" + args.preset +
                                "' belongs to the " + owner + " subcommand");
    }
  }
  if (!args.config_path.empty()) wbnsim::apply_file(cfg, args.config_path);
  if (!args.seed.empty()) wbnsim::apply_override(cfg, "seed", args.seed);
  if (!args.trials.empty()) {
    wbnsim::apply_override(cfg, "trials", args.trials);
  }
  for (const std::string& kv : args.sets) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      throw wbnsim::ConfigError("--set expects key=value, got '" + kv + "'");
    }
    wbnsim::apply_override(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  wbnsim::validate(cfg);
  return cfg;
}

void emit(wbnsim::SweepTable table, const wbnsim::RunConfig& cfg,
          const std::filesystem::path& path) {
  const auto echo = wbnsim::config_echo(cfg);
  table.metadata.insert(table.metadata.end(), echo.begin(), echo.end());
  wbnsim::write_csv(table, path);
  std::printf("wrote %s (%zu rows)\n", path.string().c_str(),
              table.rows.size());
}

std::filesystem::path out_or(const CommonArgs& args,
                             const std::string& fallback) {
  return args.out_path.empty() ? std::filesystem::path(fallback)
                               : std::filesystem::path(args.out_path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wireless consensus-network simulator and analytics"};
  app.set_version_flag("--version", std::string("wbnsim ") + wbnsim::kVersion);
  app.require_subcommand(1);

  CommonArgs args;
  std::string map_path;
  double map_sir = 0.0;
  bool map_sir_set = false;
  std::string summary_path;

  CLI::App* complexity = app.add_subcommand(
      "complexity", "message and spectrum cost of one round vs network size");
  add_common(complexity, &args);

  CLI::App* viability = app.add_subcommand(
      "viability", "minimum transmit power vs node density");
  add_common(viability, &args);

  CLI::App* jam = app.add_subcommand(
      "jam", "leader-based rounds under an interfering transmitter");
  add_common(jam, &args);
  jam->add_option("--map", map_path,
                  "also write a per-node link map for the base seed");
  jam->add_option("--map-sir", map_sir,
                  "SIR threshold for the link map (default: first of "
                  "sir_list_db)")
      ->each([&](const std::string&) { map_sir_set = true; });

  CLI::App* interval = app.add_subcommand(
      "interval", "throughput and latency vs consensus slot duration");
  add_common(interval, &args);
  interval->add_option("--summary-out", summary_path,
                       "peak-throughput summary CSV path (default: derived "
                       "from --out)");

  CLI::App* round = app.add_subcommand(
      "round", "run one consensus round and dump its stage trace");
  add_common(round, &args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (complexity->parsed()) {
      const wbnsim::RunConfig cfg = resolve("complexity", args);
      const wbnsim::SweepSpec spec = wbnsim::to_sweep_spec(cfg);
      emit(wbnsim::run_complexity_sweep(spec), cfg,
           out_or(args, "complexity.csv"));
    } else if (viability->parsed()) {
      const wbnsim::RunConfig cfg = resolve("viability", args);
      const wbnsim::SweepSpec spec = wbnsim::to_sweep_spec(cfg);
      emit(wbnsim::run_viability_sweep(spec), cfg,
           out_or(args, "viability.csv"));
    } else if (jam->parsed()) {
      const wbnsim::RunConfig cfg = resolve("jam", args);
      const wbnsim::SweepSpec spec = wbnsim::to_sweep_spec(cfg);
      emit(wbnsim::run_jamming_experiment(spec), cfg, out_or(args, "jam.csv"));
      if (!map_path.empty()) {
        const double sir = map_sir_set ? map_sir : spec.sir_list_db.front();
        emit(wbnsim::run_jamming_map(spec, sir, spec.base_seed), cfg,
             map_path);
      }
    } else if (interval->parsed()) {
      const wbnsim::RunConfig cfg = resolve("interval", args);
      const wbnsim::SweepSpec spec = wbnsim::to_sweep_spec(cfg);
      const std::filesystem::path out = out_or(args, "interval.csv");
      emit(wbnsim::run_interval_sweep(spec), cfg, out);
      std::filesystem::path summary;
      if (!summary_path.empty()) {
        summary = summary_path;
      } else {
        summary = out;
        summary.replace_filename(out.stem().string() + "_summary" +
                                 out.extension().string());
      }
      emit(wbnsim::run_interval_summary(spec), cfg, summary);
    } else if (round->parsed()) {
      const wbnsim::RunConfig cfg = resolve("round", args);
      wbnsim::RoundSetup setup = wbnsim::to_round_setup(cfg);
      const wbnsim::RoundResult rr = wbnsim::run_round(
          setup.dep, setup.cfg, setup.ch, setup.seed,
          setup.jam ? &*setup.jam : nullptr);
      std::printf(
          "success=%d confirming_nodes=%u tx_events=%llu rx_events=%llu "
          "spectrum_slots=%llu slots_elapsed=%llu\n",
          rr.success ? 1 : 0, rr.confirming_nodes,
          static_cast<unsigned long long>(rr.tx_events),
          static_cast<unsigned long long>(rr.rx_events),
          static_cast<unsigned long long>(rr.spectrum_slots),
          static_cast<unsigned long long>(rr.slots_elapsed));
      emit(wbnsim::round_trace_table(rr), cfg, out_or(args, "round.csv"));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
