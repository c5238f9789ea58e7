#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbnsim/consensus.hpp"
#include "wbnsim/experiments.hpp"
#include "wbnsim/radio.hpp"

namespace wbnsim {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat, fully-resolved run configuration: every registered key always has a
// value (defaults, then the experiment's preset, then file, then explicit
// overrides). Keys outside the registry are rejected by name.
struct RunConfig {
  std::string experiment;  // complexity | viability | jam | interval | round
  std::map<std::string, std::string> values;

  const std::string& get(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
};

// Registry defaults overlaid with the experiment's preset
// (complexity=fig2, viability=fig3, jam=fig4, interval=fig5; round has none).
RunConfig default_config(const std::string& experiment);

// The experiment a preset name belongs to; throws ConfigError for an unknown
// preset name.
std::string preset_experiment(const std::string& preset);

// key=value lines; blank lines and '#' comments ignored.
void apply_file(RunConfig& cfg, const std::filesystem::path& path);

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);

// Type/range checks over every key; throws ConfigError with the offending
// key named.
void validate(const RunConfig& cfg);

SweepSpec to_sweep_spec(const RunConfig& cfg);

// Deployment and engine inputs for a single-round probe. The top
// byzantine_count ids are marked byzantine and the crashed_count below them
// crashed; the leader always stays honest.
struct RoundSetup {
  Deployment dep;
  ConsensusConfig cfg;
  ChannelParams ch;
  std::optional<Jammer> jam;
  std::uint64_t seed = 0;
};

RoundSetup to_round_setup(const RunConfig& cfg);

// Sorted key=value lines (experiment first) for output metadata.
std::vector<std::string> config_echo(const RunConfig& cfg);

}  // namespace wbnsim
