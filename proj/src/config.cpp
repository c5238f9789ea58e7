#include "wbnsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <limits>

namespace wbnsim {

namespace {

struct KeyDefault {
  const char* key;
  const char* value;
};

// Every configurable knob, with its baseline default. Experiment presets
// overlay a few of these; files and --set overrides overlay further.
constexpr KeyDefault kRegistry[] = {
    {"adaptive_f", "0"},
    {"block_txns", "1"},
    {"byzantine_behavior", "silentdrop"},
    {"byzantine_count", "0"},
    {"crashed_count", "0"},
    {"f", "1"},
    {"f_list", "1,2,3"},
    {"interval_s", "1"},
    {"jammer_active", "0"},
    {"jammer_power_dbm", "20"},
    {"jammer_x", "40"},
    {"jammer_y", "0"},
    {"lambda_max", "0.1"},
    {"lambda_min", "0.0001"},
    {"lambda_points", "25"},
    {"max_slots_timeout", "0"},
    {"mechanism", "pbft"},
    {"mechanisms", "pbft,raft,pow"},
    {"n", "10"},
    {"n_list", "10,15"},
    {"n_max", "100"},
    {"n_min", "2"},
    {"noise_floor_dbm", "-inf"},
    {"pathloss_exponent", "2.5"},
    {"poisson", "0"},
    {"r_max", "1000"},
    {"radius", "100"},
    {"reference_loss_db", "0"},
    {"rx_sensitivity_dbm", "-inf"},
    {"seed", "1"},
    {"sir_list_db", "-12,-10,-8,-6,-4"},
    {"sir_threshold_db", "-inf"},
    {"tau", "1"},
    {"trials", "100"},
    {"tx_power_dbm", "20"},
    {"v_max_factor", "100"},
    {"v_min_factor", "0.01"},
    {"v_points", "81"},
};

bool known_key(const std::string& key) {
  for (const auto& kd : kRegistry) {
    if (key == kd.key) return true;
  }
  return false;
}

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (!v.empty()) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != nullptr && *end == '\0') return x;
  }
  throw ConfigError("invalid number '" + value + "' for key '" + key + "'");
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (!v.empty() && v.find('-') == std::string::npos) {
    char* end = nullptr;
    errno = 0;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (errno == 0 && end != nullptr && *end == '\0') return x;
  }
  throw ConfigError("invalid count '" + value + "' for key '" + key + "'");
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(trim(value));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("invalid boolean '" + value + "' for key '" + key + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string cur;
  for (const char c : value) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  for (const auto& p : split_list(value)) out.push_back(parse_double(key, p));
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& key,
                                          const std::string& value) {
  std::vector<std::uint32_t> out;
  for (const auto& p : split_list(value)) {
    out.push_back(static_cast<std::uint32_t>(parse_u64(key, p)));
  }
  if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
  return out;
}

Mechanism parse_mechanism(const std::string& value) {
  const std::string v = lower(trim(value));
  if (v == "pbft") return Mechanism::PBFT;
  if (v == "raft") return Mechanism::Raft;
  if (v == "pow") return Mechanism::PoW;
  throw ConfigError("unknown mechanism '" + value + "'");
}

std::vector<Mechanism> parse_mechanism_list(const std::string& value) {
  std::vector<Mechanism> out;
  for (const auto& p : split_list(value)) out.push_back(parse_mechanism(p));
  return out;
}

ByzantineBehavior parse_behavior(const std::string& value) {
  const std::string v = lower(trim(value));
  if (v == "silentdrop" || v == "silent_drop") {
    return ByzantineBehavior::SilentDrop;
  }
  if (v == "conflictingvote" || v == "conflicting_vote") {
    return ByzantineBehavior::ConflictingVote;
  }
  throw ConfigError("unknown byzantine behavior '" + value + "'");
}

struct PresetDef {
  const char* name;
  const char* experiment;
  std::initializer_list<KeyDefault> overrides;
};

const PresetDef kPresets[] = {
    {"fig2", "complexity", {}},
    {"fig3",
     "viability",
     {{"adaptive_f", "1"},
      {"f_list", "100,1000"},
      {"pathloss_exponent", "4"},
      {"rx_sensitivity_dbm", "-84.5"}}},
    {"fig4", "jam", {{"jammer_active", "1"}, {"n", "300"}}},
    {"fig5", "interval", {}},
};

const PresetDef* find_preset(const std::string& name) {
  for (const auto& p : kPresets) {
    if (name == p.name) return &p;
  }
  return nullptr;
}

}  // namespace

const std::string& RunConfig::get(const std::string& key) const {
  const auto it = values.find(key);
  if (it == values.end()) throw ConfigError("unknown key '" + key + "'");
  return it->second;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  return parse_u64(key, get(key));
}

double RunConfig::get_double(const std::string& key) const {
  return parse_double(key, get(key));
}

bool RunConfig::get_bool(const std::string& key) const {
  return parse_bool(key, get(key));
}

RunConfig default_config(const std::string& experiment) {
  RunConfig cfg;
  cfg.experiment = experiment;
  for (const auto& kd : kRegistry) cfg.values[kd.key] = kd.value;
  for (const auto& p : kPresets) {
    if (experiment == p.experiment) {
      for (const auto& kd : p.overrides) cfg.values[kd.key] = kd.value;
      return cfg;
    }
  }
  if (experiment != "round") {
    throw ConfigError("unknown experiment '" + experiment + "'");
  }
  return cfg;
}

std::string preset_experiment(const std::string& preset) {
  if (const PresetDef* p = find_preset(preset)) return p->experiment;
  throw ConfigError("unknown preset '" + preset + "'");
}

void apply_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("expected key=value, got '" + stripped + "'");
    }
    apply_override(cfg, trim(stripped.substr(0, eq)),
                   trim(stripped.substr(eq + 1)));
  }
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  if (!known_key(key)) throw ConfigError("unknown key '" + key + "'");
  cfg.values[key] = value;
}

void validate(const RunConfig& cfg) {
  const auto require = [](bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
  };

  require(cfg.get_double("pathloss_exponent") > 0.0,
          "pathloss_exponent must be > 0");
  require(cfg.get_double("radius") > 0.0, "radius must be > 0");
  require(cfg.get_double("r_max") > 0.0, "r_max must be > 0");
  require(cfg.get_double("tau") > 0.0, "tau must be > 0");
  require(cfg.get_double("interval_s") > 0.0, "interval_s must be > 0");
  require(cfg.get_u64("trials") >= 1, "trials must be >= 1");
  require(cfg.get_u64("n") >= 1, "n must be >= 1");
  require(cfg.get_u64("n_min") >= 1, "n_min must be >= 1");
  require(cfg.get_u64("n_min") <= cfg.get_u64("n_max"),
          "n_min must be <= n_max");
  require(cfg.get_u64("block_txns") >= 1, "block_txns must be >= 1");
  require(cfg.get_u64("lambda_points") >= 1, "lambda_points must be >= 1");
  require(cfg.get_u64("v_points") >= 1, "v_points must be >= 1");
  require(cfg.get_double("lambda_min") > 0.0, "lambda_min must be > 0");
  require(cfg.get_double("lambda_min") <= cfg.get_double("lambda_max"),
          "lambda_min must be <= lambda_max");
  require(cfg.get_double("v_min_factor") > 0.0, "v_min_factor must be > 0");
  require(cfg.get_double("v_min_factor") <= cfg.get_double("v_max_factor"),
          "v_min_factor must be <= v_max_factor");

  parse_mechanism(cfg.get("mechanism"));
  parse_mechanism_list(cfg.get("mechanisms"));
  parse_behavior(cfg.get("byzantine_behavior"));
  parse_u32_list("f_list", cfg.get("f_list"));
  parse_u32_list("n_list", cfg.get("n_list"));
  for (const char* key :
       {"reference_loss_db", "rx_sensitivity_dbm", "noise_floor_dbm",
        "tx_power_dbm", "jammer_power_dbm", "jammer_x", "jammer_y",
        "sir_threshold_db"}) {
    parse_double(key, cfg.get(key));
  }
  cfg.get_bool("jammer_active");
  cfg.get_bool("adaptive_f");
  cfg.get_bool("poisson");
  cfg.get_u64("seed");
  cfg.get_u64("max_slots_timeout");
  cfg.get_u64("byzantine_count");
  cfg.get_u64("crashed_count");

  for (const double sir : parse_double_list("sir_list_db",
                                            cfg.get("sir_list_db"))) {
    require(std::isfinite(sir), "sir thresholds must be finite");
  }
  if (cfg.experiment == "round" && cfg.get_bool("jammer_active")) {
    require(std::isfinite(cfg.get_double("sir_threshold_db")),
            "sir_threshold_db must be finite when the jammer is active");
  }
  if (cfg.experiment == "round") {
    const std::uint64_t marked =
        cfg.get_u64("byzantine_count") + cfg.get_u64("crashed_count");
    require(marked < cfg.get_u64("n"),
            "byzantine_count + crashed_count must leave the leader honest");
  }
}

namespace {

ChannelParams channel_from(const RunConfig& cfg) {
  ChannelParams ch;
  ch.pathloss_exponent = cfg.get_double("pathloss_exponent");
  ch.reference_loss_db = cfg.get_double("reference_loss_db");
  ch.rx_sensitivity_dbm = cfg.get_double("rx_sensitivity_dbm");
  ch.sir_threshold_db = cfg.get_double("sir_threshold_db");
  ch.noise_floor_dbm = cfg.get_double("noise_floor_dbm");
  return ch;
}

Jammer jammer_from(const RunConfig& cfg) {
  Jammer jam;
  jam.position = {cfg.get_double("jammer_x"), cfg.get_double("jammer_y")};
  jam.tx_power_dbm = cfg.get_double("jammer_power_dbm");
  jam.active = cfg.get_bool("jammer_active");
  return jam;
}

}  // namespace

SweepSpec to_sweep_spec(const RunConfig& cfg) {
  validate(cfg);
  SweepSpec spec;
  spec.base_seed = cfg.get_u64("seed");
  spec.trials = static_cast<std::uint32_t>(cfg.get_u64("trials"));
  spec.channel = channel_from(cfg);
  spec.jammer = jammer_from(cfg);
  spec.tx_power_dbm = cfg.get_double("tx_power_dbm");
  spec.mechanisms = parse_mechanism_list(cfg.get("mechanisms"));
  spec.n_min = static_cast<std::uint32_t>(cfg.get_u64("n_min"));
  spec.n_max = static_cast<std::uint32_t>(cfg.get_u64("n_max"));
  spec.f_list = parse_u32_list("f_list", cfg.get("f_list"));
  spec.adaptive_f = cfg.get_bool("adaptive_f");
  spec.lambda_grid = log_grid(
      cfg.get_double("lambda_min"), cfg.get_double("lambda_max"),
      static_cast<std::uint32_t>(cfg.get_u64("lambda_points")));
  spec.r_max_m = cfg.get_double("r_max");
  spec.n_nodes = static_cast<std::uint32_t>(cfg.get_u64("n"));
  spec.radius_m = cfg.get_double("radius");
  spec.sir_list_db = parse_double_list("sir_list_db", cfg.get("sir_list_db"));
  spec.poisson_placement = cfg.get_bool("poisson");
  spec.n_list = parse_u32_list("n_list", cfg.get("n_list"));
  spec.interval_model.tau_s = cfg.get_double("tau");
  spec.interval_model.block_txns =
      static_cast<std::uint32_t>(cfg.get_u64("block_txns"));
  spec.v_grid = log_grid(
      spec.interval_model.tau_s * cfg.get_double("v_min_factor"),
      spec.interval_model.tau_s * cfg.get_double("v_max_factor"),
      static_cast<std::uint32_t>(cfg.get_u64("v_points")));
  return spec;
}

RoundSetup to_round_setup(const RunConfig& cfg) {
  validate(cfg);
  RoundSetup setup;
  setup.seed = cfg.get_u64("seed");
  setup.dep = place_nodes(static_cast<std::uint32_t>(cfg.get_u64("n")),
                          cfg.get_double("radius"), setup.seed,
                          cfg.get_double("tx_power_dbm"));
  const std::size_t n = setup.dep.nodes.size();
  const auto byz = static_cast<std::size_t>(cfg.get_u64("byzantine_count"));
  const auto crashed = static_cast<std::size_t>(cfg.get_u64("crashed_count"));
  for (std::size_t i = 0; i < byz; ++i) {
    setup.dep.nodes[n - 1 - i].fault = Fault::Byzantine;
  }
  for (std::size_t i = 0; i < crashed; ++i) {
    setup.dep.nodes[n - 1 - byz - i].fault = Fault::Crashed;
  }
  setup.cfg.mechanism = parse_mechanism(cfg.get("mechanism"));
  setup.cfg.fault_budget = static_cast<std::uint32_t>(cfg.get_u64("f"));
  setup.cfg.interval_s = cfg.get_double("interval_s");
  setup.cfg.max_slots_timeout =
      static_cast<std::uint32_t>(cfg.get_u64("max_slots_timeout"));
  setup.cfg.byzantine_behavior = parse_behavior(cfg.get("byzantine_behavior"));
  setup.ch = channel_from(cfg);
  if (cfg.get_bool("jammer_active")) setup.jam = jammer_from(cfg);
  return setup;
}

std::vector<std::string> config_echo(const RunConfig& cfg) {
  std::vector<std::string> out;
  out.push_back("experiment=" + cfg.experiment);
  for (const auto& [key, value] : cfg.values) {
    out.push_back(key + "=" + value);
  }
  return out;
}

}  // namespace wbnsim
