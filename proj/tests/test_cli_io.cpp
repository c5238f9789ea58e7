#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "wbnsim/config.hpp"
#include "wbnsim/csv.hpp"
#include "wbnsim/experiments.hpp"

using namespace wbnsim;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path data_dir() { return fs::path(WBNSIM_TEST_DATA_DIR); }

// unique-per-process scratch area so parallel ctest runs never collide
fs::path scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("wbnsim_cli_io_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  REQUIRE(out.good());
  out << text;
}

}  // namespace

TEST_CASE("defaults: registry values and experiment presets") {
  const RunConfig jam = default_config("jam");
  CHECK(jam.experiment == "jam");
  CHECK(jam.get_u64("n") == 300);
  CHECK(jam.get_bool("jammer_active"));
  CHECK(jam.get_double("jammer_x") == 40.0);
  CHECK(jam.get_double("jammer_y") == 0.0);
  CHECK(jam.get_double("jammer_power_dbm") == 20.0);
  CHECK(jam.get_double("tx_power_dbm") == 20.0);
  CHECK(jam.get_double("pathloss_exponent") == 2.5);
  CHECK(jam.get_double("radius") == 100.0);
  CHECK(jam.get_u64("trials") == 100);
  CHECK(jam.get("sir_list_db") == "-12,-10,-8,-6,-4");

  const RunConfig viability = default_config("viability");
  CHECK(viability.get_bool("adaptive_f"));
  CHECK(viability.get("f_list") == "100,1000");
  CHECK(viability.get_double("pathloss_exponent") == 4.0);
  CHECK(viability.get_double("rx_sensitivity_dbm") == -84.5);

  const RunConfig complexity = default_config("complexity");
  CHECK(complexity.get_u64("n_min") == 2);
  CHECK(complexity.get_u64("n_max") == 100);
  CHECK(complexity.get("mechanisms") == "pbft,raft,pow");

  const RunConfig round = default_config("round");
  CHECK(round.get("mechanism") == "pbft");
  CHECK(round.get_u64("n") == 10);
  CHECK_FALSE(round.get_bool("jammer_active"));

  CHECK_THROWS_AS(default_config("bogus"), ConfigError);
  CHECK_THROWS_WITH_AS(default_config("jam").get("no_such"),
                       "unknown key 'no_such'", ConfigError);
}

TEST_CASE("presets: name-to-experiment ownership") {
  CHECK(preset_experiment("fig2") == "complexity");
  CHECK(preset_experiment("fig3") == "viability");
  CHECK(preset_experiment("fig4") == "jam");
  CHECK(preset_experiment("fig5") == "interval");
  CHECK_THROWS_WITH_AS(preset_experiment("fig9"), "unknown preset 'fig9'",
                       ConfigError);
}

TEST_CASE("overrides: files then explicit sets, later layers win") {
  RunConfig cfg = default_config("jam");

  const fs::path empty = scratch_dir() / "empty.cfg";
  write_text(empty, "");
  apply_file(cfg, empty);
  CHECK(cfg.values == default_config("jam").values);

  const fs::path file = scratch_dir() / "jam.cfg";
  write_text(file,
             "# comment line\n"
             "\n"
             "  trials = 7\n"
             "radius=50\n"
             "sir_list_db = -9, -5\n");
  apply_file(cfg, file);
  CHECK(cfg.get_u64("trials") == 7);
  CHECK(cfg.get_double("radius") == 50.0);
  CHECK(cfg.get("sir_list_db") == "-9, -5");

  apply_override(cfg, "trials", "3");
  CHECK(cfg.get_u64("trials") == 3);
  CHECK(cfg.get_double("radius") == 50.0);  // untouched keys survive

  CHECK_THROWS_WITH_AS(apply_override(cfg, "bogus_key", "1"),
                       "unknown key 'bogus_key'", ConfigError);
  CHECK_THROWS_AS(apply_file(cfg, scratch_dir() / "missing.cfg"), ConfigError);

  const fs::path broken = scratch_dir() / "broken.cfg";
  write_text(broken, "just words\n");
  CHECK_THROWS_WITH_AS(apply_file(cfg, broken),
                       "expected key=value, got 'just words'", ConfigError);
}

TEST_CASE("validation: named keys in every rejection") {
  RunConfig cfg = default_config("jam");
  CHECK_NOTHROW(validate(cfg));

  apply_override(cfg, "pathloss_exponent", "0");
  CHECK_THROWS_WITH_AS(validate(cfg), "pathloss_exponent must be > 0",
                       ConfigError);
  apply_override(cfg, "pathloss_exponent", "2.5");

  apply_override(cfg, "trials", "0");
  CHECK_THROWS_WITH_AS(validate(cfg), "trials must be >= 1", ConfigError);
  apply_override(cfg, "trials", "100");

  apply_override(cfg, "sir_list_db", "-10,-inf");
  CHECK_THROWS_WITH_AS(validate(cfg), "sir thresholds must be finite",
                       ConfigError);
  apply_override(cfg, "sir_list_db", "-10");

  apply_override(cfg, "mechanism", "paxos");
  CHECK_THROWS_WITH_AS(validate(cfg), "unknown mechanism 'paxos'",
                       ConfigError);
  apply_override(cfg, "mechanism", "pbft");

  apply_override(cfg, "lambda_min", "0.5");
  CHECK_THROWS_WITH_AS(validate(cfg), "lambda_min must be <= lambda_max",
                       ConfigError);
  apply_override(cfg, "lambda_min", "0.0001");
  CHECK_NOTHROW(validate(cfg));

  RunConfig round = default_config("round");
  apply_override(round, "jammer_active", "1");
  CHECK_THROWS_WITH_AS(validate(round),
                       "sir_threshold_db must be finite when the jammer is "
                       "active",
                       ConfigError);
  apply_override(round, "sir_threshold_db", "-8");
  CHECK_NOTHROW(validate(round));

  apply_override(round, "byzantine_count", "6");
  apply_override(round, "crashed_count", "4");
  CHECK_THROWS_WITH_AS(
      validate(round),
      "byzantine_count + crashed_count must leave the leader honest",
      ConfigError);
}

TEST_CASE("round setup: fault marks from the top ids, leader honest") {
  RunConfig cfg = default_config("round");
  apply_override(cfg, "n", "8");
  apply_override(cfg, "byzantine_count", "2");
  apply_override(cfg, "crashed_count", "1");
  apply_override(cfg, "seed", "9");
  apply_override(cfg, "jammer_active", "1");
  apply_override(cfg, "sir_threshold_db", "-8");
  const RoundSetup setup = to_round_setup(cfg);

  REQUIRE(setup.dep.nodes.size() == 8);
  CHECK(setup.dep.nodes[0].fault == Fault::Honest);
  CHECK(setup.dep.nodes[0].role == Role::Leader);
  CHECK(setup.dep.nodes[7].fault == Fault::Byzantine);
  CHECK(setup.dep.nodes[6].fault == Fault::Byzantine);
  CHECK(setup.dep.nodes[5].fault == Fault::Crashed);
  for (std::size_t i = 1; i < 5; ++i) {
    CHECK(setup.dep.nodes[i].fault == Fault::Honest);
  }
  CHECK(setup.seed == 9);
  // geometry comes from the seeded placement; only the fault marks differ
  const Deployment fresh = place_nodes(8, 100.0, 9, 20.0);
  CHECK(setup.dep.nodes[3].position == fresh.nodes[3].position);
  CHECK(fresh.nodes[7].fault == Fault::Honest);
  REQUIRE(setup.jam.has_value());
  CHECK(setup.jam->position == Vec2{40.0, 0.0});
  CHECK(setup.ch.sir_threshold_db == -8.0);
  CHECK(setup.cfg.mechanism == Mechanism::PBFT);

  apply_override(cfg, "jammer_active", "0");
  CHECK_FALSE(to_round_setup(cfg).jam.has_value());
}

TEST_CASE("sweep spec: grids and lists materialize from the flat config") {
  RunConfig cfg = default_config("interval");
  apply_override(cfg, "tau", "2");
  apply_override(cfg, "v_points", "5");
  apply_override(cfg, "n_list", "4,10");
  apply_override(cfg, "f_list", "1,3");
  const SweepSpec spec = to_sweep_spec(cfg);
  REQUIRE(spec.v_grid.size() == 5);
  CHECK(spec.v_grid.front() == doctest::Approx(2.0 * 0.01));
  CHECK(spec.v_grid.back() == doctest::Approx(2.0 * 100.0));
  CHECK(spec.interval_model.tau_s == 2.0);
  CHECK(spec.n_list == std::vector<std::uint32_t>{4, 10});
  CHECK(spec.f_list == std::vector<std::uint32_t>{1, 3});

  RunConfig jam = default_config("jam");
  const SweepSpec jspec = to_sweep_spec(jam);
  CHECK(jspec.n_nodes == 300);
  CHECK(jspec.jammer.active);
  CHECK(jspec.jammer.position == Vec2{40.0, 0.0});
  CHECK(jspec.sir_list_db ==
        std::vector<double>{-12.0, -10.0, -8.0, -6.0, -4.0});

  RunConfig via = default_config("viability");
  const SweepSpec vspec = to_sweep_spec(via);
  REQUIRE(vspec.lambda_grid.size() == 25);
  CHECK(vspec.lambda_grid.front() == 0.0001);
  CHECK(vspec.lambda_grid.back() == 0.1);
  CHECK(vspec.f_list == std::vector<std::uint32_t>{100, 1000});
  CHECK(vspec.adaptive_f);
}

TEST_CASE("config echo: experiment first, then sorted key=value lines") {
  const RunConfig cfg = default_config("jam");
  const std::vector<std::string> echo = config_echo(cfg);
  REQUIRE(echo.size() == cfg.values.size() + 1);
  CHECK(echo.front() == "experiment=jam");
  CHECK(std::is_sorted(echo.begin() + 1, echo.end()));
  CHECK(std::find(echo.begin(), echo.end(), "n=300") != echo.end());
  CHECK(std::find(echo.begin(), echo.end(), "jammer_x=40") != echo.end());
}

TEST_CASE("csv: library output matches the frozen golden bytes") {
  SweepSpec spec;
  spec.n_min = 2;
  spec.n_max = 10;
  const SweepTable table = run_complexity_sweep(spec);
  const std::string golden = slurp(data_dir() / "complexity_golden.csv");
  CHECK(to_csv_string(table) == golden);

  const fs::path out = scratch_dir() / "complexity.csv";
  write_csv(table, out);
  CHECK(slurp(out) == golden);
  CHECK_FALSE(fs::exists(out.string() + ".tmp"));
}

TEST_CASE("csv: cell formatting covers ints, doubles and quoting") {
  CHECK(format_cell(Cell{std::int64_t{-42}}) == "-42");
  CHECK(format_cell(Cell{0.25}) == "0.25");
  CHECK(format_cell(Cell{1.0}) == "1");
  CHECK(format_cell(Cell{kInf}) == "inf");
  CHECK(format_cell(Cell{-kInf}) == "-inf");
  CHECK(format_cell(Cell{std::string{"plain"}}) == "plain");
  CHECK(format_cell(Cell{std::string{"a,b"}}) == "\"a,b\"");
  CHECK(format_cell(Cell{std::string{"say \"hi\""}}) == "\"say \"\"hi\"\"\"");
  CHECK(format_cell(Cell{std::string{"line\nbreak"}}) == "\"line\nbreak\"");
}

TEST_CASE("csv: header-only tables and full round trips") {
  SweepTable table;
  table.metadata = {"wbnsim 0.1.0", "experiment=demo"};
  table.header = {"alpha", "beta,comma"};
  CHECK(to_csv_string(table) ==
        "# wbnsim 0.1.0\n# experiment=demo\nalpha,\"beta,comma\"\n");

  table.rows.push_back({std::int64_t{7}, std::string{"x,y"}});
  table.rows.push_back({std::int64_t{-3}, std::string{"with \"quotes\""}});
  table.rows.push_back({0.1, std::string{"plain"}});
  table.rows.push_back({-kInf, std::string{"-"}});
  table.rows.push_back({std::int64_t{9007199254740993}, std::string{"end"}});

  const fs::path out = scratch_dir() / "roundtrip.csv";
  write_csv(table, out);
  const SweepTable back = read_csv(out);
  CHECK(back.metadata == table.metadata);
  CHECK(back.header == table.header);
  REQUIRE(back.rows.size() == table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    CHECK(back.rows[i] == table.rows[i]);
  }
}

TEST_CASE("csv: nine significant digits survive a write-read cycle") {
  SweepTable table;
  table.header = {"v"};
  const std::vector<double> values{0.1,    1.0 / 3.0, 1234.56789,
                                   2.5e-7, -84.5,     9.81e20};
  for (const double v : values) table.rows.push_back({v});
  const fs::path out = scratch_dir() / "digits.csv";
  write_csv(table, out);
  const SweepTable back = read_csv(out);
  REQUIRE(back.rows.size() == values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double got = std::get<double>(back.rows[i][0]);
    CHECK(got == doctest::Approx(values[i]).epsilon(1e-8));
  }
}

TEST_CASE("csv: failed writes leave no partial file behind") {
  SweepTable table;
  table.header = {"a"};
  table.rows.push_back({std::int64_t{1}});
  const fs::path bad = scratch_dir() / "no_such_dir" / "out.csv";
  CHECK_THROWS_AS(write_csv(table, bad), IoError);
  CHECK_FALSE(fs::exists(bad));
  CHECK_FALSE(fs::exists(bad.string() + ".tmp"));
  CHECK_THROWS_AS(read_csv(scratch_dir() / "missing.csv"), IoError);
}
