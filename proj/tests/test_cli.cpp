#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "starkloop/config.hpp"
#include "starkloop/errors.hpp"
#include "starkloop/experiments.hpp"
#include "starkloop/results.hpp"

using namespace starkloop;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig fast_phase_law_config() {
  ExperimentConfig cfg;
  cfg.phi_points = 8;
  cfg.n_max = 2;
  cfg.finalize(Experiment::kPhaseLaw);
  return cfg;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip") {
  ExperimentConfig cfg;
  cfg.seed = 12345;
  cfg.trials = 2000;
  cfg.rel_spreads = {0.01, 0.03};
  cfg.out_dir = "results";
  cfg.finalize(Experiment::kRmseNonuniform);
  const std::string text = serialize_config(cfg);
  const ExperimentConfig back = parse_config(text);
  CHECK(back == cfg);
  // a second round trip is exact too
  CHECK(serialize_config(back) == text);
}

TEST_CASE("config parser rejects unknown and malformed keys") {
  CHECK_THROWS_AS(parse_config("omga_p = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("omega_p 0.1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("omega_p = zebra\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("omega_p = 0.1\nomega_p = 0.2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("snr_grid = [1, 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("snr_grid = []\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = flux-capacitor\n"), ConfigError);

  const ExperimentConfig cfg = parse_config("# comment\n\nomega_p = 0.25\nseed = 7\n");
  CHECK(cfg.omega_p == 0.25);
  CHECK(cfg.seed == 7);
}

TEST_CASE("finalize validates grids per experiment") {
  ExperimentConfig cfg;
  cfg.trials = 10;
  CHECK_THROWS_AS(cfg.finalize(Experiment::kRmseUniform), ConfigError);

  ExperimentConfig cfg2;
  cfg2.theta_points = 4;
  CHECK_THROWS_AS(cfg2.finalize(Experiment::kThetaSweep), ConfigError);

  ExperimentConfig cfg3;
  cfg3.detuning = "sideways";
  CHECK_THROWS_AS(cfg3.finalize(Experiment::kGainCurve), ConfigError);

  ExperimentConfig cfg4 = parse_config("experiment = validate\n");
  CHECK_THROWS_AS(cfg4.finalize(Experiment::kPhaseLaw), ConfigError);

  ExperimentConfig cfg5;
  cfg5.finalize(Experiment::kRmseNonuniform);
  REQUIRE(cfg5.snr_grid.has_value());
  CHECK(cfg5.snr_grid->front() == doctest::Approx(1e2));
  CHECK(cfg5.snr_grid->back() == doctest::Approx(1e7));
  CHECK(*cfg5.design_level == doctest::Approx(0.12));
}

TEST_CASE("experiment names round trip") {
  for (int i = 0; i < 7; ++i) {
    const auto e = static_cast<Experiment>(i);
    CHECK(experiment_from_name(experiment_name(e)) == e);
  }
}

TEST_CASE("csv rendering uses full precision") {
  DataTable t("demo", {"a", "b"});
  t.add_row({1.0 / 3.0, 0.1});
  const std::string csv = render_csv(t);
  CHECK(csv.find("a,b\n") == 0);
  CHECK(csv.find("0.33333333333333331") != std::string::npos);
  CHECK_THROWS_AS(t.add_row({1.0}), DimensionError);
}

TEST_CASE("phase law experiment determinism and null table") {
  const ExperimentConfig cfg = fast_phase_law_config();
  const ResultBundle a = run_phase_law(cfg);
  const ResultBundle b = run_phase_law(cfg);
  REQUIRE(a.tables.size() == b.tables.size());
  for (std::size_t t = 0; t < a.tables.size(); ++t)
    CHECK(render_csv(a.tables[t]) == render_csv(b.tables[t]));

  // loop-open magnitudes vanish
  const DataTable& null_table = a.tables[1];
  for (const auto& row : null_table.rows)
    if (row[0] != 0.0) CHECK(row[1] < 1e-14);
}

TEST_CASE("bundle writing round trip") {
  const ExperimentConfig cfg = fast_phase_law_config();
  const ResultBundle bundle = run_phase_law(cfg);
  const auto dir = std::filesystem::temp_directory_path() / "starkloop_test_out";
  std::filesystem::remove_all(dir);
  const auto files = bundle.write(dir.string());
  REQUIRE(files.size() == bundle.tables.size() + 1);
  for (const auto& f : files) CHECK(std::filesystem::exists(f));

  // byte-identical on rewrite into a second directory
  const auto dir2 = std::filesystem::temp_directory_path() / "starkloop_test_out2";
  std::filesystem::remove_all(dir2);
  const auto files2 = bundle.write(dir2.string());
  for (std::size_t i = 0; i + 1 < files.size(); ++i)  // skip manifest (wall clock)
    CHECK(slurp(files[i]) == slurp(files2[i]));

  // config echo in the manifest reproduces the config
  const std::string manifest = slurp(files.back());
  CHECK(manifest.find("config_echo") != std::string::npos);
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(dir2);
}

TEST_CASE("phase law at theta zero emits null magnitudes") {
  ExperimentConfig cfg;
  cfg.theta = 0.0;
  cfg.phi_points = 8;
  cfg.n_max = 2;
  cfg.finalize(Experiment::kPhaseLaw);
  const ResultBundle bundle = run_phase_law(cfg);
  const DataTable& phasor = bundle.tables[0];
  const std::size_t mag_col = 3;
  for (const auto& row : phasor.rows) CHECK(row[mag_col] < 1e-14);
}

TEST_CASE("rerun from the echoed config reproduces tables") {
  ExperimentConfig cfg;
  cfg.trials = 2000;
  cfg.snr_grid = std::vector<double>{1e3, 1e4};
  cfg.seed = 31337;
  cfg.finalize(Experiment::kRmseUniform);
  const ResultBundle first = run_rmse_uniform(cfg);

  ExperimentConfig echoed = parse_config(serialize_config(first.config));
  echoed.finalize(Experiment::kRmseUniform);
  CHECK(echoed == first.config);
  const ResultBundle second = run_rmse_uniform(echoed);
  REQUIRE(first.tables.size() == second.tables.size());
  for (std::size_t t = 0; t < first.tables.size(); ++t)
    CHECK(render_csv(first.tables[t]) == render_csv(second.tables[t]));
  CHECK(first.provenance.seed == 31337);
  CHECK(first.provenance.n_max == cfg.n_max);
}

TEST_CASE("validate experiment emits convergence and crosscheck tables") {
  ExperimentConfig cfg;
  cfg.n_ref = 6;  // keep the reference solves cheap in the unit run
  cfg.burn_in_periods = 60;
  cfg.eval_periods = 2;
  cfg.samples_per_period = 100;
  cfg.finalize(Experiment::kValidate);
  const ResultBundle bundle = run_validate(cfg);
  REQUIRE(bundle.tables.size() == 3);

  const DataTable& eps = bundle.tables[0];
  double prev_nom = 1e300, prev_str = 1e300;
  for (const auto& row : eps.rows) {
    CHECK(row[1] <= prev_nom * (1.0 + 1e-6) + 1e-15);
    CHECK(row[2] <= prev_str * (1.0 + 1e-6) + 1e-15);
    prev_nom = row[1];
    prev_str = row[2];
    if (row[0] == 3.0) CHECK(row[2] < 1e-7);  // stress eps_3
  }
  CHECK(bundle.tables[1].name == "overlay");
  CHECK(bundle.tables[2].name == "crosscheck");
  CHECK(bundle.tables[2].rows.size() == 6);
}

TEST_CASE("command line binary") {
  const std::string exe = STARKLOOP_CLI_PATH;
  const std::string data = STARKLOOP_TEST_DATA;
  const auto out = std::filesystem::temp_directory_path() / "starkloop_cli_out";
  std::filesystem::remove_all(out);

  SUBCASE("smoke run succeeds") {
    const std::string cmd =
        exe + " phase-law --config " + data + "/phase_law_smoke.cfg --out " + out.string() +
        " > /dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(std::filesystem::exists(out / "phase-law_phasor.csv"));
    CHECK(std::filesystem::exists(out / "phase-law_manifest.json"));
  }

  SUBCASE("config errors exit with code 2") {
    const std::string cmd = exe + " phase-law --config " + data +
                            "/broken.cfg --out " + out.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 2);
  }

  SUBCASE("missing config exits with code 2") {
    const std::string cmd =
        exe + " phase-law --config /nonexistent.cfg > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 2);
  }

  SUBCASE("numerical failures exit with code 3") {
    // theta = 0 leaves no monotone response branch to invert
    const std::string cmd = exe + " response-map --config " + data +
                            "/open_loop_response.cfg --out " + out.string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
  }

  std::filesystem::remove_all(out);
}

}  // TEST_SUITE
