#include "doctest.h"
#include "susylab/cli.hpp"
#include "susylab/config.hpp"
#include "susylab/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace susylab;

namespace {

const char* kBase = R"(op: g1
seed: 42
ensemble:
  lattice:
    num_sites: 2
  orbitals: 3
  covariance:
    profile: explicit
    matrix: [1, 1/3, 1/3, 1]
params:
  num_samples: 2000
  z: [[0.2, 1/7], [0, -0.5]]
)";

std::string error_of(const std::string& text, const std::vector<std::string>& overrides = {}) {
  try {
    ExperimentConfig::from_string(text, overrides);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("defaults and typed access") {
  const ExperimentConfig c = ExperimentConfig::from_string(kBase);
  CHECK(c.op() == "g1");
  CHECK(c.seed() == 42);
  CHECK(c.output_dir() == "out");
  CHECK(c.integer("params.num_samples") == 2000);
  CHECK(c.real("params.dos_epsilon") == 0.1);
  CHECK(c.real("params.transport_epsilon") == 0.01);
  CHECK(c.boolean("params.force_sampling") == false);
  const auto z = c.complex_list("params.z");
  REQUIRE(z.size() == 2);
  CHECK(z[0].imag() == 1.0 / 7.0);
  CHECK(z[1] == std::complex<double>(0, -0.5));
  const EnsembleSpec spec = c.ensemble();
  CHECK(spec.num_sites() == 2);
  CHECK(spec.orbitals == 3);
  CHECK(spec.J()(0, 1) == 1.0 / 3.0);
}

TEST_CASE("unknown keys are rejected with their line") {
  const std::string bad = std::string(kBase) + "  num_sampels: 10\n";
  const std::string msg = error_of(bad);
  CHECK(msg.find("params.num_sampels") != std::string::npos);
  CHECK(msg.find("line 13") != std::string::npos);
  const std::string nested = error_of("op: g1\nensemble:\n  lattice:\n    sites: 2\n");
  CHECK(nested.find("ensemble.lattice.sites") != std::string::npos);
  CHECK(nested.find("line 4") != std::string::npos);
  CHECK(error_of(kBase, {"params.nope=1"}).find("params.nope") != std::string::npos);
}

TEST_CASE("type errors name the key and line") {
  const std::string msg = error_of("op: g1\nensemble:\n  orbitals: two\n");
  CHECK(msg.find("ensemble.orbitals") != std::string::npos);
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(!error_of(kBase, {"seed=-1"}).empty());
  CHECK(!error_of(kBase, {"params.force_sampling=yes"}).empty());
  CHECK(!error_of(kBase, {"params.z=[[1, 2, 3]]"}).empty());
  CHECK(!error_of(kBase, {"params.dos_epsilon=1/0"}).empty());
  CHECK(error_of("op: g1\nensemble: [\n").find("parse error") != std::string::npos);
}

TEST_CASE("missing ensemble section") {
  CHECK(error_of("op: g1\nseed: 3\n").find("'ensemble'") != std::string::npos);
}

TEST_CASE("ensemble profiles") {
  CHECK_THROWS_AS(ExperimentConfig::from_string(kBase, {"ensemble.covariance.profile=gue"}).ensemble(), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_string(kBase, {"ensemble.covariance.matrix=[1, 2]"}).ensemble(),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_string(kBase, {"ensemble.covariance.profile=wavy"}).ensemble(),
                  ConfigError);
  const EnsembleSpec e = ExperimentConfig::from_string(
                             kBase, {"ensemble.covariance.profile=exponential_band", "ensemble.covariance.width=2"})
                             .ensemble();
  CHECK(e.J()(0, 1) == doctest::Approx(std::exp(-0.5)));
  const EnsembleSpec s = ExperimentConfig::from_string(kBase, {"ensemble.covariance.scale=2"}).ensemble();
  CHECK(s.J()(0, 1) == 2.0 / 3.0);
}

TEST_CASE("overrides use YAML flow values") {
  const ExperimentConfig c = ExperimentConfig::from_string(kBase, {"params.z=[[1, 2]]", "seed=7", "params.lambda=3/4"});
  CHECK(c.seed() == 7);
  CHECK(c.complex_list("params.z") == std::vector<std::complex<double>>{{1, 2}});
  CHECK(c.real("params.lambda") == 0.75);
}

TEST_CASE("resolved config round-trips exactly") {
  const ExperimentConfig c =
      ExperimentConfig::from_string(kBase, {"params.energy=0.1", "params.dos_e_min=-2.5e-3", "params.t_grid=[0, 1/3]"});
  const std::string r = c.resolved();
  CHECK(r.find("matrix: [1, 1/3, 1/3, 1]") != std::string::npos);
  CHECK(r.find("t_grid: [0, 1/3]") != std::string::npos);
  const ExperimentConfig again = ExperimentConfig::from_string(r);
  CHECK(again.resolved() == r);
  CHECK(again.hash() == c.hash());
  CHECK(again.real("params.energy") == 0.1);
  CHECK(again.real_list("params.t_grid")[1] == 1.0 / 3.0);
}

TEST_CASE("hash ignores output_dir only") {
  const ExperimentConfig a = ExperimentConfig::from_string(kBase);
  const ExperimentConfig b = ExperimentConfig::from_string(kBase, {"output_dir=elsewhere"});
  const ExperimentConfig c = ExperimentConfig::from_string(kBase, {"seed=43"});
  CHECK(a.hash() == b.hash());
  CHECK(a.hash() != c.hash());
  CHECK(a.hash_hex().size() == 16);
}

TEST_CASE("shortest repr and rationals") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 6.02214076e23, 0.0}) CHECK(std::strtod(shortest_repr(v).c_str(), nullptr) == v);
  CHECK(shortest_repr(0.1) == "0.1");
  CHECK(parse_real("3/8").value == 0.375);
  CHECK(parse_real(" -1/4 ").text == "-1/4");
  CHECK_THROWS_AS(parse_real("1/"), ConfigError);
  CHECK_THROWS_AS(parse_real("abc"), ConfigError);
}

TEST_CASE("csv output") {
  CsvTable t({"a", "b"});
  t.cell(0.1).cell(std::int64_t{3});
  t.end_row();
  CHECK(t.render("00ff") == "# config_hash: 00ff\na,b\n0.10000000000000001,3\n");
  t.cell(1.0);
  CHECK_THROWS_AS(t.end_row(), InvalidInput);
  CHECK(fmt17(1.0 / 3.0) == "0.33333333333333331");
}

TEST_CASE("run writes artifacts and re-runs from config.resolved") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "susylab_test_config";
  fs::remove_all(root);
  std::ostringstream log;
  const ExperimentConfig c = ExperimentConfig::from_string(kBase, {"output_dir=\"" + (root / "a").string() + "\""});
  CHECK(run_experiment(c, c.output_dir(), 1, log) == kExitOk);
  const std::string g1 = slurp(root / "a" / "g1.csv");
  CHECK(g1.rfind("# config_hash: " + c.hash_hex() + "\n", 0) == 0);
  CHECK(slurp(root / "a" / "report.json").find(c.hash_hex()) != std::string::npos);

  const ExperimentConfig r = ExperimentConfig::from_file((root / "a" / "config.resolved").string(),
                                                         {"output_dir=\"" + (root / "b").string() + "\""});
  CHECK(run_experiment(r, r.output_dir(), 3, log) == kExitOk);
  CHECK(slurp(root / "b" / "g1.csv") == g1);
  fs::remove_all(root);
}

TEST_CASE("command line") {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "susylab_test_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream(root / "c.yaml") << kBase;
    std::ofstream(root / "bad.yaml") << "op: g1\nseed: 1\n";
  }
  std::ostringstream out, err;
  const std::string cfg = (root / "c.yaml").string(), dir = (root / "o").string();
  const char* ok[] = {"susylab", "g1", "--config", cfg.c_str(), "--out", dir.c_str(), "--workers", "2", "--seed", "9"};
  CHECK(run_cli(10, ok, out, err) == kExitOk);
  CHECK(slurp(root / "o" / "config.resolved").find("seed: 9") != std::string::npos);
  const std::string bad = (root / "bad.yaml").string();
  const char* missing[] = {"susylab", "g1", "--config", bad.c_str()};
  CHECK(run_cli(4, missing, out, err) == kExitError);
  CHECK(err.str().find("ensemble") != std::string::npos);
  const char* unknown[] = {"susylab", "frobnicate", "--config", cfg.c_str()};
  CHECK(run_cli(4, unknown, out, err) == kExitError);
  CHECK(subcommands().size() == 17);
  fs::remove_all(root);
}
