#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gad/harness.hpp"
#include "test_util.hpp"

using namespace gad;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("gad_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.target.name = "trimodal";
  cfg.sketch_size = 200;
  cfg.iterations = 40;
  cfg.burn_in = 10;
  cfg.subsample_n = 50;
  return cfg;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults round-trip through the snapshot") {
    const ExperimentConfig def;
    const ExperimentConfig back = parse_config_text(config_to_string(def));
    CHECK(back.iterations == def.iterations);
    CHECK(back.gamma == def.gamma);
    CHECK(back.nu == def.nu);
    CHECK(back.kernel_sigma == def.kernel_sigma);
    CHECK(back.target.name == def.target.name);
    CHECK(back.bias_levels == def.bias_levels);
    CHECK(back.seeds == def.seeds);
  }
  SUBCASE("comments, overrides and target params") {
    const ExperimentConfig cfg = parse_config_text(
        "# a comment\n"
        "target.name = ring\n"
        "target.radius = 0.2\n"
        "sampler.iterations = 77\n"
        "sampler.p_check = 0.25\n"
        "kernel.c = 0.05\n"
        "seeds = 3, 4, 5\n"
        "bias.levels = weak\n");
    CHECK(cfg.target.name == "ring");
    CHECK(cfg.target.params.at("radius") == doctest::Approx(0.2));
    CHECK(cfg.iterations == 77);
    CHECK(cfg.p_check == doctest::Approx(0.25));
    CHECK(cfg.kernel_c == doctest::Approx(0.05));
    CHECK(cfg.seeds == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(cfg.bias_levels == std::vector<std::string>{"weak"});
  }
  SUBCASE("unknown keys raise an error naming the key") {
    try {
      parse_config_text("sampler.iteratons = 5\n");
      FAIL("expected a parse error");
    } catch (const std::exception& e) {
      CHECK(std::string(e.what()).find("sampler.iteratons") != std::string::npos);
    }
  }
  SUBCASE("default sweep has 31 values") {
    const auto sweep = default_c_sweep();
    REQUIRE(sweep.size() == 31);
    CHECK(sweep.front() == doctest::Approx(0.0));
    CHECK(sweep.back() == doctest::Approx(0.2));
    CHECK(sweep[1] == doctest::Approx(0.005));
    CHECK(sweep[20] == doctest::Approx(0.1));
    CHECK(sweep[21] == doctest::Approx(0.11));
    for (std::size_t i = 1; i < sweep.size(); ++i) CHECK(sweep[i] > sweep[i - 1]);
    ExperimentConfig cfg;
    CHECK(cfg.sweep() == sweep);
    cfg.c_values = {0.03};
    CHECK(cfg.sweep() == std::vector<double>{0.03});
  }
}

TEST_CASE("shipped targets") {
  for (const auto& name : shipped_target_names()) {
    TargetSpec spec;
    spec.name = name;
    const ShippedTarget t = make_target(spec);
    REQUIRE(t.density != nullptr);
    CHECK(t.demo_seeds.size() >= 5);
  }
  TargetSpec bad;
  bad.name = "no_such_target";
  try {
    make_target(bad);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    const std::string msg = e.what();
    CHECK(msg.find("no_such_target") != std::string::npos);
    CHECK(msg.find("trimodal") != std::string::npos);
  }
}

TEST_CASE("run_single is bit-deterministic in its chain CSV") {
  const ExperimentConfig cfg = tiny_config();
  const RunReport a = run_single(cfg, SketchBias::weak, 0.05, 7);
  const RunReport b = run_single(cfg, SketchBias::weak, 0.05, 7);
  CHECK(chain_to_csv(a.chain) == chain_to_csv(b.chain));
  CHECK(a.chain.size() == static_cast<std::size_t>(cfg.burn_in + cfg.iterations));
  CHECK(a.metrics.seed == 7);
  CHECK(a.metrics.c_value == doctest::Approx(0.05));
  CHECK(a.metrics.bias == SketchBias::weak);

  const RunReport c = run_single(cfg, SketchBias::weak, 0.05, 8);
  CHECK(chain_to_csv(a.chain) != chain_to_csv(c.chain));
}

TEST_CASE("chain CSV format") {
  const ExperimentConfig cfg = tiny_config();
  const RunReport r = run_single(cfg, SketchBias::weak, 0.05, 1);
  const std::string csv = chain_to_csv(r.chain);
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "iter,qw,qx,qy,qz,tx,ty,tz,log_quality,accepted,branch");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 10);
  }
  CHECK(rows == r.chain.size());
}

TEST_CASE("baseline runs and reports the rw branch only") {
  const ExperimentConfig cfg = tiny_config();
  const RunReport r = run_baseline(cfg, 3);
  CHECK(r.chain.size() == static_cast<std::size_t>(cfg.burn_in + cfg.iterations));
  for (const auto& rec : r.chain) CHECK(rec.branch == Branch::rw);
}

TEST_CASE("run_matrix writes reports, aggregate and dispersion files") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config();
  cfg.out_dir = tmp.path.string();
  cfg.bias_levels = {"impartial", "weak"};
  cfg.c_values = {0.0, 0.05};
  cfg.seeds = {1, 2};
  cfg.workers = 2;

  const MatrixResult result = run_matrix(cfg);
  CHECK(result.failures.empty());
  CHECK(result.runs.size() == 2 * 2 * 2);
  CHECK(result.aggregate_rows.size() == 2);

  std::size_t json_count = 0, csv_count = 0;
  for (const auto& entry : fs::directory_iterator(tmp.path)) {
    const auto name = entry.path().filename().string();
    if (name.ends_with(".json")) ++json_count;
    if (name.starts_with("run_") && name.ends_with(".csv")) ++csv_count;
  }
  CHECK(json_count == 8);
  CHECK(csv_count == 8);
  CHECK(fs::exists(tmp.path / "aggregate.csv"));
  CHECK(fs::exists(tmp.path / "aggregate.txt"));
  CHECK(fs::exists(tmp.path / "dispersion.csv"));

  // The dispersion CSV round-trips the per-run metrics.
  const auto back = read_dispersion_csv((tmp.path / "dispersion.csv").string());
  REQUIRE(back.size() == result.runs.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].success_count == result.runs[i].success_count);
    CHECK(back[i].bias == result.runs[i].bias);
    CHECK(std::abs(back[i].c_value - result.runs[i].c_value) < 1e-12);
    CHECK(std::abs(back[i].dispersion_area - result.runs[i].dispersion_area) < 1e-12);
  }
}

TEST_CASE("matrix determinism across worker counts") {
  TempDir tmp1, tmp2;
  ExperimentConfig cfg = tiny_config();
  cfg.bias_levels = {"weak"};
  cfg.c_values = {0.02, 0.08};
  cfg.seeds = {5, 6};

  cfg.out_dir = tmp1.path.string();
  cfg.workers = 1;
  const MatrixResult serial = run_matrix(cfg);
  cfg.out_dir = tmp2.path.string();
  cfg.workers = 4;
  const MatrixResult parallel = run_matrix(cfg);

  REQUIRE(serial.runs.size() == parallel.runs.size());
  for (std::size_t i = 0; i < serial.runs.size(); ++i) {
    CHECK(serial.runs[i].success_count == parallel.runs[i].success_count);
    CHECK(serial.runs[i].unique_success_count == parallel.runs[i].unique_success_count);
    CHECK(serial.runs[i].acceptance_rate == parallel.runs[i].acceptance_rate);
  }
  for (const auto& entry : fs::directory_iterator(tmp1.path)) {
    if (!entry.path().filename().string().starts_with("run_")) continue;
    if (!entry.path().filename().string().ends_with(".csv")) continue;
    std::ifstream f1(entry.path()), f2(tmp2.path / entry.path().filename());
    REQUIRE(f2.good());
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
  }
}

TEST_CASE("report JSON carries a re-runnable snapshot") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config();
  const RunReport r = run_single(cfg, SketchBias::strong, 0.03, 11);
  write_report(r, tmp.path.string());
  const fs::path json_path = tmp.path / (run_stem(SketchBias::strong, 0.03, 11) + ".json");
  REQUIRE(fs::exists(json_path));

  std::ifstream in(json_path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  CHECK(text.find("\"seed\"") != std::string::npos);
  CHECK(text.find("\"config\"") != std::string::npos);

  // The snapshot alone reproduces the run.
  const ExperimentConfig again = parse_config_text(r.config_snapshot);
  const RunReport r2 = run_single(again, SketchBias::strong, 0.03, 11);
  CHECK(chain_to_csv(r2.chain) == chain_to_csv(r.chain));
}
