// Command-line front end for the grasp-affordance sampler library.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gad/harness.hpp"

namespace fs = std::filesystem;

namespace {

gad::ExperimentConfig load_config(const std::string& path, const std::string& out_dir,
                                  std::uint64_t seed, bool seed_set) {
  gad::ExperimentConfig cfg =
      path.empty() ? gad::ExperimentConfig{} : gad::load_config_file(path);
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (const char* env = std::getenv("GAD_OUT_DIR")) cfg.out_dir = env;
  if (seed_set) cfg.seeds = {seed};
  return cfg;
}

void print_pose(const gad::Pose& p, double quality) {
  std::printf("rot=(% .6f, % .6f, % .6f, % .6f)  tra=(% .4f, % .4f, % .4f)  quality=%.6g\n",
              p.rot.w, p.rot.x, p.rot.y, p.rot.z, p.tra.x(), p.tra.y(), p.tra.z(), quality);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gad - multimodal grasp affordance density sampling"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 1;
  bool seed_set = false;
  app.add_option("--config", config_path, "configuration file (key = value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "RNG seed")->each([&](const std::string&) { seed_set = true; });

  std::string bias_name = "weak";
  auto* cmd_demo = app.add_subcommand("demo", "generate and print the demonstrated grasps");
  auto* cmd_sketch = app.add_subcommand("sketch", "build and save a rough sketch");
  cmd_sketch->add_option("--bias", bias_name, "impartial | weak | strong");
  auto* cmd_run = app.add_subcommand("run", "one combined Kameleon+GDMC run");
  cmd_run->add_option("--bias", bias_name, "impartial | weak | strong");
  auto* cmd_matrix = app.add_subcommand("matrix", "full c-sweep x bias x seed matrix");
  auto* cmd_baseline = app.add_subcommand("baseline", "random-walk MH baseline run");
  std::string report_dir;
  auto* cmd_report = app.add_subcommand("report", "re-aggregate saved run reports");
  cmd_report->add_option("--in", report_dir, "directory with run reports")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const gad::ExperimentConfig cfg = load_config(config_path, out_dir, seed, seed_set);
    const std::uint64_t run_seed = cfg.seeds.empty() ? 1 : cfg.seeds.front();

    if (cmd_demo->parsed()) {
      gad::Rng rng(run_seed);
      const gad::ShippedTarget shipped = gad::make_target(cfg.target);
      const auto demos = gad::generate_demo_grasps(
          *shipped.density, shipped.demo_seeds,
          static_cast<std::size_t>(cfg.demo_count), rng);
      std::printf("# %zu demonstrated grasps for target '%s' (seed %llu)\n", demos.size(),
                  cfg.target.name.c_str(), static_cast<unsigned long long>(run_seed));
      for (const auto& d : demos) print_pose(d, shipped.density->quality(d));
      return 0;
    }

    if (cmd_sketch->parsed()) {
      gad::Rng rng(run_seed);
      const gad::ShippedTarget shipped = gad::make_target(cfg.target);
      const auto demos = gad::generate_demo_grasps(
          *shipped.density, shipped.demo_seeds,
          static_cast<std::size_t>(cfg.demo_count), rng);
      gad::RwParams rw;
      rw.pos_cov = (cfg.rw_pos_sigma * cfg.rw_pos_sigma) * Eigen::Matrix3d::Identity();
      rw.kappa = cfg.rw_kappa;
      const gad::Sketch sketch =
          gad::build_sketch(*shipped.density, demos, gad::sketch_bias_from_name(bias_name),
                            static_cast<std::size_t>(cfg.sketch_size), rw, rng);
      fs::create_directories(cfg.out_dir);
      const std::string path =
          (fs::path(cfg.out_dir) / ("sketch_" + bias_name + ".csv")).string();
      gad::write_sketch_csv(sketch, path);
      std::size_t valid = 0;
      for (const auto& s : sketch.samples) valid += s.valid ? 1 : 0;
      std::printf("wrote %s (%zu samples, %zu valid)\n", path.c_str(),
                  sketch.samples.size(), valid);
      return 0;
    }

    if (cmd_run->parsed()) {
      const gad::RunReport report = gad::run_single(
          cfg, gad::sketch_bias_from_name(bias_name), cfg.kernel_c, run_seed);
      gad::write_report(report, cfg.out_dir);
      std::printf("%s: %zu successes (%zu unique), acceptance %.3f, dispersion %.6g m^2, %.2f s\n",
                  gad::run_stem(report.bias, report.c, report.seed).c_str(),
                  report.metrics.success_count, report.metrics.unique_success_count,
                  report.metrics.acceptance_rate, report.metrics.dispersion_area,
                  report.duration_seconds);
      return 0;
    }

    if (cmd_matrix->parsed()) {
      const gad::MatrixResult result = gad::run_matrix(cfg);
      std::printf("%zu runs completed, %zu failed; reports in %s\n", result.runs.size(),
                  result.failures.size(), cfg.out_dir.c_str());
      std::fputs(gad::aggregate_to_text(result.aggregate_rows).c_str(), stdout);
      for (const auto& f : result.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
      return result.runs.empty() && !result.failures.empty() ? 1 : 0;
    }

    if (cmd_baseline->parsed()) {
      gad::RunReport report = gad::run_baseline(cfg, run_seed);
      fs::create_directories(cfg.out_dir);
      std::ofstream csv(fs::path(cfg.out_dir) / "baseline_chain.csv");
      csv << gad::chain_to_csv(report.chain);
      std::printf("baseline: %zu successes (%zu unique), acceptance %.3f\n",
                  report.metrics.success_count, report.metrics.unique_success_count,
                  report.metrics.acceptance_rate);
      return 0;
    }

    if (cmd_report->parsed()) {
      std::vector<gad::RunMetrics> runs;
      const fs::path dispersion = fs::path(report_dir) / "dispersion.csv";
      if (fs::exists(dispersion)) {
        runs = gad::read_dispersion_csv(dispersion.string());
      } else {
        for (const auto& entry : fs::directory_iterator(report_dir)) {
          if (entry.path().extension() != ".json") continue;
          std::ifstream in(entry.path());
          nlohmann::json j;
          in >> j;
          gad::RunMetrics m;
          m.success_count = j["metrics"]["success_count"].get<std::size_t>();
          m.unique_success_count = j["metrics"]["unique_success_count"].get<std::size_t>();
          m.dispersion_area = j["metrics"]["dispersion_area"].get<double>();
          m.c_value = j["c"].get<double>();
          m.bias = gad::sketch_bias_from_name(j["bias"].get<std::string>());
          m.seed = j["seed"].get<std::uint64_t>();
          runs.push_back(m);
        }
      }
      if (runs.empty()) {
        std::fprintf(stderr, "no run reports found in %s\n", report_dir.c_str());
        return 1;
      }
      const auto rows = gad::aggregate(runs);
      std::fputs(gad::aggregate_to_text(rows).c_str(), stdout);
      gad::write_aggregate(rows, cfg.out_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
