#include "gad/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace gad {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

double get_param(const TargetSpec& spec, const std::string& key, double fallback) {
  const auto it = spec.params.find(key);
  return it == spec.params.end() ? fallback : it->second;
}

// Orientation whose local x-axis points from `angle` on a circle back at the
// axis (inward).
UnitQuat inward_rotation(double angle) { return UnitQuat::rot_z(angle + M_PI); }

ShippedTarget make_trimodal(const TargetSpec& spec) {
  const double radius = get_param(spec, "radius", 0.15);
  const double scale = get_param(spec, "scale", 0.02);
  const double weight = get_param(spec, "weight", 1.0);
  const double c = get_param(spec, "c", 0.08);
  std::vector<MixtureTarget::Mode> modes;
  std::vector<Vec3> seeds;
  for (int k = 0; k < 3; ++k) {
    const double angle = M_PI / 2.0 + k * 2.0 * M_PI / 3.0;
    const Vec3 pos(radius * std::cos(angle), radius * std::sin(angle), 0.0);
    modes.push_back({{inward_rotation(angle), pos}, weight, scale});
  }
  for (int i = 0; i < 5; ++i) seeds.push_back(modes[static_cast<std::size_t>(i % 3)].center.tra);
  return {std::make_shared<MixtureTarget>(std::move(modes), c), std::move(seeds)};
}

ShippedTarget make_bimodal(const TargetSpec& spec) {
  const double c = get_param(spec, "c", 0.08);
  std::vector<MixtureTarget::Mode> modes;
  modes.push_back({{inward_rotation(0.0), Vec3(0.12, 0.0, 0.05)},
                   get_param(spec, "weight_body", 1.0),
                   get_param(spec, "scale_body", 0.02)});
  modes.push_back({{inward_rotation(M_PI), Vec3(-0.10, 0.0, -0.03)},
                   get_param(spec, "weight_handle", 0.6),
                   get_param(spec, "scale_handle", 0.015)});
  std::vector<Vec3> seeds;
  for (int i = 0; i < 5; ++i) seeds.push_back(modes[static_cast<std::size_t>(i % 2)].center.tra);
  return {std::make_shared<MixtureTarget>(std::move(modes), c), std::move(seeds)};
}

ShippedTarget make_ring(const TargetSpec& spec) {
  const double radius = get_param(spec, "radius", 0.10);
  const double height = get_param(spec, "height", 0.16);
  const double g_min = get_param(spec, "standoff_min", 0.0);
  const double g_max = get_param(spec, "standoff_max", 0.03);
  const double tol = get_param(spec, "theta_tol", 0.6);
  std::vector<Vec3> seeds;
  const double rho = radius + 0.5 * (g_min + g_max);
  for (int k = 0; k < 5; ++k) {
    const double angle = k * 2.0 * M_PI / 5.0;
    seeds.emplace_back(rho * std::cos(angle), rho * std::sin(angle), 0.0);
  }
  return {std::make_shared<CylinderRingTarget>(radius, height, g_min, g_max, tol),
          std::move(seeds)};
}

ShippedTarget make_unimodal(const TargetSpec& spec) {
  const double scale = get_param(spec, "scale", 0.02);
  const double c = get_param(spec, "c", 0.08);
  const Vec3 pos(0.1, 0.0, 0.0);
  std::vector<MixtureTarget::Mode> modes{{{inward_rotation(0.0), pos}, 1.0, scale}};
  return {std::make_shared<MixtureTarget>(std::move(modes), c),
          std::vector<Vec3>(5, pos)};
}

DartAcceptMode parse_accept_mode(const std::string& s) {
  if (s == "standard") return DartAcceptMode::standard;
  if (s == "reciprocal") return DartAcceptMode::reciprocal;
  throw std::runtime_error("config: unknown sampler.acceptance_mode '" + s + "'");
}

VolumeMode parse_volume_mode(const std::string& s) {
  if (s == "sqrt") return VolumeMode::sqrt_eigen;
  if (s == "literal") return VolumeMode::literal;
  throw std::runtime_error("config: unknown sampler.volume_mode '" + s + "'");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> shipped_target_names() {
  return {"trimodal", "bimodal", "ring", "unimodal"};
}

ShippedTarget make_target(const TargetSpec& spec) {
  if (spec.name == "trimodal") return make_trimodal(spec);
  if (spec.name == "bimodal") return make_bimodal(spec);
  if (spec.name == "ring") return make_ring(spec);
  if (spec.name == "unimodal") return make_unimodal(spec);
  std::string names;
  for (const auto& n : shipped_target_names()) names += (names.empty() ? "" : ", ") + n;
  throw std::runtime_error("unknown target '" + spec.name + "'; available: " + names);
}

namespace {

RunMetrics compute_metrics(const std::vector<ChainRecord>& chain, int burn_in,
                           const TargetDensity& target) {
  RunMetrics m;
  const std::span<const ChainRecord> post(chain.data() + burn_in,
                                          chain.size() - static_cast<std::size_t>(burn_in));
  const SuccessCounts counts = count_successes(post, target);
  m.success_count = counts.success_count;
  m.unique_success_count = counts.unique_success_count;

  std::size_t accepted = 0, decisions = 0;
  for (const auto& rec : chain) {
    if (rec.branch == Branch::hold) continue;
    ++decisions;
    accepted += rec.accepted ? 1 : 0;
  }
  m.acceptance_rate = decisions ? static_cast<double>(accepted) / static_cast<double>(decisions) : 0.0;

  std::vector<Vec3> positions;
  for (const auto& rec : post)
    if (rec.accepted && target.is_success(rec.pose)) positions.push_back(rec.pose.tra);
  const HullResult hull = convex_hull_area(positions);
  m.dispersion_area = hull.area;
  m.dispersion_degenerate = hull.degenerate;
  return m;
}

double z_running_sum(const std::vector<ChainRecord>& chain) {
  double z = 0.0;
  for (const auto& rec : chain)
    if (!std::isinf(rec.log_quality)) z += std::exp(rec.log_quality);
  return z;
}

}  // namespace

RunReport run_single(const ExperimentConfig& cfg, SketchBias bias, double c,
                     std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);

  const ShippedTarget shipped = make_target(cfg.target);
  const TargetDensity& target = *shipped.density;

  const std::vector<Pose> demos = generate_demo_grasps(
      target, shipped.demo_seeds, static_cast<std::size_t>(cfg.demo_count), rng);

  RwParams rw;
  rw.pos_cov = (cfg.rw_pos_sigma * cfg.rw_pos_sigma) * Eigen::Matrix3d::Identity();
  rw.kappa = cfg.rw_kappa;
  const Sketch sketch = build_sketch(target, demos, bias,
                                     static_cast<std::size_t>(cfg.sketch_size), rw, rng);

  KameleonParams kp;
  kp.gamma = cfg.gamma;
  kp.nu = cfg.nu;
  kp.n = cfg.subsample_n;
  kp.burn_in = cfg.burn_in;
  kp.iterations = cfg.iterations;
  kp.kernel = {cfg.kernel_sigma, cfg.kernel_ell, c};

  ChainState state = ChainState::from_sketch(demos[0], target, sketch.samples);

  RunReport report;
  report.seed = seed;
  report.bias = bias;
  report.c = c;
  {
    ExperimentConfig effective = cfg;
    effective.kernel_c = c;
    report.config_snapshot = config_to_string(effective);
  }
  report.chain.reserve(static_cast<std::size_t>(cfg.burn_in + cfg.iterations));

  for (int t = 0; t < cfg.burn_in; ++t)
    report.chain.push_back(kameleon_step(state, target, kp, rng));

  // End of burn-in: adaptation stops, the subsample and the jump regions are
  // frozen for the rest of the run.
  state.freeze(subsample_history(state, kp.n, rng));
  const std::vector<JumpRegion> regions =
      build_regions(demos, state.history, cfg.omega, c, parse_volume_mode(cfg.volume_mode));

  DartingParams dp;
  dp.p_check = cfg.p_check;
  dp.omega = cfg.omega;
  dp.acceptance_mode = parse_accept_mode(cfg.acceptance_mode);
  dp.volume_mode = parse_volume_mode(cfg.volume_mode);

  for (int t = 0; t < cfg.iterations; ++t)
    report.chain.push_back(combined_step(state, target, regions, kp, dp, rng));

  report.metrics = compute_metrics(report.chain, cfg.burn_in, target);
  report.metrics.c_value = c;
  report.metrics.bias = bias;
  report.metrics.seed = seed;
  report.z_diagnostic = z_running_sum(report.chain);
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

RunReport run_baseline(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(seed);

  const ShippedTarget shipped = make_target(cfg.target);
  const TargetDensity& target = *shipped.density;
  const std::vector<Pose> demos = generate_demo_grasps(
      target, shipped.demo_seeds, static_cast<std::size_t>(cfg.demo_count), rng);

  RwParams rw;
  rw.pos_cov = (cfg.rw_pos_sigma * cfg.rw_pos_sigma) * Eigen::Matrix3d::Identity();
  rw.kappa = cfg.rw_kappa;

  RwChain chain{demos[0], target.log_density(demos[0]), nullptr};

  RunReport report;
  report.seed = seed;
  report.bias = SketchBias::weak;
  report.c = cfg.kernel_c;
  report.config_snapshot = config_to_string(cfg);
  report.chain.reserve(static_cast<std::size_t>(cfg.burn_in + cfg.iterations));
  for (int t = 0; t < cfg.burn_in + cfg.iterations; ++t)
    report.chain.push_back(rw_step(chain, target, rw, rng));

  report.metrics = compute_metrics(report.chain, cfg.burn_in, target);
  report.metrics.c_value = cfg.kernel_c;
  report.metrics.seed = seed;
  report.z_diagnostic = z_running_sum(report.chain);
  report.duration_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

// ---------------------------------------------------------------------------
// Persistence.

std::string run_stem(SketchBias bias, double c, std::uint64_t seed) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "run_%s_c%.3f_seed%llu", sketch_bias_name(bias), c,
                static_cast<unsigned long long>(seed));
  return buf;
}

std::string chain_to_csv(const std::vector<ChainRecord>& chain) {
  std::ostringstream out;
  out << "iter,qw,qx,qy,qz,tx,ty,tz,log_quality,accepted,branch\n";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const auto& r = chain[i];
    out << i << ',' << fmt17(r.pose.rot.w) << ',' << fmt17(r.pose.rot.x) << ','
        << fmt17(r.pose.rot.y) << ',' << fmt17(r.pose.rot.z) << ','
        << fmt17(r.pose.tra.x()) << ',' << fmt17(r.pose.tra.y()) << ','
        << fmt17(r.pose.tra.z()) << ',' << fmt17(r.log_quality) << ','
        << (r.accepted ? 1 : 0) << ',' << branch_name(r.branch) << '\n';
  }
  return out.str();
}

void write_report(const RunReport& report, const std::string& dir) {
  fs::create_directories(dir);
  const std::string stem = run_stem(report.bias, report.c, report.seed);

  std::ofstream csv(fs::path(dir) / (stem + "_chain.csv"));
  csv << chain_to_csv(report.chain);

  json j;
  j["config"] = report.config_snapshot;
  j["seed"] = report.seed;
  j["bias"] = sketch_bias_name(report.bias);
  j["c"] = report.c;
  j["chain_csv"] = stem + "_chain.csv";
  j["chain_length"] = report.chain.size();
  j["metrics"] = {{"success_count", report.metrics.success_count},
                  {"unique_success_count", report.metrics.unique_success_count},
                  {"acceptance_rate", report.metrics.acceptance_rate},
                  {"dispersion_area", report.metrics.dispersion_area},
                  {"dispersion_degenerate", report.metrics.dispersion_degenerate}};
  j["z_diagnostic"] = report.z_diagnostic;
  j["duration_seconds"] = report.duration_seconds;
  std::ofstream out(fs::path(dir) / (stem + ".json"));
  out << j.dump(2) << "\n";
}

void write_sketch_csv(const Sketch& sketch, const std::string& path) {
  std::ofstream out(path);
  out << "qw,qx,qy,qz,tx,ty,tz,quality,valid\n";
  for (const auto& s : sketch.samples) {
    out << fmt17(s.pose.rot.w) << ',' << fmt17(s.pose.rot.x) << ','
        << fmt17(s.pose.rot.y) << ',' << fmt17(s.pose.rot.z) << ','
        << fmt17(s.pose.tra.x()) << ',' << fmt17(s.pose.tra.y()) << ','
        << fmt17(s.pose.tra.z()) << ',' << fmt17(s.quality) << ','
        << (s.valid ? 1 : 0) << '\n';
  }
}

void write_dispersion_csv(const std::vector<RunMetrics>& runs, const std::string& path) {
  std::ofstream out(path);
  out << "c,bias,success_count,dispersion_area\n";
  for (const auto& r : runs)
    out << fmt17(r.c_value) << ',' << sketch_bias_name(r.bias) << ','
        << r.success_count << ',' << fmt17(r.dispersion_area) << '\n';
}

std::vector<RunMetrics> read_dispersion_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dispersion CSV '" + path + "'");
  std::vector<RunMetrics> runs;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string c, bias, count, area;
    std::getline(ss, c, ',');
    std::getline(ss, bias, ',');
    std::getline(ss, count, ',');
    std::getline(ss, area, ',');
    RunMetrics m;
    m.c_value = std::stod(c);
    m.bias = sketch_bias_from_name(bias);
    m.success_count = static_cast<std::size_t>(std::stoull(count));
    m.dispersion_area = std::stod(area);
    runs.push_back(m);
  }
  return runs;
}

std::string aggregate_to_text(const std::vector<AggregateRow>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %6s %18s %10s %14s\n", "bias", "runs",
                "successes(mean)", "(std)", "unique(mean)");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %6zu %18.2f %10.2f %14.2f\n",
                  sketch_bias_name(r.bias), r.runs, r.mean_successes, r.std_successes,
                  r.mean_unique);
    out << buf;
  }
  return out.str();
}

void write_aggregate(const std::vector<AggregateRow>& rows, const std::string& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(fs::path(dir) / "aggregate.csv");
    out << "bias,runs,mean_successes,std_successes,mean_unique\n";
    for (const auto& r : rows)
      out << sketch_bias_name(r.bias) << ',' << r.runs << ','
          << fmt17(r.mean_successes) << ',' << fmt17(r.std_successes) << ','
          << fmt17(r.mean_unique) << '\n';
  }
  std::ofstream txt(fs::path(dir) / "aggregate.txt");
  txt << aggregate_to_text(rows);
}

MatrixResult run_matrix(const ExperimentConfig& cfg) {
  ExperimentConfig effective = cfg;
  if (const char* env = std::getenv("GAD_OUT_DIR")) effective.out_dir = env;
  int workers = effective.workers;
  if (workers <= 0) {
    workers = 1;
    if (const char* env = std::getenv("GAD_WORKERS")) workers = std::max(1, std::atoi(env));
  }

  struct Task {
    SketchBias bias;
    double c;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& bias_name : effective.bias_levels)
    for (double c : effective.sweep())
      for (std::uint64_t seed : effective.seeds)
        tasks.push_back({sketch_bias_from_name(bias_name), c, seed});

  fs::create_directories(effective.out_dir);

  MatrixResult result;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      try {
        const RunReport report = run_single(effective, task.bias, task.c, task.seed);
        write_report(report, effective.out_dir);
        std::lock_guard<std::mutex> lock(mu);
        result.runs.push_back(report.metrics);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(mu);
        result.failures.push_back(run_stem(task.bias, task.c, task.seed) + ": " + e.what());
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) threads.emplace_back(worker);
  for (auto& t : threads) t.join();

  // Stable report order regardless of worker scheduling.
  std::sort(result.runs.begin(), result.runs.end(), [](const RunMetrics& a, const RunMetrics& b) {
    if (a.bias != b.bias) return a.bias < b.bias;
    if (a.c_value != b.c_value) return a.c_value < b.c_value;
    return a.seed < b.seed;
  });

  if (!result.runs.empty()) {
    result.aggregate_rows = aggregate(result.runs);
    write_aggregate(result.aggregate_rows, effective.out_dir);
    write_dispersion_csv(result.runs, (fs::path(effective.out_dir) / "dispersion.csv").string());
  }
  if (!result.failures.empty()) {
    std::ofstream out(fs::path(effective.out_dir) / "failures.txt");
    for (const auto& f : result.failures) out << f << "\n";
  }
  return result;
}

}  // namespace gad
