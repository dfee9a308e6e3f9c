#include "gad/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gad {

std::vector<double> default_c_sweep() {
  std::vector<double> c;
  for (int i = 0; i <= 20; ++i) c.push_back(0.005 * i);        // 0 .. 0.1
  for (int i = 11; i <= 20; ++i) c.push_back(0.01 * i);        // 0.11 .. 0.2
  return c;
}

std::vector<double> ExperimentConfig::sweep() const {
  return c_values.empty() ? default_c_sweep() : c_values;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("config: key '" + key + "' has a malformed numeric value '" +
                             value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double v = parse_number(key, value);
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v)
    throw std::runtime_error("config: key '" + key + "' must be an integer");
  return i;
}

void apply(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "target.name") cfg.target.name = value;
  else if (key.rfind("target.", 0) == 0)
    cfg.target.params[key.substr(7)] = parse_number(key, value);
  else if (key == "demos.m") cfg.demo_count = parse_int(key, value);
  else if (key == "sketch.size") cfg.sketch_size = parse_int(key, value);
  else if (key == "sampler.iterations") cfg.iterations = parse_int(key, value);
  else if (key == "sampler.burn_in") cfg.burn_in = parse_int(key, value);
  else if (key == "sampler.gamma") cfg.gamma = parse_number(key, value);
  else if (key == "sampler.nu") cfg.nu = parse_number(key, value);
  else if (key == "sampler.n") cfg.subsample_n = parse_int(key, value);
  else if (key == "sampler.p_check") cfg.p_check = parse_number(key, value);
  else if (key == "sampler.omega") cfg.omega = parse_number(key, value);
  else if (key == "sampler.acceptance_mode") cfg.acceptance_mode = value;
  else if (key == "sampler.volume_mode") cfg.volume_mode = value;
  else if (key == "kernel.sigma") cfg.kernel_sigma = parse_number(key, value);
  else if (key == "kernel.ell") cfg.kernel_ell = parse_number(key, value);
  else if (key == "kernel.c") cfg.kernel_c = parse_number(key, value);
  else if (key == "rw.pos_sigma") cfg.rw_pos_sigma = parse_number(key, value);
  else if (key == "rw.kappa") cfg.rw_kappa = parse_number(key, value);
  else if (key == "bias.levels") cfg.bias_levels = split_list(value);
  else if (key == "sweep.c_values") {
    cfg.c_values.clear();
    for (const auto& item : split_list(value)) cfg.c_values.push_back(parse_number(key, item));
  } else if (key == "sweep.increment") {
    const double step = parse_number(key, value);
    if (!(step > 0.0)) throw std::runtime_error("config: 'sweep.increment' must be > 0");
    cfg.c_values.clear();
    for (double c = 0.0; c <= 0.2 + 1e-12; c += step) cfg.c_values.push_back(c);
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const auto& item : split_list(value))
      cfg.seeds.push_back(static_cast<std::uint64_t>(parse_number(key, item)));
  } else if (key == "out") cfg.out_dir = value;
  else if (key == "workers") cfg.workers = parse_int(key, value);
  else
    throw std::runtime_error("config: unknown key '" + key + "'");
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: line " + std::to_string(lineno) +
                               " is not of the form key = value");
    apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {
std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace

std::string config_to_string(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "target.name = " << cfg.target.name << "\n";
  for (const auto& [k, v] : cfg.target.params) out << "target." << k << " = " << num(v) << "\n";
  out << "demos.m = " << cfg.demo_count << "\n"
      << "sketch.size = " << cfg.sketch_size << "\n"
      << "sampler.iterations = " << cfg.iterations << "\n"
      << "sampler.burn_in = " << cfg.burn_in << "\n"
      << "sampler.gamma = " << num(cfg.gamma) << "\n"
      << "sampler.nu = " << num(cfg.nu) << "\n"
      << "sampler.n = " << cfg.subsample_n << "\n"
      << "sampler.p_check = " << num(cfg.p_check) << "\n"
      << "sampler.omega = " << num(cfg.omega) << "\n"
      << "sampler.acceptance_mode = " << cfg.acceptance_mode << "\n"
      << "sampler.volume_mode = " << cfg.volume_mode << "\n"
      << "kernel.sigma = " << num(cfg.kernel_sigma) << "\n"
      << "kernel.ell = " << num(cfg.kernel_ell) << "\n"
      << "kernel.c = " << num(cfg.kernel_c) << "\n"
      << "rw.pos_sigma = " << num(cfg.rw_pos_sigma) << "\n"
      << "rw.kappa = " << num(cfg.rw_kappa) << "\n";
  out << "bias.levels = ";
  for (std::size_t i = 0; i < cfg.bias_levels.size(); ++i)
    out << (i ? "," : "") << cfg.bias_levels[i];
  out << "\nsweep.c_values = ";
  const auto sweep = cfg.sweep();
  for (std::size_t i = 0; i < sweep.size(); ++i) out << (i ? "," : "") << num(sweep[i]);
  out << "\nseeds = ";
  for (std::size_t i = 0; i < cfg.seeds.size(); ++i) out << (i ? "," : "") << cfg.seeds[i];
  out << "\nout = " << cfg.out_dir << "\n"
      << "workers = " << cfg.workers << "\n";
  return out.str();
}

}  // namespace gad
