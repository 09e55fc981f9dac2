#pragma once

// Run configuration: a plain key = value file.
//
//   # comment
//   config_version = 1
//   profiles = linear, sinusoidal
//   frequencies = 500, 1000, 1500, 2000
//
// Unknown keys are rejected. Every key is optional; missing keys keep the
// defaults below, which describe the full-size study.

#include <cstdint>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ductpinn/errors.hpp"
#include "ductpinn/medium.hpp"
#include "ductpinn/network.hpp"
#include "ductpinn/pinn.hpp"

namespace ductpinn {

inline constexpr int kConfigVersion = 1;

enum class VelocityChoice { direct, transfer, both };

inline std::string_view to_string(VelocityChoice v) {
  switch (v) {
    case VelocityChoice::direct: return "direct";
    case VelocityChoice::transfer: return "transfer";
    case VelocityChoice::both: return "both";
  }
  return "unknown";
}

inline VelocityChoice parse_velocity_choice(std::string_view s) {
  if (s == "direct") return VelocityChoice::direct;
  if (s == "transfer") return VelocityChoice::transfer;
  if (s == "both") return VelocityChoice::both;
  throw Error(ErrorCode::InvalidArgument, "unknown velocity method '" + std::string(s) + "'");
}

struct RunConfig {
  int config_version = kConfigVersion;

  std::vector<ProfileKind> profiles{ProfileKind::linear, ProfileKind::sinusoidal};
  std::vector<double> frequencies{500.0, 1000.0, 1500.0, 2000.0};

  // medium
  double inlet_temperature = 1600.0;   // T0 [K]
  double outlet_temperature = 800.0;   // TL [K]
  double length = 1.0;                 // L [m]
  InletConditions inlet = InletConditions::table1();

  BoundaryData boundary;

  // pressure network
  NetworkArchitecture architecture;  // m = 7, n = 90
  std::size_t collocation = 10000;   // N
  std::size_t test_points = 500;     // N_t
  std::uint64_t seed = 1;            // network initialisation
  std::uint64_t collocation_seed = 2;
  TrainingConfig training;

  // velocity
  VelocityChoice velocity_method = VelocityChoice::direct;
  NetworkArchitecture velocity_architecture;
  std::size_t velocity_collocation = 2000;  // N_u
  int velocity_max_iterations = 5000;

  std::size_t oracle_steps = 20000;
  std::filesystem::path output_dir = "out";

  TemperatureProfile profile(ProfileKind kind) const {
    return {kind, inlet_temperature, outlet_temperature, length};
  }

  FrequencyCase make_case(ProfileKind kind, double frequency) const {
    FrequencyCase c;
    c.frequency = frequency;
    c.profile = profile(kind);
    c.inlet = inlet;
    c.inlet.temperature = inlet_temperature;
    c.boundary = boundary;
    // the uniform medium carries the inlet Mach number at Ts/2
    return kind == ProfileKind::constant ? uniform_companion(c) : c;
  }

  TrainingConfig pressure_training() const {
    TrainingConfig t = training;
    t.seed = seed;
    return t;
  }

  TrainingConfig velocity_training() const {
    TrainingConfig t = training;
    t.seed = seed + 1;
    t.max_iterations = velocity_max_iterations;
    return t;
  }

  void validate() const {
    if (config_version != kConfigVersion)
      throw Error(ErrorCode::InvalidArgument,
                  "unsupported config_version " + std::to_string(config_version));
    if (profiles.empty()) throw Error(ErrorCode::InvalidArgument, "no profiles selected");
    if (frequencies.empty()) throw Error(ErrorCode::InvalidArgument, "no frequencies selected");
    for (double f : frequencies)
      if (!(f > 0.0) || !std::isfinite(f))
        throw Error(ErrorCode::InvalidArgument, "frequencies must be positive");
    for (ProfileKind k : profiles) {
      const FrequencyCase c = make_case(k, frequencies.front());
      c.validate();
      // probe the mean flow so sonic or complex roots surface before training
      for (int i = 0; i <= 64; ++i) (void)c.at(length * i / 64.0);
    }
    architecture.validate();
    velocity_architecture.validate();
    if (collocation == 0 || velocity_collocation == 0)
      throw Error(ErrorCode::InvalidArgument, "collocation counts must be positive");
    if (test_points < 2) throw Error(ErrorCode::InvalidArgument, "test_points must be >= 2");
    if (oracle_steps == 0) throw Error(ErrorCode::InvalidArgument, "oracle_steps must be positive");
    if (velocity_max_iterations < 0)
      throw Error(ErrorCode::InvalidArgument, "velocity_max_iterations must be >= 0");
    training.validate();
    if (output_dir.empty()) throw Error(ErrorCode::InvalidArgument, "output_dir is empty");
  }
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, key + ": '" + v + "' is not a number");
}

inline long long to_integer(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(v, &used);
    if (used == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, key + ": '" + v + "' is not an integer");
}

inline std::size_t to_count(const std::string& key, const std::string& v) {
  const long long n = to_integer(key, v);
  if (n < 0) throw Error(ErrorCode::InvalidArgument, key + " must be non-negative");
  return static_cast<std::size_t>(n);
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    if (!v.empty() && v[0] != '-') {
      const unsigned long long n = std::stoull(v, &used);
      if (used == v.size()) return n;
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, key + ": '" + v + "' is not an unsigned integer");
}

}  // namespace detail

inline std::vector<double> parse_frequencies(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : detail::split_list(s)) out.push_back(detail::to_double("frequencies", item));
  return out;
}

inline std::vector<ProfileKind> parse_profiles(const std::string& s) {
  std::vector<ProfileKind> out;
  for (const auto& item : detail::split_list(s)) out.push_back(parse_profile_kind(item));
  return out;
}

/// Applies one key = value pair to `cfg`.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  const std::string& v = value;
  if (key == "config_version") cfg.config_version = static_cast<int>(to_integer(key, v));
  else if (key == "profiles") cfg.profiles = parse_profiles(v);
  else if (key == "frequencies") cfg.frequencies = parse_frequencies(v);
  else if (key == "inlet_temperature") cfg.inlet_temperature = to_double(key, v);
  else if (key == "outlet_temperature") cfg.outlet_temperature = to_double(key, v);
  else if (key == "length") cfg.length = to_double(key, v);
  else if (key == "inlet_pressure") cfg.inlet.pressure = to_double(key, v);
  else if (key == "inlet_mach") cfg.inlet.mach = to_double(key, v);
  else if (key == "gamma") cfg.inlet.gamma = to_double(key, v);
  else if (key == "gas_constant") cfg.inlet.gas_constant = to_double(key, v);
  else if (key == "p_inlet_re") cfg.boundary.inlet.real(to_double(key, v));
  else if (key == "p_inlet_im") cfg.boundary.inlet.imag(to_double(key, v));
  else if (key == "p_outlet_re") cfg.boundary.outlet.real(to_double(key, v));
  else if (key == "p_outlet_im") cfg.boundary.outlet.imag(to_double(key, v));
  else if (key == "layers") cfg.architecture.layers = static_cast<int>(to_integer(key, v));
  else if (key == "width") cfg.architecture.width = static_cast<int>(to_integer(key, v));
  else if (key == "activation") cfg.architecture.activation = parse_activation(v);
  else if (key == "input_scale") cfg.architecture.input_scale = to_double(key, v);
  else if (key == "collocation") cfg.collocation = to_count(key, v);
  else if (key == "test_points") cfg.test_points = to_count(key, v);
  else if (key == "seed") cfg.seed = to_u64(key, v);
  else if (key == "collocation_seed") cfg.collocation_seed = to_u64(key, v);
  else if (key == "max_iterations") cfg.training.max_iterations = static_cast<int>(to_integer(key, v));
  else if (key == "gradient_tolerance") cfg.training.gradient_tolerance = to_double(key, v);
  else if (key == "loss_tolerance") cfg.training.loss_tolerance = to_double(key, v);
  else if (key == "lbfgs_memory") cfg.training.lbfgs_memory = static_cast<int>(to_integer(key, v));
  else if (key == "wolfe_c1") cfg.training.wolfe_c1 = to_double(key, v);
  else if (key == "wolfe_c2") cfg.training.wolfe_c2 = to_double(key, v);
  else if (key == "chunk") cfg.training.chunk = to_count(key, v);
  else if (key == "velocity_method") cfg.velocity_method = parse_velocity_choice(v);
  else if (key == "velocity_layers") cfg.velocity_architecture.layers = static_cast<int>(to_integer(key, v));
  else if (key == "velocity_width") cfg.velocity_architecture.width = static_cast<int>(to_integer(key, v));
  else if (key == "velocity_collocation") cfg.velocity_collocation = to_count(key, v);
  else if (key == "velocity_max_iterations") cfg.velocity_max_iterations = static_cast<int>(to_integer(key, v));
  else if (key == "oracle_steps") cfg.oracle_steps = to_count(key, v);
  else if (key == "output_dir") cfg.output_dir = v;
  else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
}

inline RunConfig parse_config(const std::string& text, RunConfig cfg = {}) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

/// Serialises every key, so a written config reproduces the run exactly.
inline std::string config_to_text(const RunConfig& c) {
  std::ostringstream s;
  s.precision(17);
  auto list = [](const auto& xs, auto fmt) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + fmt(xs[i]);
    return out;
  };
  s << "config_version = " << c.config_version << '\n'
    << "profiles = " << list(c.profiles, [](ProfileKind k) { return std::string(to_string(k)); }) << '\n'
    << "frequencies = " << list(c.frequencies, [](double f) {
         std::ostringstream o;
         o.precision(17);
         o << f;
         return o.str();
       }) << '\n'
    << "inlet_temperature = " << c.inlet_temperature << '\n'
    << "outlet_temperature = " << c.outlet_temperature << '\n'
    << "length = " << c.length << '\n'
    << "inlet_pressure = " << c.inlet.pressure << '\n'
    << "inlet_mach = " << c.inlet.mach << '\n'
    << "gamma = " << c.inlet.gamma << '\n'
    << "gas_constant = " << c.inlet.gas_constant << '\n'
    << "p_inlet_re = " << c.boundary.inlet.real() << '\n'
    << "p_inlet_im = " << c.boundary.inlet.imag() << '\n'
    << "p_outlet_re = " << c.boundary.outlet.real() << '\n'
    << "p_outlet_im = " << c.boundary.outlet.imag() << '\n'
    << "layers = " << c.architecture.layers << '\n'
    << "width = " << c.architecture.width << '\n'
    << "activation = " << to_string(c.architecture.activation) << '\n'
    << "input_scale = " << c.architecture.input_scale << '\n'
    << "collocation = " << c.collocation << '\n'
    << "test_points = " << c.test_points << '\n'
    << "seed = " << c.seed << '\n'
    << "collocation_seed = " << c.collocation_seed << '\n'
    << "max_iterations = " << c.training.max_iterations << '\n'
    << "gradient_tolerance = " << c.training.gradient_tolerance << '\n'
    << "loss_tolerance = " << c.training.loss_tolerance << '\n'
    << "lbfgs_memory = " << c.training.lbfgs_memory << '\n'
    << "wolfe_c1 = " << c.training.wolfe_c1 << '\n'
    << "wolfe_c2 = " << c.training.wolfe_c2 << '\n'
    << "chunk = " << c.training.chunk << '\n'
    << "velocity_method = " << to_string(c.velocity_method) << '\n'
    << "velocity_layers = " << c.velocity_architecture.layers << '\n'
    << "velocity_width = " << c.velocity_architecture.width << '\n'
    << "velocity_collocation = " << c.velocity_collocation << '\n'
    << "velocity_max_iterations = " << c.velocity_max_iterations << '\n'
    << "oracle_steps = " << c.oracle_steps << '\n'
    << "output_dir = " << c.output_dir.string() << '\n';
  return s.str();
}

}  // namespace ductpinn
