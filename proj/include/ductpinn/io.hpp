#pragma once

// CSV and checkpoint files. Numbers are written with 17 significant digits so
// doubles round-trip exactly and reruns are byte-identical.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ductpinn/errors.hpp"
#include "ductpinn/field.hpp"
#include "ductpinn/network.hpp"
#include "ductpinn/pinn.hpp"

namespace ductpinn {

inline constexpr const char* kFieldCsvHeader = "x [m],p_re [Pa],p_im [Pa],u_re [m/s],u_im [m/s]";

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Writes `content` to `path` through a temporary file and a rename, so a
/// reader never sees a half-written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create directory " + path.parent_path().string());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "write failed: " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot rename " + tmp.string() + " -> " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Field as CSV. Velocity columns are left empty when the field has none.
inline std::string field_to_csv(const FieldSolution& f) {
  f.validate();
  std::string s = kFieldCsvHeader;
  s += '\n';
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += format_number(f.x[i]);
    s += ',' + format_number(f.pressure[i].real());
    s += ',' + format_number(f.pressure[i].imag());
    if (f.has_velocity()) {
      s += ',' + format_number(f.velocity[i].real());
      s += ',' + format_number(f.velocity[i].imag());
    } else {
      s += ",,";
    }
    s += '\n';
  }
  return s;
}

inline void write_field_csv(const std::filesystem::path& path, const FieldSolution& f) {
  write_file_atomic(path, field_to_csv(f));
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::Io, "bad number '" + s + "' on line " + std::to_string(line));
  }
}

}  // namespace detail

inline FieldSolution field_from_csv(const std::string& text, Provenance provenance) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("x", 0) != 0)
    throw Error(ErrorCode::Io, "field CSV is missing its header");
  FieldSolution f;
  f.provenance = provenance;
  std::size_t lineno = 1;
  bool velocity = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 3 && cells.size() != 5)
      throw Error(ErrorCode::Io, "expected 3 or 5 columns on line " + std::to_string(lineno));
    f.x.push_back(detail::parse_number(cells[0], lineno));
    f.pressure.emplace_back(detail::parse_number(cells[1], lineno), detail::parse_number(cells[2], lineno));
    const bool has_u = cells.size() == 5 && !cells[3].empty() && !cells[4].empty();
    if (has_u) {
      f.velocity.emplace_back(detail::parse_number(cells[3], lineno),
                              detail::parse_number(cells[4], lineno));
    }
    velocity = velocity && has_u;
  }
  if (!velocity) f.velocity.clear();
  try {
    f.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::Io, std::string("invalid field CSV: ") + e.what());
  }
  return f;
}

inline FieldSolution read_field_csv(const std::filesystem::path& path, Provenance provenance) {
  return field_from_csv(read_file(path), provenance);
}

/// Two-column real series with a header, e.g. |p|^2 along the duct.
inline std::string series_to_csv(const std::string& header, std::span<const double> x,
                                 std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::InvalidArgument, "series length mismatch");
  std::string s = header + '\n';
  for (std::size_t i = 0; i < x.size(); ++i) s += format_number(x[i]) + ',' + format_number(y[i]) + '\n';
  return s;
}

// ---------------------------------------------------------------------------
// Network checkpoints

inline constexpr const char* kCheckpointMagic = "# ductpinn-checkpoint v1";

inline std::string checkpoint_to_text(const NetworkParameters& p, std::uint64_t seed) {
  const auto& a = p.architecture();
  std::string s = kCheckpointMagic;
  s += "\nlayers " + std::to_string(a.layers);
  s += "\nwidth " + std::to_string(a.width);
  s += "\nactivation " + std::string(to_string(a.activation));
  s += "\ninput_scale " + format_number(a.input_scale);
  s += "\nseed " + std::to_string(seed);
  s += "\ncount " + std::to_string(p.size()) + '\n';
  for (Eigen::Index i = 0; i < p.size(); ++i) s += format_number(p.values()[i]) + '\n';
  return s;
}

inline NetworkParameters checkpoint_from_text(const std::string& text, std::uint64_t* seed = nullptr) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCheckpointMagic)
    throw Error(ErrorCode::Io, "not a ductpinn checkpoint");
  NetworkArchitecture a;
  std::string key, activation;
  std::uint64_t s = 0;
  long long count = -1;
  in >> key >> a.layers >> key >> a.width >> key >> activation >> key >> a.input_scale >> key >> s >>
      key >> count;
  if (!in || count < 0) throw Error(ErrorCode::Io, "checkpoint header is malformed");
  a.activation = parse_activation(activation);
  if (static_cast<std::size_t>(count) != a.parameter_count())
    throw Error(ErrorCode::Io, "checkpoint parameter count does not match its architecture");
  Eigen::VectorXd v(count);
  for (long long i = 0; i < count; ++i) {
    std::string tok;
    if (!(in >> tok)) throw Error(ErrorCode::Io, "checkpoint is truncated");
    v[i] = detail::parse_number(tok, static_cast<std::size_t>(i) + 8);
  }
  if (seed) *seed = s;
  return NetworkParameters(a, std::move(v));
}

inline void write_checkpoint(const std::filesystem::path& path, const NetworkParameters& p,
                             std::uint64_t seed) {
  write_file_atomic(path, checkpoint_to_text(p, seed));
}

inline NetworkParameters read_checkpoint(const std::filesystem::path& path, std::uint64_t* seed = nullptr) {
  return checkpoint_from_text(read_file(path), seed);
}

// ---------------------------------------------------------------------------
// Training reports

inline nlohmann::json report_to_json(const TrainingReport& r) {
  return {{"final_loss", r.final_loss},
          {"final_loss_real", r.final_loss_real},
          {"final_loss_imag", r.final_loss_imag},
          {"gradient_norm", r.gradient_norm},
          {"iterations", r.iterations},
          {"evaluations", r.evaluations},
          {"termination", std::string(to_string(r.termination))},
          {"wall_seconds", r.wall_seconds},
          {"seed", r.seed}};
}

inline std::string report_line(const TrainingReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "loss %.3e (re %.3e, im %.3e) |g|max %.2e after %d iterations, %s, %.1f s",
                r.final_loss, r.final_loss_real, r.final_loss_imag, r.gradient_norm, r.iterations,
                std::string(to_string(r.termination)).c_str(), r.wall_seconds);
  return buf;
}

}  // namespace ductpinn
