#pragma once

// End-to-end studies driven by a RunConfig: frequency sweeps with error
// tables, the uniform-vs-gradient amplitude study and oracle-only runs.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ductpinn/config.hpp"
#include "ductpinn/io.hpp"
#include "ductpinn/oracle.hpp"
#include "ductpinn/pinn.hpp"
#include "ductpinn/velocity.hpp"

namespace ductpinn {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitCaseFailed = 2, kExitIo = 3 };

using LogSink = std::function<void(const std::string&)>;

inline LogSink stderr_log() {
  return [](const std::string& s) { std::cerr << s << '\n'; };
}

inline std::string case_tag(ProfileKind kind, double frequency) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%gHz", std::string(to_string(kind)).c_str(), frequency);
  return buf;
}

/// One row of the error table. Missing entries (velocity method not run)
/// stay empty.
struct ErrorRow {
  ProfileKind profile = ProfileKind::linear;
  double frequency = 0.0;
  ChannelErrors dp;
  std::optional<ChannelErrors> du_direct;
  std::optional<ChannelErrors> du_transfer;
  std::optional<ChannelErrors> du_cross;  // transfer vs direct
  double final_loss = 0.0;
  int iterations = 0;
};

inline constexpr const char* kErrorTableHeader =
    "profile,frequency [Hz],dp_re,dp_im,du_direct_re,du_direct_im,du_transfer_re,du_transfer_im,"
    "du_cross_re,du_cross_im,final_loss,iterations";

inline std::string error_table_csv(std::vector<ErrorRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const ErrorRow& a, const ErrorRow& b) {
    if (a.profile != b.profile) return a.profile < b.profile;
    return a.frequency < b.frequency;
  });
  auto pair = [](const std::optional<ChannelErrors>& e) {
    return e ? format_number(e->real) + ',' + format_number(e->imag) : std::string(",");
  };
  std::string s = std::string(kErrorTableHeader) + '\n';
  for (const auto& r : rows) {
    s += std::string(to_string(r.profile)) + ',' + format_number(r.frequency) + ',';
    s += format_number(r.dp.real) + ',' + format_number(r.dp.imag) + ',';
    s += pair(r.du_direct) + ',' + pair(r.du_transfer) + ',' + pair(r.du_cross) + ',';
    s += format_number(r.final_loss) + ',' + std::to_string(r.iterations) + '\n';
  }
  return s;
}

struct CaseOutcome {
  ErrorRow row;
  TrainedNetwork pressure;
  FieldSolution pinn;    // PINN pressure, with direct velocity when computed
  FieldSolution oracle;  // reference pressure and velocity
  std::optional<TrainedNetwork> velocity;
  std::optional<FieldSolution> transfer;  // PINN pressure with transfer velocity
};

/// Trains and evaluates one (profile, frequency) case. No files are written.
inline CaseOutcome run_case(const RunConfig& cfg, ProfileKind kind, double frequency,
                            const LogSink& log = {}) {
  const FrequencyCase c = cfg.make_case(kind, frequency);
  const auto grid = linspace(c.length(), cfg.test_points);
  CaseOutcome out;
  out.row.profile = kind;
  out.row.frequency = frequency;

  const CollocationSet colloc = make_collocation(cfg.collocation, c.length(), cfg.collocation_seed);
  out.pressure = train(c, cfg.architecture, colloc, cfg.pressure_training());
  if (log) log(case_tag(kind, frequency) + " pressure: " + report_line(out.pressure.report));
  out.row.final_loss = out.pressure.report.final_loss;
  out.row.iterations = out.pressure.report.iterations;

  out.oracle = oracle_velocity(solve_bvp_shooting(c, cfg.oracle_steps, cfg.test_points), c);
  out.pinn = pinn_field(out.pressure.params, c, grid);
  out.row.dp = relative_error(out.pinn, out.oracle);

  const bool direct = cfg.velocity_method != VelocityChoice::transfer;
  const bool transfer = cfg.velocity_method != VelocityChoice::direct;
  VelocityField vd;
  if (direct || transfer) vd = velocity_direct(out.pressure.params, c, grid);
  if (direct) {
    attach_velocity(out.pinn, vd);
    out.row.du_direct = relative_error(std::span<const Complex>(vd.values),
                                       std::span<const Complex>(out.oracle.velocity));
  }
  if (transfer) {
    const CollocationSet colloc_u =
        make_collocation(cfg.velocity_collocation, c.length(), cfg.collocation_seed + 1);
    const VelocityProblem problem(out.pressure.params, c, colloc_u);
    out.velocity = train_velocity_transfer(
        problem, init_he(cfg.velocity_architecture, cfg.velocity_training().seed), cfg.velocity_training());
    if (log) log(case_tag(kind, frequency) + " velocity: " + report_line(out.velocity->report));
    const VelocityField vt = problem.evaluate(out.velocity->params, grid);
    FieldSolution t = out.pinn;
    t.velocity = vt.values;
    out.transfer = std::move(t);
    out.row.du_transfer = relative_error(std::span<const Complex>(vt.values),
                                         std::span<const Complex>(out.oracle.velocity));
    out.row.du_cross = relative_error(std::span<const Complex>(vt.values),
                                      std::span<const Complex>(vd.values));
  }
  return out;
}

inline nlohmann::json row_to_json(const ErrorRow& r) {
  auto ch = [](const ChannelErrors& e) { return nlohmann::json{{"real", e.real}, {"imag", e.imag}}; };
  nlohmann::json j{{"profile", std::string(to_string(r.profile))},
                   {"frequency", r.frequency},
                   {"dp", ch(r.dp)}};
  if (r.du_direct) j["du_direct"] = ch(*r.du_direct);
  if (r.du_transfer) j["du_transfer"] = ch(*r.du_transfer);
  if (r.du_cross) j["du_cross"] = ch(*r.du_cross);
  return j;
}

struct SweepResult {
  std::vector<ErrorRow> rows;
  std::vector<std::string> failures;
  int exit_code() const { return failures.empty() ? kExitOk : kExitCaseFailed; }
};

/// Per case writes <tag>_pinn.csv, <tag>_oracle.csv, <tag>_transfer.csv (when
/// transfer is run), <tag>_pressure.ckpt and <tag>_report.json; then
/// error_table.csv sorted by (profile, frequency). Failing cases are logged
/// and skipped. I/O errors propagate.
inline SweepResult run_sweep(const RunConfig& cfg, const LogSink& log = stderr_log()) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path dir = cfg.output_dir;
  write_file_atomic(dir / "config.txt", config_to_text(cfg));
  SweepResult result;
  for (ProfileKind kind : cfg.profiles) {
    for (double f : cfg.frequencies) {
      const std::string tag = case_tag(kind, f);
      CaseOutcome out;
      try {
        out = run_case(cfg, kind, f, log);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        result.failures.push_back(tag + ": " + std::string(to_string(e.code())) + ": " + e.what());
        if (log) log(tag + " FAILED: " + e.what());
        continue;
      }
      write_field_csv(dir / (tag + "_pinn.csv"), out.pinn);
      write_field_csv(dir / (tag + "_oracle.csv"), out.oracle);
      if (out.transfer) write_field_csv(dir / (tag + "_transfer.csv"), *out.transfer);
      write_checkpoint(dir / (tag + "_pressure.ckpt"), out.pressure.params, out.pressure.report.seed);
      nlohmann::json rep = row_to_json(out.row);
      rep["pressure_training"] = report_to_json(out.pressure.report);
      if (out.velocity) rep["velocity_training"] = report_to_json(out.velocity->report);
      write_file_atomic(dir / (tag + "_report.json"), rep.dump(2) + '\n');
      if (log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s dp = (%.3e, %.3e)", tag.c_str(), out.row.dp.real, out.row.dp.imag);
        log(buf);
      }
      result.rows.push_back(out.row);
    }
  }
  write_file_atomic(dir / "error_table.csv", error_table_csv(result.rows));
  return result;
}

// ---------------------------------------------------------------------------
// Temperature-gradient study

struct GradientStudyRow {
  double frequency = 0.0;
  ProfileKind profile = ProfileKind::linear;
  ChannelErrors dp_uniform;   // uniform PINN vs analytic
  ChannelErrors dp_gradient;  // gradient PINN vs shooting
  PeakEnvelope uniform_peaks;
  PeakEnvelope gradient_peaks;
};

inline constexpr const char* kGradientSummaryHeader =
    "frequency [Hz],profile,dp_uniform_re,dp_uniform_im,dp_gradient_re,dp_gradient_im,"
    "uniform_peak_count,uniform_peak_spread,gradient_peak_count,gradient_first_peak [Pa^2],"
    "gradient_last_peak [Pa^2],gradient_peaks_increasing";

inline std::string gradient_summary_csv(const std::vector<GradientStudyRow>& rows) {
  std::string s = std::string(kGradientSummaryHeader) + '\n';
  for (const auto& r : rows) {
    s += format_number(r.frequency) + ',' + std::string(to_string(r.profile)) + ',';
    s += format_number(r.dp_uniform.real) + ',' + format_number(r.dp_uniform.imag) + ',';
    s += format_number(r.dp_gradient.real) + ',' + format_number(r.dp_gradient.imag) + ',';
    s += std::to_string(r.uniform_peaks.values.size()) + ',' + format_number(r.uniform_peaks.relative_spread) + ',';
    s += std::to_string(r.gradient_peaks.values.size()) + ',';
    s += (r.gradient_peaks.values.empty() ? std::string() : format_number(r.gradient_peaks.values.front())) + ',';
    s += (r.gradient_peaks.values.empty() ? std::string() : format_number(r.gradient_peaks.values.back())) + ',';
    s += std::string(r.gradient_peaks.increasing ? "true" : "false") + '\n';
  }
  return s;
}

inline std::string amplitude_csv(const FieldSolution& pinn, const FieldSolution& reference) {
  detail::check_same_grid(pinn.x, reference.x);
  const auto a = amplitude(pinn);
  const auto b = amplitude(reference);
  std::string s = "x [m],amplitude_pinn [Pa^2],amplitude_reference [Pa^2]\n";
  for (std::size_t i = 0; i < a.size(); ++i)
    s += format_number(pinn.x[i]) + ',' + format_number(a[i]) + ',' + format_number(b[i]) + '\n';
  return s;
}

struct GradientStudyResult {
  std::vector<GradientStudyRow> rows;
  std::vector<std::string> failures;
  int exit_code() const { return failures.empty() ? kExitOk : kExitCaseFailed; }
};

/// For every frequency and every gradient profile in the config: train on the
/// uniform medium (Ts/2) and on the gradient medium, compare against the
/// analytic and shooting references and write paired amplitude CSVs
/// gradient_<f>Hz_uniform_amplitude.csv / gradient_<f>Hz_<profile>_amplitude.csv
/// plus gradient_summary.csv.
inline GradientStudyResult run_gradient_study(const RunConfig& cfg, const LogSink& log = stderr_log()) {
  cfg.validate();
  namespace fs = std::filesystem;
  const fs::path dir = cfg.output_dir;
  GradientStudyResult result;
  std::vector<ProfileKind> gradients;
  for (ProfileKind k : cfg.profiles)
    if (k != ProfileKind::constant) gradients.push_back(k);
  if (gradients.empty()) gradients.push_back(ProfileKind::linear);
  const CollocationSet colloc = make_collocation(cfg.collocation, cfg.length, cfg.collocation_seed);

  for (double f : cfg.frequencies) {
    char ftag[32];
    std::snprintf(ftag, sizeof ftag, "%gHz", f);
    try {
      const FrequencyCase uc = cfg.make_case(ProfileKind::constant, f);
      const auto grid = linspace(uc.length(), cfg.test_points);
      const TrainedNetwork un = train(uc, cfg.architecture, colloc, cfg.pressure_training());
      if (log) log(std::string("uniform ") + ftag + ": " + report_line(un.report));
      const FieldSolution upinn = pinn_field(un.params, uc, grid);
      const FieldSolution uref = analytic_uniform(uc, grid);
      write_file_atomic(dir / (std::string("gradient_") + ftag + "_uniform_amplitude.csv"),
                        amplitude_csv(upinn, uref));
      const ChannelErrors du = relative_error(upinn, uref);
      const PeakEnvelope upeaks = peak_envelope(amplitude(upinn));

      for (ProfileKind kind : gradients) {
        const FrequencyCase gc = cfg.make_case(kind, f);
        const TrainedNetwork gn = train(gc, cfg.architecture, colloc, cfg.pressure_training());
        if (log) log(case_tag(kind, f) + ": " + report_line(gn.report));
        const FieldSolution gpinn = pinn_field(gn.params, gc, grid);
        const FieldSolution gref = solve_bvp_shooting(gc, cfg.oracle_steps, cfg.test_points);
        write_file_atomic(dir / ("gradient_" + std::string(ftag) + "_" + std::string(to_string(kind)) +
                                 "_amplitude.csv"),
                          amplitude_csv(gpinn, gref));
        GradientStudyRow row;
        row.frequency = f;
        row.profile = kind;
        row.dp_uniform = du;
        row.dp_gradient = relative_error(gpinn, gref);
        row.uniform_peaks = upeaks;
        row.gradient_peaks = peak_envelope(amplitude(gpinn));
        result.rows.push_back(row);
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Io) throw;
      result.failures.push_back(std::string(ftag) + ": " + e.what());
      if (log) log(std::string(ftag) + " FAILED: " + e.what());
    }
  }
  write_file_atomic(dir / "gradient_summary.csv", gradient_summary_csv(result.rows));
  return result;
}

// ---------------------------------------------------------------------------
// Oracle only

/// Writes <tag>_oracle.csv for every case (shooting pressure and velocity);
/// constant profiles additionally get <tag>_analytic.csv.
inline SweepResult run_oracle_only(const RunConfig& cfg, const LogSink& log = stderr_log()) {
  cfg.validate();
  const std::filesystem::path dir = cfg.output_dir;
  SweepResult result;
  for (ProfileKind kind : cfg.profiles) {
    for (double f : cfg.frequencies) {
      const std::string tag = case_tag(kind, f);
      try {
        const FrequencyCase c = cfg.make_case(kind, f);
        const FieldSolution o = oracle_velocity(solve_bvp_shooting(c, cfg.oracle_steps, cfg.test_points), c);
        write_field_csv(dir / (tag + "_oracle.csv"), o);
        if (kind == ProfileKind::constant) {
          const FieldSolution a = analytic_uniform(c, o.x);
          write_field_csv(dir / (tag + "_analytic.csv"), a);
          const auto e = relative_error(o, a);
          if (log) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "%s shooting vs analytic: (%.3e, %.3e)", tag.c_str(), e.real, e.imag);
            log(buf);
          }
        } else if (log) {
          log(tag + " written");
        }
      } catch (const Error& e) {
        if (e.code() == ErrorCode::Io) throw;
        result.failures.push_back(tag + ": " + e.what());
        if (log) log(tag + " FAILED: " + e.what());
      }
    }
  }
  return result;
}

}  // namespace ductpinn
