// ductpinn: command-line driver for the duct acoustics PINN studies.
//
//   ductpinn sweep          --config run.cfg --profile linear --freq 500,1000
//   ductpinn gradient-study --freq 500
//   ductpinn oracle-only    --profile sinusoidal
//   ductpinn check
//
// Exit codes: 0 ok, 1 invalid configuration, 2 a case failed, 3 I/O error.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ductpinn/checks.hpp"
#include "ductpinn/config.hpp"
#include "ductpinn/io.hpp"
#include "ductpinn/study.hpp"

namespace {

struct Overrides {
  std::string config;
  std::string profile;
  std::string freq;
  std::string velocity_method;
  std::string out;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--profile", o.profile, "linear | sinusoidal | constant (comma list allowed)");
  cmd->add_option("--freq", o.freq, "frequencies in Hz, comma separated");
  cmd->add_option("--seed", o.seed, "network initialisation seed")->each([&o](const std::string&) {
    o.has_seed = true;
  });
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--velocity-method", o.velocity_method, "direct | transfer | both");
}

ductpinn::RunConfig load(const Overrides& o) {
  using namespace ductpinn;
  RunConfig cfg;
  if (!o.config.empty()) cfg = parse_config(read_file(o.config));
  if (!o.profile.empty()) cfg.profiles = parse_profiles(o.profile);
  if (!o.freq.empty()) cfg.frequencies = parse_frequencies(o.freq);
  if (o.has_seed) cfg.seed = o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.velocity_method.empty()) cfg.velocity_method = parse_velocity_choice(o.velocity_method);
  cfg.validate();
  return cfg;
}

int report_failures(const std::vector<std::string>& failures) {
  for (const auto& f : failures) std::cerr << "failed: " << f << '\n';
  return failures.empty() ? ductpinn::kExitOk : ductpinn::kExitCaseFailed;
}

int run_check() {
  int failed = 0;
  for (const auto& r : ductpinn::run_checks()) {
    std::printf("%s  %-55s measured %.3e (limit %.1e)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.measured, r.limit);
    failed += r.passed ? 0 : 1;
  }
  return failed ? ductpinn::kExitCaseFailed : ductpinn::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed neural network solver for acoustics in ducts with mean flow and temperature gradients"};
  app.require_subcommand(1);
  Overrides o;
  auto* sweep = app.add_subcommand("sweep", "train and evaluate every (profile, frequency) case");
  auto* grad = app.add_subcommand("gradient-study", "uniform vs temperature-gradient amplitude study");
  auto* oracle = app.add_subcommand("oracle-only", "write reference solutions only");
  auto* check = app.add_subcommand("check", "run the invariant checks");
  for (auto* cmd : {sweep, grad, oracle}) add_common(cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ductpinn::kExitValidation;
  }

  using ductpinn::Error;
  using ductpinn::ErrorCode;
  try {
    if (check->parsed()) return run_check();
    const ductpinn::RunConfig cfg = load(o);
    if (sweep->parsed()) return report_failures(ductpinn::run_sweep(cfg).failures);
    if (grad->parsed()) {
      const auto r = ductpinn::run_gradient_study(cfg);
      for (const auto& row : r.rows)
        std::printf("%g Hz %s: uniform dp (%.3e, %.3e), gradient peaks %s, uniform spread %.2e\n",
                    row.frequency, std::string(to_string(row.profile)).c_str(), row.dp_uniform.real,
                    row.dp_uniform.imag, row.gradient_peaks.increasing ? "increasing" : "not increasing",
                    row.uniform_peaks.relative_spread);
      return report_failures(r.failures);
    }
    if (oracle->parsed()) return report_failures(ductpinn::run_oracle_only(cfg).failures);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Io ? ductpinn::kExitIo : ductpinn::kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ductpinn::kExitIo;
  }
  return ductpinn::kExitOk;
}
