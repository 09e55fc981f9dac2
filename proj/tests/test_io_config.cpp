#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "ductpinn/config.hpp"
#include "ductpinn/io.hpp"
#include "ductpinn/oracle.hpp"

using namespace ductpinn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ductpinn_io_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Csv, FieldRoundTripIsExact) {
  const FrequencyCase c{1000, TemperatureProfile::sinusoidal(1600, 800, 1), InletConditions::table1(), {}};
  const auto f = oracle_velocity(solve_bvp_shooting(c, 2000, 37), c);
  const std::string text = field_to_csv(f);
  EXPECT_EQ(text.substr(0, text.find('\n')), kFieldCsvHeader);
  const auto back = field_from_csv(text, Provenance::shooting);
  EXPECT_EQ(back.x, f.x);
  EXPECT_EQ(back.pressure, f.pressure);
  EXPECT_EQ(back.velocity, f.velocity);
}

TEST(Csv, PressureOnlyLeavesVelocityColumnsEmpty) {
  FieldSolution f;
  f.x = {0.0, 1.0};
  f.pressure = {{1.0, 0.0}, {-1.0, 0.5}};
  const std::string text = field_to_csv(f);
  EXPECT_NE(text.find("0,1,0,,\n"), std::string::npos) << text;
  const auto back = field_from_csv(text, Provenance::pinn);
  EXPECT_FALSE(back.has_velocity());
  EXPECT_EQ(back.pressure, f.pressure);
}

TEST(Csv, MalformedInputRejected) {
  EXPECT_THROW((void)field_from_csv("nonsense\n0,1,2,3,4\n", Provenance::pinn), Error);
  EXPECT_THROW((void)field_from_csv(std::string(kFieldCsvHeader) + "\n0,abc,0,,\n", Provenance::pinn), Error);
  EXPECT_THROW((void)field_from_csv(std::string(kFieldCsvHeader) + "\n0,1\n", Provenance::pinn), Error);
}

TEST(Csv, FileWriteAndRead) {
  const fs::path dir = scratch("csv");
  FieldSolution f;
  f.x = {0.0, 0.5, 1.0};
  f.pressure = {{1.0, 0.0}, {0.1, 0.2}, {-1.0, 0.0}};
  f.velocity = {{1e-3, 2e-3}, {0.0, 0.0}, {-3e-3, 1e-9}};
  write_field_csv(dir / "sub" / "f.csv", f);
  EXPECT_FALSE(fs::exists(dir / "sub" / "f.csv.tmp"));
  const auto back = read_field_csv(dir / "sub" / "f.csv", Provenance::pinn);
  EXPECT_EQ(back.velocity, f.velocity);
  try {
    (void)read_field_csv(dir / "missing.csv", Provenance::pinn);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
  fs::remove_all(dir);
}

TEST(Checkpoint, RoundTripReproducesNetwork) {
  const NetworkArchitecture arch{3, 7, Activation::tanh, 2.5};
  const auto p = init_he(arch, 42);
  std::uint64_t seed = 0;
  const auto q = checkpoint_from_text(checkpoint_to_text(p, 42), &seed);
  EXPECT_EQ(seed, 42u);
  EXPECT_EQ(q.architecture().layers, 3);
  EXPECT_EQ(q.architecture().width, 7);
  EXPECT_EQ(q.architecture().activation, Activation::tanh);
  EXPECT_EQ(q.architecture().input_scale, 2.5);
  EXPECT_EQ(q.values(), p.values());
  for (double x : {0.0, 0.3, 1.0}) EXPECT_EQ(forward_jet(q, x).value, forward_jet(p, x).value);
}

TEST(Checkpoint, FileRoundTripAndCorruption) {
  const fs::path dir = scratch("ckpt");
  const auto p = init_he({2, 4, Activation::sine, 1.0}, 1);
  write_checkpoint(dir / "a.ckpt", p, 1);
  EXPECT_EQ(read_checkpoint(dir / "a.ckpt").values(), p.values());
  std::string text = checkpoint_to_text(p, 1);
  EXPECT_THROW((void)checkpoint_from_text("garbage\n"), Error);
  EXPECT_THROW((void)checkpoint_from_text(text.substr(0, text.size() / 2)), Error);
  fs::remove_all(dir);
}

TEST(Report, JsonCarriesAllFields) {
  TrainingReport r;
  r.final_loss = 1e-6;
  r.final_loss_real = 4e-7;
  r.final_loss_imag = 6e-7;
  r.iterations = 12;
  r.termination = Termination::LossTolerance;
  r.seed = 9;
  const auto j = report_to_json(r);
  EXPECT_EQ(j.at("iterations"), 12);
  EXPECT_EQ(j.at("termination"), std::string(to_string(Termination::LossTolerance)));
  EXPECT_EQ(j.at("seed"), 9);
  EXPECT_TRUE(j.contains("wall_seconds"));
  EXPECT_NE(report_line(r).find("12 iterations"), std::string::npos);
}

TEST(Config, DefaultsMatchStudySetup) {
  const RunConfig c;
  EXPECT_EQ(c.frequencies, (std::vector<double>{500, 1000, 1500, 2000}));
  EXPECT_EQ(c.profiles, (std::vector<ProfileKind>{ProfileKind::linear, ProfileKind::sinusoidal}));
  EXPECT_EQ(c.architecture.layers, 7);
  EXPECT_EQ(c.architecture.width, 90);
  EXPECT_EQ(c.collocation, 10000u);
  EXPECT_EQ(c.test_points, 500u);
  EXPECT_EQ(c.boundary.inlet, Complex(1.0));
  EXPECT_EQ(c.boundary.outlet, Complex(-1.0));
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, ParseKeysCommentsAndLists) {
  const auto c = parse_config(
      "# comment line\n"
      "profiles = linear, constant\n"
      "frequencies = 500, 1500   # trailing\n"
      "\n"
      "layers = 3\nwidth = 40\nactivation = tanh\n"
      "collocation = 1000\nseed = 7\n"
      "p_outlet_im = 0.5\n"
      "velocity_method = both\n"
      "output_dir = /tmp/x y\n");
  EXPECT_EQ(c.profiles, (std::vector<ProfileKind>{ProfileKind::linear, ProfileKind::constant}));
  EXPECT_EQ(c.frequencies, (std::vector<double>{500, 1500}));
  EXPECT_EQ(c.architecture.layers, 3);
  EXPECT_EQ(c.architecture.width, 40);
  EXPECT_EQ(c.architecture.activation, Activation::tanh);
  EXPECT_EQ(c.collocation, 1000u);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.boundary.outlet, Complex(-1.0, 0.5));
  EXPECT_EQ(c.velocity_method, VelocityChoice::both);
  EXPECT_EQ(c.output_dir, fs::path("/tmp/x y"));
  EXPECT_EQ(c.pressure_training().seed, 7u);
  EXPECT_EQ(c.velocity_training().seed, 8u);
}

TEST(Config, TextRoundTrip) {
  RunConfig c;
  c.frequencies = {333.25, 1000};
  c.inlet.mach = 0.15;
  c.training.gradient_tolerance = 3.5e-11;
  c.velocity_method = VelocityChoice::transfer;
  c.architecture.input_scale = 0.1;
  const auto back = parse_config(config_to_text(c));
  EXPECT_EQ(config_to_text(back), config_to_text(c));
  EXPECT_EQ(back.frequencies, c.frequencies);
  EXPECT_EQ(back.inlet.mach, 0.15);
  EXPECT_EQ(back.training.gradient_tolerance, 3.5e-11);
  EXPECT_EQ(back.architecture.input_scale, 0.1);
}

TEST(Config, ErrorsNameTheLine) {
  try {
    (void)parse_config("seed = 1\nbogus = 2\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidArgument);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW((void)parse_config("seed\n"), Error);
  EXPECT_THROW((void)parse_config("layers = three\n"), Error);
  EXPECT_THROW((void)parse_config("seed = -1\n"), Error);
  EXPECT_THROW((void)parse_config("profiles = parabolic\n"), Error);
  EXPECT_THROW((void)parse_config("velocity_method = sideways\n"), Error);
}

TEST(Config, ValidationRejectsBadRuns) {
  RunConfig c;
  c.config_version = 2;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.frequencies = {500, -1};
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.inlet.mach = 1.0 / std::sqrt(1.4);
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.outlet_temperature = -2000;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.test_points = 1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, CaseConstruction) {
  const RunConfig c;
  const auto lin = c.make_case(ProfileKind::linear, 500);
  EXPECT_EQ(lin.inlet.temperature, 1600.0);
  EXPECT_EQ(lin.boundary.inlet, Complex(1.0));
  // sinusoidal keeps T0 for the mean-flow constants although T(0) < T0
  const auto sin = c.make_case(ProfileKind::sinusoidal, 500);
  EXPECT_EQ(sin.inlet.temperature, 1600.0);
  EXPECT_LT(sin.profile.value(0.0), 1600.0);
  const auto uni = c.make_case(ProfileKind::constant, 500);
  EXPECT_EQ(uni.inlet.temperature, 1200.0);
  EXPECT_NEAR(uni.at(0.5).M, 0.2, 1e-15);
}

TEST(Config, VelocityChoiceNames) {
  for (auto v : {VelocityChoice::direct, VelocityChoice::transfer, VelocityChoice::both})
    EXPECT_EQ(parse_velocity_choice(to_string(v)), v);
}
