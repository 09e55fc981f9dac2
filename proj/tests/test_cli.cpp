#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "ductpinn/io.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string("\"") + DUCTPINN_CLI + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ductpinn_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const char* kTinyConfig =
    "layers = 2\nwidth = 8\ncollocation = 100\ntest_points = 51\n"
    "max_iterations = 20\noracle_steps = 2000\n";

}  // namespace

TEST(Cli, CheckPasses) { EXPECT_EQ(run("check"), 0); }

TEST(Cli, HelpIsNotAnError) { EXPECT_EQ(run("--help"), 0); }

TEST(Cli, BadArgumentsAreValidationErrors) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("sweep --no-such-flag"), 1);
  EXPECT_EQ(run("sweep --profile parabolic"), 1);
  EXPECT_EQ(run("sweep --freq -5"), 1);
  EXPECT_EQ(run("sweep --velocity-method sideways"), 1);
  EXPECT_EQ(run("sweep --config /no/such/file.cfg"), 1);
}

TEST(Cli, BadConfigIsValidationError) {
  const fs::path d = scratch("badcfg");
  ductpinn::write_file_atomic(d / "bad.cfg", "layers = 2\nunknown_key = 3\n");
  EXPECT_EQ(run("sweep --config " + (d / "bad.cfg").string()), 1);
  fs::remove_all(d);
}

TEST(Cli, UnwritableOutputIsIoError) {
  const fs::path d = scratch("io");
  ductpinn::write_file_atomic(d / "tiny.cfg", kTinyConfig);
  ductpinn::write_file_atomic(d / "blocker", "x");
  EXPECT_EQ(run("oracle-only --config " + (d / "tiny.cfg").string() + " --out " + (d / "blocker" / "sub").string()), 3);
  fs::remove_all(d);
}

TEST(Cli, TinySweepWritesTable) {
  const fs::path d = scratch("sweep");
  ductpinn::write_file_atomic(d / "tiny.cfg", kTinyConfig);
  EXPECT_EQ(run("sweep --config " + (d / "tiny.cfg").string() + " --profile linear --freq 500 --seed 3 --out " +
                (d / "out").string()),
            0);
  EXPECT_TRUE(fs::exists(d / "out" / "error_table.csv"));
  EXPECT_TRUE(fs::exists(d / "out" / "linear_500Hz_pinn.csv"));
  const std::string cfg = ductpinn::read_file(d / "out" / "config.txt");
  EXPECT_NE(cfg.find("seed = 3\n"), std::string::npos);
  fs::remove_all(d);
}

TEST(Cli, FailingCaseGivesExitTwo) {
  const fs::path d = scratch("fail");
  ductpinn::write_file_atomic(d / "tiny.cfg", kTinyConfig);
  // resonant uniform duct: k L = pi (1 - M^2)
  char freq[64];
  std::snprintf(freq, sizeof freq, "%.17g", 0.96 * std::sqrt(1.4 * 287.0 * 1200.0) / 2.0);
  EXPECT_EQ(run("oracle-only --config " + (d / "tiny.cfg").string() + " --profile constant --freq " + freq +
                " --out " + (d / "out").string()),
            2);
  fs::remove_all(d);
}
