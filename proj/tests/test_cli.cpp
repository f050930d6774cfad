#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = std::string(GBS_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("gbs_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Cli, HelpExitsZero) { EXPECT_EQ(run("--help").code, 0); }

TEST(Cli, MissingSubcommandIsUsageError) { EXPECT_EQ(run("").code, 1); }

TEST(Cli, UnknownFlagIsUsageError) { EXPECT_EQ(run("simulate --bogus 3").code, 1); }

TEST(Cli, InfeasibleTotalsIsUsageError) {
  const auto r = run("simulate --modes 2 --totals 3 --out " + scratch("infeasible").string());
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.output.find("infeasible"), std::string::npos) << r.output;
  EXPECT_FALSE(fs::exists(scratch("infeasible")));
}

TEST(Cli, MissingConfigIsUsageError) { EXPECT_EQ(run("simulate --config /nonexistent/gbs.ini").code, 1); }

TEST(Cli, BadGradMethodIsUsageError) { EXPECT_EQ(run("train --grad-method adam").code, 1); }

TEST(Cli, DivergenceIsNumericalFailure) {
  const auto out = scratch("diverge");
  const auto r = run("train --lr 5 --epochs 50 --out " + out.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.output.find("diverged at epoch"), std::string::npos) << r.output;
  fs::remove_all(out);
}

TEST(Cli, SimulateWritesFiles) {
  const auto out = scratch("simulate");
  const auto r = run("simulate --modes 3 --squeeze-r 0.3 --totals 0,2 --max-per-mode 2 --out " + out.string());
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_TRUE(fs::exists(out / "distribution_total0.txt"));
  EXPECT_TRUE(fs::exists(out / "distribution_total2.txt"));
  EXPECT_TRUE(fs::exists(out / "observables.txt"));
  fs::remove_all(out);
}

TEST(Cli, SeedOverridesEveryField) {
  const auto out = scratch("seed");
  const auto r = run("train --seed 7 --haar-seed 3 --epochs 1 --modes 2 --totals 2 --out " + out.string());
  ASSERT_EQ(r.code, 0) << r.output;
  std::ifstream in(out / "trace.csv");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_NE(text.find("# haar_seed = 7\n"), std::string::npos) << text;
  EXPECT_NE(text.find("# train_seed = 7\n"), std::string::npos) << text;
  fs::remove_all(out);
}

TEST(Cli, VerifyPasses) {
  const auto r = run("verify");
  EXPECT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(r.output.find("FAIL"), std::string::npos) << r.output;
}
