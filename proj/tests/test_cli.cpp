#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "fhl_cli.hpp"

using namespace fhl;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("fhl_cli_" + name);
  fs::remove_all(d);
  return d;
}

int run_cli(std::vector<std::string> args, std::string* log_text = nullptr) {
  args.insert(args.begin(), "fhl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream log, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), log, err);
  if (log_text) *log_text = log.str();
  return code;
}

// Every file except the manifest is listed with the hash of its current bytes.
void expect_complete_manifest(const fs::path& dir) {
  const auto m = Json::parse(read_file(dir / "manifest.json"));
  std::size_t listed = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name == "manifest.json") continue;
    bool found = false;
    for (const auto& f : m["files"])
      if (f["path"] == name) {
        found = true;
        EXPECT_EQ(f["sha256"], sha256_hex(read_file(entry.path()))) << name;
      }
    EXPECT_TRUE(found) << name;
    ++listed;
  }
  EXPECT_EQ(listed, m["files"].size());
}

}  // namespace

TEST(Cli, MissingSubcommandAndBadValuesAreConfigErrors) {
  const auto dir = fresh_dir("bad");
  EXPECT_EQ(run_cli({}), cli::kConfigError);
  EXPECT_EQ(run_cli({"solve", "--beta", "1.5", "--out", dir.string()}), cli::kConfigError);
  EXPECT_EQ(run_cli({"solve", "--preset", "nope", "--out", dir.string()}), cli::kConfigError);
  EXPECT_EQ(run_cli({"front", "--preset", "test1", "--out", dir.string()}), cli::kConfigError);
  EXPECT_EQ(run_cli({"validate", "--check", "nope", "--out", dir.string()}), cli::kConfigError);
  // A failed run still leaves a manifest recording the exit code.
  EXPECT_EQ(Json::parse(read_file(dir / "manifest.json"))["exit_code"], cli::kConfigError);
  fs::remove_all(dir);
}

TEST(Cli, HelpExitsCleanly) {
  std::string log;
  EXPECT_EQ(run_cli({"--help"}, &log), cli::kOk);
  EXPECT_NE(log.find("solve"), std::string::npos);
}

TEST(Cli, SolveWritesFieldsAndManifest) {
  const auto dir = fresh_dir("solve");
  ASSERT_EQ(run_cli({"solve", "--preset", "test1", "--beta", "0.5", "--x", "0", "--t", "1", "--out", dir.string()}), cli::kOk);
  EXPECT_TRUE(fs::exists(dir / "solve_test1_classical.csv"));
  EXPECT_TRUE(fs::exists(dir / "solve_test1_quadrature_beta0.5.csv"));
  EXPECT_TRUE(fs::exists(dir / "plot_solve.py"));
  const auto csv = read_file(dir / "solve_test1_quadrature_beta0.5.csv");
  std::istringstream in(csv);
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "x,t,value");
  EXPECT_NEAR(std::stod(row.substr(row.rfind(',') + 1)), -2.0, 1e-6);
  expect_complete_manifest(dir);
  fs::remove_all(dir);
}

TEST(Cli, SimulateIsReproducibleForAFixedSeed) {
  const auto a = fresh_dir("sim_a"), b = fresh_dir("sim_b");
  const std::vector<std::string> args{"simulate", "--preset", "test2", "--beta", "0.6", "--x", "0.5,2", "--t", "1",
                                      "--paths", "400", "--seed", "7"};
  auto with_out = [&](const fs::path& d) {
    auto v = args;
    v.push_back("--out");
    v.push_back(d.string());
    return v;
  };
  ASSERT_EQ(run_cli(with_out(a)), cli::kOk);
  ASSERT_EQ(run_cli(with_out(b)), cli::kOk);
  EXPECT_EQ(read_file(a / "simulate_test2.csv"), read_file(b / "simulate_test2.csv"));
  expect_complete_manifest(a);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ValidateSingleCheckPasses) {
  const auto dir = fresh_dir("validate");
  std::string log;
  EXPECT_EQ(run_cli({"validate", "--check", "stable-law", "--out", dir.string()}, &log), cli::kOk);
  EXPECT_EQ(log.rfind("PASS stable-law", 0), 0u);
  const auto j = Json::parse(read_file(dir / "validate_stable-law.json"));
  EXPECT_TRUE(j["passed"].get<bool>());
  expect_complete_manifest(dir);
  fs::remove_all(dir);
}

TEST(Cli, MomentsTableHasOneRowPerCombination) {
  const auto dir = fresh_dir("moments");
  ASSERT_EQ(run_cli({"moments", "--alpha", "1,2", "--beta", "0.5", "--t", "1", "--paths", "2000", "--out", dir.string()}),
            cli::kOk);
  std::istringstream in(read_file(dir / "moments.csv"));
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 2);
  fs::remove_all(dir);
}
