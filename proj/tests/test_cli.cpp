#include "frictio/scenario.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace frictio;

namespace {

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "frictio_cli_test";
  fs::create_directories(dir);
  return dir;
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "frictio");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

std::string write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p.string();
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::string> out;
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Cli, CriticalPrintsRatio) {
  testing::internal::CaptureStdout();
  EXPECT_EQ(run({"run", "critical", "--K", "2,1,2"}), 0);
  EXPECT_EQ(testing::internal::GetCapturedStdout(), "f_crit = 2\n");
}

TEST(Cli, PaperJumpWritesJumpRows) {
  const auto out = (workdir() / "traj.csv").string();
  testing::internal::CaptureStdout();
  const int code = run({"run", "paper-jump", "--K", "2,1,2", "--f", "2", "--R", "1", "--m", "2000", "--out", out});
  testing::internal::GetCapturedStdout();
  EXPECT_EQ(code, 0);
  const auto rows = lines(out);
  ASSERT_GT(rows.size(), 3u);
  int left_rows = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].back() == '1') {
      ++left_rows;
      EXPECT_EQ(rows[i].substr(0, 2), "1,");
      EXPECT_EQ(rows[i + 1].substr(0, 2), "1,");
    }
  }
  EXPECT_EQ(left_rows, 1);
}

TEST(Cli, MarchOnZeroLoad) {
  const auto dir = workdir();
  const auto sc = write(dir / "zero.json", R"({
    "kind": "march", "K": [2, 1, 2], "f": 1, "m": 5,
    "load": {"horizon": 1, "segments": [{"t0": 0, "t1": 1, "f0": [0, 0], "f1": [0, 0]}]},
    "out": "zero.csv"})");
  testing::internal::CaptureStdout();
  EXPECT_EQ(run({"run", "--scenario", sc}), 0);
  testing::internal::GetCapturedStdout();
  const auto rows = lines(dir / "zero.csv");
  ASSERT_GE(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_EQ(rows[i].substr(rows[i].find(',')), ",0,0,0,0,0");
}

TEST(Cli, VerifyPaperJump) {
  const auto dir = workdir();
  const auto traj = (dir / "pj.csv").string();
  const auto sc = write(dir / "pj.json", R"({"kind": "paper-jump", "K": [2, 1, 2], "f": 2, "R": 1, "m": 400})");
  testing::internal::CaptureStdout();
  ASSERT_EQ(run({"run", "--scenario", sc, "--out", traj}), 0);
  EXPECT_EQ(run({"verify", traj, sc, "--tol", "1e-9"}), 0);

  // t_n sign flipped on one row
  auto rows = lines(traj);
  auto flipped = rows;
  {
    std::string& r = flipped[3];
    std::vector<std::string> cells;
    std::stringstream ss(r);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    cells[3] = "0.75";
    r = cells[0] + "," + cells[1] + "," + cells[2] + "," + cells[3] + "," + cells[4] + "," + cells[5];
  }
  std::ofstream(dir / "flip.csv") << [&] {
    std::string s;
    for (const auto& r : flipped) s += r + "\n";
    return s;
  }();
  EXPECT_EQ(run({"verify", (dir / "flip.csv").string(), sc}), 2);

  // jump record stripped: right row removed, left flag cleared
  std::vector<std::string> stripped;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].back() == '1') {
      stripped.push_back(rows[i].substr(0, rows[i].size() - 1) + "0");
      ++i;
      continue;
    }
    stripped.push_back(rows[i]);
  }
  std::ofstream(dir / "stripped.csv") << [&] {
    std::string s;
    for (const auto& r : stripped) s += r + "\n";
    return s;
  }();
  EXPECT_EQ(run({"verify", (dir / "stripped.csv").string(), sc}), 2);
  testing::internal::GetCapturedStdout();
}

TEST(Cli, ConfigErrorsExitOne) {
  const auto dir = workdir();
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"run", "critical", "--K", "1,2,1"}), 1);
  EXPECT_EQ(run({"run", "nonsense"}), 1);
  const auto bad = write(dir / "bad.json", R"({"kind": "march", "K": [2, 1, 2], "bogus": 3})");
  EXPECT_EQ(run({"run", "--scenario", bad}), 1);
  const auto broken = write(dir / "broken.json", "{ not json");
  EXPECT_EQ(run({"run", "--scenario", broken}), 1);
  EXPECT_EQ(run({"verify", (dir / "missing.csv").string(), broken}), 1);
  testing::internal::GetCapturedStderr();
}

TEST(Cli, SweepRunsEveryValue) {
  testing::internal::CaptureStdout();
  EXPECT_EQ(run({"run", "critical", "--K", "2,1,2", "--sweep", "f=0:1:3"}), 0);
  const auto out = testing::internal::GetCapturedStdout();
  EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 3);
}

TEST(Cli, ScenarioParsing) {
  const auto sc = cli::parse_scenario(nlohmann::json::parse(R"({"kind": "incremental", "K": "2,1,2", "F": [2, 0], "f": 1})"));
  EXPECT_EQ(sc.kind, "incremental");
  ASSERT_TRUE(sc.K.has_value());
  EXPECT_EQ((*sc.K)[1], 1.0);
  const auto r = cli::run_scenario(sc);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.summary.find("stick"), std::string::npos);
}
