#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "wheelcon/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int rc;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args) {
  args.insert(args.begin(), "wheelcon");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = wheelcon::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

fs::path temp_dir(const char* name) {
  const auto d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, GenIsDeterministic) {
  const auto d = temp_dir("wheelcon_cli_gen");
  ASSERT_EQ(cli({"gen", "--game", "3", "--seed", "9", "--out", (d / "a.csv").string()}).rc, 0);
  ASSERT_EQ(cli({"gen", "--game", "3", "--seed", "9", "--out", (d / "b.csv").string()}).rc, 0);
  EXPECT_EQ(wheelcon::read_text_file(d / "a.csv"), wheelcon::read_text_file(d / "b.csv"));
  EXPECT_EQ(cli({"gen", "--game", "3", "--seed", "9"}).out, wheelcon::read_text_file(d / "a.csv"));
}

TEST(Cli, Errors) {
  const auto missing = cli({"run", "--script", "/nonexistent/x.csv", "--out", "/tmp/x.csv"});
  EXPECT_NE(missing.rc, 0);
  EXPECT_NE(missing.err.find("file not found"), std::string::npos) << missing.err;
  const auto unknown = cli({"gen", "--game", "1", "--bogus"});
  EXPECT_NE(unknown.rc, 0);
  EXPECT_NE(unknown.err.find("--bogus"), std::string::npos) << unknown.err;
  EXPECT_NE(cli({"gen", "--game", "9"}).rc, 0);
  EXPECT_NE(cli({}).rc, 0);
}

TEST(Cli, RunReplayAnalyze) {
  const auto d = temp_dir("wheelcon_cli_run");
  const auto script = (d / "g2.csv").string();
  const auto log = (d / "g2.log.csv").string();
  ASSERT_EQ(cli({"gen", "--game", "2", "--seed", "4", "--out", script}).rc, 0);
  const auto run = cli({"run", "--script", script, "--subject", "noisy-human:seed=3", "--out", log});
  ASSERT_EQ(run.rc, 0) << run.err;
  const auto rep = cli({"replay", "--log", log});
  EXPECT_EQ(rep.rc, 0) << rep.err;
  EXPECT_NE(rep.out.find("replay identical: 18000"), std::string::npos);
  EXPECT_EQ(cli({"replay", "--log", log, "--script", script}).rc, 0);

  const auto an = cli({"analyze", log});
  ASSERT_EQ(an.rc, 0) << an.err;
  EXPECT_NE(an.out.find("# param=T_act"), std::string::npos);
  EXPECT_NE(an.out.find("block,param,L1,L2,Linf,n\n"), std::string::npos);
  EXPECT_EQ(cli({"analyze", log, "--out", (d / "r.csv").string()}).rc, 0);
  EXPECT_EQ(wheelcon::read_text_file(d / "r.csv"), an.out);

  // A different script no longer matches the recorded hashes.
  const auto other = (d / "g2b.csv").string();
  ASSERT_EQ(cli({"gen", "--game", "2", "--seed", "5", "--out", other}).rc, 0);
  const auto bad = cli({"replay", "--log", log, "--script", other});
  EXPECT_NE(bad.rc, 0);
  EXPECT_NE(bad.err.find("hash"), std::string::npos);
}

TEST(Cli, FittsAnalyzeReportsMovementTimes) {
  const auto d = temp_dir("wheelcon_cli_fitts");
  const auto script = (d / "f.csv").string();
  const auto log = (d / "f.log.csv").string();
  ASSERT_EQ(cli({"gen", "--game", "fitts", "--seed", "2", "--out", script}).rc, 0);
  ASSERT_EQ(cli({"run", "--script", script, "--out", log}).rc, 0);
  const auto an = cli({"analyze", log, "--script", script});
  ASSERT_EQ(an.rc, 0) << an.err;
  EXPECT_NE(an.out.find("# fitts mean_mt="), std::string::npos);
}

TEST(Cli, Verify) {
  const auto d = cli({"verify", "delay", "--max-T", "4", "--seeds", "3"});
  EXPECT_EQ(d.rc, 0);
  EXPECT_EQ(std::count(d.out.begin(), d.out.end(), '\n'), 11);
  EXPECT_EQ(d.out.find("FAIL"), std::string::npos);
  const auto r = cli({"verify", "rate", "--R", "1,2", "--horizon", "4"});
  EXPECT_EQ(r.rc, 0);
  EXPECT_NE(r.out.find("\n2,"), std::string::npos);
}
