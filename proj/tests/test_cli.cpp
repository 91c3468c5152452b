#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = "env -u LOCALMQ_OUT_DIR " + std::string(LOCALMQ_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "localmq_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST(Cli, GenTargetIsDeterministic) {
  const auto a = cli("gen-target --kind dnf --n 10 --s 3 --width 3 --seed 5");
  const auto b = cli("gen-target --kind dnf --n 10 --s 3 --width 3 --seed 5");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  const auto j = json::parse(a.out);
  EXPECT_EQ(j["n"], 10);
  EXPECT_NE(cli("gen-target --kind dnf --n 10 --s 3 --width 3 --seed 6").out, a.out);
}

TEST(Cli, LearnEchoesTreeParameters) {
  const auto r = cli("learn --algo tree-uniform --t 4 --eps 0.08 --seed 7");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["params"]["d"], 9);
  EXPECT_NEAR(j["params"]["theta"].get<double>(), 0.01, 1e-15);
  EXPECT_EQ(j["audit"]["violations"], 0);
}

TEST(Cli, VerifyFactSmooth) {
  const auto r = cli("verify --suite fact-smooth --n 10 --alpha 1.5");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
}

TEST(Cli, OutFileAndTargetRoundTrip) {
  const auto target = scratch("tree.json");
  ASSERT_EQ(cli("gen-target --kind tree --n 12 --leaves 6 --depth 3 --seed 3 --out " + target.string()).code, 0);
  const auto out = scratch("learn.json");
  const auto r = cli("learn --algo logdepth-tree --t 6 --depth 3 --target " + target.string() + " --out " +
                     out.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  const auto j = json::parse(in);
  EXPECT_EQ(j["algorithm"], "logdepth-tree");
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("").code, 2);
  EXPECT_EQ(cli("learn --algo tree-uniform --no-such-flag").code, 2);
  // A {0,1} target against a +-1 distribution breaks a contract.
  const auto unif = scratch("uniform.json");
  ASSERT_EQ(cli("gen-dist --kind uniform --n 16 --domain pm --out " + unif.string()).code, 0);
  EXPECT_EQ(cli("learn --algo sparse-poly --t 2 --r 2 --dist " + unif.string()).code, 3);
  EXPECT_EQ(cli("learn --algo tree-uniform --target /nonexistent/target.json").code, 4);
  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{not json";
  EXPECT_EQ(cli("learn --algo tree-uniform --target " + bad.string()).code, 4);
  EXPECT_EQ(cli("learn --algo tree-uniform --eps 2").code, 4);
}

TEST(Cli, AuditReplaysTrail) {
  const auto trail = scratch("trail.jsonl");
  const auto r = cli("learn --algo logdepth-tree --t 4 --depth 2 --r 2 --seed 12 --trail " + trail.string());
  ASSERT_EQ(r.code, 0);
  const auto ok = cli("audit --trail " + trail.string() + " --r 2");
  ASSERT_EQ(ok.code, 0) << ok.out;
  const auto j = json::parse(ok.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_GT(j["summary"]["mq_count"].get<int>(), 0);
  EXPECT_EQ(cli("audit --trail " + trail.string() + " --r 1").code, 1);
}

TEST(Cli, ReduceAndSeparation) {
  const auto r = cli("reduce --n 6 --k 1 --samples 20000 --seed 2");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["base_audit"]["mq_count"], 0);
  const auto s = cli("demo-separation --n 8 --trials 5 --baseline-n 10 --train 400 --heldout 1000 --seed 4");
  ASSERT_EQ(s.code, 0) << s.out;
  EXPECT_EQ(json::parse(s.out)["recovery_rate"], 1.0);
}
