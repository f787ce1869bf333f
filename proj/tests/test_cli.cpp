#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

struct CliRun {
  int code = -1;
  std::string out;
  Json json() const { return Json::parse(out); }
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

CliRun run(const std::vector<std::string>& args) {
  std::string cmd = ERGODIC_CLI;
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>/dev/null";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "ergodic-cli-test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const char* kFirstBit = R"({"type":"cylinder","indicator":"1"})";

}  // namespace

TEST(Cli, SystemsListing) {
  CliRun r = run({"systems"});
  ASSERT_EQ(r.code, 0);
  Json j = r.json();
  EXPECT_EQ(j["artifact"], "systems");
  EXPECT_NE(r.out.find("rotation"), std::string::npos);
  EXPECT_NE(r.out.find("shift"), std::string::npos);
}

TEST(Cli, W1Example) {
  CliRun r = run({"w1", "--space", "circle", "--mu1", R"([["0","1"]])", "--mu2", R"([["1/2","1"]])"});
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.json()["value"], "1/2");
  CliRun back = run({"replay", "--input", r.out});
  EXPECT_EQ(back.code, 0) << back.out;
  EXPECT_EQ(back.json()["ok"], true);
}

TEST(Cli, RateThenValidateThenReplay) {
  CliRun c = run({"rate", "--system", "shift:p=1/2", "--observable", kFirstBit, "--eps", "1", "--delta", "1/2", "--kind", "as-bounded"});
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_EQ(c.json()["n0"], 4);
  auto file = scratch("cert.json");
  std::ofstream(file) << c.out;
  CliRun v = run({"validate", "--certificate", file.string(), "--horizon", "14"});
  ASSERT_EQ(v.code, 0) << v.out;
  EXPECT_EQ(v.json()["report"]["ok"], true);
  auto out = scratch("report.json");
  std::filesystem::remove(out);
  CliRun w = run({"--output", out.string(), "validate", "--certificate", file.string(), "--horizon", "14"});
  EXPECT_EQ(w.code, 0);
  EXPECT_TRUE(std::filesystem::exists(out));
  EXPECT_EQ(run({"replay", "--input", out.string()}).code, 0);
  EXPECT_EQ(run({"replay", "--input", file.string()}).code, 0);
}

TEST(Cli, HorizonBelowThresholdIsRejected) {
  CliRun c = run({"rate", "--system", "shift:p=1/2", "--observable", kFirstBit, "--eps", "1/4", "--delta", "1/4"});
  ASSERT_EQ(c.code, 0) << c.out;
  EXPECT_EQ(c.json()["n0"], 65520);
  CliRun v = run({"validate", "--certificate", c.out, "--horizon", "16"});
  EXPECT_EQ(v.code, 1);
  EXPECT_EQ(v.json()["error"], "INVALID_INPUT");
  EXPECT_NE(v.json()["message"].get<std::string>().find("n0 = 65520"), std::string::npos);
}

TEST(Cli, TamperedCertificateFailsReplay) {
  CliRun c = run({"rate", "--system", "doubling", "--observable", R"({"type":"pl","breakpoints":["0"],"values":["0"],"left_limits":["1"]})",
               "--eps", "1/4", "--kind", "norm-l1"});
  ASSERT_EQ(c.code, 0) << c.out;
  Json j = c.json();
  j["m"] = j["m"].get<int>() + 1;
  CliRun r = run({"replay", "--input", j.dump()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.json()["ok"], false);
}

TEST(Cli, BudgetExhaustionExitsTwo) {
  CliRun r = run({"--max-p", "2", "rate", "--system", "shift:p=1/2", "--observable", kFirstBit, "--eps", "1/8", "--delta", "1/8",
               "--kind", "as-bounded"});
  EXPECT_EQ(r.code, 2);
  Json j = r.json();
  EXPECT_EQ(j["error"], "BUDGET_EXCEEDED");
  EXPECT_TRUE(j.contains("partial"));
}

TEST(Cli, MalformedInputNamesTheField) {
  CliRun r = run({"rate", "--system", "doubling", "--observable", R"({"type":"pl","values":["0"]})", "--eps", "1/4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.json()["message"].get<std::string>().find("observable.breakpoints"), std::string::npos) << r.out;
  r = run({"rate", "--system", "tent", "--observable", kFirstBit, "--eps", "1/4"});
  EXPECT_EQ(r.code, 1);
  r = run({"rate", "--system", "doubling", "--observable", kFirstBit, "--eps", "-1"});
  EXPECT_EQ(r.code, 1);
  r = run({"w1", "--space", "circle", "--mu1", R"([["0","1/2"]])", "--mu2", R"([["0","1"]])"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.json()["message"].get<std::string>().find("mu1"), std::string::npos) << r.out;
  EXPECT_EQ(run({"frobnicate"}).code, 1);
}

TEST(Cli, FloatDemo) {
  CliRun r = run({"demo-float", "--system", "doubling", "--x0", "1/10"});
  ASSERT_EQ(r.code, 0) << r.out;
  Json j = r.json();
  EXPECT_EQ(j["float"]["zero_step"], 56);
  EXPECT_EQ(j["exact"]["period"], 4);
  EXPECT_EQ(j["exact"]["hits_zero"], false);
  EXPECT_EQ(run({"replay", "--input", r.out}).code, 0);
}

TEST(Cli, TypicalOnTheShiftReplays) {
  CliRun r = run({"typical", "--system", "shift:p=1/2", "--count", "1", "--depth", "4", "--digits", "10"});
  ASSERT_EQ(r.code, 0) << r.out;
  Json j = r.json();
  EXPECT_EQ(j["artifact"], "synth-point");
  EXPECT_EQ(j["bits"].get<std::string>().size(), 10u);
  EXPECT_EQ(run({"replay", "--input", r.out}).code, 0);
  j["certificates"][1]["lambda"] = "1/3";
  EXPECT_EQ(run({"replay", "--input", j.dump()}).code, 1);
}

TEST(Cli, OutputIsDeterministic) {
  std::vector<std::string> args{"rate", "--system", "rotation", "--observable",
                                R"({"type":"term","space":"circle","term":{"op":"gen","center":"1/2","r":"1/4","eps":"1/8"}})",
                                "--eps", "1/4", "--delta", "1/4"};
  EXPECT_EQ(run(args).out, run(args).out);
}
