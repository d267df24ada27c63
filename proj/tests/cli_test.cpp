#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "netopt/io.hpp"
#include "netopt/solve.hpp"
#include "test_util.hpp"

namespace netopt {
namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(NETOPT_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string fixture(const std::string& name) {
  return std::string(NETOPT_FIXTURE_DIR) + "/" + name;
}

std::string temp_path(const std::string& name) {
  return testing::TempDir() + "netopt_cli_" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out << content;
}

TEST(Cli, SolveExactWritesResultMatchingLibrary) {
  std::string out = temp_path("fig1_solution.json");
  RunResult r = run_cli("solve " + fixture("fig1.json") + " --algo exact --out " + out);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("objective"), std::string::npos);
  EXPECT_NE(r.out.find("feasible             yes"), std::string::npos);

  Instance inst = parse_instance(slurp(fixture("fig1.json")));
  SolveResult expected = solve_exact(inst, SolveConfig{});
  EXPECT_EQ(parse_solution(slurp(out)), expected.routing);
}

TEST(Cli, ValidateFixtureOk) {
  RunResult r = run_cli("validate " + fixture("fig1.json"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("ok"), std::string::npos);
}

TEST(Cli, ValidateRejectsGarbage) {
  std::string bad = temp_path("garbage.json");
  spit(bad, "{\"schema_version\": \"1\"}");
  RunResult r = run_cli("validate " + bad);
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, GenerateIsDeterministic) {
  std::string a = temp_path("gen_a.json");
  std::string b = temp_path("gen_b.json");
  EXPECT_EQ(run_cli("generate --seed 1 --demands 3 --out " + a).exit_code, 0);
  EXPECT_EQ(run_cli("generate --seed 1 --demands 3 --out " + b).exit_code, 0);
  std::string text = slurp(a);
  EXPECT_FALSE(text.empty());
  EXPECT_EQ(text, slurp(b));
  EXPECT_NO_THROW(parse_instance(text));
}

TEST(Cli, EvaluateCyclicTableNamesTheCycle) {
  RoutingTable cyclic;
  cyclic.set(0, 8, 2);
  cyclic.set(0, 2, 2);
  cyclic.set(2, 8, 0);  // no arc 2->0 either, but the cycle is the headline
  std::string sol = temp_path("cyclic.json");
  spit(sol, serialize_solution(cyclic));
  RunResult r = run_cli("evaluate " + fixture("fig1.json") + " " + sol);
  EXPECT_EQ(r.exit_code, 2);
}

TEST(Cli, EvaluateCapacityViolationExitsOne) {
  // Route everything through H1 and then shrink H1's capacity.
  Instance inst = parse_instance(slurp(fixture("fig1.json")));
  inst.nodes[2].transfer_capacity = 10.0;  // demand S1->T1 is 180 units
  std::string tight = temp_path("tight.json");
  spit(tight, serialize_instance(inst));
  RoutingTable via_h1;
  via_h1.set(0, 8, 2);
  via_h1.set(0, 2, 2);
  via_h1.set(2, 8, 8);
  via_h1.set(1, 9, 9);
  std::string sol = temp_path("via_h1.json");
  spit(sol, serialize_solution(via_h1));
  RunResult r = run_cli("evaluate " + tight + " " + sol);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.out.find("capacity"), std::string::npos);
}

TEST(Cli, SolveOverCapExitsThree) {
  RunResult r = run_cli("solve " + fixture("fig1.json") + " --algo exact --exact-cap 1");
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, SolveInfeasibleExitsOne) {
  Instance inst = testutil::make_instance(2);
  inst.arcs.push_back(testutil::make_arc(0, 1, 20.0));
  inst.demands.push_back(testutil::make_demand(0, 1, 10.0, 15.0));
  std::string path = temp_path("impossible.json");
  spit(path, serialize_instance(inst));
  RunResult r = run_cli("solve " + path + " --algo exact");
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, ExportWritesDot) {
  std::string out = temp_path("fig1.dot");
  RunResult r = run_cli("export " + fixture("fig1.json") + " --out " + out);
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(slurp(out).find("digraph"), std::string::npos);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  std::string out1 = temp_path("det1.json");
  std::string out2 = temp_path("det2.json");
  RunResult a = run_cli("solve " + fixture("fig1.json") +
                        " --algo anneal --seed 11 --restarts 2 --out " + out1);
  RunResult b = run_cli("solve " + fixture("fig1.json") +
                        " --algo anneal --seed 11 --restarts 2 --out " + out2);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(b.exit_code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(out1), slurp(out2));
}

}  // namespace
}  // namespace netopt
