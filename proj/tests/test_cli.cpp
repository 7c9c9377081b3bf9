#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ncsplit/report_io.hpp"

namespace {

struct CmdResult {
  int exit_code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CmdResult run_tool(const std::string& args, const std::string& tag) {
  const std::string out_path = testing::TempDir() + "ncsplit_" + tag + ".out";
  const std::string err_path = testing::TempDir() + "ncsplit_" + tag + ".err";
  const std::string cmd =
      std::string(NCSPLIT_TOOL_PATH) + " " + args + " >" + out_path + " 2>" + err_path;
  const int rc = std::system(cmd.c_str());
  CmdResult res;
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  res.out = slurp(out_path);
  res.err = slurp(err_path);
  return res;
}

}  // namespace

TEST(Cli, CycleReportsPeriodEight) {
  const CmdResult res = run_tool("cycle --eta 1 --beta 1 --steps 80", "cycle");
  EXPECT_EQ(res.exit_code, 0) << res.err;
  EXPECT_NE(res.out.find("period=8 verdict=PASS"), std::string::npos) << res.out;
}

TEST(Cli, CpvCsvSchemaAndRoundTrip) {
  const CmdResult res =
      run_tool("cpv --m 12 --n 36 --r 3 --seed 1 --mode l0 --tol 1e-9", "cpv");
  ASSERT_EQ(res.exit_code, 0) << res.err;
  const auto rows = ncsplit::parse_csv(res.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(ncsplit::join_csv(rows[0]), ncsplit::cpv_csv_header());
  ASSERT_EQ(rows[1].size(), 5u);
  EXPECT_EQ(rows[1][0], "3");
  EXPECT_EQ(rows[1][1], "36");
  EXPECT_LE(std::stoul(rows[1][3]), 3u);
  const double dist = ncsplit::parse_double(rows[1][4]);
  EXPECT_EQ(ncsplit::format_g17(dist), rows[1][4]);  // 17-digit round trip
}

TEST(Cli, IdenticalArgumentsGiveByteIdenticalOutput) {
  const std::string args = "cpv --m 12 --n 36 --r 3 --seed 4 --mode all --tol 1e-8";
  const CmdResult a = run_tool(args, "det_a");
  const CmdResult b = run_tool(args, "det_b");
  ASSERT_EQ(a.exit_code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, EnvSeedFallbackMatchesExplicitSeed) {
  const CmdResult explicit_seed =
      run_tool("pcf --n 120 --r 4 --seed 9 --tol 1e-8", "seed_explicit");
  const std::string out_path = testing::TempDir() + "ncsplit_seed_env.out";
  const std::string cmd = std::string("NCSPLIT_SEED=9 ") + NCSPLIT_TOOL_PATH +
                          " pcf --n 120 --r 4 --tol 1e-8 >" + out_path + " 2>/dev/null";
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  EXPECT_EQ(explicit_seed.out, slurp(out_path));
}

TEST(Cli, SolveRunsProblemFile) {
  const std::string problem_path = testing::TempDir() + "problem.json";
  {
    nlohmann::json doc{
        {"algorithm", "admm"},
        {"h", {{"kind", "proximity"}, {"x_hat", {0.2, -0.1, 0.0}}}},
        {"P", {{"kind", "indicator_linf_ball"}, {"radius", 1.0}}},
        {"M", {{"kind", "identity"}, {"n", 3}}},
        {"admm", {{"beta", 2.5}, {"tol", 1e-10}}},
    };
    std::ofstream f(problem_path);
    f << doc.dump(2);
  }
  const CmdResult res = run_tool("solve --problem " + problem_path, "solve");
  ASSERT_EQ(res.exit_code, 0) << res.err;
  const auto doc = nlohmann::json::parse(res.out);
  EXPECT_EQ(doc.at("termination").get<std::string>(), "converged");
  const auto x = doc.at("x_final").get<std::vector<double>>();
  ASSERT_EQ(x.size(), 3u);
  EXPECT_NEAR(x[0], 0.2, 1e-8);
  EXPECT_NEAR(x[1], -0.1, 1e-8);
}

TEST(Cli, CheckEmitsAssumptionReportJson) {
  const CmdResult res =
      run_tool("check --pattern strongly-convex-surjective --m 8 --n 24 --seed 3", "check");
  ASSERT_EQ(res.exit_code, 0) << res.err;
  const auto doc = nlohmann::json::parse(res.out);
  EXPECT_TRUE(doc.at("assumption_ok").get<bool>());
  EXPECT_GT(doc.at("sigma").get<double>(), 0.0);
  EXPECT_GT(doc.at("margin").get<double>(), 0.0);
  EXPECT_EQ(doc.at("rule").get<std::string>(), "surjective_strongly_convex");
}

TEST(Cli, JobsFanOutKeepsOutputOrder) {
  const std::string base = "concave --m 20 --n 50 --seed 2 --seeds 3 --tol 1e-8";
  const CmdResult serial = run_tool(base + " --jobs 1", "jobs1");
  const CmdResult parallel = run_tool(base + " --jobs 3", "jobs3");
  ASSERT_EQ(serial.exit_code, 0) << serial.err;
  ASSERT_EQ(parallel.exit_code, 0) << parallel.err;
  EXPECT_EQ(serial.out, parallel.out);
}

TEST(Cli, SolveRunsProximalGradientProblem) {
  const std::string problem_path = testing::TempDir() + "problem_pg.json";
  {
    nlohmann::json doc{
        {"algorithm", "pg"},
        {"h",
         {{"kind", "least_squares"},
          {"A", {{"rows", 2}, {"cols", 2}, {"data", {1.0, 0.0, 0.0, 1.0}}}},
          {"b", {0.0, 0.0}}}},
        {"P", {{"kind", "l1_penalty"}, {"lambda", 0.0}}},
        {"pg", {{"beta", 0.5}, {"tol", 1e-10}}},
        {"init", {{"x", {4.0, -2.0}}}},
    };
    std::ofstream f(problem_path);
    f << doc.dump(2);
  }
  const CmdResult res = run_tool("solve --problem " + problem_path, "solve_pg");
  ASSERT_EQ(res.exit_code, 0) << res.err;
  const auto doc = nlohmann::json::parse(res.out);
  EXPECT_EQ(doc.at("termination").get<std::string>(), "converged");
  EXPECT_NEAR(doc.at("objective").get<double>(), 0.0, 1e-12);
}

TEST(Cli, PcfAndConcaveRowsParseBack) {
  const CmdResult pcf = run_tool("pcf --n 150 --r 5 --tau 0.05 --seed 2 --tol 1e-8", "pcf_rt");
  ASSERT_EQ(pcf.exit_code, 0) << pcf.err;
  const auto pcf_rows = ncsplit::parse_csv(pcf.out);
  ASSERT_EQ(pcf_rows.size(), 2u);
  EXPECT_EQ(ncsplit::join_csv(pcf_rows[0]), ncsplit::pcf_csv_header());
  EXPECT_EQ(ncsplit::format_g17(ncsplit::parse_double(pcf_rows[1][0])), pcf_rows[1][0]);
  EXPECT_EQ(ncsplit::format_g17(ncsplit::parse_double(pcf_rows[1][5])), pcf_rows[1][5]);

  const CmdResult conc = run_tool("concave --m 15 --n 40 --seed 2", "conc_rt");
  ASSERT_EQ(conc.exit_code, 0) << conc.err;
  const auto conc_rows = ncsplit::parse_csv(conc.out);
  ASSERT_EQ(conc_rows.size(), 5u);
  EXPECT_EQ(ncsplit::join_csv(conc_rows[0]), ncsplit::concave_csv_header());
  for (std::size_t i = 1; i < conc_rows.size(); ++i)
    EXPECT_EQ(ncsplit::format_g17(ncsplit::parse_double(conc_rows[i][4])), conc_rows[i][4]);
}

TEST(Cli, BadFlagExitsWithConfigError) {
  const CmdResult res = run_tool("cpv --definitely-not-a-flag 1", "badflag");
  EXPECT_EQ(res.exit_code, 2);
}

TEST(Cli, MalformedProblemFileExitsWithConfigError) {
  const std::string path = testing::TempDir() + "broken.json";
  {
    std::ofstream f(path);
    f << "{ not json";
  }
  const CmdResult res = run_tool("solve --problem " + path, "badjson");
  EXPECT_EQ(res.exit_code, 2);
}
