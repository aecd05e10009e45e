#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LABCLI_PATH) + " " + args + " 2>/dev/null";
  FILE* f = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, f)) > 0;) out.append(buf, n);
  const int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string config(const std::string& name, const std::string& body) {
  const std::string path = testing::TempDir() + "labcli_" + name + ".json";
  std::ofstream(path) << body;
  return "--config " + path;
}

int count(const std::string& s, const std::string& needle) {
  int n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Labcli, HelpAndBadFlags) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("--format xml classify").code, 64);
  EXPECT_EQ(run("nonsense").code, 64);
}

TEST(Labcli, ZeroTrialsRejected) { EXPECT_EQ(run("validate-geometry --trials 0").code, 64); }

TEST(Labcli, UnknownConfigKeyRejected) {
  EXPECT_EQ(run(config("bogus", R"({"trials":10,"bogus":1})") + " validate-geometry").code, 64);
  EXPECT_EQ(run(config("mode", R"({"mode":"gk"})") + " classify").code, 64);
  EXPECT_EQ(run(config("fix", R"({"fixtures":[{"alpha":1,"beta":2,"H0":1,"Ha":1}]})") + " validate-geometry").code,
            64);
}

TEST(Labcli, CsvHeaderAndQuoting) {
  const auto r = run("classify --a 0.2 --b 1");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("experiment_id,param_json,stat,value,stderr,n\r\n", 0), 0u);
  // param_json contains commas and quotes, so it is quoted with doubled quotes
  EXPECT_NE(r.out.find(R"("{""a"":0.2,)"), std::string::npos);
  EXPECT_EQ(count(r.out, "\r\n"), count(r.out, "\n"));
}

TEST(Labcli, JsonOutputParses) {
  const auto r = run("--format json classify --a 0.2 --b 1");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_TRUE(j.is_array());
  ASSERT_FALSE(j.empty());
  for (const auto& row : j)
    for (const char* k : {"experiment_id", "params", "stat", "value", "stderr", "n"}) EXPECT_TRUE(row.contains(k));
}

TEST(Labcli, EqualWeightsGiveAllThreePairs) {
  const auto r = run("--format json classify --a 1 --b 1");
  ASSERT_EQ(r.code, 0);
  for (const auto& row : nlohmann::json::parse(r.out)) {
    if (row["stat"] == "pairs") {
      EXPECT_EQ(row["value"], "A(0,alpha);A(0,beta);A(alpha,beta)");
    }
    if (row["stat"] == "case") {
      EXPECT_EQ(row["value"], "5(iii)");
    }
  }
}

TEST(Labcli, UnsupportedK) { EXPECT_EQ(run("gk --k 5").code, 64); }

TEST(Labcli, DegenerateGrid) {
  EXPECT_EQ(run(config("grid1", R"({"a":{"min":1,"max":2,"n":1},"p":[0.2,0.3,0.5]})") + " phase-diagram").code, 64);
}

TEST(Labcli, AdversarialFixturesUseExactFallback) {
  const std::string fx = R"("fixtures":[{"alpha":0.9,"beta":2.0,"H0":1,"Ha":1,"Hb":1}])";
  const auto ok = run("--format json " + config("adv", R"({"trials":20,"suites":["lemma4.1","lemma4.2"],)" + fx + "}") +
                      " validate-geometry");
  ASSERT_EQ(ok.code, 0);
  std::int64_t fallbacks = 0;
  for (const auto& row : nlohmann::json::parse(ok.out))
    if (row["stat"] == "exact_fallbacks") fallbacks += row["value"].get<std::int64_t>();
  EXPECT_GT(fallbacks, 0);
  EXPECT_EQ(run(config("adv2", R"({"trials":20,"suites":["lemma4.1","lemma4.2"],"exact_fallback":false,)" + fx + "}") +
                " validate-geometry")
                .code,
            3);
}

TEST(Labcli, ViolationsExitTwo) {
  EXPECT_EQ(run("validate-geometry --trials 1000 --suites lemma4.3").code, 2);
}

TEST(Labcli, WorkerCountDoesNotChangeBytes) {
  const auto cfg = config("sim", R"({"p":0.6,"ladder":[2],"min_hits":200,"batch":4096})");
  const auto a = run("--seed 9 --workers 1 " + cfg + " simulate-composition");
  const auto b = run("--seed 9 --workers 4 " + cfg + " simulate-composition");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(a.out.find(",tv,"), std::string::npos);
}

TEST(Labcli, CommaSeparatedSuites) {
  const auto r = run("--format json validate-geometry --trials 20 --suites lemma4.1,lemma3.1");
  ASSERT_EQ(r.code, 0);
  std::set<std::string> seen;
  for (const auto& row : nlohmann::json::parse(r.out)) seen.insert(row["params"]["suite"].get<std::string>());
  EXPECT_EQ(seen, (std::set<std::string>{"lemma3.1", "lemma4.1"}));
}
