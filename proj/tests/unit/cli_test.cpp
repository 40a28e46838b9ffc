#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "fixtures.hpp"
#include "json.hpp"
#include "skewjoin/io.hpp"

namespace skewjoin {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("skewjoin_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  int run(std::vector<std::string> args) {
    out.str("");
    err.str("");
    return cli::run(args, out, err);
  }

  std::string path(const std::string& name) const { return (dir / name).string(); }

  void write_query(const JoinQuery& q) { write_text_file(dir / "q.txt", q.to_string() + "\n"); }

  fs::path dir;
  std::ostringstream out, err;
};

TEST_F(Cli, DetectSmallExample) {
  write_query(testing::two_way());
  save_database(dir / "data", testing::small_example_db());
  ASSERT_EQ(run({"detect", "--query", path("q.txt"), "--data", path("data"), "--tau", "0.5"}), 0) << err.str();
  auto j = json::parse(out.str());
  EXPECT_EQ(j["format_version"], 1);
  EXPECT_EQ(j["heavy_hitters"][0]["attribute"], "B");
  EXPECT_EQ(j["heavy_hitters"][0]["values"][0]["value"], "2");
}

TEST_F(Cli, DetectMissingRelationFile) {
  write_query(testing::two_way());
  fs::create_directories(dir / "data");
  write_text_file(dir / "data" / "R.tsv", "A\tB\n1\t2\n");
  EXPECT_EQ(run({"detect", "--query", path("q.txt"), "--data", path("data"), "--tau", "0.5"}), 1);
  EXPECT_NE(err.str().find("relation S"), std::string::npos);
}

TEST_F(Cli, PlanRunningExampleFromReport) {
  write_query(testing::running_example());
  save_database(dir / "data", testing::running_example_db());
  write_text_file(dir / "hh.json", hh_report_to_json(testing::running_example_report()));
  ASSERT_EQ(run({"plan", "--query", path("q.txt"), "--data", path("data"), "--hh", path("hh.json"), "-k", "24",
                 "--out", path("plan.json")}),
            0)
      << err.str();
  auto j = json::parse(read_text_file(dir / "plan.json"));
  ASSERT_EQ(j["entries"].size(), 6u);
  std::vector<std::string> exprs;
  for (const auto& e : j["entries"]) exprs.push_back(e["cost_expression"]);
  EXPECT_EQ(exprs, (std::vector<std::string>{"r*c + s + t*b", "r*c + s*a + t*a", "r*c + s*a + t*a", "r*d + s*d + t*b",
                                             "r*d*e + s*a*d + t*a*e", "r*d*e + s*a*d + t*a*e"}));
  std::uint64_t total = 0;
  for (const auto& e : j["entries"]) total += e["reducers"].get<std::uint64_t>();
  EXPECT_EQ(total, 24u);

  ASSERT_EQ(run({"simulate", "--query", path("q.txt"), "--data", path("data"), "--plan", path("plan.json"), "--verify",
                 "--seed", "3", "--results", path("rows.tsv")}),
            0)
      << err.str();
  auto sim = json::parse(out.str());
  EXPECT_EQ(sim["measured_communication"], sim["predicted_communication"]);
  EXPECT_TRUE(sim["oracle_check"].get<bool>());
  EXPECT_EQ(sim["format_version"], 1);
  auto rows = read_text_file(dir / "rows.tsv");
  EXPECT_EQ(rows.substr(0, rows.find('\n')), "A\tB\tE\tC\tD");
}

TEST_F(Cli, PlanWithoutHeavyHittersHasOneEntry) {
  auto q = testing::two_way();
  write_query(q);
  save_database(dir / "data", testing::make_db(q, {{{"1", "x"}, {"2", "y"}}, {{"x", "5"}, {"y", "6"}}}));
  ASSERT_EQ(run({"plan", "--query", path("q.txt"), "--data", path("data"), "--tau", "1", "-k", "4"}), 0);
  auto j = json::parse(out.str());
  ASSERT_EQ(j["entries"].size(), 1u);
  EXPECT_EQ(j["entries"][0]["types"]["B"], "-");
}

TEST_F(Cli, PlanFromStatsFile) {
  write_query(testing::two_way());
  write_text_file(dir / "stats.json", R"({"format_version":1,"heavy_hitters":{"B":["x"]},
      "combinations":[{"combination":0,"relevant_sizes":{"R":1000,"S":1000}},
                      {"combination":1,"relevant_sizes":{"R":1000,"S":500}}]})");
  ASSERT_EQ(run({"plan", "--query", path("q.txt"), "--stats", path("stats.json"), "-k", "17"}), 0) << err.str();
  auto j = json::parse(out.str());
  EXPECT_EQ(j["entries"].size(), 2u);
  EXPECT_EQ(j["entries"][1]["cost_expression"], "r*c + s*a");
}

TEST_F(Cli, PlanBudgetTooSmall) {
  write_query(testing::running_example());
  save_database(dir / "data", testing::running_example_db());
  write_text_file(dir / "hh.json", hh_report_to_json(testing::running_example_report()));
  EXPECT_EQ(run({"plan", "--query", path("q.txt"), "--data", path("data"), "--hh", path("hh.json"), "-k", "3"}), 1);
  EXPECT_NE(err.str().find("cannot cover"), std::string::npos);
}

TEST_F(Cli, SimulateRejectsPlanForOtherQuery) {
  write_query(testing::two_way());
  save_database(dir / "data", testing::small_example_db());
  ASSERT_EQ(run({"plan", "--query", path("q.txt"), "--data", path("data"), "--tau", "0.5", "-k", "4", "--out",
                 path("plan.json")}),
            0);
  write_text_file(dir / "q2.txt", "R(A,B); S(B,D)\n");
  fs::create_directories(dir / "d2");
  write_text_file(dir / "d2" / "R.tsv", "A\tB\n");
  write_text_file(dir / "d2" / "S.tsv", "B\tD\n");
  EXPECT_EQ(run({"simulate", "--query", path("q2.txt"), "--data", path("d2"), "--plan", path("plan.json")}), 1);
}

TEST_F(Cli, GenThenCompare) {
  write_query(testing::two_way());
  ASSERT_EQ(run({"gen", "--query", path("q.txt"), "-n", "600", "--plant", "B=7:0.5", "--seed", "8", "--out",
                 path("data")}),
            0)
      << err.str();
  ASSERT_EQ(run({"compare", "--query", path("q.txt"), "--data", path("data"), "-k", "16", "--tau", "0.3", "--seed",
                 "2", "--single-thread"}),
            0)
      << err.str();
  auto j = json::parse(out.str());
  EXPECT_LE(j["hh_aware"]["communication_cost"].get<std::uint64_t>(),
            j["baseline"]["communication_cost"].get<std::uint64_t>());
  EXPECT_GT(j["plain_shares"]["max_load"].get<std::uint64_t>(), j["hh_aware"]["max_load"].get<std::uint64_t>());

  ASSERT_EQ(run({"compare", "--query", path("q.txt"), "--data", path("data"), "-k", "1", "--tau", "0.3", "--verify"}),
            0)
      << err.str();
  j = json::parse(out.str());
  for (const auto* s : {"baseline", "plain_shares", "hh_aware"}) {
    EXPECT_EQ(j[s]["communication_cost"], 1200u) << s;
    EXPECT_TRUE(j[s]["oracle_check"].get<bool>()) << s;
  }
}

TEST_F(Cli, MaterializeWritesRoundTrippingDatabase) {
  write_query(testing::two_way());
  save_database(dir / "data", testing::small_example_db());
  ASSERT_EQ(run({"materialize", "--query", path("q.txt"), "--data", path("data"), "--tau", "0.5", "--combination", "1",
                 "--out", path("mat")}),
            0)
      << err.str();
  EXPECT_EQ(read_text_file(dir / "mat" / "R.tsv"), "A\tB_R\n1\t2.1.R\n3\t2.3.R\n4\t2.4.R\n");
  EXPECT_TRUE(fs::exists(dir / "mat" / "B_aux.tsv"));
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}), 1);
  EXPECT_EQ(run({"plan", "--bogus"}), 1);
  EXPECT_EQ(run({"detect", "--query", path("nope.txt"), "--data", path("x"), "--tau", "0.5"}), 1);
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out.str().find("simulate"), std::string::npos);
}

}  // namespace
}  // namespace skewjoin
