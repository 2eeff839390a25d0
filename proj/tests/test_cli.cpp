#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>

#include <json.hpp>

#include "faultline/faultline.hpp"
#include "test_support.hpp"

using namespace faultline;
using testing_support::read_file;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

int run(const std::string& args, const std::string& stdout_path = "/dev/null") {
  const std::string cmd = std::string(FAULTLINE_CLI) + " " + args + " > " + stdout_path + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

/// synth1 population of `n` workers under dir/pop.
std::string make_synth1(const TempDir& dir, std::size_t n = 40) {
  EXPECT_EQ(run("synth1 --n " + std::to_string(n) + " --m 4 --neg 0.1 --pos 0.3 --seed 5 --output " +
                dir.file("pop")),
            0);
  return "--input " + dir.file("pop/population.csv") + " --schema " + dir.file("pop/schema.json");
}

}  // namespace

TEST(Cli, HelpOnEverySubcommand) {
  EXPECT_EQ(run("--help"), 0);
  for (const char* sub : {"partition", "score", "measure-compare", "synth1", "synth2", "learn-penalty",
                          "pct-trace", "cramers-v", "stats cramers-v", "reduce-clique"})
    EXPECT_EQ(run(std::string(sub) + " --help"), 0) << sub;
}

TEST(Cli, ExitCodes) {
  TempDir dir("cli_exit");
  const auto in = make_synth1(dir);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("partition " + in + " --team-size 5 --bogus 1 --output " + dir.file("o")), 2);
  EXPECT_EQ(run("partition " + in + " --output " + dir.file("o")), 2);
  EXPECT_EQ(run("partition " + in + " --team-size 5 --algorithm magic --output " + dir.file("o")), 2);
  EXPECT_EQ(run("partition " + in + " --team-size 7 --output " + dir.file("o")), 3);
  EXPECT_EQ(run("partition " + in + " --sizes 10,10 --output " + dir.file("o")), 3);
  EXPECT_EQ(run("partition --input " + dir.file("missing.csv") + " --schema " + dir.file("pop/schema.json") +
                " --team-size 5 --output " + dir.file("o")),
            1);
}

TEST(Cli, PartitionWritesAssignmentAndSummary) {
  TempDir dir("cli_partition");
  const auto in = make_synth1(dir);
  ASSERT_EQ(run("partition " + in + " --team-size 5 --algorithm splitter --matching exact --seed 3 --restarts 2 "
                "--output " + dir.file("out")),
            0);
  const auto summary = nlohmann::json::parse(read_file(dir.file("out/summary.json")));
  EXPECT_GE(summary["normalized_score"].get<double>(), 0.0);
  EXPECT_LE(summary["normalized_score"].get<double>(), 1.0);
  EXPECT_EQ(summary["teams"].size(), 8u);
  EXPECT_EQ(summary["restarts"].get<int>(), 2);
  EXPECT_EQ(summary["seed"].get<int>(), 3);

  const auto pop = load_population(dir.file("pop/population.csv"), dir.file("pop/schema.json"));
  const auto table = csv::read(dir.file("out/assignment.csv"));
  EXPECT_EQ(table.header, (std::vector<std::string>{"worker_id", "team_id"}));
  std::vector<std::size_t> team_of;
  for (const auto& row : table.rows) team_of.push_back(std::stoul(row.fields[1]));
  const auto p = Partitioning::from_assignment(pop, team_of, 8);
  EXPECT_NO_THROW(p.validate(pop, uniform_sizes(40, 5)));
  EXPECT_DOUBLE_EQ(partition_score(p, pop), summary["score"].get<double>());
}

TEST(Cli, ExplicitSizesAndStdout) {
  TempDir dir("cli_sizes");
  const auto in = make_synth1(dir, 10);
  for (const char* algo : {"splitter", "greedy", "clustering"}) {
    ASSERT_EQ(run("partition " + in + " --sizes 3,3,4 --algorithm " + algo + " --output -", dir.file("a.csv")), 0);
    const auto table = csv::read(dir.file("a.csv"));
    std::vector<std::size_t> load(3, 0);
    for (const auto& row : table.rows) ++load.at(std::stoul(row.fields[1]));
    EXPECT_EQ(load, (std::vector<std::size_t>{3, 3, 4})) << algo;
  }
}

TEST(Cli, DeterministicAcrossRunsAndThreads) {
  TempDir dir("cli_det");
  const auto in = make_synth1(dir);
  const auto part = "partition " + in + " --team-size 5 --seed 11 --restarts 4 --no-timings --output ";
  ASSERT_EQ(run(part + dir.file("a") + " --threads 1"), 0);
  ASSERT_EQ(run(part + dir.file("b") + " --threads 4"), 0);
  EXPECT_EQ(read_file(dir.file("a/assignment.csv")), read_file(dir.file("b/assignment.csv")));
  EXPECT_EQ(read_file(dir.file("a/summary.json")), read_file(dir.file("b/summary.json")));
  ASSERT_EQ(run("synth1 --n 40 --m 4 --neg 0.1 --pos 0.3 --seed 5 --output " + dir.file("again")), 0);
  EXPECT_EQ(read_file(dir.file("pop/population.csv")), read_file(dir.file("again/population.csv")));
}

TEST(Cli, ScoreMatchesLibrary) {
  TempDir dir("cli_score");
  const auto in = make_synth1(dir);
  write_file(dir.file("teams.csv"), "team_id,members\nx,0;1;2;3\ny,4;5;6;7;8;9\n");
  const auto pop = load_population(dir.file("pop/population.csv"), dir.file("pop/schema.json"));
  for (const char* m : {"ct", "ss", "asw", "pct"}) {
    ASSERT_EQ(run("score " + in + " --teams " + dir.file("teams.csv") + " --measure " + m + " --output " +
                  dir.file(std::string(m) + ".csv")),
              0);
    const auto t = csv::read(dir.file(std::string(m) + ".csv"));
    ASSERT_EQ(t.rows.size(), 2u);
    const Team team(pop, {0, 1, 2, 3});
    const double expect = std::string(m) == "ct"    ? ct_score(team, pop)
                          : std::string(m) == "ss"  ? ss_score(team, pop)
                          : std::string(m) == "asw" ? asw_score(team, pop)
                                                    : pct_score(team, pop, PenaltyScheme::linear(4));
    EXPECT_NEAR(std::stod(t.rows[0].fields[1]), expect, 5e-7) << m;
  }
  save_penalty(PenaltyScheme{{0, 1}}, dir.file("short.json"));
  EXPECT_EQ(run("score " + in + " --measure pct --penalty " + dir.file("short.json")), 2);
}

TEST(Cli, MeasureCompareColumns) {
  TempDir dir("cli_compare");
  ASSERT_EQ(run("synth2 --team-sizes 4,8 --teams-per-config 3 --seed 2 --output " + dir.file("s2")), 0);
  const auto teams = csv::read(dir.file("s2/teams.csv"));
  EXPECT_EQ(teams.header, (std::vector<std::string>{"team_id", "members", "ts", "sn"}));
  EXPECT_EQ(teams.rows.size(), (3u + 4u) * 3u);
  ASSERT_EQ(run("measure-compare --input " + dir.file("s2/population.csv") + " --schema " +
                dir.file("s2/schema.json") + " --teams " + dir.file("s2/teams.csv") + " --output " +
                dir.file("cmp.csv")),
            0);
  const auto cmp = csv::read(dir.file("cmp.csv"));
  EXPECT_EQ(cmp.header, (std::vector<std::string>{"team_id", "ct", "ss", "asw", "us_ct", "us_ss", "us_asw"}));
  EXPECT_EQ(cmp.rows.size(), teams.rows.size());
}

TEST(Cli, LearnPenaltyNormalizes) {
  TempDir dir("cli_learn");
  const auto in = make_synth1(dir, 60);
  const auto pop = load_population(dir.file("pop/population.csv"), dir.file("pop/schema.json"));
  const auto teams = fake_teams(pop, 40, {6}, 1);
  std::string training = "team_id,members,outcome\n";
  for (std::size_t t = 0; t < teams.size(); ++t) {
    std::string mem;
    for (auto id : teams[t]) mem += (mem.empty() ? "" : ";") + std::to_string(id);
    training += std::to_string(t) + "," + mem + "," + std::to_string(-ct_score(Team(pop, teams[t]), pop)) + "\n";
  }
  write_file(dir.file("train.csv"), training);
  ASSERT_EQ(run("learn-penalty " + in + " --training " + dir.file("train.csv") + " --output " + dir.file("fit")), 0);
  const auto g = load_penalty(dir.file("fit/penalty.json"));
  EXPECT_EQ(g.g.size(), 5u);
  EXPECT_EQ(g.g[0], 0.0);
  const auto rep = nlohmann::json::parse(read_file(dir.file("fit/fit_report.json")));
  EXPECT_GT(rep["r_squared"].get<double>(), 0.99);
}

TEST(Cli, ReduceCliqueFeatureCount) {
  TempDir dir("cli_clique");
  write_file(dir.file("g.csv"), "u,v\n0,1\n1,2\n0,2\n3,4\n4,5\n3,5\n");
  ASSERT_EQ(run("reduce-clique --graph " + dir.file("g.csv") + " --nodes 6 --k 3 --output " + dir.file("r")), 0);
  const auto pop = load_population(dir.file("r/population.csv"), dir.file("r/schema.json"));
  EXPECT_EQ(pop.feature_count(),
            complement_edges(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}).size());
  EXPECT_EQ(run("reduce-clique --graph " + dir.file("g.csv") + " --nodes 6 --k 4 --output " + dir.file("r2")), 2);
}

TEST(Cli, CramersVBothSpellings) {
  TempDir dir("cli_cramer");
  const auto in = make_synth1(dir);
  ASSERT_EQ(run("cramers-v " + in + " --output " + dir.file("a.csv")), 0);
  ASSERT_EQ(run("stats cramers-v " + in, dir.file("b.csv")), 0);
  EXPECT_EQ(read_file(dir.file("a.csv")), read_file(dir.file("b.csv")));
  const auto t = csv::read(dir.file("a.csv"));
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[2].fields[3], "1.000000");
}

TEST(Cli, PctTraceLinearIdentity) {
  TempDir dir("cli_trace");
  const auto in = make_synth1(dir);
  ASSERT_EQ(run("pct-trace " + in + " --team-size 5 --restarts 2 --output " + dir.file("t.csv")), 0);
  const auto t = csv::read(dir.file("t.csv"));
  ASSERT_FALSE(t.rows.empty());
  for (const auto& row : t.rows) EXPECT_NEAR(std::stod(row.fields[3]), 4 * std::stod(row.fields[2]), 1e-5);
}
