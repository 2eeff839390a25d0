#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "faultline/ct_measure.hpp"
#include "faultline/population.hpp"
#include "faultline/team.hpp"
#include "test_support.hpp"

using namespace faultline;
using testing_support::TempDir;
using testing_support::write_file;

namespace {

const char* kExampleSchema = R"({"features":[
  {"name":"country","kind":"categorical","agreement":"exact","values":["India"]},
  {"name":"gender","kind":"categorical"},
  {"name":"major","kind":"categorical","values":[]}
]})";

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadPopulation, ExampleOnePool) {
  TempDir dir("load");
  write_file(dir.file("schema.json"), kExampleSchema);
  write_file(dir.file("pop.csv"),
             "id,country,gender,major\n"
             "1,India,Male,CS\n"
             "2,India,Male,Business\n"
             "3,China,Male,Chemistry\n");
  const auto pop = load_population(dir.file("pop.csv"), dir.file("schema.json"));
  EXPECT_EQ(pop.size(), 3u);
  EXPECT_EQ(pop.feature_count(), 3u);
  // Ids follow row order; unseen symbols extend the schema in order of appearance.
  EXPECT_EQ(pop[0].id, 0u);
  EXPECT_EQ(pop.schema()[0].values, (std::vector<std::string>{"India", "China"}));
  EXPECT_EQ(pop.schema()[2].values,
            (std::vector<std::string>{"CS", "Business", "Chemistry"}));
  EXPECT_EQ(pop[2].symbol(0), 1u);
  EXPECT_EQ(pop[1].symbol(1), 0u);
}

TEST(LoadPopulation, ColumnsWithoutIdAndInAnyOrder) {
  TempDir dir("order");
  write_file(dir.file("schema.json"), kExampleSchema);
  write_file(dir.file("pop.csv"), "major,gender,country\nCS,Male,India\n");
  const auto pop = load_population(dir.file("pop.csv"), dir.file("schema.json"));
  ASSERT_EQ(pop.size(), 1u);
  EXPECT_EQ(pop.schema()[2].values[pop[0].symbol(2)], "CS");
}

TEST(LoadPopulation, EmptyDataRows) {
  TempDir dir("empty");
  write_file(dir.file("schema.json"), kExampleSchema);
  write_file(dir.file("pop.csv"), "country,gender,major\n");
  EXPECT_NE(error_of([&] { load_population(dir.file("pop.csv"), dir.file("schema.json")); })
                .find("empty population"),
            std::string::npos);
  write_file(dir.file("blank.csv"), "");
  EXPECT_NE(error_of([&] { load_population(dir.file("blank.csv"), dir.file("schema.json")); })
                .find("empty file"),
            std::string::npos);
}

TEST(LoadPopulation, UnknownColumnIsNamed) {
  TempDir dir("unknown");
  write_file(dir.file("schema.json"), kExampleSchema);
  write_file(dir.file("pop.csv"), "country,gender,major,salary\nIndia,Male,CS,10\n");
  const auto msg = error_of([&] { load_population(dir.file("pop.csv"), dir.file("schema.json")); });
  EXPECT_NE(msg.find("salary"), std::string::npos) << msg;
}

TEST(LoadPopulation, MissingColumnAndBadNumberCarryLocation) {
  TempDir dir("bad");
  write_file(dir.file("schema.json"), R"({"features":[
    {"name":"team","kind":"categorical"},
    {"name":"age","kind":"numeric","agreement":"threshold","gamma":2}]})");
  write_file(dir.file("missing.csv"), "team\nA\n");
  EXPECT_NE(error_of([&] { load_population(dir.file("missing.csv"), dir.file("schema.json")); })
                .find("missing column 'age'"),
            std::string::npos);
  write_file(dir.file("nan.csv"), "team,age\nA,30\nB,thirty\n");
  const auto msg = error_of([&] { load_population(dir.file("nan.csv"), dir.file("schema.json")); });
  EXPECT_NE(msg.find(":3: column 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("thirty"), std::string::npos) << msg;
}

TEST(Schema, RejectsInconsistentSpecs) {
  EXPECT_THROW(schema_from_json(nlohmann::json::parse(R"({"features":[]})")), ParseError);
  EXPECT_THROW(schema_from_json(nlohmann::json::parse(
                   R"({"features":[{"name":"a"},{"name":"a"}]})")),
               ParseError);
  EXPECT_THROW(schema_from_json(nlohmann::json::parse(
                   R"({"features":[{"name":"a","kind":"numeric","agreement":"exact"}]})")),
               ParseError);
  EXPECT_THROW(schema_from_json(nlohmann::json::parse(
                   R"({"features":[{"name":"a","kind":"numeric","agreement":"threshold","gamma":-1}]})")),
               ParseError);
  EXPECT_THROW(schema_from_json(nlohmann::json::parse(
                   R"({"features":[{"name":"a","kind":"categorical","agreement":"bins"}]})")),
               ParseError);
}

TEST(LoadPopulation, RoundTripIsIdentical) {
  TempDir dir("roundtrip");
  write_file(dir.file("schema.json"), R"({"features":[
    {"name":"country","kind":"categorical"},
    {"name":"age","kind":"numeric","agreement":"threshold","gamma":2.5},
    {"name":"hours","kind":"numeric","agreement":"weighted","gamma":0.1}]})");
  write_file(dir.file("pop.csv"),
             "country,age,hours\n\"Korea, South\",31.25,0.1\nPeru,40,1e-7\n\"Korea, South\",19,3.3333333333333335\n");
  const auto pop = load_population(dir.file("pop.csv"), dir.file("schema.json"));
  save_population(pop, dir.file("out.csv"), dir.file("out.json"));
  const auto again = load_population(dir.file("out.csv"), dir.file("out.json"));
  EXPECT_EQ(pop, again);
  EXPECT_EQ(again.schema()[0].values[0], "Korea, South");
}

TEST(Discretize, EqualWidthTenBins) {
  std::vector<Worker> ws;
  for (int v = 1; v <= 100; ++v) ws.push_back({static_cast<WorkerId>(v - 1), {double(v)}});
  Population pop(FeatureSchema({FeatureSpec::numeric("age", Agreement::bins, 0, 10)}), ws);
  const auto d = discretize(pop);
  ASSERT_TRUE(d.schema()[0].is_categorical());
  EXPECT_EQ(d.schema()[0].cardinality(), 10u);
  // Values 10b+1 .. 10b+10 land in bin b.
  for (int v = 1; v <= 100; ++v) EXPECT_EQ(d[v - 1].symbol(0), static_cast<std::size_t>((v - 1) / 10)) << v;
  EXPECT_EQ(d.schema()[0].values.front(), "[1,10.9)");
  EXPECT_EQ(d.schema()[0].values.back(), "[90.1,100]");
}

TEST(Discretize, ConstantColumnIsOneBinWithWarning) {
  std::vector<Worker> ws;
  for (WorkerId i = 0; i < 5; ++i) ws.push_back({i, {7.0}});
  Population pop(FeatureSchema({FeatureSpec::numeric("x", Agreement::bins, 0, 4)}), ws);
  std::vector<std::string> warnings;
  const auto d = discretize(pop, &warnings);
  EXPECT_EQ(d.schema()[0].cardinality(), 1u);
  EXPECT_EQ(warnings.size(), 1u);
  Team t(d, {0, 1, 2, 3, 4});
  EXPECT_EQ(ct_score(t, d), 0.0);
  for (WorkerId i = 1; i < 5; ++i) EXPECT_TRUE(agrees(d[0], d[i], 0, d.schema()));
}

TEST(Discretize, NonFiniteIsAnError) {
  Population pop(FeatureSchema({FeatureSpec::numeric("x", Agreement::kde_bins)}),
                 {{0, {1.0}}, {1, {std::nan("")}}});
  EXPECT_THROW(discretize(pop), PreconditionError);
}

TEST(Discretize, KdeSplitsBimodalSampleAtTheValley) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Worker> ws;
  std::vector<double> xs;
  for (WorkerId i = 0; i < 400; ++i) {
    const double x = n01(gen) + (i % 2 ? 10.0 : 0.0);
    xs.push_back(x);
    ws.push_back({i, {x}});
  }
  Population pop(FeatureSchema({FeatureSpec::numeric("x", Agreement::kde_bins)}), ws);
  const auto cuts = kde_cut_points(xs);
  ASSERT_EQ(cuts.size(), 1u);
  EXPECT_GT(cuts[0], 3.0);
  EXPECT_LT(cuts[0], 7.0);
  // Dense-histogram valley: centre of the emptiest run of 0.25-wide cells in [1, 9].
  std::vector<int> hist(32, 0);
  for (double x : xs)
    if (x >= 1 && x < 9) ++hist[static_cast<std::size_t>((x - 1) / 0.25)];
  const int low = *std::min_element(hist.begin(), hist.end());
  std::size_t first = 0, last = 0;
  for (std::size_t c = 0; c < hist.size(); ++c)
    if (hist[c] == low) {
      if (first == 0 && hist[0] != low) first = c;
      last = c;
    }
  const double valley = 1 + 0.25 * (0.5 * double(first + last) + 0.5);
  EXPECT_NEAR(cuts[0], valley, 1.5);

  const auto d = discretize(pop);
  EXPECT_EQ(d.schema()[0].cardinality(), 2u);
  for (WorkerId i = 0; i < 400; ++i) EXPECT_EQ(d[i].symbol(0), i % 2) << xs[i];
}

TEST(Discretize, IsIdempotent) {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0, 50);
  std::vector<Worker> ws;
  for (WorkerId i = 0; i < 60; ++i) ws.push_back({i, {u(gen), u(gen), u(gen), double(i % 3)}});
  Population pop(FeatureSchema({FeatureSpec::numeric("a", Agreement::bins, 0, 5),
                                FeatureSpec::numeric("b", Agreement::kde_bins),
                                FeatureSpec::numeric("c", Agreement::threshold, 2.0),
                                FeatureSpec::categorical("d", {"x", "y", "z"})}),
                 ws);
  const auto once = discretize(pop);
  EXPECT_EQ(discretize(once), once);
  EXPECT_EQ(once.schema()[2].agreement, Agreement::threshold);
  EXPECT_EQ(once[5].value(2), pop[5].value(2));
}

TEST(Aggregates, ExampleOneCountryCounts) {
  const auto pop = testing_support::example1();
  const auto agg = build_aggregates(std::vector<WorkerId>{0, 1, 2}, pop);
  EXPECT_EQ(agg.count(0, 0), 2);  // India
  EXPECT_EQ(agg.count(0, 1), 1);  // China
  EXPECT_EQ(agg.count(1, 0), 3);
}

TEST(Aggregates, EmptyTeamAndDirectCount) {
  const auto pop = make_categorical_population({{0}, {0}, {1}, {2}});
  const auto empty = build_aggregates(std::vector<WorkerId>{}, pop);
  for (auto c : empty.counts(0)) EXPECT_EQ(c, 0);
  const auto agg = build_aggregates(std::vector<WorkerId>{0, 1, 2, 3}, pop);
  EXPECT_EQ(std::vector<std::int64_t>(agg.counts(0).begin(), agg.counts(0).end()),
            (std::vector<std::int64_t>{2, 1, 1}));
}

TEST(Aggregates, UndefinedUnderThresholdSemantics) {
  Population pop(FeatureSchema({FeatureSpec::numeric("age", Agreement::threshold, 1.0)}),
                 {{0, {1.0}}, {1, {2.0}}});
  EXPECT_THROW(build_aggregates(std::vector<WorkerId>{0, 1}, pop), PreconditionError);
  Team t(pop, {0, 1});
  EXPECT_FALSE(t.has_aggregates());
}

TEST(MemberDelta, AddRemoveExamples) {
  const auto pop = make_categorical_population({{0}, {1}, {0}, {2}});
  Team t(pop, {0, 1});
  const Team original = t;
  apply_member_delta(t, pop[2], Delta::add);
  EXPECT_EQ(t.aggregates().count(0, 0), 2);
  EXPECT_EQ(t.aggregates().count(0, 1), 1);
  apply_member_delta(t, pop[2], Delta::remove);
  EXPECT_EQ(t, original);

  Team u(pop, {0, 3});
  apply_member_delta(u, pop[3], Delta::remove);
  EXPECT_EQ(u.aggregates().count(0, 2), 0);
}

TEST(MemberDelta, PreconditionViolations) {
  const auto pop = make_categorical_population({{0}, {1}, {0}});
  Team t(pop, {0, 1});
  EXPECT_THROW(apply_member_delta(t, pop[0], Delta::add), PreconditionError);
  EXPECT_THROW(apply_member_delta(t, pop[2], Delta::remove), PreconditionError);
}

TEST(MemberDelta, RebuildEquivalenceUnderRandomSequences) {
  const auto pop = testing_support::random_population(40, 4, 4, 11);
  Rng rng(5);
  for (int seq = 0; seq < 200; ++seq) {
    Team t(pop);
    for (int step = 0; step < 60; ++step) {
      const WorkerId w = uniform_index(rng, pop.size());
      apply_member_delta(t, pop[w], t.contains(w) ? Delta::remove : Delta::add);
      const auto& agg = t.aggregates();
      ASSERT_EQ(agg, build_aggregates(t.members(), pop));
      for (std::size_t f = 0; f < pop.feature_count(); ++f) {
        std::int64_t mass = 0;
        for (auto c : agg.counts(f)) {
          ASSERT_GE(c, 0);
          mass += c;
        }
        ASSERT_EQ(mass, static_cast<std::int64_t>(t.size()));
      }
    }
  }
}

TEST(Partitioning, ValidateCatchesOverlapGapAndSize) {
  const auto pop = make_categorical_population({{0}, {1}, {0}, {1}});
  Partitioning ok{{Team(pop, {0, 1}), Team(pop, {2, 3})}};
  EXPECT_NO_THROW(ok.validate(pop, std::vector<std::size_t>{2, 2}));
  EXPECT_THROW(ok.validate(pop, std::vector<std::size_t>{3, 1}), PreconditionError);
  Partitioning overlap{{Team(pop, {0, 1}), Team(pop, {1, 2, 3})}};
  EXPECT_THROW(overlap.validate(pop), PreconditionError);
  Partitioning gap{{Team(pop, {0, 1}), Team(pop, {2})}};
  EXPECT_THROW(gap.validate(pop), PreconditionError);
}
