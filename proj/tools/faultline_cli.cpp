// faultline: batch frontend for the team-partitioning library.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <thread>

#include "faultline/faultline.hpp"

namespace fs = std::filesystem;
using namespace faultline;

namespace {

enum Exit { ok = 0, io = 1, usage = 2, infeasible = 3 };

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string fixed6(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

/// Population with numeric binning applied; warnings go to stderr.
Population load_input(const std::string& csv_path, const std::string& schema_path) {
  std::vector<std::string> warnings;
  auto pop = discretize(load_population(csv_path, schema_path), &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  return pop;
}

/// Output sink: a file, or standard output for "-".
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path == "-") return;
    if (const auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
    if (!*file_) throw Error("cannot write '" + path + "'");
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

void write_json(const fs::path& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
}

/// Runs fn(i) for i in [0, count) on up to `threads` threads.
template <class Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += threads) fn(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<WorkerId> all_ids(std::size_t n) {
  std::vector<WorkerId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

struct NamedTeam {
  std::string id;
  std::vector<WorkerId> members;
};

std::vector<WorkerId> parse_members(const std::string& field, const std::string& where) {
  std::vector<WorkerId> out;
  std::stringstream ss(field);
  std::string tok;
  while (std::getline(ss, tok, ';')) {
    tok = csv::trim(tok);
    if (tok.empty()) continue;
    const auto v = csv::parse_int(tok);
    if (!v || *v < 0) throw ParseError(where + ": bad member id '" + tok + "'");
    out.push_back(static_cast<WorkerId>(*v));
  }
  return out;
}

/// Teams from either `team_id,members` rows or a `worker_id,team_id` assignment.
std::vector<NamedTeam> load_teams(const std::string& path, const Population& pop) {
  const auto table = csv::read(path);
  const auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (table.header[c] == name) return c;
    return std::nullopt;
  };
  std::vector<NamedTeam> teams;
  const auto field = [&](const csv::Row& row, std::size_t c) {
    if (c >= row.fields.size()) throw ParseError(path + ":" + std::to_string(row.line) + ": too few fields");
    return row.fields[c];
  };
  if (const auto c_mem = col("members"), c_id = col("team_id"); c_mem && c_id) {
    for (const auto& row : table.rows)
      teams.push_back({field(row, *c_id), parse_members(field(row, *c_mem), path + ":" + std::to_string(row.line))});
  } else if (const auto c_w = col("worker_id"); c_w && c_id) {
    std::map<long long, std::size_t> index;
    for (const auto& row : table.rows) {
      const auto w = csv::parse_int(field(row, *c_w));
      const auto t = csv::parse_int(field(row, *c_id));
      if (!w || !t || *w < 0 || *t < 0)
        throw ParseError(path + ":" + std::to_string(row.line) + ": non-integer id");
      auto [it, fresh] = index.try_emplace(*t, teams.size());
      if (fresh) teams.push_back({std::to_string(*t), {}});
      teams[it->second].members.push_back(static_cast<WorkerId>(*w));
    }
    std::sort(teams.begin(), teams.end(), [](const NamedTeam& a, const NamedTeam& b) {
      return std::stoll(a.id) < std::stoll(b.id);
    });
  } else {
    throw ParseError(path + ": expected columns team_id,members or worker_id,team_id");
  }
  for (auto& t : teams) {
    for (auto id : t.members)
      if (id >= pop.size())
        throw ParseError(path + ": team '" + t.id + "' names unknown worker " + std::to_string(id));
    std::sort(t.members.begin(), t.members.end());
    if (std::adjacent_find(t.members.begin(), t.members.end()) != t.members.end())
      throw ParseError(path + ": team '" + t.id + "' lists a worker twice");
  }
  if (teams.empty()) throw ParseError(path + ": no teams");
  return teams;
}

MatchingMode parse_matching(const std::string& s) { return s == "greedy" ? MatchingMode::greedy : MatchingMode::exact; }

// ---------------------------------------------------------------- partition

struct PartitionArgs {
  std::string input, schema, output, algorithm = "splitter", matching = "exact";
  std::size_t team_size = 0, restarts = 1, max_iters = 100, threads = 1;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = 0;
  bool no_timings = false;
};

int run_partition(const PartitionArgs& a) {
  const auto pop = load_input(a.input, a.schema);
  SplitterOptions opt;
  opt.sizes = a.sizes.empty() ? uniform_sizes(pop.size(), a.team_size) : a.sizes;
  opt.matching = parse_matching(a.matching);
  opt.restarts = a.restarts;
  opt.max_iters = a.max_iters;
  opt.seed = a.seed;
  opt.threads = a.threads;

  const auto start = std::chrono::steady_clock::now();
  Partitioning p;
  std::vector<RestartReport> reports;
  if (a.algorithm == "splitter") {
    auto r = faultline_splitter(pop, opt);
    p = std::move(r.partitioning);
    reports = std::move(r.restarts);
  } else if (a.algorithm == "greedy") {
    p = greedy_baseline(pop, opt);
  } else {
    p = clustering_baseline(pop, opt);
  }
  const double wall_ms =
      a.no_timings ? 0.0
                   : std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  const auto write_assignment = [&](std::ostream& out) {
    csv::write_row(out, {"worker_id", "team_id"});
    const auto team_of = p.assignment(pop.size());
    for (WorkerId i = 0; i < pop.size(); ++i) csv::write_row(out, {std::to_string(i), std::to_string(team_of[i])});
  };
  if (a.output == "-") {
    write_assignment(std::cout);
    return ok;
  }
  const auto dir = prepare_dir(a.output);
  {
    std::ofstream out(dir / "assignment.csv", std::ios::binary);
    if (!out) throw Error("cannot write '" + (dir / "assignment.csv").string() + "'");
    write_assignment(out);
  }
  nlohmann::json summary;
  summary["algorithm"] = a.algorithm;
  summary["matching"] = a.matching;
  summary["seed"] = a.seed;
  summary["population"] = pop.size();
  summary["features"] = pop.feature_count();
  summary["score"] = partition_score(p, pop);
  summary["normalized_score"] = normalized_partition_score(p, pop);
  summary["restarts"] = reports.size();
  nlohmann::json iters = nlohmann::json::array(), restarts = nlohmann::json::array();
  std::size_t total_iters = 0;
  for (const auto& r : reports) {
    total_iters += r.iterations;
    restarts.push_back({{"seed", r.seed},
                        {"iterations", r.iterations},
                        {"initial_score", r.initial_score},
                        {"best_score", r.best_score}});
  }
  summary["iterations"] = total_iters;
  summary["restart_reports"] = restarts;
  summary["wall_time_ms"] = wall_ms;
  nlohmann::json teams = nlohmann::json::array();
  for (std::size_t j = 0; j < p.teams.size(); ++j)
    teams.push_back({{"team_id", j}, {"size", p.teams[j].size()}, {"ct", ct_score(p.teams[j], pop)}});
  summary["teams"] = teams;
  write_json(dir / "summary.json", summary);
  std::cout << "score " << fixed6(partition_score(p, pop)) << " normalized "
            << fixed6(normalized_partition_score(p, pop)) << '\n';
  return ok;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string input, schema, teams, measure = "ct", penalty, output = "-";
  std::size_t threads = 1;
};

double score_one(const std::string& measure, const Team& t, const Population& pop, const PenaltyScheme* g) {
  if (measure == "ct") return ct_score(t, pop);
  if (measure == "ss") return ss_score(t, pop);
  if (measure == "asw") return asw_score(t, pop);
  return pct_score(t, pop, *g);
}

int run_score(const ScoreArgs& a) {
  const auto pop = load_input(a.input, a.schema);
  std::optional<PenaltyScheme> g;
  if (a.measure == "pct") {
    g = a.penalty.empty() ? PenaltyScheme::linear(pop.feature_count()) : load_penalty(a.penalty);
    if (g->g.size() != pop.feature_count() + 1)
      throw UsageError("penalty scheme has " + std::to_string(g->g.size()) + " entries, expected " +
                       std::to_string(pop.feature_count() + 1));
  }
  std::vector<NamedTeam> teams;
  if (a.teams.empty())
    teams.push_back({"all", all_ids(pop.size())});
  else
    teams = load_teams(a.teams, pop);
  std::vector<std::string> values(teams.size());
  parallel_for(teams.size(), a.threads, [&](std::size_t i) {
    const Team t(pop, teams[i].members);
    values[i] = fixed6(score_one(a.measure, t, pop, g ? &*g : nullptr));
  });
  Sink sink(a.output);
  csv::write_row(sink.out(), {"team_id", a.measure});
  for (std::size_t i = 0; i < teams.size(); ++i) csv::write_row(sink.out(), {teams[i].id, values[i]});
  return ok;
}

// ---------------------------------------------------------------- measure-compare

struct CompareArgs {
  std::string input, schema, teams, output = "-";
  std::size_t threads = 1;
  bool no_timings = false;
};

int run_measure_compare(const CompareArgs& a) {
  const auto pop = load_input(a.input, a.schema);
  const auto teams = load_teams(a.teams, pop);
  std::vector<std::vector<std::string>> rows(teams.size());
  parallel_for(teams.size(), a.threads, [&](std::size_t i) {
    const Team t(pop, teams[i].members);
    std::vector<std::string> row{teams[i].id};
    std::vector<std::string> times;
    for (const char* m : {"ct", "ss", "asw"}) {
      const std::size_t need = std::string(m) == "ct" ? 1 : (std::string(m) == "ss" ? 2 : 3);
      if (t.size() < need) {
        row.emplace_back();
        times.emplace_back();
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      const double v = score_one(m, t, pop, nullptr);
      const auto us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
      row.push_back(fixed6(v));
      times.push_back(a.no_timings ? "0" : fixed6(us));
    }
    row.insert(row.end(), times.begin(), times.end());
    rows[i] = std::move(row);
  });
  Sink sink(a.output);
  csv::write_row(sink.out(), {"team_id", "ct", "ss", "asw", "us_ct", "us_ss", "us_asw"});
  for (const auto& r : rows) csv::write_row(sink.out(), r);
  return ok;
}

// ---------------------------------------------------------------- generators

struct Synth1Args {
  std::size_t n = 400, m = 8;
  double neg = 0.08, pos = 0.25;
  std::uint64_t seed = 0;
  std::string output;
};

int run_synth1(const Synth1Args& a) {
  const auto r = synth1(a.n, a.m, a.neg, a.pos, a.seed);
  const auto dir = prepare_dir(a.output);
  save_population(r.population, (dir / "population.csv").string(), (dir / "schema.json").string());
  nlohmann::json rep;
  rep["seed"] = a.seed;
  rep["target_negative_fraction"] = a.neg;
  rep["target_positive_fraction"] = a.pos;
  nlohmann::json feats = nlohmann::json::array();
  for (std::size_t f = 0; f < r.features.size(); ++f) {
    const auto& s = r.features[f];
    feats.push_back({{"feature", r.population.schema()[f].name},
                     {"x", s.x},
                     {"y", s.y},
                     {"z", s.z},
                     {"negative_fraction", s.negative_fraction},
                     {"positive_fraction", s.positive_fraction},
                     {"conflict_fraction", s.conflict_fraction}});
  }
  rep["features"] = feats;
  write_json(dir / "synth1_report.json", rep);
  return ok;
}

struct Synth2Args {
  std::vector<std::size_t> team_sizes{4, 8, 16, 32, 64}, subgroup_counts;
  std::size_t teams_per_config = 100;
  std::uint64_t seed = 0;
  std::string output;
};

int run_synth2(const Synth2Args& a) {
  Synth2Options opt;
  opt.team_sizes = a.team_sizes;
  opt.subgroup_counts = a.subgroup_counts;
  opt.teams_per_config = a.teams_per_config;
  opt.seed = a.seed;
  const auto r = synth2(opt);
  const auto dir = prepare_dir(a.output);
  save_population(r.population, (dir / "population.csv").string(), (dir / "schema.json").string());
  std::ofstream out(dir / "teams.csv", std::ios::binary);
  if (!out) throw Error("cannot write '" + (dir / "teams.csv").string() + "'");
  csv::write_row(out, {"team_id", "members", "ts", "sn"});
  for (std::size_t t = 0; t < r.teams.size(); ++t) {
    std::string mem;
    for (auto id : r.teams[t].members) mem += (mem.empty() ? "" : ";") + std::to_string(id);
    csv::write_row(out, {std::to_string(t), mem, std::to_string(r.teams[t].team_size),
                         std::to_string(r.teams[t].subgroups)});
  }
  return ok;
}

struct CliqueArgs {
  std::string graph, output;
  std::size_t nodes = 0, k = 0;
};

int run_reduce_clique(const CliqueArgs& a) {
  const auto table = csv::read(a.graph);
  if (table.header.size() < 2) throw ParseError(a.graph + ": expected two columns per edge");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& row : table.rows) {
    if (row.fields.size() < 2) throw ParseError(a.graph + ":" + std::to_string(row.line) + ": too few fields");
    const auto u = csv::parse_int(row.fields[0]), v = csv::parse_int(row.fields[1]);
    if (!u || !v || *u < 0 || *v < 0)
      throw ParseError(a.graph + ":" + std::to_string(row.line) + ": non-integer node id");
    edges.emplace_back(static_cast<std::size_t>(*u), static_cast<std::size_t>(*v));
  }
  const auto pop = clique_reduction(a.nodes, edges, a.k);
  const auto dir = prepare_dir(a.output);
  save_population(pop, (dir / "population.csv").string(), (dir / "schema.json").string());
  return ok;
}

// ---------------------------------------------------------------- penalty learning

struct LearnArgs {
  std::string input, schema, training, mode = "regression", output;
  double ridge = 1e-8;
  bool no_standardize = false;
  std::uint64_t seed = 0;
};

int run_learn_penalty(const LearnArgs& a) {
  const auto pop = load_input(a.input, a.schema);
  const auto records = load_outcomes(a.training);
  FitOptions opt;
  opt.mode = a.mode == "classification" ? FitMode::classification : FitMode::regression;
  opt.ridge = a.ridge;
  opt.standardize = !a.no_standardize;
  opt.seed = a.seed;
  const auto rep = fit_penalties(pop, records, opt);
  const auto dir = prepare_dir(a.output);
  save_penalty(rep.scheme, (dir / "penalty.json").string());
  nlohmann::json doc;
  doc["mode"] = a.mode;
  doc["rows"] = rep.rows;
  doc["ridge"] = a.ridge;
  doc["standardized"] = opt.standardize;
  doc["target_scale"] = rep.target_scale;
  doc["r_squared"] = rep.r_squared;
  nlohmann::json coef = nlohmann::json::array();
  for (std::size_t x = 0; x < rep.scheme.g.size(); ++x)
    coef.push_back({{"x", x}, {"g", rep.scheme.g[x]}, {"raw", rep.raw_coefficients[x]},
                    {"alignment_share", rep.alignment_share[x]}});
  doc["coefficients"] = coef;
  write_json(dir / "fit_report.json", doc);
  return ok;
}

struct TraceArgs {
  std::string input, schema, penalty, output = "-", matching = "exact";
  std::size_t team_size = 0, restarts = 1, max_iters = 100;
  std::vector<std::size_t> sizes;
  std::uint64_t seed = 0;
};

int run_pct_trace(const TraceArgs& a) {
  const auto pop = load_input(a.input, a.schema);
  SplitterOptions opt;
  opt.sizes = a.sizes.empty() ? uniform_sizes(pop.size(), a.team_size) : a.sizes;
  opt.matching = parse_matching(a.matching);
  opt.restarts = a.restarts;
  opt.max_iters = a.max_iters;
  opt.seed = a.seed;
  const auto g = a.penalty.empty() ? PenaltyScheme::linear(pop.feature_count()) : load_penalty(a.penalty);
  if (g.g.size() != pop.feature_count() + 1) throw UsageError("penalty scheme length must be m + 1");
  const auto trace = pct_vs_ct_trace(pop, opt, g);
  Sink sink(a.output);
  csv::write_row(sink.out(), {"restart", "iteration", "ct", "pct"});
  for (const auto& p : trace)
    csv::write_row(sink.out(), {std::to_string(p.restart), std::to_string(p.iteration), fixed6(p.ct), fixed6(p.pct)});
  return ok;
}

// ---------------------------------------------------------------- cramers-v

struct CramerArgs {
  std::string input, schema, output = "-";
};

int run_cramers_v(const CramerArgs& a) {
  const auto pop = load_input(a.input, a.schema);
  const std::size_t m = pop.feature_count();
  for (std::size_t f = 0; f < m; ++f)
    if (!pop.schema()[f].is_categorical())
      throw UsageError("cramers-v: feature '" + pop.schema()[f].name + "' is not categorical");
  std::vector<std::vector<std::size_t>> cols(m, std::vector<std::size_t>(pop.size()));
  for (std::size_t f = 0; f < m; ++f)
    for (WorkerId i = 0; i < pop.size(); ++i) cols[f][i] = pop[i].symbol(f);
  Sink sink(a.output);
  std::vector<std::string> header{"feature"};
  for (std::size_t f = 0; f < m; ++f) header.push_back(pop.schema()[f].name);
  csv::write_row(sink.out(), header);
  for (std::size_t f = 0; f < m; ++f) {
    std::vector<std::string> row{pop.schema()[f].name};
    for (std::size_t h = 0; h < m; ++h) row.push_back(fixed6(stats::cramers_v(cols[f], cols[h])));
    csv::write_row(sink.out(), row);
  }
  return ok;
}

void add_cramers(CLI::App* sub, CramerArgs& a) {
  sub->add_option("--input", a.input, "population CSV")->required();
  sub->add_option("--schema", a.schema, "schema JSON")->required();
  sub->add_option("--output", a.output, "matrix CSV, '-' for stdout");
}

void add_sizes(CLI::App* sub, std::size_t& team_size, std::vector<std::size_t>& sizes) {
  auto* k = sub->add_option("--team-size", team_size, "uniform team size")->check(CLI::PositiveNumber);
  auto* s = sub->add_option("--sizes", sizes, "explicit team sizes, comma separated")->delimiter(',');
  k->excludes(s);
  s->excludes(k);
  sub->callback([k, s] {
    if (k->count() == 0 && s->count() == 0) throw CLI::ValidationError("--team-size or --sizes is required");
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Faultline-minimizing team partitioning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "faultline 1.0.0");

  PartitionArgs pa;
  auto* part = app.add_subcommand("partition", "split a population into teams");
  part->add_option("--input", pa.input, "population CSV")->required();
  part->add_option("--schema", pa.schema, "schema JSON")->required();
  add_sizes(part, pa.team_size, pa.sizes);
  part->add_option("--algorithm", pa.algorithm)->check(CLI::IsMember({"splitter", "greedy", "clustering"}));
  part->add_option("--matching", pa.matching)->check(CLI::IsMember({"exact", "greedy"}));
  part->add_option("--seed", pa.seed);
  part->add_option("--restarts", pa.restarts)->check(CLI::PositiveNumber);
  part->add_option("--max-iters", pa.max_iters)->check(CLI::PositiveNumber);
  part->add_option("--threads", pa.threads)->check(CLI::PositiveNumber);
  part->add_option("--output", pa.output, "output directory, '-' streams the assignment CSV")->required();
  part->add_flag("--no-timings", pa.no_timings, "write 0 for wall-clock fields");

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "score teams under one measure");
  score->add_option("--input", sa.input, "population CSV")->required();
  score->add_option("--schema", sa.schema, "schema JSON")->required();
  score->add_option("--teams", sa.teams, "teams CSV (team_id,members) or assignment CSV; default: whole population");
  score->add_option("--measure", sa.measure)->check(CLI::IsMember({"ct", "asw", "ss", "pct"}));
  score->add_option("--penalty", sa.penalty, "penalty JSON for --measure pct (default g(x) = x)");
  score->add_option("--threads", sa.threads)->check(CLI::PositiveNumber);
  score->add_option("--output", sa.output, "CSV, '-' for stdout");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("measure-compare", "CT, SS and ASW with per-measure timings");
  cmp->add_option("--input", ca.input, "population CSV")->required();
  cmp->add_option("--schema", ca.schema, "schema JSON")->required();
  cmp->add_option("--teams", ca.teams, "teams CSV")->required();
  cmp->add_option("--threads", ca.threads)->check(CLI::PositiveNumber);
  cmp->add_option("--output", ca.output, "CSV, '-' for stdout");
  cmp->add_flag("--no-timings", ca.no_timings, "write 0 for the timing columns");

  Synth1Args s1;
  auto* syn1 = app.add_subcommand("synth1", "population with controlled triangle fractions");
  syn1->add_option("--n", s1.n)->check(CLI::PositiveNumber);
  syn1->add_option("--m", s1.m)->check(CLI::PositiveNumber);
  syn1->add_option("--neg", s1.neg, "target all-negative triangle fraction")->check(CLI::Range(0.0, 1.0));
  syn1->add_option("--pos", s1.pos, "target all-positive triangle fraction")->check(CLI::Range(0.0, 1.0));
  syn1->add_option("--seed", s1.seed);
  syn1->add_option("--output", s1.output, "output directory")->required();

  Synth2Args s2;
  auto* syn2 = app.add_subcommand("synth2", "teams built from homogeneous subgroups");
  syn2->add_option("--team-sizes", s2.team_sizes)->delimiter(',');
  syn2->add_option("--subgroup-counts", s2.subgroup_counts, "default: powers of two up to each size")->delimiter(',');
  syn2->add_option("--teams-per-config", s2.teams_per_config);
  syn2->add_option("--seed", s2.seed);
  syn2->add_option("--output", s2.output, "output directory")->required();

  LearnArgs la;
  auto* learn = app.add_subcommand("learn-penalty", "fit g(x) from team outcomes");
  learn->add_option("--input", la.input, "population CSV")->required();
  learn->add_option("--schema", la.schema, "schema JSON")->required();
  learn->add_option("--training", la.training, "CSV team_id,members,outcome")->required();
  learn->add_option("--mode", la.mode)->check(CLI::IsMember({"regression", "classification"}));
  learn->add_option("--ridge", la.ridge)->check(CLI::NonNegativeNumber);
  learn->add_flag("--no-standardize", la.no_standardize, "only negate the outcomes");
  learn->add_option("--seed", la.seed, "seed for fake teams in classification mode");
  learn->add_option("--output", la.output, "output directory")->required();

  TraceArgs ta;
  auto* trace = app.add_subcommand("pct-trace", "CT and PCT after every splitter iteration");
  trace->add_option("--input", ta.input, "population CSV")->required();
  trace->add_option("--schema", ta.schema, "schema JSON")->required();
  trace->add_option("--penalty", ta.penalty, "penalty JSON (default g(x) = x)");
  add_sizes(trace, ta.team_size, ta.sizes);
  trace->add_option("--matching", ta.matching)->check(CLI::IsMember({"exact", "greedy"}));
  trace->add_option("--restarts", ta.restarts)->check(CLI::PositiveNumber);
  trace->add_option("--max-iters", ta.max_iters)->check(CLI::PositiveNumber);
  trace->add_option("--seed", ta.seed);
  trace->add_option("--output", ta.output, "CSV, '-' for stdout");

  CramerArgs cv;
  add_cramers(app.add_subcommand("cramers-v", "pairwise Cramer's V between features"), cv);
  auto* stats_cmd = app.add_subcommand("stats", "statistical summaries");
  stats_cmd->require_subcommand(1);
  CramerArgs cv_nested;
  auto* cv_sub = stats_cmd->add_subcommand("cramers-v", "pairwise Cramer's V between features");
  add_cramers(cv_sub, cv_nested);

  CliqueArgs cl;
  auto* clique = app.add_subcommand("reduce-clique", "hardness-reduction population from a graph");
  clique->add_option("--graph", cl.graph, "edge CSV with a header and two node-id columns")->required();
  clique->add_option("--nodes", cl.nodes, "number of vertices")->required();
  clique->add_option("--k", cl.k, "clique size")->required()->check(CLI::PositiveNumber);
  clique->add_option("--output", cl.output, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? ok : usage;
  }

  try {
    if (*part) return run_partition(pa);
    if (*score) return run_score(sa);
    if (*cmp) return run_measure_compare(ca);
    if (*syn1) return run_synth1(s1);
    if (*syn2) return run_synth2(s2);
    if (*learn) return run_learn_penalty(la);
    if (*trace) return run_pct_trace(ta);
    if (app.got_subcommand("cramers-v")) return run_cramers_v(cv);
    if (*cv_sub) return run_cramers_v(cv_nested);
    if (*clique) return run_reduce_clique(cl);
  } catch (const InfeasibleSizes& e) {
    std::cerr << "error: " << e.what() << '\n';
    return infeasible;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io;
  }
  return usage;
}
