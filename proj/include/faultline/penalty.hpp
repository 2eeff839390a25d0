#pragma once

#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faultline/csv.hpp"
#include "faultline/ct_measure.hpp"
#include "faultline/error.hpp"
#include "faultline/partitioner.hpp"
#include "faultline/population.hpp"
#include "faultline/stats.hpp"
#include "faultline/synthetic.hpp"

namespace faultline {

/// A team together with its observed success (or a 0/1 label).
struct OutcomeRecord {
  std::string team_id;
  std::vector<WorkerId> members;
  double outcome = 0;
};

/// Negates the success scores and z-scores them (population std), so that
/// higher success maps to a lower dependent value.
inline std::vector<double> standardize_outcomes(std::span<const double> values) {
  if (values.size() < 2) throw PreconditionError("standardize_outcomes: need at least two values");
  std::vector<double> neg(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) neg[i] = -values[i];
  const double mu = stats::mean(neg);
  const double sd = stats::population_stddev(neg);
  if (!(sd > 0)) throw PreconditionError("standardize_outcomes: outcomes are constant");
  for (auto& v : neg) v = (v - mu) / sd;
  return neg;
}

enum class FitMode { regression, classification };

struct FitOptions {
  FitMode mode = FitMode::regression;
  double ridge = 1e-8;
  /// z-score the negated targets; when false they are only negated.
  bool standardize = true;
  std::uint64_t seed = 0;  // fake-team draws in classification mode
};

struct FitReport {
  PenaltyScheme scheme;                  // g(0) = 0
  std::vector<double> raw_coefficients;  // before the g(0) shift
  double r_squared = 0;
  double target_scale = 1;  // std of the negated targets when standardized
  std::size_t rows = 0;
  std::vector<double> alignment_share;  // share of all triangles aligned x times
};

/// Least-squares fit of the dependent value on aligned(x, T), x = 0..m,
/// without intercept, then shifted so g(0) = 0.  Regression mode uses the
/// records' outcomes; classification mode labels the records 1 and adds as
/// many random teams of matching sizes labelled 0.
inline FitReport fit_penalties(const Population& pop, const std::vector<OutcomeRecord>& records,
                               const FitOptions& opt = {}) {
  const std::size_t m = pop.feature_count();
  if (records.size() < m + 2)
    throw PreconditionError("fit_penalties: need at least " + std::to_string(m + 2) +
                            " teams, got " + std::to_string(records.size()));
  std::vector<std::vector<WorkerId>> teams;
  std::vector<double> success;
  for (const auto& r : records) {
    if (r.members.empty()) throw PreconditionError("fit_penalties: empty team '" + r.team_id + "'");
    for (auto id : r.members)
      if (id >= pop.size())
        throw PreconditionError("fit_penalties: team '" + r.team_id + "' names unknown worker " +
                                std::to_string(id));
    teams.push_back(r.members);
    success.push_back(opt.mode == FitMode::regression ? r.outcome : 1.0);
  }
  if (opt.mode == FitMode::classification) {
    std::vector<std::size_t> sizes;
    for (const auto& r : records) sizes.push_back(r.members.size());
    for (auto& t : fake_teams(pop, records.size(), sizes, derive_seed(opt.seed, "fakes"))) {
      teams.push_back(std::move(t));
      success.push_back(0.0);
    }
  }

  std::vector<double> y;
  double scale = 1.0;
  if (opt.standardize) {
    y = standardize_outcomes(success);
    std::vector<double> neg(success.size());
    for (std::size_t i = 0; i < success.size(); ++i) neg[i] = -success[i];
    scale = stats::population_stddev(neg);
  } else {
    for (double s : success) y.push_back(-s);
  }

  const auto rows = static_cast<Eigen::Index>(teams.size());
  const auto cols = static_cast<Eigen::Index>(m + 1);
  Eigen::MatrixXd x(rows, cols);
  std::vector<double> share(m + 1, 0.0);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto h = alignment_histogram(Team(pop, teams[static_cast<std::size_t>(r)]), pop);
    for (Eigen::Index c = 0; c < cols; ++c) {
      x(r, c) = static_cast<double>(h.counts[static_cast<std::size_t>(c)]);
      share[static_cast<std::size_t>(c)] += x(r, c);
    }
  }
  bool varied = false;
  for (Eigen::Index r = 1; r < rows && !varied; ++r) varied = x.row(r) != x.row(0);
  if (!varied)
    throw PreconditionError("fit_penalties: every team has the same alignment histogram");

  const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(y.data(), rows);
  const Eigen::VectorXd beta = stats::solve_least_squares(x, target, opt.ridge);

  FitReport rep;
  rep.rows = teams.size();
  rep.target_scale = scale;
  rep.raw_coefficients.assign(beta.data(), beta.data() + beta.size());
  rep.scheme = PenaltyScheme{rep.raw_coefficients}.normalized();
  const Eigen::VectorXd resid = target - x * beta;
  const double ss_tot = (target.array() - target.mean()).square().sum();
  rep.r_squared = ss_tot > 0 ? 1.0 - resid.squaredNorm() / ss_tot : 0.0;
  const double total = std::accumulate(share.begin(), share.end(), 0.0);
  for (auto& s : share) s = total > 0 ? s / total : 0.0;
  rep.alignment_share = std::move(share);
  return rep;
}

/// Training table: header `team_id,members,outcome`, members separated by ';'.
inline std::vector<OutcomeRecord> load_outcomes(const std::string& path) {
  const auto table = csv::read(path);
  const auto col = [&](const std::string& name) {
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (table.header[c] == name) return c;
    throw ParseError(path + ": missing column '" + name + "'");
  };
  const std::size_t c_id = col("team_id"), c_mem = col("members"), c_out = col("outcome");
  std::vector<OutcomeRecord> out;
  for (const auto& row : table.rows) {
    const auto at = [&](std::size_t c) {
      if (c >= row.fields.size())
        throw ParseError(path + ":" + std::to_string(row.line) + ": too few fields");
      return row.fields[c];
    };
    OutcomeRecord r;
    r.team_id = at(c_id);
    std::string tok;
    std::stringstream ss(at(c_mem));
    while (std::getline(ss, tok, ';')) {
      tok = csv::trim(tok);
      if (tok.empty()) continue;
      const auto id = csv::parse_int(tok);
      if (!id || *id < 0)
        throw ParseError(path + ":" + std::to_string(row.line) + ": bad member id '" + tok + "'");
      r.members.push_back(static_cast<WorkerId>(*id));
    }
    const auto v = csv::parse_double(at(c_out));
    if (!v)
      throw ParseError(path + ":" + std::to_string(row.line) + ": non-numeric outcome '" +
                       at(c_out) + "'");
    r.outcome = *v;
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ParseError(path + ": no training rows");
  return out;
}

inline double partition_pct(const Partitioning& p, const Population& pop, const PenaltyScheme& g) {
  double s = 0;
  for (const auto& t : p.teams) s += pct_score(t, pop, g);
  return s;
}

struct TracePoint {
  std::size_t restart = 0;
  std::size_t iteration = 0;
  double ct = 0;
  double pct = 0;
};

/// Runs the splitter, recording partition CT and PCT after each iteration.
inline std::vector<TracePoint> pct_vs_ct_trace(const Population& pop, SplitterOptions opt,
                                               const PenaltyScheme& g) {
  if (g.g.size() != pop.feature_count() + 1)
    throw PreconditionError("pct_vs_ct_trace: penalty scheme length must be m + 1");
  std::vector<TracePoint> trace;
  opt.threads = 1;
  opt.on_iteration = [&](std::size_t r, std::size_t it, const Partitioning& p) {
    trace.push_back({r, it, partition_score(p, pop), partition_pct(p, pop, g)});
  };
  faultline_splitter(pop, opt);
  return trace;
}

}  // namespace faultline
