#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <limits>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "faultline/csv.hpp"
#include "faultline/error.hpp"
#include "faultline/schema.hpp"

namespace faultline {

using WorkerId = std::size_t;

/// One individual.  Categorical attributes hold the symbol index as an
/// integral double; numeric attributes hold the raw value.
struct Worker {
  WorkerId id = 0;
  std::vector<double> attributes;

  std::size_t symbol(std::size_t f) const { return static_cast<std::size_t>(attributes[f]); }
  double value(std::size_t f) const { return attributes[f]; }

  bool operator==(const Worker&) const = default;
};

/// Immutable roster of workers over a schema.  Ids are dense: worker i
/// sits at index i.
class Population {
 public:
  Population() = default;
  Population(FeatureSchema schema, std::vector<Worker> workers)
      : schema_(std::move(schema)), workers_(std::move(workers)) {
    schema_.validate();
    for (std::size_t i = 0; i < workers_.size(); ++i) {
      const auto& w = workers_[i];
      if (w.id != i) throw PreconditionError("population: worker ids must be 0..n-1 in order");
      if (w.attributes.size() != schema_.size())
        throw PreconditionError("population: worker " + std::to_string(i) + " has " +
                                std::to_string(w.attributes.size()) + " attributes, expected " +
                                std::to_string(schema_.size()));
      for (std::size_t f = 0; f < schema_.size(); ++f) {
        if (!schema_[f].is_categorical()) continue;
        const double a = w.attributes[f];
        if (a < 0 || a != std::floor(a) || a >= static_cast<double>(schema_[f].cardinality()))
          throw PreconditionError("population: worker " + std::to_string(i) +
                                  " has an out-of-range symbol for '" + schema_[f].name + "'");
      }
    }
  }

  const FeatureSchema& schema() const { return schema_; }
  std::size_t size() const { return workers_.size(); }
  std::size_t feature_count() const { return schema_.size(); }
  const Worker& operator[](WorkerId id) const { return workers_[id]; }
  const std::vector<Worker>& workers() const { return workers_; }

  bool operator==(const Population&) const = default;

 private:
  FeatureSchema schema_;
  std::vector<Worker> workers_;
};

/// Builds an all-categorical population from symbol-index rows.  Feature f
/// is named "f<f>" with symbols "0".."L_f-1", where L_f is one more than the
/// largest index seen (or `cardinalities[f]` when given).
inline Population make_categorical_population(const std::vector<std::vector<std::size_t>>& rows,
                                              std::vector<std::size_t> cardinalities = {}) {
  if (rows.empty() && cardinalities.empty())
    throw PreconditionError("make_categorical_population: no rows and no cardinalities");
  const std::size_t m = rows.empty() ? cardinalities.size() : rows.front().size();
  if (cardinalities.empty()) cardinalities.assign(m, 1);
  for (const auto& r : rows)
    for (std::size_t f = 0; f < m; ++f) cardinalities[f] = std::max(cardinalities[f], r.at(f) + 1);
  std::vector<FeatureSpec> specs;
  for (std::size_t f = 0; f < m; ++f) {
    std::vector<std::string> values;
    for (std::size_t v = 0; v < cardinalities[f]; ++v) values.push_back(std::to_string(v));
    specs.push_back(FeatureSpec::categorical("f" + std::to_string(f), std::move(values)));
  }
  std::vector<Worker> workers;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Worker w{i, {}};
    for (auto v : rows[i]) w.attributes.push_back(static_cast<double>(v));
    workers.push_back(std::move(w));
  }
  return Population(FeatureSchema(std::move(specs)), std::move(workers));
}

/// Reads a population CSV against a schema.  The header must name every
/// schema feature exactly once, optionally preceded by an `id` column whose
/// values are ignored (ids follow row order).  Categorical symbols missing
/// from the schema are appended to its value list.
inline Population load_population(const std::string& csv_path, FeatureSchema schema) {
  const auto table = csv::read(csv_path);
  const auto where = [&](std::size_t line, std::size_t col) {
    return csv_path + ":" + std::to_string(line) + ": column " + std::to_string(col + 1);
  };
  std::size_t first = 0;
  if (!table.header.empty() && table.header[0] == "id") first = 1;
  std::vector<std::size_t> feature_of_column(table.header.size(), 0);
  std::vector<int> seen(schema.size(), 0);
  for (std::size_t c = first; c < table.header.size(); ++c) {
    const auto f = schema.find(table.header[c]);
    if (!f) throw ParseError(where(1, c) + ": unknown column '" + table.header[c] + "'");
    if (seen[*f]++) throw ParseError(where(1, c) + ": duplicate column '" + table.header[c] + "'");
    feature_of_column[c] = *f;
  }
  for (std::size_t f = 0; f < schema.size(); ++f)
    if (!seen[f]) throw ParseError(csv_path + ": missing column '" + schema[f].name + "'");
  if (table.rows.empty()) throw ParseError(csv_path + ": empty population");

  std::vector<Worker> workers;
  workers.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    if (row.fields.size() != table.header.size())
      throw ParseError(csv_path + ":" + std::to_string(row.line) + ": expected " +
                       std::to_string(table.header.size()) + " fields, found " +
                       std::to_string(row.fields.size()));
    Worker w{workers.size(), std::vector<double>(schema.size(), 0.0)};
    for (std::size_t c = first; c < row.fields.size(); ++c) {
      const std::size_t f = feature_of_column[c];
      const auto& tok = row.fields[c];
      if (schema[f].is_categorical()) {
        w.attributes[f] = static_cast<double>(schema.intern(f, tok));
      } else {
        const auto v = csv::parse_double(tok);
        if (!v) throw ParseError(where(row.line, c) + ": non-numeric value '" + tok + "' for '" +
                                 schema[f].name + "'");
        w.attributes[f] = *v;
      }
    }
    workers.push_back(std::move(w));
  }
  return Population(std::move(schema), std::move(workers));
}

inline Population load_population(const std::string& csv_path, const std::string& schema_path) {
  return load_population(csv_path, load_schema(schema_path));
}

inline void write_population(const Population& pop, std::ostream& out) {
  const auto& schema = pop.schema();
  std::vector<std::string> fields{"id"};
  for (const auto& f : schema.features()) fields.push_back(f.name);
  csv::write_row(out, fields);
  for (const auto& w : pop.workers()) {
    fields.assign(1, std::to_string(w.id));
    for (std::size_t f = 0; f < schema.size(); ++f)
      fields.push_back(schema[f].is_categorical() ? schema[f].values[w.symbol(f)]
                                                  : csv::format_double(w.value(f)));
    csv::write_row(out, fields);
  }
}

/// Writes `<dir>/population.csv` and `<dir>/schema.json`.
inline void save_population(const Population& pop, const std::string& csv_path,
                            const std::string& schema_path) {
  std::ofstream out(csv_path);
  if (!out) throw Error("cannot write '" + csv_path + "'");
  write_population(pop, out);
  save_schema(pop.schema(), schema_path);
}

namespace detail {

inline std::string interval_label(double lo, double hi, bool closed_right) {
  const auto fmt = [](double v) {
    if (std::isinf(v)) return std::string(v < 0 ? "-inf" : "inf");
    return csv::format_double(v);
  };
  return "[" + fmt(lo) + "," + fmt(hi) + (closed_right ? "]" : ")");
}

/// Equal-width cut points min + i*(max-min)/B, i = 1..B-1.
inline std::vector<double> equal_width_cuts(double lo, double hi, std::size_t bins) {
  std::vector<double> cuts;
  for (std::size_t i = 1; i < bins; ++i)
    cuts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
  return cuts;
}

}  // namespace detail

/// Valleys of a Gaussian KDE (Silverman bandwidth, 512-point grid spanning
/// three bandwidths past the data).  Returns sorted cut points; empty when
/// the sample is constant or unimodal.
inline std::vector<double> kde_cut_points(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return {};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  const double h = 1.06 * sd * std::pow(static_cast<double>(n), -0.2);
  if (!(h > 0)) return {};
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  constexpr std::size_t grid = 512;
  const double lo = *mn - 3 * h, hi = *mx + 3 * h;
  const double step = (hi - lo) / static_cast<double>(grid - 1);
  std::vector<double> density(grid, 0.0);
  for (std::size_t g = 0; g < grid; ++g) {
    const double at = lo + step * static_cast<double>(g);
    double s = 0;
    for (double x : xs) {
      const double u = (at - x) / h;
      s += std::exp(-0.5 * u * u);
    }
    density[g] = s;
  }
  // Local minima, treating runs of equal density as one point at their middle.
  std::vector<double> cuts;
  std::size_t g = 1;
  while (g + 1 < grid) {
    std::size_t end = g;
    while (end + 1 < grid && density[end + 1] == density[g]) ++end;
    if (end + 1 >= grid) break;
    if (density[g - 1] > density[g] && density[end + 1] > density[g]) {
      const double mid = 0.5 * static_cast<double>(g + end);
      cuts.push_back(lo + step * mid);
    }
    g = end + 1;
  }
  return cuts;
}

/// Replaces each bins / kde_bins feature by a categorical feature whose
/// symbols are the bin intervals.  Other features pass through, so applying
/// it twice is the same as once.
inline Population discretize(const Population& pop, std::vector<std::string>* warnings = nullptr) {
  std::vector<FeatureSpec> specs = pop.schema().features();
  std::vector<Worker> workers = pop.workers();
  for (std::size_t f = 0; f < specs.size(); ++f) {
    if (!specs[f].needs_binning()) continue;
    std::vector<double> xs;
    xs.reserve(workers.size());
    for (const auto& w : workers) {
      if (!std::isfinite(w.value(f)))
        throw PreconditionError("discretize: non-finite value for '" + specs[f].name +
                                "' at worker " + std::to_string(w.id));
      xs.push_back(w.value(f));
    }
    std::vector<double> cuts;
    double lo = 0, hi = 0;
    if (!xs.empty()) {
      lo = *std::min_element(xs.begin(), xs.end());
      hi = *std::max_element(xs.begin(), xs.end());
    }
    if (specs[f].agreement == Agreement::bins) {
      if (lo == hi) {
        if (specs[f].bins > 1 && warnings)
          warnings->push_back("feature '" + specs[f].name + "' is constant; using a single bin");
      } else {
        cuts = detail::equal_width_cuts(lo, hi, specs[f].bins);
      }
    } else {
      cuts = kde_cut_points(xs);
    }
    std::vector<std::string> labels;
    if (specs[f].agreement == Agreement::bins) {
      // Bins span exactly [min, max]; the last one is closed.
      std::vector<double> edges{lo};
      edges.insert(edges.end(), cuts.begin(), cuts.end());
      edges.push_back(hi);
      for (std::size_t b = 0; b + 1 < edges.size(); ++b)
        labels.push_back(detail::interval_label(edges[b], edges[b + 1], b + 2 == edges.size()));
    } else {
      std::vector<double> edges{-std::numeric_limits<double>::infinity()};
      edges.insert(edges.end(), cuts.begin(), cuts.end());
      edges.push_back(std::numeric_limits<double>::infinity());
      for (std::size_t b = 0; b + 1 < edges.size(); ++b)
        labels.push_back(detail::interval_label(edges[b], edges[b + 1], false));
    }
    const bool equal_width = specs[f].agreement == Agreement::bins && lo != hi;
    const double width = equal_width ? (hi - lo) / static_cast<double>(specs[f].bins) : 0.0;
    for (auto& w : workers) {
      std::size_t bin = 0;
      const double x = w.value(f);
      if (equal_width) {
        bin = std::min<std::size_t>(static_cast<std::size_t>(std::floor((x - lo) / width)),
                                    specs[f].bins - 1);
      } else {
        bin = static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), x) - cuts.begin());
      }
      w.attributes[f] = static_cast<double>(bin);
    }
    auto& spec = specs[f];
    spec.kind = FeatureKind::categorical;
    spec.agreement = Agreement::exact;
    spec.values = std::move(labels);
    spec.bins = 1;
  }
  return Population(FeatureSchema(std::move(specs)), std::move(workers));
}

}  // namespace faultline
