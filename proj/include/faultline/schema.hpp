#pragma once

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "faultline/error.hpp"

namespace faultline {

enum class FeatureKind { categorical, numeric };

/// How two attribute values are judged to agree.
///   exact      equal symbols (categorical)
///   bins       equal-width bins over the observed range, then exact
///   kde_bins   bins split at the valleys of a kernel density estimate
///   threshold  |a - b| <= gamma
///   weighted   as threshold, but conflicts are weighted by value gaps
enum class Agreement { exact, bins, kde_bins, threshold, weighted };

inline const char* to_string(FeatureKind k) {
  return k == FeatureKind::categorical ? "categorical" : "numeric";
}

inline const char* to_string(Agreement a) {
  switch (a) {
    case Agreement::exact: return "exact";
    case Agreement::bins: return "bins";
    case Agreement::kde_bins: return "kde_bins";
    case Agreement::threshold: return "threshold";
    case Agreement::weighted: return "weighted";
  }
  return "?";
}

struct FeatureSpec {
  std::string name;
  FeatureKind kind = FeatureKind::categorical;
  Agreement agreement = Agreement::exact;
  std::size_t bins = 1;
  double gamma = 0.0;
  std::vector<std::string> values;  // categorical symbols, index order

  bool is_categorical() const { return kind == FeatureKind::categorical; }
  /// Categorical with exact agreement: the aggregate-count fast path applies.
  bool countable() const { return agreement == Agreement::exact; }
  /// Numeric, still waiting for discretize().
  bool needs_binning() const {
    return agreement == Agreement::bins || agreement == Agreement::kde_bins;
  }
  /// Agreement by |a - b| <= gamma.
  bool thresholded() const {
    return agreement == Agreement::threshold || agreement == Agreement::weighted;
  }
  std::size_t cardinality() const { return values.size(); }

  static FeatureSpec categorical(std::string name, std::vector<std::string> values) {
    FeatureSpec f;
    f.name = std::move(name);
    f.values = std::move(values);
    return f;
  }
  static FeatureSpec numeric(std::string name, Agreement agreement, double gamma = 0.0,
                             std::size_t bins = 1) {
    FeatureSpec f;
    f.name = std::move(name);
    f.kind = FeatureKind::numeric;
    f.agreement = agreement;
    f.gamma = gamma;
    f.bins = bins;
    return f;
  }

  bool operator==(const FeatureSpec&) const = default;
};

/// Ordered feature list; the order is the canonical feature index.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<FeatureSpec> features) : features_(std::move(features)) {
    validate();
  }

  std::size_t size() const { return features_.size(); }
  const FeatureSpec& operator[](std::size_t f) const { return features_[f]; }
  const std::vector<FeatureSpec>& features() const { return features_; }

  std::optional<std::size_t> find(const std::string& name) const {
    for (std::size_t f = 0; f < features_.size(); ++f)
      if (features_[f].name == name) return f;
    return std::nullopt;
  }

  bool all_countable() const {
    for (const auto& f : features_)
      if (!f.countable()) return false;
    return true;
  }
  bool any_needs_binning() const {
    for (const auto& f : features_)
      if (f.needs_binning()) return true;
    return false;
  }

  /// Index of `symbol` in feature f, appending it when absent.
  std::size_t intern(std::size_t f, const std::string& symbol) {
    auto& vals = features_[f].values;
    for (std::size_t v = 0; v < vals.size(); ++v)
      if (vals[v] == symbol) return v;
    vals.push_back(symbol);
    return vals.size() - 1;
  }

  bool operator==(const FeatureSchema&) const = default;

  void validate() const {
    if (features_.empty()) throw ParseError("schema: at least one feature is required");
    std::unordered_map<std::string, int> seen;
    for (const auto& f : features_) {
      if (f.name.empty()) throw ParseError("schema: feature with empty name");
      if (seen[f.name]++) throw ParseError("schema: duplicate feature name '" + f.name + "'");
      if (f.is_categorical() && f.agreement != Agreement::exact)
        throw ParseError("schema: categorical feature '" + f.name + "' must use exact agreement");
      if (!f.is_categorical() && f.agreement == Agreement::exact)
        throw ParseError("schema: numeric feature '" + f.name +
                         "' needs bins, kde_bins, threshold or weighted agreement");
      if (f.gamma < 0) throw ParseError("schema: negative gamma on '" + f.name + "'");
      if (f.agreement == Agreement::bins && f.bins < 1)
        throw ParseError("schema: bins must be >= 1 on '" + f.name + "'");
    }
  }

 private:
  std::vector<FeatureSpec> features_;
};

inline Agreement parse_agreement(const std::string& s) {
  if (s == "exact") return Agreement::exact;
  if (s == "bins") return Agreement::bins;
  if (s == "kde_bins") return Agreement::kde_bins;
  if (s == "threshold") return Agreement::threshold;
  if (s == "weighted") return Agreement::weighted;
  throw ParseError("schema: unknown agreement '" + s + "'");
}

inline nlohmann::json schema_to_json(const FeatureSchema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features()) {
    nlohmann::json j;
    j["name"] = f.name;
    j["kind"] = to_string(f.kind);
    j["agreement"] = to_string(f.agreement);
    j["bins"] = f.bins;
    j["gamma"] = f.gamma;
    if (f.is_categorical()) j["values"] = f.values;
    features.push_back(std::move(j));
  }
  return nlohmann::json{{"features", features}};
}

inline FeatureSchema schema_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array())
    throw ParseError("schema: expected an object with a 'features' array");
  std::vector<FeatureSpec> out;
  for (const auto& j : doc["features"]) {
    FeatureSpec f;
    try {
      f.name = j.at("name").get<std::string>();
      const auto kind = j.value("kind", std::string("categorical"));
      if (kind == "categorical") f.kind = FeatureKind::categorical;
      else if (kind == "numeric") f.kind = FeatureKind::numeric;
      else throw ParseError("schema: unknown kind '" + kind + "' on '" + f.name + "'");
      f.agreement = parse_agreement(j.value(
          "agreement", std::string(f.kind == FeatureKind::categorical ? "exact" : "threshold")));
      if (j.contains("bins")) {
        const auto b = j["bins"].get<long long>();
        if (b < 1) throw ParseError("schema: bins must be >= 1 on '" + f.name + "'");
        f.bins = static_cast<std::size_t>(b);
      }
      f.gamma = j.value("gamma", 0.0);
      if (j.contains("values")) f.values = j["values"].get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("schema: ") + e.what());
    }
    out.push_back(std::move(f));
  }
  return FeatureSchema(std::move(out));
}

inline FeatureSchema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open schema file '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("schema '" + path + "': " + e.what());
  }
  return schema_from_json(doc);
}

inline void save_schema(const FeatureSchema& schema, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schema file '" + path + "'");
  out << schema_to_json(schema).dump(2) << '\n';
}

}  // namespace faultline
