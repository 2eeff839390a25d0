#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "faultline/error.hpp"
#include "faultline/population.hpp"

namespace faultline {

inline std::int64_t choose2(std::int64_t r) { return r * (r - 1) / 2; }
inline std::int64_t choose3(std::int64_t r) { return r * (r - 1) * (r - 2) / 6; }

/// Per-feature value histograms r(T, f) of a team, together with the
/// running per-feature conflict-triangle count
///
///   CT(T, f) = sum_v C(r_v, 2) * (|T| - r_v)
///
/// and the pair sum S(f) = sum_v C(r_v, 2) that lets one member join or
/// leave in O(1) per feature.
class AggregateFeatureVector {
 public:
  AggregateFeatureVector() = default;
  explicit AggregateFeatureVector(const FeatureSchema& schema)
      : counts_(schema.size()), pair_sums_(schema.size(), 0), conflicts_(schema.size(), 0) {
    for (std::size_t f = 0; f < schema.size(); ++f) counts_[f].assign(schema[f].cardinality(), 0);
  }

  std::size_t feature_count() const { return counts_.size(); }
  std::int64_t size() const { return size_; }
  std::span<const std::int64_t> counts(std::size_t f) const { return counts_[f]; }
  std::int64_t count(std::size_t f, std::size_t v) const { return counts_[f][v]; }
  std::int64_t conflicts(std::size_t f) const { return conflicts_[f]; }
  std::int64_t total_conflicts() const {
    std::int64_t s = 0;
    for (auto c : conflicts_) s += c;
    return s;
  }

  /// CT(T + i, f) for a new member holding symbol v, without mutation.
  std::int64_t conflicts_if_added(std::size_t f, std::size_t v) const {
    const std::int64_t r = counts_[f][v];
    return conflicts_[f] + pair_sums_[f] - choose2(r) + r * (size_ - r);
  }

  /// CT(T - i, f) for a member holding symbol v, without mutation.
  std::int64_t conflicts_if_removed(std::size_t f, std::size_t v) const {
    const std::int64_t r = counts_[f][v] - 1;  // count after removal
    const std::int64_t k = size_ - 1;
    const std::int64_t pairs = pair_sums_[f] - r;
    return conflicts_[f] - (pairs - choose2(r) + r * (k - r));
  }

  void add(const Worker& w) {
    for (std::size_t f = 0; f < counts_.size(); ++f) {
      const std::size_t v = w.symbol(f);
      conflicts_[f] = conflicts_if_added(f, v);
      pair_sums_[f] += counts_[f][v];
      ++counts_[f][v];
    }
    ++size_;
  }

  void remove(const Worker& w) {
    for (std::size_t f = 0; f < counts_.size(); ++f) {
      const std::size_t v = w.symbol(f);
      if (counts_[f][v] == 0) throw PreconditionError("aggregates: removing an absent value");
      conflicts_[f] = conflicts_if_removed(f, v);
      --counts_[f][v];
      pair_sums_[f] -= counts_[f][v];
    }
    --size_;
  }

  bool operator==(const AggregateFeatureVector&) const = default;

 private:
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<std::int64_t> pair_sums_;
  std::vector<std::int64_t> conflicts_;
  std::int64_t size_ = 0;
};

/// Counts every member's value per feature, O(m |T|).
inline AggregateFeatureVector build_aggregates(std::span<const WorkerId> members,
                                               const Population& pop) {
  if (!pop.schema().all_countable())
    throw PreconditionError("aggregates undefined for threshold semantics");
  AggregateFeatureVector agg(pop.schema());
  for (auto id : members) agg.add(pop[id]);
  return agg;
}

enum class Delta { add, remove };

/// A set of workers with sorted member ids.  When every feature is
/// countable the team also carries its aggregate vectors; otherwise scoring
/// falls back to triangle enumeration.
class Team {
 public:
  Team() = default;
  explicit Team(const Population& pop) {
    if (pop.schema().all_countable()) aggregates_ = AggregateFeatureVector(pop.schema());
  }
  Team(const Population& pop, std::vector<WorkerId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    if (std::adjacent_find(members_.begin(), members_.end()) != members_.end())
      throw PreconditionError("team: duplicate member");
    for (auto id : members_)
      if (id >= pop.size()) throw PreconditionError("team: member id out of range");
    if (pop.schema().all_countable()) aggregates_ = build_aggregates(members_, pop);
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  const std::vector<WorkerId>& members() const { return members_; }
  bool contains(WorkerId id) const {
    return std::binary_search(members_.begin(), members_.end(), id);
  }

  bool has_aggregates() const { return aggregates_.has_value(); }
  const AggregateFeatureVector& aggregates() const {
    if (!aggregates_) throw PreconditionError("aggregates undefined for threshold semantics");
    return *aggregates_;
  }

  void add(const Worker& w) {
    const auto it = std::lower_bound(members_.begin(), members_.end(), w.id);
    if (it != members_.end() && *it == w.id)
      throw PreconditionError("team: worker " + std::to_string(w.id) + " is already a member");
    members_.insert(it, w.id);
    if (aggregates_) aggregates_->add(w);
  }

  void remove(const Worker& w) {
    const auto it = std::lower_bound(members_.begin(), members_.end(), w.id);
    if (it == members_.end() || *it != w.id)
      throw PreconditionError("team: worker " + std::to_string(w.id) + " is not a member");
    members_.erase(it);
    if (aggregates_) aggregates_->remove(w);
  }

  bool operator==(const Team&) const = default;

 private:
  std::vector<WorkerId> members_;
  std::optional<AggregateFeatureVector> aggregates_;
};

inline AggregateFeatureVector build_aggregates(const Team& team, const Population& pop) {
  return build_aggregates(team.members(), pop);
}

inline void apply_member_delta(Team& team, const Worker& w, Delta d) {
  if (d == Delta::add)
    team.add(w);
  else
    team.remove(w);
}

/// Disjoint cover of a population by teams, each at its target size.
struct Partitioning {
  std::vector<Team> teams;

  std::size_t team_count() const { return teams.size(); }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s;
    for (const auto& t : teams) s.push_back(t.size());
    return s;
  }

  /// team index of every worker
  std::vector<std::size_t> assignment(std::size_t n) const {
    std::vector<std::size_t> a(n, teams.size());
    for (std::size_t j = 0; j < teams.size(); ++j)
      for (auto id : teams[j].members()) a.at(id) = j;
    return a;
  }

  static Partitioning from_assignment(const Population& pop, std::span<const std::size_t> team_of,
                                      std::size_t team_count) {
    std::vector<std::vector<WorkerId>> members(team_count);
    for (WorkerId i = 0; i < team_of.size(); ++i) members.at(team_of[i]).push_back(i);
    Partitioning p;
    for (auto& m : members) p.teams.emplace_back(pop, std::move(m));
    return p;
  }

  /// Throws unless teams are disjoint, cover the population and, when
  /// given, match `target_sizes` exactly.
  void validate(const Population& pop, std::span<const std::size_t> target_sizes = {}) const {
    std::vector<char> seen(pop.size(), 0);
    std::size_t covered = 0;
    for (const auto& t : teams)
      for (auto id : t.members()) {
        if (id >= pop.size()) throw PreconditionError("partitioning: member id out of range");
        if (seen[id]++) throw PreconditionError("partitioning: worker " + std::to_string(id) +
                                                " is in more than one team");
        ++covered;
      }
    if (covered != pop.size()) throw PreconditionError("partitioning: not every worker is assigned");
    if (!target_sizes.empty()) {
      if (target_sizes.size() != teams.size())
        throw PreconditionError("partitioning: team count differs from the size vector");
      for (std::size_t j = 0; j < teams.size(); ++j)
        if (teams[j].size() != target_sizes[j])
          throw PreconditionError("partitioning: team " + std::to_string(j) + " has size " +
                                  std::to_string(teams[j].size()) + ", expected " +
                                  std::to_string(target_sizes[j]));
    }
  }
};

}  // namespace faultline
