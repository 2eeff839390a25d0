#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "faultline/population.hpp"

namespace faultline {

/// One-hot encoding of categorical features; numeric features are
/// z-scored over the given members.  Rows follow `members`.
inline std::vector<std::vector<double>> indicator_encode(const Population& pop,
                                                         std::span<const WorkerId> members) {
  const auto& schema = pop.schema();
  std::vector<std::vector<double>> rows(members.size());
  for (std::size_t f = 0; f < schema.size(); ++f) {
    if (schema[f].is_categorical()) {
      const std::size_t L = schema[f].cardinality();
      for (std::size_t r = 0; r < members.size(); ++r) {
        const std::size_t v = pop[members[r]].symbol(f);
        for (std::size_t s = 0; s < L; ++s) rows[r].push_back(s == v ? 1.0 : 0.0);
      }
    } else {
      double mu = 0, ss = 0;
      for (auto id : members) mu += pop[id].value(f);
      mu /= static_cast<double>(std::max<std::size_t>(1, members.size()));
      for (auto id : members) ss += (pop[id].value(f) - mu) * (pop[id].value(f) - mu);
      const double sd = std::sqrt(ss / static_cast<double>(std::max<std::size_t>(1, members.size())));
      for (std::size_t r = 0; r < members.size(); ++r)
        rows[r].push_back(sd > 0 ? (pop[members[r]].value(f) - mu) / sd : 0.0);
    }
  }
  return rows;
}

}  // namespace faultline
