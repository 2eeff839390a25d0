#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "faultline/error.hpp"

namespace faultline::stats {

inline double mean(std::span<const double> xs) {
  if (xs.empty()) throw PreconditionError("mean of an empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Population (divide-by-n) standard deviation.
inline double population_stddev(std::span<const double> xs) {
  const double mu = mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw PreconditionError("pearson: length mismatch");
  if (xs.size() < 2) throw PreconditionError("pearson: need at least two points");
  const double mx = mean(xs), my = mean(ys);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx, dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) throw PreconditionError("pearson: constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Average ranks (1-based), ties sharing the mean of their positions.
inline std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

inline double spearman(std::span<const double> xs, std::span<const double> ys) {
  const auto rx = ranks(xs), ry = ranks(ys);
  return pearson(rx, ry);
}

/// Cramér's V without bias correction.  Columns hold category indices.
/// Returns 0 when either column has a single category.
inline double cramers_v(std::span<const std::size_t> a, std::span<const std::size_t> b) {
  if (a.size() != b.size()) throw PreconditionError("cramers_v: length mismatch");
  if (a.empty()) throw PreconditionError("cramers_v: empty columns");
  // Compact the observed categories.
  const auto compact = [](std::span<const std::size_t> col) {
    std::vector<std::size_t> levels(col.begin(), col.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    std::vector<std::size_t> out(col.size());
    for (std::size_t i = 0; i < col.size(); ++i)
      out[i] = static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), col[i]) -
                                        levels.begin());
    return std::pair{out, levels.size()};
  };
  const auto [ca, r] = compact(a);
  const auto [cb, c] = compact(b);
  if (r < 2 || c < 2) return 0.0;
  std::vector<double> table(r * c, 0.0), row(r, 0.0), col(c, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    table[ca[i] * c + cb[i]] += 1;
    row[ca[i]] += 1;
    col[cb[i]] += 1;
  }
  const double n = static_cast<double>(a.size());
  double chi2 = 0;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double expected = row[i] * col[j] / n;
      const double d = table[i * c + j] - expected;
      chi2 += d * d / expected;
    }
  const double v = std::sqrt(chi2 / (n * static_cast<double>(std::min(r, c) - 1)));
  return std::clamp(v, 0.0, 1.0);
}

/// Minimizes |X b - y|^2 + ridge |b|^2 through the normal equations
/// (X'X + ridge I) b = X'y, solved with a pivoted LDL' factorization.
inline Eigen::VectorXd solve_least_squares(const Eigen::MatrixXd& design,
                                           const Eigen::VectorXd& targets, double ridge = 0.0) {
  if (design.rows() != targets.size())
    throw PreconditionError("solve_least_squares: design rows differ from target length");
  if (ridge < 0) throw PreconditionError("solve_least_squares: negative ridge");
  const Eigen::Index p = design.cols();
  if (p == 0) throw PreconditionError("solve_least_squares: design has no columns");
  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += ridge;
  const Eigen::VectorXd rhs = design.transpose() * targets;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const auto d = ldlt.vectorD();
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  const bool singular =
      ridge == 0.0 && d.cwiseAbs().minCoeff() <= 1e-13 * scale * static_cast<double>(p);
  if (ldlt.info() != Eigen::Success || singular)
    throw PreconditionError(
        "solve_least_squares: normal equations are singular; use a positive ridge term");
  return ldlt.solve(rhs);
}

}  // namespace faultline::stats
