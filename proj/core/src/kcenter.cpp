#include "pdthreat/kcenter.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "pdthreat/error.hpp"
#include "pdthreat/vec.hpp"

namespace pdthreat {

namespace {

// Unit-normalized copies of the points, in double.
std::vector<double> normalized(PointsView points) {
  const std::size_t n = points.size();
  std::vector<double> out(n * points.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = points[i];
    const double len = norm2(p);
    if (!(len > 0.0)) {
      throw Error(ErrorCode::kZeroVector, "point " + std::to_string(i) + " has zero norm");
    }
    for (std::size_t j = 0; j < points.dim; ++j) out[i * points.dim + j] = p[j] / len;
  }
  return out;
}

double unit_dot(const std::vector<double>& units, std::size_t dim, std::size_t a,
                std::size_t b) {
  return dot(std::span<const double>(units).subspan(a * dim, dim),
             std::span<const double>(units).subspan(b * dim, dim));
}

}  // namespace

KCenterResult greedy_kcenter(PointsView points, std::size_t k, std::uint64_t seed) {
  const std::size_t n = points.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "greedy_kcenter on an empty point set");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  const std::size_t dim = points.dim;
  const auto units = normalized(points);

  KCenterResult result;
  result.seed = seed;
  const std::size_t target = std::min(k, n);
  result.selected_ids.reserve(target);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::size_t current = pick(rng);

  // best[i]: max cosine similarity of point i to the selected set.
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  std::vector<char> chosen(n, 0);
  for (;;) {
    result.selected_ids.push_back(current);
    chosen[current] = 1;
    for (std::size_t i = 0; i < n; ++i) {
      best[i] = std::max(best[i], unit_dot(units, dim, i, current));
    }
    if (result.selected_ids.size() == target) break;
    std::size_t next = n;
    double next_sim = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!chosen[i] && best[i] < next_sim) {
        next_sim = best[i];
        next = i;
      }
    }
    current = next;
  }
  // Selected points attain similarity 1 with themselves; the objective is the
  // worst coverage over all points.
  double f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) f = std::min(f, chosen[i] ? 1.0 : best[i]);
  result.objective = std::min(f, 1.0);
  return result;
}

double objective_f(PointsView points, std::span<const std::size_t> subset) {
  if (subset.empty()) throw Error(ErrorCode::kEmptyInput, "objective_f on an empty subset");
  const std::size_t n = points.size();
  if (n == 0) throw Error(ErrorCode::kEmptyInput, "objective_f on an empty point set");
  for (const auto s : subset) {
    if (s >= n) throw Error(ErrorCode::kInvalidArgument, "subset index out of range");
  }
  const auto units = normalized(points);
  double f = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto s : subset) m = std::max(m, unit_dot(units, points.dim, i, s));
    f = std::min(f, m);
  }
  return f;
}

}  // namespace pdthreat
