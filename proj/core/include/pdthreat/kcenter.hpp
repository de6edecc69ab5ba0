#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace pdthreat {

// Row-major view over a set of points.
struct PointsView {
  std::span<const float> data;
  std::size_t dim = 0;

  std::size_t size() const { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const float> operator[](std::size_t i) const {
    return data.subspan(i * dim, dim);
  }
};

struct KCenterResult {
  std::vector<std::size_t> selected_ids;  // greedy insertion order
  double objective = 0.0;                 // f(A) of the selected set
  std::uint64_t seed = 0;
};

// Greedy k-center selection under cosine similarity. The first element is
// drawn uniformly from the points using `seed`; each further element is the
// unselected point whose largest cosine similarity to the selected set is
// smallest, ties to the lowest index. Returns min(k, |points|) ids.
KCenterResult greedy_kcenter(PointsView points, std::size_t k, std::uint64_t seed);

// f(A) = min over points x of max over a in A of cos(x, a).
double objective_f(PointsView points, std::span<const std::size_t> subset);

}  // namespace pdthreat
