#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. None of these call into the library's algorithms; they only share
// its plain data types.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdthreat/data_model.hpp"
#include "pdthreat/unsafe_index.hpp"

namespace oracle {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double dist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline Vec widen(std::span<const float> v) { return Vec(v.begin(), v.end()); }

// Threat straight from the index vectors:
//   max over x~ in classes c != y of max(<delta[a], x~-x[a]>, 0) / (beta W ||x~-x||^2)
// (the unit vector's norm folded into the denominator).
inline double naive_pd(const pdthreat::RepresentativeIndex& index, const Vec& x, std::uint32_t y,
                       const Vec& delta, const pdthreat::WeightMatrix* w = nullptr,
                       const std::vector<std::uint8_t>* mask = nullptr) {
  double best = 0.0;
  for (std::size_t c = 0; c < index.num_classes; ++c) {
    if (c == y) continue;
    for (std::size_t j = 0; j < index.blocks[c].size(); ++j) {
      const Vec xt = widen(index.vector(c, j));
      Vec diff(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) diff[i] = xt[i] - x[i];
      const double len = norm(diff);
      if (len <= 1e-9) continue;
      double ip = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (mask != nullptr && (*mask)[i] == 0) continue;
        ip += delta[i] * diff[i];
      }
      double scale = index.beta * len * len;
      if (w != nullptr) scale *= std::max<double>(w->at(y, c), 1e-3);
      best = std::max(best, std::max(ip, 0.0) / scale);
    }
  }
  return best;
}

// Angular covering radius: max over points of min arccos-distance to subset.
inline double angular_radius(const std::vector<Vec>& pts, const std::vector<std::size_t>& subset) {
  double worst = 0.0;
  for (const auto& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto s : subset) {
      const double c = std::clamp(dot(p, pts[s]) / (norm(p) * norm(pts[s])), -1.0, 1.0);
      best = std::min(best, std::acos(c));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

// Optimal angular radius over all k-subsets.
inline double brute_force_radius(const std::vector<Vec>& pts, std::size_t k) {
  const std::size_t n = pts.size();
  k = std::min(k, n);
  std::vector<bool> choose(n, false);
  std::fill(choose.begin(), choose.begin() + static_cast<long>(k), true);
  double best = std::numeric_limits<double>::infinity();
  do {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (choose[i]) subset.push_back(i);
    }
    best = std::min(best, angular_radius(pts, subset));
  } while (std::prev_permutation(choose.begin(), choose.end()));
  return best;
}

inline double naive_objective(const std::vector<Vec>& pts, const std::vector<std::size_t>& subset) {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto s : subset) best = std::max(best, dot(p, pts[s]) / (norm(p) * norm(pts[s])));
    worst = std::min(worst, best);
  }
  return worst;
}

// Solves the square system M z = r by Gaussian elimination with partial
// pivoting; empty when singular.
inline std::optional<Vec> solve(std::vector<Vec> m, Vec r) {
  const std::size_t n = r.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i) {
      if (std::abs(m[i][col]) > std::abs(m[piv][col])) piv = i;
    }
    if (std::abs(m[piv][col]) < 1e-12) return std::nullopt;
    std::swap(m[piv], m[col]);
    std::swap(r[piv], r[col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = m[i][col] / m[col][col];
      for (std::size_t j = col; j < n; ++j) m[i][j] -= f * m[col][j];
      r[i] -= f * r[col];
    }
  }
  Vec z(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = r[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= m[i][j] * z[j];
    z[i] = s / m[i][i];
  }
  return z;
}

// Exact Euclidean projection of delta onto {z : <a_j, z> <= b_j}. Enumerates
// every subset of at most d constraints, projects onto the affine set where
// they hold with equality, keeps the candidates that are feasible and
// returns the closest. The true projection is one of the candidates.
inline Vec exact_polytope_projection(const std::vector<Vec>& a, const Vec& b, const Vec& delta) {
  const std::size_t m = a.size();
  const std::size_t d = delta.size();
  auto feasible = [&](const Vec& z) {
    for (std::size_t j = 0; j < m; ++j) {
      if (dot(a[j], z) > b[j] + 1e-9 * std::max(1.0, std::abs(b[j]))) return false;
    }
    return true;
  };
  Vec best;
  double best_dist = std::numeric_limits<double>::infinity();
  if (feasible(delta)) return delta;
  for (std::uint64_t bits = 1; bits < (std::uint64_t{1} << m); ++bits) {
    std::vector<std::size_t> act;
    for (std::size_t j = 0; j < m; ++j) {
      if ((bits >> j) & 1U) act.push_back(j);
    }
    if (act.size() > d) continue;
    // z = delta - A^T mu with A z = b  =>  (A A^T) mu = A delta - b
    std::vector<Vec> gram(act.size(), Vec(act.size()));
    Vec rhs(act.size());
    for (std::size_t p = 0; p < act.size(); ++p) {
      for (std::size_t q = 0; q < act.size(); ++q) gram[p][q] = dot(a[act[p]], a[act[q]]);
      rhs[p] = dot(a[act[p]], delta) - b[act[p]];
    }
    const auto mu = solve(gram, rhs);
    if (!mu) continue;
    Vec z = delta;
    for (std::size_t p = 0; p < act.size(); ++p) {
      for (std::size_t i = 0; i < d; ++i) z[i] -= (*mu)[p] * a[act[p]][i];
    }
    if (!feasible(z)) continue;
    const double dz = dist(z, delta);
    if (dz < best_dist) {
      best_dist = dz;
      best = z;
    }
  }
  return best;
}

// Pairwise vertex distances by breadth-first search over the undirected tree.
inline std::vector<std::vector<std::size_t>> bfs_distances(const pdthreat::HierarchyTree& tree) {
  const std::size_t n = tree.nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (tree.parent[v] != v) {
      adj[v].push_back(tree.parent[v]);
      adj[tree.parent[v]].push_back(v);
    }
  }
  std::vector<std::vector<std::size_t>> out(n, std::vector<std::size_t>(n, 0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<bool> seen(n, false);
    std::deque<std::size_t> q{s};
    seen[s] = true;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop_front();
      for (const auto w : adj[v]) {
        if (!seen[w]) {
          seen[w] = true;
          out[s][w] = out[s][v] + 1;
          q.push_back(w);
        }
      }
    }
  }
  return out;
}

// Random rooted tree: vertex i > 0 hangs under a uniformly chosen earlier
// vertex; classes map to a random subset of vertices.
inline pdthreat::HierarchyTree random_tree(std::size_t nodes, std::size_t classes,
                                           std::mt19937_64& rng) {
  std::vector<std::pair<std::string, std::string>> edges;
  edges.emplace_back("n0", "n0");
  for (std::size_t i = 1; i < nodes; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    edges.emplace_back("n" + std::to_string(i), "n" + std::to_string(pick(rng)));
  }
  std::vector<std::size_t> order(nodes);
  for (std::size_t i = 0; i < nodes; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::pair<std::size_t, std::string>> leaves;
  for (std::size_t c = 0; c < classes; ++c) leaves.emplace_back(c, "n" + std::to_string(order[c]));
  return pdthreat::HierarchyTree::from_edges(edges, leaves);
}

// Dataset with `per_class` Gaussian points per class, dimension d.
inline pdthreat::LabeledDataset random_dataset(std::size_t classes, std::size_t per_class,
                                               std::size_t d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  pdthreat::LabeledDataset ds;
  ds.n = classes * per_class;
  ds.dim = d;
  ds.num_classes = classes;
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto c = static_cast<std::uint32_t>(i % classes);
    ds.labels.push_back(c);
    for (std::size_t j = 0; j < d; ++j) {
      ds.data.push_back(static_cast<float>(g(rng) + 2.0 * static_cast<double>(c)));
    }
  }
  return ds;
}

inline Vec random_vec(std::size_t d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vec v(d);
  for (auto& x : v) x = g(rng);
  return v;
}

}  // namespace oracle
