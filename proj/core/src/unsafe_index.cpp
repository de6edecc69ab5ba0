#include "pdthreat/unsafe_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pdthreat/error.hpp"
#include "pdthreat/io.hpp"

namespace pdthreat {

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidBeta, "beta must lie in (0,1), got " + std::to_string(beta));
  }
}

// Empty classes produce empty blocks.
RepresentativeIndex build_blocks(const LabeledDataset& train, std::size_t k, double beta,
                                 std::uint64_t seed) {
  RepresentativeIndex index;
  index.num_classes = train.num_classes;
  index.k = k;
  index.dim = train.dim;
  index.beta = beta;
  index.seed = seed;
  index.source_dataset_hash = dataset_hash(train);
  index.blocks.resize(train.num_classes);
  const auto parts = train.class_partition();
  std::vector<float> points;
  for (std::size_t c = 0; c < train.num_classes; ++c) {
    const auto& rows = parts[c];
    if (rows.empty()) continue;
    points.resize(rows.size() * train.dim);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto src = train.row(rows[r]);
      std::copy(src.begin(), src.end(), points.begin() + r * train.dim);
    }
    const auto sel = greedy_kcenter(PointsView{points, train.dim}, k, class_seed(seed, c));
    auto& block = index.blocks[c];
    for (const auto local : sel.selected_ids) {
      block.source_ids.push_back(rows[local]);
      const auto src = train.row(rows[local]);
      block.vectors.insert(block.vectors.end(), src.begin(), src.end());
    }
  }
  return index;
}

}  // namespace

void RepresentativeIndex::validate() const {
  check_beta(beta);
  if (blocks.size() != num_classes) {
    throw Error(ErrorCode::kInvariantViolation, "index has " + std::to_string(blocks.size()) +
                                                    " class blocks for " +
                                                    std::to_string(num_classes) + " classes");
  }
  for (std::size_t c = 0; c < blocks.size(); ++c) {
    const auto& b = blocks[c];
    if (b.size() > k || b.vectors.size() != b.size() * dim) {
      throw Error(ErrorCode::kInvariantViolation,
                  "class block " + std::to_string(c) + " has inconsistent size");
    }
    for (const float v : b.vectors) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "index vector not finite");
    }
  }
}

RepresentativeIndex build_index(const LabeledDataset& train, std::size_t k, double beta,
                                std::uint64_t seed) {
  check_beta(beta);
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be at least 1");
  train.validate();
  const auto parts = train.class_partition();
  for (std::size_t c = 0; c < parts.size(); ++c) {
    if (parts[c].empty()) {
      throw Error(ErrorCode::kEmptyClass, "class " + std::to_string(c) + " has no samples");
    }
  }
  return build_blocks(train, k, beta, seed);
}

RepresentativeIndex truncate_index(const RepresentativeIndex& index, std::size_t k) {
  RepresentativeIndex out = index;
  out.k = std::min(k, index.k);
  for (auto& b : out.blocks) {
    const std::size_t keep = std::min(out.k, b.size());
    b.source_ids.resize(keep);
    b.vectors.resize(keep * out.dim);
  }
  return out;
}

UnsafeDirectionSet unsafe_directions(const RepresentativeIndex& index,
                                     std::span<const double> x, std::uint32_t y) {
  check_dim(x.size(), index.dim, "unsafe_directions");
  if (y >= index.num_classes) {
    throw Error(ErrorCode::kLabelOutOfRange, "label " + std::to_string(y) + " >= " +
                                                 std::to_string(index.num_classes));
  }
  const std::size_t d = index.dim;
  UnsafeDirectionSet set;
  set.x.assign(x.begin(), x.end());
  set.label = y;
  set.dim = d;
  std::size_t candidates = 0;
  for (std::size_t c = 0; c < index.num_classes; ++c) {
    if (c == y) continue;
    candidates += index.blocks[c].size();
  }
  set.units.reserve(candidates * d);
  set.directions.reserve(candidates);
  Vec diff(d);
  for (std::uint32_t c = 0; c < index.num_classes; ++c) {
    if (c == y) continue;
    const auto& block = index.blocks[c];
    for (std::size_t j = 0; j < block.size(); ++j) {
      const auto xt = index.vector(c, j);
      for (std::size_t i = 0; i < d; ++i) diff[i] = static_cast<double>(xt[i]) - x[i];
      const double len = norm2(diff);
      if (len <= kDuplicateTolerance) {
        ++set.skipped;
        continue;
      }
      for (std::size_t i = 0; i < d; ++i) set.units.push_back(diff[i] / len);
      set.directions.push_back(UnsafeDirection{index.beta * len, c, block.source_ids[j],
                                               static_cast<std::uint32_t>(j)});
    }
  }
  if (set.directions.empty() && set.skipped > 0) {
    throw Error(ErrorCode::kAllDirectionsDegenerate,
                "every representative coincides with the query");
  }
  return set;
}

CalibrationResult calibrate_k(const LabeledDataset& train, double beta, std::uint64_t seed,
                              std::size_t k_max, std::size_t max_pairs) {
  check_beta(beta);
  if (k_max == 0) throw Error(ErrorCode::kInvalidArgument, "k_max must be at least 1");
  train.validate();
  const auto parts = train.class_partition();
  const auto nonempty = std::count_if(parts.begin(), parts.end(),
                                      [](const auto& p) { return !p.empty(); });
  if (nonempty < 2) {
    throw Error(ErrorCode::kEmptyClass, "calibration needs at least two nonempty classes");
  }

  // Ordered cross-label pairs (i, j), grouped by i.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t total = 0;
  for (std::size_t i = 0; i < train.n; ++i) total += train.n - parts[train.labels[i]].size();
  CalibrationResult result;
  if (total <= max_pairs) {
    pairs.reserve(total);
    for (std::size_t i = 0; i < train.n; ++i) {
      for (std::size_t j = 0; j < train.n; ++j) {
        if (train.labels[i] != train.labels[j]) pairs.emplace_back(i, j);
      }
    }
  } else {
    result.sampled = true;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, train.n - 1);
    pairs.reserve(max_pairs);
    while (pairs.size() < max_pairs) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      if (train.labels[i] != train.labels[j]) pairs.emplace_back(i, j);
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  }

  const RepresentativeIndex index = build_blocks(train, k_max, beta, seed);
  std::vector<double> min_threat(k_max, std::numeric_limits<double>::infinity());
  std::vector<double> rank_max(k_max);
  Vec x(train.dim), delta(train.dim);
  UnsafeDirectionSet dirs;
  std::size_t current = static_cast<std::size_t>(-1);
  for (const auto& [i, j] : pairs) {
    if (i != current) {
      current = i;
      const auto xi = train.row(i);
      x.assign(xi.begin(), xi.end());
      try {
        dirs = unsafe_directions(index, x, train.labels[i]);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kAllDirectionsDegenerate) throw;
        dirs = UnsafeDirectionSet{};
      }
    }
    const auto xj = train.row(j);
    for (std::size_t t = 0; t < train.dim; ++t) delta[t] = static_cast<double>(xj[t]) - x[t];
    std::fill(rank_max.begin(), rank_max.end(), 0.0);
    for (std::size_t m = 0; m < dirs.size(); ++m) {
      const auto& dir = dirs.directions[m];
      const double v = std::max(dot(std::span<const double>(delta), dirs.unit(m)), 0.0) / dir.g;
      rank_max[dir.rank] = std::max(rank_max[dir.rank], v);
    }
    double running = 0.0;
    for (std::size_t r = 0; r < k_max; ++r) {
      running = std::max(running, rank_max[r]);
      min_threat[r] = std::min(min_threat[r], running);
    }
  }

  for (std::size_t r = 0; r < k_max; ++r) {
    result.curve.push_back(CalibrationPoint{r + 1, min_threat[r], pairs.size()});
    if (!result.k_min && min_threat[r] > 1.0) result.k_min = r + 1;
  }
  return result;
}

}  // namespace pdthreat
