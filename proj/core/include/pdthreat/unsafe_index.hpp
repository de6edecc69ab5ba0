#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pdthreat/data_model.hpp"
#include "pdthreat/kcenter.hpp"
#include "pdthreat/vec.hpp"

namespace pdthreat {

inline constexpr std::size_t kDefaultK = 50;
inline constexpr double kDefaultBeta = 0.5;
// Index points within this l2 distance of the query are treated as coincident.
inline constexpr double kDuplicateTolerance = 1e-9;
inline constexpr std::size_t kMaxCalibrationPairs = 10000;

// Representatives of one class, in greedy selection order.
struct ClassBlock {
  std::vector<std::uint64_t> source_ids;
  std::vector<float> vectors;  // size() x dim, row-major

  std::size_t size() const { return source_ids.size(); }
  bool operator==(const ClassBlock&) const = default;
};

struct RepresentativeIndex {
  std::size_t num_classes = 0;
  std::size_t k = 0;
  std::size_t dim = 0;
  double beta = kDefaultBeta;
  std::uint64_t seed = 0;
  std::uint64_t source_dataset_hash = 0;
  std::vector<ClassBlock> blocks;

  std::span<const float> vector(std::size_t c, std::size_t j) const {
    return std::span<const float>(blocks[c].vectors).subspan(j * dim, dim);
  }

  void validate() const;
  bool operator==(const RepresentativeIndex&) const = default;
};

struct UnsafeDirection {
  double g = 0.0;  // normalization, beta * ||x_tilde - x||
  std::uint32_t source_class = 0;
  std::uint64_t source_id = 0;
  std::uint32_t rank = 0;  // position within its class block
};

// Observed unsafe directions at a labeled query point.
struct UnsafeDirectionSet {
  Vec x;
  std::uint32_t label = 0;
  std::size_t dim = 0;
  std::vector<double> units;  // size() x dim, row-major unit vectors
  std::vector<UnsafeDirection> directions;
  std::size_t skipped = 0;  // candidates coincident with x

  std::size_t size() const { return directions.size(); }
  bool empty() const { return directions.empty(); }
  std::span<const double> unit(std::size_t i) const {
    return std::span<const double>(units).subspan(i * dim, dim);
  }
};

// Seed of the per-class k-center run.
inline std::uint64_t class_seed(std::uint64_t seed, std::size_t c) { return seed ^ c; }

RepresentativeIndex build_index(const LabeledDataset& train, std::size_t k, double beta,
                                std::uint64_t seed);

// Restricts every class block to its first k entries (greedy prefix).
RepresentativeIndex truncate_index(const RepresentativeIndex& index, std::size_t k);

UnsafeDirectionSet unsafe_directions(const RepresentativeIndex& index,
                                     std::span<const double> x, std::uint32_t y);

struct CalibrationPoint {
  std::size_t k = 0;
  double min_cross_pair_threat = 0.0;
  std::size_t pairs_sampled = 0;
};

struct CalibrationResult {
  std::optional<std::size_t> k_min;  // empty when no k <= k_max qualifies
  std::vector<CalibrationPoint> curve;
  bool sampled = false;  // pairs were subsampled
};

// Smallest k whose minimum observed threat over cross-label training pairs
// exceeds 1. Pairs are enumerated when there are at most `max_pairs`,
// otherwise sampled uniformly with the given seed.
CalibrationResult calibrate_k(const LabeledDataset& train, double beta, std::uint64_t seed,
                              std::size_t k_max,
                              std::size_t max_pairs = kMaxCalibrationPairs);

}  // namespace pdthreat
