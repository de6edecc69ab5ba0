#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "pdthreat/data_model.hpp"
#include "pdthreat/unsafe_index.hpp"

namespace pdthreat {

enum class DistanceSource { kEuclidean, kHierarchy, kExternal };

std::string_view distance_source_name(DistanceSource s);

// Unnormalized C x C class distances.
struct RawDistanceMatrix {
  std::size_t num_classes = 0;
  std::vector<double> values;
  DistanceSource source = DistanceSource::kExternal;

  double at(std::size_t y, std::size_t c) const { return values[y * num_classes + c]; }
  double& at(std::size_t y, std::size_t c) { return values[y * num_classes + c]; }
};

// Mean l2 distance over all pairs of representatives of classes y and c.
RawDistanceMatrix euclidean_distance_matrix(const RepresentativeIndex& index);

// Path length between class vertices through their lowest common ancestor.
RawDistanceMatrix lca_distance_matrix(const HierarchyTree& tree);

// Wraps an externally computed matrix (e.g. perceptual distances).
RawDistanceMatrix external_distance_matrix(const WeightMatrix& raw);

// Per-row min-max scaling over c != y into [0,1]. Zero-range rows map to all
// ones; the diagonal is set to 1.
WeightMatrix relative_weights(const RawDistanceMatrix& raw);

// Elementwise (min over parts)^2.
WeightMatrix combine_weights(const std::vector<WeightMatrix>& parts);

}  // namespace pdthreat
