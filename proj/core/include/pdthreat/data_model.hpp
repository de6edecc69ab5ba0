#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace pdthreat {

// n labeled vectors in R^d, stored row-major in single precision (the on-disk
// precision). Computations widen to double.
struct LabeledDataset {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::size_t num_classes = 0;
  bool image_domain = false;
  std::vector<float> data;
  std::vector<std::uint32_t> labels;

  std::span<const float> row(std::size_t i) const {
    return {data.data() + i * dim, dim};
  }
  std::span<float> row(std::size_t i) { return {data.data() + i * dim, dim}; }

  // Throws Error on a violated invariant (shape, finiteness, label range,
  // [0,1] range for image-domain data).
  void validate() const;

  // Row indices grouped by label; classes may be empty.
  std::vector<std::vector<std::size_t>> class_partition() const;

  bool operator==(const LabeledDataset&) const = default;
};

// One or more boolean masks over the d input coordinates.
struct MaskSet {
  std::size_t n_masks = 0;
  std::size_t dim = 0;
  std::vector<std::uint8_t> bits;

  std::span<const std::uint8_t> mask(std::size_t i) const {
    return {bits.data() + i * dim, dim};
  }

  void validate() const;
  bool operator==(const MaskSet&) const = default;
};

// C x C matrix; row = label y of the input, column = class c of the unsafe
// direction.
struct WeightMatrix {
  std::size_t num_classes = 0;
  std::vector<float> values;

  static WeightMatrix filled(std::size_t num_classes, float value) {
    return {num_classes, std::vector<float>(num_classes * num_classes, value)};
  }

  float at(std::size_t y, std::size_t c) const { return values[y * num_classes + c]; }
  float& at(std::size_t y, std::size_t c) { return values[y * num_classes + c]; }

  // Requires every entry finite and in [0,1].
  void validate() const;
  bool operator==(const WeightMatrix&) const = default;
};

// Rooted tree over named vertices; classes map onto vertices.
struct HierarchyTree {
  std::vector<std::string> nodes;
  std::vector<std::size_t> parent;  // parent[root] == root
  std::size_t root = 0;
  std::vector<std::size_t> leaf_map;  // class id -> vertex

  std::size_t num_classes() const { return leaf_map.size(); }

  // Builds from child->parent name pairs; the root is the vertex listed as its
  // own parent. Vertex order is first appearance.
  static HierarchyTree from_edges(
      const std::vector<std::pair<std::string, std::string>>& edges,
      const std::vector<std::pair<std::size_t, std::string>>& leaves);

  // Exactly one root, acyclic, every vertex reaches the root, every class mapped.
  void validate() const;

  std::vector<std::size_t> depths() const;

  bool operator==(const HierarchyTree&) const = default;
};

}  // namespace pdthreat
