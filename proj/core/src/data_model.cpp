#include "pdthreat/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "pdthreat/error.hpp"

namespace pdthreat {

void LabeledDataset::validate() const {
  if (data.size() != n * dim) {
    throw Error(ErrorCode::kHeaderMismatch, "dataset payload has " + std::to_string(data.size()) +
                                                " values, expected n*d = " +
                                                std::to_string(n * dim));
  }
  if (labels.size() != n) {
    throw Error(ErrorCode::kHeaderMismatch, "dataset has " + std::to_string(labels.size()) +
                                                " labels, expected " + std::to_string(n));
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const float v = data[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFiniteValue, "entry " + std::to_string(i) + " is not finite");
    }
    if (image_domain && (v < 0.0f || v > 1.0f)) {
      throw Error(ErrorCode::kInvariantViolation,
                  "image-domain entry " + std::to_string(i) + " outside [0,1]");
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] >= num_classes) {
      throw Error(ErrorCode::kLabelOutOfRange, "label " + std::to_string(labels[i]) +
                                                   " at row " + std::to_string(i) +
                                                   " >= num_classes " +
                                                   std::to_string(num_classes));
    }
  }
}

std::vector<std::vector<std::size_t>> LabeledDataset::class_partition() const {
  std::vector<std::vector<std::size_t>> parts(num_classes);
  for (std::size_t i = 0; i < n; ++i) parts[labels[i]].push_back(i);
  return parts;
}

void MaskSet::validate() const {
  if (bits.size() != n_masks * dim) {
    throw Error(ErrorCode::kHeaderMismatch, "mask payload size mismatch");
  }
  for (const auto b : bits) {
    if (b > 1) throw Error(ErrorCode::kInvariantViolation, "mask value not in {0,1}");
  }
}

void WeightMatrix::validate() const {
  if (values.size() != num_classes * num_classes) {
    throw Error(ErrorCode::kHeaderMismatch, "weight payload size mismatch");
  }
  for (const auto v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kNonFiniteValue, "weight not finite");
    if (v < 0.0f || v > 1.0f) throw Error(ErrorCode::kWeightOutOfRange, "weight outside [0,1]");
  }
}

HierarchyTree HierarchyTree::from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<std::pair<std::size_t, std::string>>& leaves) {
  HierarchyTree tree;
  std::unordered_map<std::string, std::size_t> ids;
  auto intern = [&](const std::string& name) {
    auto [it, inserted] = ids.emplace(name, tree.nodes.size());
    if (inserted) {
      tree.nodes.push_back(name);
      tree.parent.push_back(static_cast<std::size_t>(-1));
    }
    return it->second;
  };
  // Children first so vertex order follows the order of the edge lines.
  for (const auto& edge : edges) intern(edge.first);
  std::size_t roots = 0;
  for (const auto& [child, par] : edges) {
    const std::size_t c = intern(child);
    const std::size_t p = intern(par);
    if (tree.parent[c] != static_cast<std::size_t>(-1) && tree.parent[c] != p) {
      throw Error(ErrorCode::kMalformedTree, "vertex '" + child + "' has two parents");
    }
    tree.parent[c] = p;
    if (c == p) {
      tree.root = c;
      ++roots;
    }
  }
  if (roots != 1) {
    throw Error(ErrorCode::kMalformedTree,
                "expected exactly one root, found " + std::to_string(roots));
  }
  std::size_t num_classes = 0;
  for (const auto& [cls, name] : leaves) num_classes = std::max(num_classes, cls + 1);
  tree.leaf_map.assign(num_classes, static_cast<std::size_t>(-1));
  for (const auto& [cls, name] : leaves) {
    auto it = ids.find(name);
    if (it == ids.end()) {
      throw Error(ErrorCode::kUnmappedClass,
                  "class " + std::to_string(cls) + " maps to unknown vertex '" + name + "'");
    }
    if (tree.leaf_map[cls] != static_cast<std::size_t>(-1)) {
      throw Error(ErrorCode::kMalformedTree, "class " + std::to_string(cls) + " mapped twice");
    }
    tree.leaf_map[cls] = it->second;
  }
  tree.validate();
  return tree;
}

void HierarchyTree::validate() const {
  const std::size_t m = nodes.size();
  if (parent.size() != m || root >= m || parent[root] != root) {
    throw Error(ErrorCode::kMalformedTree, "inconsistent root or parent table");
  }
  for (std::size_t v = 0; v < m; ++v) {
    if (parent[v] >= m) {
      throw Error(ErrorCode::kMalformedTree, "vertex '" + nodes[v] + "' has no parent");
    }
    if (v != root && parent[v] == v) {
      throw Error(ErrorCode::kMalformedTree, "second root '" + nodes[v] + "'");
    }
  }
  depths();  // throws on cycles
  for (std::size_t c = 0; c < leaf_map.size(); ++c) {
    if (leaf_map[c] >= m) {
      throw Error(ErrorCode::kUnmappedClass, "class " + std::to_string(c) + " is unmapped");
    }
  }
}

std::vector<std::size_t> HierarchyTree::depths() const {
  constexpr std::size_t kUnknown = static_cast<std::size_t>(-1);
  const std::size_t m = nodes.size();
  std::vector<std::size_t> depth(m, kUnknown);
  depth[root] = 0;
  std::vector<std::size_t> path;
  for (std::size_t v = 0; v < m; ++v) {
    path.clear();
    std::size_t cur = v;
    while (depth[cur] == kUnknown) {
      path.push_back(cur);
      if (path.size() > m) {
        throw Error(ErrorCode::kMalformedTree, "cycle through vertex '" + nodes[v] + "'");
      }
      cur = parent[cur];
    }
    std::size_t d = depth[cur];
    for (auto it = path.rbegin(); it != path.rend(); ++it) depth[*it] = ++d;
  }
  return depth;
}

}  // namespace pdthreat
