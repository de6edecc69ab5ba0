#include "pdthreat/class_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pdthreat/error.hpp"

namespace pdthreat {

std::string_view distance_source_name(DistanceSource s) {
  switch (s) {
    case DistanceSource::kEuclidean: return "euclidean";
    case DistanceSource::kHierarchy: return "hierarchy";
    case DistanceSource::kExternal: return "external";
  }
  return "?";
}

RawDistanceMatrix euclidean_distance_matrix(const RepresentativeIndex& index) {
  const std::size_t C = index.num_classes;
  const std::size_t d = index.dim;
  RawDistanceMatrix out{C, std::vector<double>(C * C, 0.0), DistanceSource::kEuclidean};
  for (std::size_t y = 0; y < C; ++y) {
    for (std::size_t c = y; c < C; ++c) {
      const auto& by = index.blocks[y];
      const auto& bc = index.blocks[c];
      if (by.size() == 0 || bc.size() == 0) {
        throw Error(ErrorCode::kEmptyClass, "index block is empty");
      }
      double sum = 0.0;
      for (std::size_t i = 0; i < by.size(); ++i) {
        const auto a = index.vector(y, i);
        for (std::size_t j = 0; j < bc.size(); ++j) {
          const auto b = index.vector(c, j);
          double s = 0.0;
          for (std::size_t t = 0; t < d; ++t) {
            const double diff = static_cast<double>(a[t]) - b[t];
            s += diff * diff;
          }
          sum += std::sqrt(s);
        }
      }
      const double mean = sum / static_cast<double>(by.size() * bc.size());
      out.at(y, c) = mean;
      out.at(c, y) = mean;
    }
  }
  return out;
}

RawDistanceMatrix lca_distance_matrix(const HierarchyTree& tree) {
  tree.validate();
  const auto depth = tree.depths();
  const std::size_t C = tree.num_classes();
  RawDistanceMatrix out{C, std::vector<double>(C * C, 0.0), DistanceSource::kHierarchy};
  for (std::size_t y = 0; y < C; ++y) {
    for (std::size_t c = y + 1; c < C; ++c) {
      std::size_t a = tree.leaf_map[y];
      std::size_t b = tree.leaf_map[c];
      while (depth[a] > depth[b]) a = tree.parent[a];
      while (depth[b] > depth[a]) b = tree.parent[b];
      while (a != b) {
        a = tree.parent[a];
        b = tree.parent[b];
      }
      const double dist = static_cast<double>(depth[tree.leaf_map[y]] +
                                              depth[tree.leaf_map[c]] - 2 * depth[a]);
      out.at(y, c) = dist;
      out.at(c, y) = dist;
    }
  }
  return out;
}

RawDistanceMatrix external_distance_matrix(const WeightMatrix& raw) {
  RawDistanceMatrix out{raw.num_classes, {}, DistanceSource::kExternal};
  out.values.assign(raw.values.begin(), raw.values.end());
  for (const double v : out.values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvariantViolation, "external distances must be finite and >= 0");
    }
  }
  return out;
}

WeightMatrix relative_weights(const RawDistanceMatrix& raw) {
  const std::size_t C = raw.num_classes;
  if (C < 2) throw Error(ErrorCode::kInvalidArgument, "relative weights need C >= 2");
  if (raw.values.size() != C * C) throw Error(ErrorCode::kSizeMismatch, "matrix is not C x C");
  WeightMatrix out = WeightMatrix::filled(C, 1.0f);
  for (std::size_t y = 0; y < C; ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < C; ++c) {
      if (c == y) continue;
      lo = std::min(lo, raw.at(y, c));
      hi = std::max(hi, raw.at(y, c));
    }
    const double range = hi - lo;
    if (!(range > 0.0)) continue;  // zero range: no amplification
    for (std::size_t c = 0; c < C; ++c) {
      if (c == y) continue;
      out.at(y, c) = static_cast<float>(std::clamp((raw.at(y, c) - lo) / range, 0.0, 1.0));
    }
  }
  return out;
}

WeightMatrix combine_weights(const std::vector<WeightMatrix>& parts) {
  if (parts.empty()) throw Error(ErrorCode::kEmptyPartsList, "no weight matrices to combine");
  const std::size_t C = parts.front().num_classes;
  for (const auto& p : parts) {
    if (p.num_classes != C || p.values.size() != C * C) {
      throw Error(ErrorCode::kSizeMismatch, "weight matrices differ in size");
    }
  }
  WeightMatrix out = parts.front();
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double m = parts.front().values[i];
    for (const auto& p : parts) m = std::min<double>(m, p.values[i]);
    out.values[i] = static_cast<float>(m * m);
  }
  return out;
}

}  // namespace pdthreat
