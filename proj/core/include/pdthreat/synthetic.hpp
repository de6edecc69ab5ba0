#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pdthreat/data_model.hpp"

namespace pdthreat {

struct BlobOptions {
  std::size_t n = 300;
  std::size_t dim = 64;
  std::size_t num_classes = 3;
  double spread = 0.2;  // class means are 0.5 +/- spread per coordinate
  double noise = 0.05;  // within-class standard deviation
  std::uint64_t seed = 0;
};

// Gaussian blobs in [0,1]^d (clipped, image_domain), labels i % C.
LabeledDataset make_blobs(const BlobOptions& options);

// For every row, a uniformly chosen row with a different label.
std::vector<std::size_t> cross_label_partners(const LabeledDataset& ds, std::uint64_t seed);

// Dataset whose row i is row partners[i] of ds (with that row's label).
LabeledDataset gather_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows);

}  // namespace pdthreat
