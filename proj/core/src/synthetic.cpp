#include "pdthreat/synthetic.hpp"

#include <algorithm>
#include <random>

#include "pdthreat/error.hpp"

namespace pdthreat {

LabeledDataset make_blobs(const BlobOptions& options) {
  if (options.num_classes == 0 || options.dim == 0) {
    throw Error(ErrorCode::kInvalidArgument, "blobs need at least one class and dimension");
  }
  std::mt19937_64 rng(options.seed);
  std::bernoulli_distribution sign(0.5);
  std::normal_distribution<double> noise(0.0, options.noise);

  std::vector<double> means(options.num_classes * options.dim);
  for (auto& m : means) m = 0.5 + (sign(rng) ? options.spread : -options.spread);

  LabeledDataset ds;
  ds.n = options.n;
  ds.dim = options.dim;
  ds.num_classes = options.num_classes;
  ds.image_domain = true;
  ds.data.resize(ds.n * ds.dim);
  ds.labels.resize(ds.n);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const auto c = static_cast<std::uint32_t>(i % options.num_classes);
    ds.labels[i] = c;
    for (std::size_t j = 0; j < ds.dim; ++j) {
      ds.data[i * ds.dim + j] =
          static_cast<float>(std::clamp(means[c * ds.dim + j] + noise(rng), 0.0, 1.0));
    }
  }
  return ds;
}

std::vector<std::size_t> cross_label_partners(const LabeledDataset& ds, std::uint64_t seed) {
  const auto parts = ds.class_partition();
  std::vector<std::size_t> partners(ds.n);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < ds.n; ++i) {
    const std::size_t others = ds.n - parts[ds.labels[i]].size();
    if (others == 0) {
      throw Error(ErrorCode::kEmptyClass, "no rows with a label other than " +
                                              std::to_string(ds.labels[i]));
    }
    std::uniform_int_distribution<std::size_t> pick(0, others - 1);
    std::size_t r = pick(rng);
    for (std::size_t j = 0; j < ds.n; ++j) {
      if (ds.labels[j] == ds.labels[i]) continue;
      if (r-- == 0) {
        partners[i] = j;
        break;
      }
    }
  }
  return partners;
}

LabeledDataset gather_rows(const LabeledDataset& ds, const std::vector<std::size_t>& rows) {
  LabeledDataset out;
  out.n = rows.size();
  out.dim = ds.dim;
  out.num_classes = ds.num_classes;
  out.image_domain = ds.image_domain;
  out.data.reserve(out.n * out.dim);
  for (const auto r : rows) {
    const auto src = ds.row(r);
    out.data.insert(out.data.end(), src.begin(), src.end());
    out.labels.push_back(ds.labels[r]);
  }
  return out;
}

}  // namespace pdthreat
