#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pdthreat/data_model.hpp"
#include "pdthreat/unsafe_index.hpp"

namespace pdthreat {

// Lower bound applied to W(y,c) so weighted normalizations stay positive.
inline constexpr double kWeightFloor = 1e-3;

enum class Metric { kPd, kPdS, kPdW, kLinf, kL2 };

std::string_view metric_name(Metric m);
// Accepts canonical names ("pd", "pd_s", ...) and CLI spellings ("pds", "pdw").
Metric parse_metric(std::string_view name);
bool is_pd_family(Metric m);

struct Attribution {
  std::uint32_t source_class = 0;
  std::uint64_t source_id = 0;
  bool operator==(const Attribution&) const = default;
};

struct ThreatValue {
  double threat = 0.0;
  std::optional<Attribution> attribution;  // arg-max direction, when threat > 0
};

ThreatValue pd_threat(const UnsafeDirectionSet& dirs, std::span<const double> delta);

// Inner products restricted to coordinates where mask == 1; normalization
// unchanged.
ThreatValue pd_s_threat(const UnsafeDirectionSet& dirs, std::span<const double> delta,
                        std::span<const std::uint8_t> mask);

// Normalization scaled by max(W(y, c), kWeightFloor), y = dirs.label.
ThreatValue pd_w_threat(const UnsafeDirectionSet& dirs, std::span<const double> delta,
                        const WeightMatrix& weights);

enum class LpNorm { kL2, kLinf };
double lp_threat(std::span<const double> delta, LpNorm p);

// max over directions of 1/g: the l2 Lipschitz constant of pd_threat at x.
double lipschitz_constant(const UnsafeDirectionSet& dirs);

struct ThreatRecord {
  std::size_t input_id = 0;
  Metric metric = Metric::kPd;
  double threat = 0.0;
  std::optional<Attribution> attribution;
};

struct EvalOptions {
  const MaskSet* masks = nullptr;        // required for pd_s
  const WeightMatrix* weights = nullptr;  // required for pd_w
  std::size_t threads = 1;
};

// Threat of delta_i = perturbed_i - inputs_i at (inputs_i, label_i) for every
// row. Masks are indexed per row, or shared when the set holds a single mask.
std::vector<ThreatRecord> evaluate_batch(Metric metric, const LabeledDataset& inputs,
                                         const LabeledDataset& perturbed,
                                         const RepresentativeIndex* index,
                                         const EvalOptions& options = {});

// Mean of evaluate_batch in row order.
double avg_threat(Metric metric, const LabeledDataset& inputs,
                  const LabeledDataset& perturbed, const RepresentativeIndex* index,
                  const EvalOptions& options = {});

}  // namespace pdthreat
