#include "pdthreat/threat.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "pdthreat/error.hpp"
#include "pdthreat/parallel.hpp"

namespace pdthreat {

namespace {

// Single pass max of max(inner(m), 0) / (g_m * scale(m)). Exact ties go to the
// lowest (source_class, source_id).
template <class Inner, class Scale>
ThreatValue max_scan(const UnsafeDirectionSet& dirs, Inner&& inner, Scale&& scale) {
  if (dirs.empty()) throw Error(ErrorCode::kEmptyDirectionSet, "no unsafe directions");
  ThreatValue out;
  std::size_t best = dirs.size();
  for (std::size_t m = 0; m < dirs.size(); ++m) {
    const double p = inner(m);
    if (!(p > 0.0)) continue;
    const auto& d = dirs.directions[m];
    const double v = p / (d.g * scale(m));
    if (best == dirs.size() || v > out.threat ||
        (v == out.threat &&
         std::tie(d.source_class, d.source_id) <
             std::tie(dirs.directions[best].source_class, dirs.directions[best].source_id))) {
      out.threat = v;
      best = m;
    }
  }
  if (best != dirs.size()) {
    out.attribution = Attribution{dirs.directions[best].source_class,
                                  dirs.directions[best].source_id};
  }
  return out;
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kPd: return "pd";
    case Metric::kPdS: return "pd_s";
    case Metric::kPdW: return "pd_w";
    case Metric::kLinf: return "linf";
    case Metric::kL2: return "l2";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "pd") return Metric::kPd;
  if (name == "pd_s" || name == "pds") return Metric::kPdS;
  if (name == "pd_w" || name == "pdw") return Metric::kPdW;
  if (name == "linf") return Metric::kLinf;
  if (name == "l2") return Metric::kL2;
  throw Error(ErrorCode::kInvalidArgument, "unknown metric '" + std::string(name) + "'");
}

bool is_pd_family(Metric m) {
  return m == Metric::kPd || m == Metric::kPdS || m == Metric::kPdW;
}

ThreatValue pd_threat(const UnsafeDirectionSet& dirs, std::span<const double> delta) {
  check_dim(delta.size(), dirs.dim, "pd_threat");
  return max_scan(
      dirs, [&](std::size_t m) { return dot(delta, dirs.unit(m)); },
      [](std::size_t) { return 1.0; });
}

ThreatValue pd_s_threat(const UnsafeDirectionSet& dirs, std::span<const double> delta,
                        std::span<const std::uint8_t> mask) {
  check_dim(delta.size(), dirs.dim, "pd_s_threat");
  check_dim(mask.size(), dirs.dim, "pd_s_threat mask");
  if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b != 0; })) {
    throw Error(ErrorCode::kEmptyMask, "mask selects no coordinates");
  }
  return max_scan(
      dirs,
      [&](std::size_t m) {
        const auto u = dirs.unit(m);
        double s = 0.0;
        for (std::size_t i = 0; i < delta.size(); ++i) {
          if (mask[i]) s += delta[i] * u[i];
        }
        return s;
      },
      [](std::size_t) { return 1.0; });
}

ThreatValue pd_w_threat(const UnsafeDirectionSet& dirs, std::span<const double> delta,
                        const WeightMatrix& weights) {
  check_dim(delta.size(), dirs.dim, "pd_w_threat");
  const std::size_t C = weights.num_classes;
  if (weights.values.size() != C * C || dirs.label >= C) {
    throw Error(ErrorCode::kDimensionMismatch, "weight matrix does not cover label " +
                                                   std::to_string(dirs.label));
  }
  for (const auto& d : dirs.directions) {
    if (d.source_class >= C) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "weight matrix does not cover class " + std::to_string(d.source_class));
    }
    const double w = weights.at(dirs.label, d.source_class);
    if (!(w >= 0.0 && w <= 1.0)) {
      throw Error(ErrorCode::kWeightOutOfRange,
                  "W(" + std::to_string(dirs.label) + "," + std::to_string(d.source_class) +
                      ") = " + std::to_string(w) + " outside [0,1]");
    }
  }
  return max_scan(
      dirs, [&](std::size_t m) { return dot(delta, dirs.unit(m)); },
      [&](std::size_t m) {
        return std::max<double>(weights.at(dirs.label, dirs.directions[m].source_class),
                                kWeightFloor);
      });
}

double lp_threat(std::span<const double> delta, LpNorm p) {
  return p == LpNorm::kL2 ? norm2(delta) : norm_inf(delta);
}

double lipschitz_constant(const UnsafeDirectionSet& dirs) {
  if (dirs.empty()) throw Error(ErrorCode::kEmptyDirectionSet, "no unsafe directions");
  double best = 0.0;
  for (const auto& d : dirs.directions) best = std::max(best, 1.0 / d.g);
  return best;
}

std::vector<ThreatRecord> evaluate_batch(Metric metric, const LabeledDataset& inputs,
                                         const LabeledDataset& perturbed,
                                         const RepresentativeIndex* index,
                                         const EvalOptions& options) {
  if (inputs.n != perturbed.n || inputs.dim != perturbed.dim) {
    throw Error(ErrorCode::kShapeMismatch,
                "inputs are " + std::to_string(inputs.n) + "x" + std::to_string(inputs.dim) +
                    ", perturbed are " + std::to_string(perturbed.n) + "x" +
                    std::to_string(perturbed.dim));
  }
  const std::size_t d = inputs.dim;
  if (is_pd_family(metric)) {
    if (index == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "PD metrics require a representative index");
    }
    check_dim(d, index->dim, "evaluate_batch index");
  }
  if (metric == Metric::kPdS) {
    if (options.masks == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "pd_s requires a mask set");
    }
    check_dim(options.masks->dim, d, "evaluate_batch masks");
    if (options.masks->n_masks != 1 && options.masks->n_masks != inputs.n) {
      throw Error(ErrorCode::kShapeMismatch, "mask count must be 1 or n");
    }
  }
  if (metric == Metric::kPdW && options.weights == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "pd_w requires a weight matrix");
  }

  std::vector<ThreatRecord> out(inputs.n);
  parallel_for(inputs.n, options.threads, [&](std::size_t i) {
    const auto xi = inputs.row(i);
    const auto pi = perturbed.row(i);
    Vec x(xi.begin(), xi.end());
    Vec delta(d);
    for (std::size_t t = 0; t < d; ++t) delta[t] = static_cast<double>(pi[t]) - x[t];
    ThreatRecord rec{i, metric, 0.0, std::nullopt};
    if (metric == Metric::kLinf || metric == Metric::kL2) {
      rec.threat = lp_threat(delta, metric == Metric::kL2 ? LpNorm::kL2 : LpNorm::kLinf);
    } else {
      const auto dirs = unsafe_directions(*index, x, inputs.labels[i]);
      ThreatValue v;
      switch (metric) {
        case Metric::kPd: v = pd_threat(dirs, delta); break;
        case Metric::kPdS:
          v = pd_s_threat(dirs, delta,
                          options.masks->mask(options.masks->n_masks == 1 ? 0 : i));
          break;
        default: v = pd_w_threat(dirs, delta, *options.weights); break;
      }
      rec.threat = v.threat;
      rec.attribution = v.attribution;
    }
    out[i] = rec;
  });
  return out;
}

double avg_threat(Metric metric, const LabeledDataset& inputs, const LabeledDataset& perturbed,
                  const RepresentativeIndex* index, const EvalOptions& options) {
  const auto records = evaluate_batch(metric, inputs, perturbed, index, options);
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "average over zero inputs");
  double sum = 0.0;
  for (const auto& r : records) sum += r.threat;
  return sum / static_cast<double>(records.size());
}

}  // namespace pdthreat
