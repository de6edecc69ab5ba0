#pragma once

// Tabular outputs of the command-line harness: threat CSVs, aggregated
// reports and run manifests. Column orders are fixed:
//
//   threats    input_id,metric,threat,attr_class,attr_source_id
//   avg        corruption,style,severity,category,metric,avg,count
//   quadrants  corruption,severity,category,pd_avg,other_metric,other_avg,quadrant
//   heatmap    category,severity,metric,mean_avg,corruptions
//   pdw        bucket_lo,bucket_hi,mean_relative_threat,count
//   calibrate  k,min_cross_pair_threat,pairs_sampled

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pdthreat/data_model.hpp"
#include "pdthreat/threat.hpp"
#include "pdthreat/unsafe_index.hpp"

namespace pdthreat::report {

// One parsed threat CSV row; the metric is kept as text so externally
// computed threats (e.g. "ext") can be ingested.
struct ThreatRow {
  std::size_t input_id = 0;
  std::string metric;
  double threat = 0.0;
  std::optional<std::uint32_t> attr_class;
  std::optional<std::uint64_t> attr_source_id;
};

std::string threats_to_csv(const std::vector<ThreatRecord>& records);
std::string threats_to_json(const std::vector<ThreatRecord>& records);
std::vector<ThreatRow> parse_threat_csv(const std::string& text);

std::string calibration_to_csv(const CalibrationResult& result);

// Per-metric "low threat" cutoffs. Metrics without their own entry use
// the "ext" cutoff.
struct Thresholds {
  std::map<std::string, double> by_metric = {{"pd", 1.0}, {"linf", 0.5}, {"ext", 0.25}};
  double pd() const { return by_metric.at("pd"); }
  double for_metric(const std::string& metric) const;
};

// "pd=1.0,linf=0.5,ext=0.25"; omitted keys keep their defaults.
Thresholds parse_thresholds(const std::string& spec);

enum class Quadrant { kI, kII, kIII, kIV };
std::string_view quadrant_name(Quadrant q);

// I: low PD, high other. II: both high. III: high PD, low other. IV: both low.
// "Low" means at or below the threshold.
Quadrant classify_quadrant(double pd_avg, double pd_threshold, double other_avg,
                           double other_threshold);

// A named group of threat rows. Names of the form "<style>@<severity>" are
// recognized as corruptions; any other name is kept with category "other",
// except "unsafe" which marks cross-label displacements. Inputs sharing a
// name are merged.
struct ReportInput {
  std::string name;
  std::vector<ThreatRow> rows;
};

struct CorruptionName {
  std::string style;
  int severity = 0;
  std::string category;
};
CorruptionName parse_corruption_name(const std::string& name);

struct AvgRow {
  std::string corruption;
  CorruptionName parsed;
  std::string metric;
  double avg = 0.0;
  std::size_t count = 0;
};

struct QuadrantRow {
  std::string corruption;
  CorruptionName parsed;
  double pd_avg = 0.0;
  std::string other_metric;
  double other_avg = 0.0;
  Quadrant quadrant = Quadrant::kIV;
};

struct HeatmapCell {
  std::string category;
  int severity = 0;
  std::string metric;
  double mean_avg = 0.0;
  std::size_t corruptions = 0;
};

struct PdwBucket {
  double lo = 0.0, hi = 0.0;
  double mean_relative_threat = 0.0;
  std::size_t count = 0;
};

// Optional context for the PD-W relative-threat curve.
struct PdwContext {
  const WeightMatrix* weights = nullptr;
  const LabeledDataset* inputs = nullptr;         // labels y
  const LabeledDataset* targets = nullptr;        // labels c; attr_class if absent
  std::size_t buckets = 10;
};

struct Report {
  std::vector<AvgRow> averages;
  std::vector<QuadrantRow> quadrants;
  std::vector<HeatmapCell> heatmap;
  std::vector<PdwBucket> pdw;
};

Report build_report(const std::vector<ReportInput>& inputs, const Thresholds& thresholds,
                    const PdwContext& pdw = {});

// CSV tables keyed by name: "avg", "quadrants", "heatmap", "pdw".
std::map<std::string, std::string> report_to_csv(const Report& report);
std::string report_to_json(const Report& report);

// Sidecar describing how a command's outputs were produced; written next to
// the primary output as `<out>.manifest.json`.
struct RunManifest {
  std::string command;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> input_hashes;  // path -> fnv1a64 hex
  std::vector<std::string> outputs;
  std::string tool_version;
  double wall_clock_seconds = 0.0;
};

std::string manifest_to_json(const RunManifest& manifest);
std::string manifest_path(const std::string& output_path);
std::string hash_hex(std::uint64_t h);

}  // namespace pdthreat::report
