#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pd {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNotConverged = 3;

// Bookkeeping shared by all commands; feeds the run manifest.
struct Run {
  std::string command;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::size_t threads = 1;
};

struct IndexBuildArgs {
  std::string train, out;
  std::size_t k = 50;
  double beta = 0.5;
  std::uint64_t seed = 0;
};

struct CalibrateArgs {
  std::string train, out;
  double beta = 0.5;
  std::size_t k_max = 50;
  std::size_t max_pairs = 10000;
  std::uint64_t seed = 0;
};

struct ThreatEvalArgs {
  std::string index, inputs, perturbed, masks, weights, metric, out;
  std::string format = "csv";
};

struct ProjectArgs {
  std::string index, inputs, deltas, out;
  double eps = 1.0;
  std::optional<double> linf;
  std::string mode = "exact";
  std::size_t max_iters = 1000;
};

struct Oracle2dArgs {
  std::string task, out, field_out;
  std::size_t grid = 512, angles = 720, pairs = 200, field_grid = 64;
  std::uint64_t seed = 0;
  std::vector<double> field_x;
  double field_eps = 1.0;
};

struct CorruptArgs {
  std::string inputs, style, out, geometry;
  int severity = 1;
  std::uint64_t seed = 0;
};

struct ReportArgs {
  std::vector<std::string> in;
  std::string thresholds, format = "csv", out;
  std::string weights, inputs, targets;
  std::size_t buckets = 10;
};

struct BlobArgs {
  std::size_t n = 300, dim = 64, classes = 3;
  double spread = 0.2, noise = 0.05;
  std::uint64_t seed = 0;
  std::string out;
};

struct PairsArgs {
  std::string inputs, out;
  std::uint64_t seed = 0;
};

struct WeightsArgs {
  std::string index, hierarchy, out;
  std::vector<std::string> external;
  bool combine = false;
};

// Each returns a process exit code; library errors propagate as exceptions.
int index_build(Run& run, const IndexBuildArgs& a);
int calibrate_k(Run& run, const CalibrateArgs& a);
int threat_eval(Run& run, const ThreatEvalArgs& a);
int project(Run& run, const ProjectArgs& a);
int oracle2d(Run& run, const Oracle2dArgs& a);
int corrupt(Run& run, const CorruptArgs& a);
int report(Run& run, const ReportArgs& a);
int synth_blobs(Run& run, const BlobArgs& a);
int pairs(Run& run, const PairsArgs& a);
int weights_build(Run& run, const WeightsArgs& a);

// Writes `<output>.manifest.json` next to every output of the run.
void write_manifests(const Run& run, double wall_clock_seconds);

}  // namespace pd
