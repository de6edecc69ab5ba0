#include "commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pdthreat/class_weights.hpp"
#include "pdthreat/corruptions.hpp"
#include "pdthreat/error.hpp"
#include "pdthreat/io.hpp"
#include "pdthreat/oracle2d.hpp"
#include "pdthreat/parallel.hpp"
#include "pdthreat/report.hpp"
#include "pdthreat/sublevel.hpp"
#include "pdthreat/synthetic.hpp"
#include "pdthreat/threat.hpp"
#include "pdthreat/unsafe_index.hpp"
#include "pdthreat/version.hpp"

namespace pd {

using namespace pdthreat;
namespace fs = std::filesystem;

namespace {

LabeledDataset read_dataset(Run& run, const std::string& path) {
  run.inputs.push_back(path);
  return load_dataset(path);
}

void emit(Run& run, const std::string& path, const std::string& bytes) {
  write_file(path, bytes);
  run.outputs.push_back(path);
}

// "<dir>/<stem><suffix>" for a sibling of `out`.
std::string sibling(const std::string& out, const std::string& suffix) {
  const fs::path p(out);
  return (p.parent_path() / (p.stem().string() + suffix)).string();
}

ImageGeometry parse_geometry(const std::string& text, std::size_t dim) {
  if (text.empty()) return default_geometry(dim);
  ImageGeometry g;
  char x1 = 0, x2 = 0;
  std::istringstream in(text);
  if (!(in >> g.height >> x1 >> g.width >> x2 >> g.channels) || x1 != 'x' || x2 != 'x' ||
      !in.eof()) {
    throw Error(ErrorCode::kInvalidArgument, "geometry must look like HxWxC, got '" + text + "'");
  }
  return g;
}

}  // namespace

int index_build(Run& run, const IndexBuildArgs& a) {
  const auto train = read_dataset(run, a.train);
  run.seeds["seed"] = a.seed;
  const auto index = build_index(train, a.k, a.beta, a.seed);
  save_index(index, a.out);
  run.outputs.push_back(a.out);
  return kExitOk;
}

int calibrate_k(Run& run, const CalibrateArgs& a) {
  const auto train = read_dataset(run, a.train);
  run.seeds["seed"] = a.seed;
  const auto result = pdthreat::calibrate_k(train, a.beta, a.seed, a.k_max, a.max_pairs);
  emit(run, a.out, report::calibration_to_csv(result));
  if (result.k_min) {
    fmt::print("k_min = {}\n", *result.k_min);
  } else {
    fmt::print("k_min not found for k <= {}\n", a.k_max);
  }
  return kExitOk;
}

int threat_eval(Run& run, const ThreatEvalArgs& a) {
  const Metric metric = parse_metric(a.metric);
  const auto inputs = read_dataset(run, a.inputs);
  const auto perturbed = read_dataset(run, a.perturbed);
  std::optional<RepresentativeIndex> index;
  std::optional<MaskSet> masks;
  std::optional<WeightMatrix> weights;
  if (!a.index.empty()) {
    run.inputs.push_back(a.index);
    index = load_index(a.index);
  }
  if (!a.masks.empty()) {
    run.inputs.push_back(a.masks);
    masks = load_masks(a.masks);
  }
  if (!a.weights.empty()) {
    run.inputs.push_back(a.weights);
    weights = load_weights(a.weights);
  }
  EvalOptions options;
  options.masks = masks ? &*masks : nullptr;
  options.weights = weights ? &*weights : nullptr;
  options.threads = run.threads;
  const auto records =
      evaluate_batch(metric, inputs, perturbed, index ? &*index : nullptr, options);
  emit(run, a.out,
       a.format == "json" ? report::threats_to_json(records) : report::threats_to_csv(records));
  return kExitOk;
}

int project(Run& run, const ProjectArgs& a) {
  if (a.eps <= 0.0) throw Error(ErrorCode::kNonPositiveEpsilon, "--eps must be positive");
  if (a.linf && *a.linf <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "--linf must be positive");
  }
  run.inputs.push_back(a.index);
  const auto index = load_index(a.index);
  const auto inputs = read_dataset(run, a.inputs);
  const auto deltas = read_dataset(run, a.deltas);
  if (inputs.n != deltas.n || inputs.dim != deltas.dim) {
    throw Error(ErrorCode::kShapeMismatch, "inputs and deltas differ in shape");
  }
  const bool lazy = a.mode == "lazy";
  const std::size_t d = inputs.dim;

  LabeledDataset out;
  out.n = inputs.n;
  out.dim = d;
  out.num_classes = inputs.num_classes;
  out.labels = inputs.labels;
  out.data.resize(inputs.n * d);
  std::atomic<std::size_t> not_converged{0};

  parallel_for(inputs.n, run.threads, [&](std::size_t i) {
    const Vec x = to_vec(inputs.row(i));
    Vec delta = to_vec(deltas.row(i));
    const auto dirs = unsafe_directions(index, x, inputs.labels[i]);
    Vec result;
    if (lazy) {
      // Scaling toward the origin keeps a clamped point inside the box.
      if (a.linf) {
        for (auto& v : delta) v = std::clamp(v, -*a.linf, *a.linf);
      }
      result = lazy_project(dirs, delta, a.eps);
    } else {
      const auto set = build_sublevel(dirs, a.eps);
      if (a.linf) {
        auto r = project_intersection_linf(set, delta, *a.linf, a.max_iters);
        if (!r.converged) ++not_converged;
        result = std::move(r.point);
      } else {
        auto r = greedy_project(set, delta, a.max_iters);
        if (!r.converged) ++not_converged;
        result = std::move(r.point);
      }
    }
    for (std::size_t t = 0; t < d; ++t) out.data[i * d + t] = static_cast<float>(result[t]);
  });

  save_dataset(out, a.out);
  run.outputs.push_back(a.out);
  if (not_converged > 0) {
    fmt::print(stderr, "warning: {} of {} projections did not converge in {} passes\n",
               not_converged.load(), inputs.n, a.max_iters);
    return kExitNotConverged;
  }
  return kExitOk;
}

int oracle2d(Run& run, const Oracle2dArgs& a) {
  using namespace pdthreat::oracle2d;
  const auto task = [&] {
    if (a.task == "reference") return SyntheticTask2D::reference_task();
    run.inputs.push_back(a.task);
    return SyntheticTask2D::load(a.task);
  }();
  run.seeds["seed"] = a.seed;
  const GridOracle grid(task, a.grid, a.angles);
  const auto rep = theorem1_check(task, grid, a.pairs, a.seed);

  nlohmann::json j;
  j["grid"] = a.grid;
  j["angles"] = a.angles;
  j["seed"] = a.seed;
  j["step"] = grid.step();
  j["tolerance"] = rep.tolerance;
  j["pairs_checked"] = rep.pairs_checked;
  j["skipped"] = rep.skipped;
  j["violations"] = rep.violations;
  j["min_threat"] = rep.min_threat;
  j["pairs"] = nlohmann::json::array();
  for (const auto& p : rep.pairs) {
    j["pairs"].push_back({{"x", p.x},
                          {"x_tilde", p.x_tilde},
                          {"label_x", p.label_x},
                          {"label_x_tilde", p.label_x_tilde},
                          {"threat", p.threat}});
  }
  emit(run, a.out, j.dump(2) + "\n");

  if (!a.field_out.empty()) {
    if (a.field_x.size() != 2) {
      throw Error(ErrorCode::kInvalidArgument, "--field-x takes two coordinates");
    }
    const auto field =
        sublevel_field(task, grid, {a.field_x[0], a.field_x[1]}, a.field_eps, a.field_grid);
    emit(run, a.field_out, field_to_csv(field));
  }
  fmt::print("pairs {} violations {} min threat {} (tolerance {})\n", rep.pairs_checked,
             rep.violations, rep.min_threat, rep.tolerance);
  return kExitOk;
}

int corrupt(Run& run, const CorruptArgs& a) {
  const auto inputs = read_dataset(run, a.inputs);
  run.seeds["seed"] = a.seed;
  const auto out = corrupt_dataset(inputs, parse_style(a.style), a.severity, a.seed,
                                   parse_geometry(a.geometry, inputs.dim));
  save_dataset(out, a.out);
  run.outputs.push_back(a.out);
  return kExitOk;
}

int report(Run& run, const ReportArgs& a) {
  std::vector<report::ReportInput> groups;
  for (const auto& spec : a.in) {
    const auto eq = spec.find('=');
    std::string name, path;
    if (eq == std::string::npos) {
      path = spec;
      name = fs::path(spec).stem().string();
    } else {
      name = spec.substr(0, eq);
      path = spec.substr(eq + 1);
    }
    run.inputs.push_back(path);
    groups.push_back({name, report::parse_threat_csv(read_file(path))});
  }
  std::optional<WeightMatrix> weights;
  std::optional<LabeledDataset> inputs, targets;
  report::PdwContext ctx;
  ctx.buckets = a.buckets;
  if (!a.weights.empty()) {
    run.inputs.push_back(a.weights);
    weights = load_weights(a.weights);
    ctx.weights = &*weights;
  }
  if (!a.inputs.empty()) {
    inputs = read_dataset(run, a.inputs);
    ctx.inputs = &*inputs;
  }
  if (!a.targets.empty()) {
    targets = read_dataset(run, a.targets);
    ctx.targets = &*targets;
  }
  if ((ctx.weights == nullptr) != (ctx.inputs == nullptr)) {
    throw Error(ErrorCode::kInvalidArgument, "--weights and --inputs must be given together");
  }
  const auto rep = report::build_report(groups, report::parse_thresholds(a.thresholds), ctx);
  if (a.format == "json") {
    emit(run, a.out, report::report_to_json(rep));
    return kExitOk;
  }
  const auto tables = report::report_to_csv(rep);
  emit(run, a.out, tables.at("avg"));
  emit(run, sibling(a.out, ".quadrants.csv"), tables.at("quadrants"));
  emit(run, sibling(a.out, ".heatmap.csv"), tables.at("heatmap"));
  if (ctx.weights != nullptr) emit(run, sibling(a.out, ".pdw.csv"), tables.at("pdw"));
  return kExitOk;
}

int synth_blobs(Run& run, const BlobArgs& a) {
  BlobOptions o;
  o.n = a.n;
  o.dim = a.dim;
  o.num_classes = a.classes;
  o.spread = a.spread;
  o.noise = a.noise;
  o.seed = a.seed;
  run.seeds["seed"] = a.seed;
  save_dataset(make_blobs(o), a.out);
  run.outputs.push_back(a.out);
  return kExitOk;
}

int pairs(Run& run, const PairsArgs& a) {
  const auto inputs = read_dataset(run, a.inputs);
  run.seeds["seed"] = a.seed;
  save_dataset(gather_rows(inputs, cross_label_partners(inputs, a.seed)), a.out);
  run.outputs.push_back(a.out);
  return kExitOk;
}

int weights_build(Run& run, const WeightsArgs& a) {
  std::vector<WeightMatrix> parts;
  if (!a.index.empty()) {
    run.inputs.push_back(a.index);
    parts.push_back(relative_weights(euclidean_distance_matrix(load_index(a.index))));
  }
  if (!a.hierarchy.empty()) {
    run.inputs.push_back(a.hierarchy);
    parts.push_back(relative_weights(lca_distance_matrix(load_hierarchy(a.hierarchy))));
  }
  for (const auto& path : a.external) {
    run.inputs.push_back(path);
    parts.push_back(relative_weights(external_distance_matrix(load_raw_weights(path))));
  }
  if (parts.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "give at least one of --index, --hierarchy, --external");
  }
  if (!a.combine && parts.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "several sources need --combine");
  }
  save_weights(a.combine ? combine_weights(parts) : parts.front(), a.out);
  run.outputs.push_back(a.out);
  return kExitOk;
}

void write_manifests(const Run& run, double wall_clock_seconds) {
  report::RunManifest m;
  m.command = run.command;
  m.flags = run.flags;
  m.seeds = run.seeds;
  for (const auto& path : run.inputs) m.input_hashes[path] = report::hash_hex(file_hash(path));
  m.outputs = run.outputs;
  m.tool_version = kVersion;
  m.wall_clock_seconds = wall_clock_seconds;
  const auto text = report::manifest_to_json(m);
  for (const auto& out : run.outputs) write_file(report::manifest_path(out), text);
}

}  // namespace pd
