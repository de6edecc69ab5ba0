// pd: command-line front end for the pdthreat library.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <chrono>
#include <exception>
#include <thread>

#include "commands.hpp"
#include "pdthreat/error.hpp"
#include "pdthreat/version.hpp"

namespace {

// Records every flag the user passed on the chosen subcommand chain.
void collect_flags(const CLI::App* app, std::map<std::string, std::string>& flags) {
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->count() == 0 || opt->get_name() == "--help") continue;
    std::string joined;
    for (const auto& r : opt->results()) joined += (joined.empty() ? "" : ",") + r;
    flags[opt->get_name()] = joined;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Projected displacement threat toolkit"};
  app.set_version_flag("--version", std::string(pdthreat::kVersion));
  app.require_subcommand(1);
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "Worker thread cap")->envname("PD_THREADS")
      ->check(CLI::PositiveNumber);

  using std::string;
  const auto metric_check = CLI::IsMember({"pd", "pds", "pd_s", "pdw", "pd_w", "linf", "l2"});
  const auto format_check = CLI::IsMember({"csv", "json"});

  // index build
  pd::IndexBuildArgs ib;
  auto* index = app.add_subcommand("index", "Representative index commands");
  index->require_subcommand(1);
  auto* index_build = index->add_subcommand("build", "Build a PDX1 index from training data");
  index_build->add_option("--train", ib.train, "PDT1 training set")->required();
  index_build->add_option("--k", ib.k, "Representatives per class")->check(CLI::PositiveNumber);
  index_build->add_option("--beta", ib.beta, "Normalization scale in (0,1)");
  index_build->add_option("--seed", ib.seed);
  index_build->add_option("--out", ib.out)->required();

  pd::CalibrateArgs ck;
  auto* calibrate = app.add_subcommand("calibrate-k", "Threat curve over greedy prefixes");
  calibrate->add_option("--train", ck.train)->required();
  calibrate->add_option("--beta", ck.beta);
  calibrate->add_option("--k-max", ck.k_max)->check(CLI::PositiveNumber);
  calibrate->add_option("--max-pairs", ck.max_pairs, "Cross-label pair sample cap")
      ->check(CLI::PositiveNumber);
  calibrate->add_option("--seed", ck.seed);
  calibrate->add_option("--out", ck.out, "CSV output")->required();

  pd::ThreatEvalArgs te;
  auto* threat = app.add_subcommand("threat", "Threat evaluation commands");
  threat->require_subcommand(1);
  auto* threat_eval = threat->add_subcommand("eval", "Threat of perturbed - inputs per row");
  threat_eval->add_option("--index", te.index, "PDX1 index (PD metrics)");
  threat_eval->add_option("--inputs", te.inputs)->required();
  threat_eval->add_option("--perturbed", te.perturbed)->required();
  threat_eval->add_option("--masks", te.masks, "PDM1 masks (pds)");
  threat_eval->add_option("--weights", te.weights, "PDW1 weights (pdw)");
  threat_eval->add_option("--metric", te.metric)->required()->check(metric_check);
  threat_eval->add_option("--format", te.format)->check(format_check);
  threat_eval->add_option("--out", te.out)->required();

  pd::ProjectArgs pj;
  auto* project = app.add_subcommand("project", "Project perturbations onto the sublevel set");
  project->add_option("--index", pj.index)->required();
  project->add_option("--inputs", pj.inputs)->required();
  project->add_option("--deltas", pj.deltas, "PDT1 perturbations, row-aligned")->required();
  project->add_option("--eps", pj.eps)->required();
  project->add_option("--linf", pj.linf, "Also intersect with the l_inf ball of this radius");
  project->add_option("--mode", pj.mode)->check(CLI::IsMember({"lazy", "exact"}));
  project->add_option("--max-iters", pj.max_iters)->check(CLI::PositiveNumber);
  project->add_option("--out", pj.out, "PDT1 projected perturbations")->required();

  pd::Oracle2dArgs o2;
  auto* oracle = app.add_subcommand("oracle2d", "Exact threat checks on a 2D task");
  oracle->add_option("--task", o2.task, "Task JSON, or 'reference'")->required();
  oracle->add_option("--grid", o2.grid);
  oracle->add_option("--angles", o2.angles);
  oracle->add_option("--pairs", o2.pairs);
  oracle->add_option("--seed", o2.seed);
  oracle->add_option("--out", o2.out, "JSON report")->required();
  oracle->add_option("--field-out", o2.field_out, "Optional threat field CSV");
  oracle->add_option("--field-x", o2.field_x, "Field base point")->expected(2)->delimiter(',');
  oracle->add_option("--field-eps", o2.field_eps);
  oracle->add_option("--field-grid", o2.field_grid);

  pd::CorruptArgs co;
  auto* corrupt = app.add_subcommand("corrupt", "Apply a synthetic corruption");
  corrupt->add_option("--inputs", co.inputs)->required();
  corrupt->add_option("--style", co.style)->required();
  corrupt->add_option("--severity", co.severity)->required()->check(CLI::Range(1, 5));
  corrupt->add_option("--seed", co.seed);
  corrupt->add_option("--geometry", co.geometry, "HxWxC; square single channel by default");
  corrupt->add_option("--out", co.out)->required();

  pd::ReportArgs rp;
  auto* report = app.add_subcommand("report", "Aggregate threat CSVs");
  report->add_option("--in", rp.in, "NAME=PATH threat CSV (repeatable)")->required();
  report->add_option("--thresholds", rp.thresholds, "e.g. pd=1.0,linf=0.5,ext=0.25");
  report->add_option("--format", rp.format)->check(format_check);
  report->add_option("--weights", rp.weights, "PDW1 weights for the PD-W curve");
  report->add_option("--inputs", rp.inputs, "PDT1 inputs supplying labels y");
  report->add_option("--targets", rp.targets, "PDT1 targets supplying labels c");
  report->add_option("--buckets", rp.buckets)->check(CLI::PositiveNumber);
  report->add_option("--out", rp.out)->required();

  pd::BlobArgs bl;
  auto* blobs = app.add_subcommand("synth-blobs", "Write a Gaussian-blob dataset");
  blobs->add_option("--n", bl.n);
  blobs->add_option("--dim", bl.dim)->check(CLI::PositiveNumber);
  blobs->add_option("--classes", bl.classes)->check(CLI::PositiveNumber);
  blobs->add_option("--spread", bl.spread);
  blobs->add_option("--noise", bl.noise);
  blobs->add_option("--seed", bl.seed);
  blobs->add_option("--out", bl.out)->required();

  pd::PairsArgs pa;
  auto* pairs = app.add_subcommand("pairs", "Row-aligned cross-label partners");
  pairs->add_option("--inputs", pa.inputs)->required();
  pairs->add_option("--seed", pa.seed);
  pairs->add_option("--out", pa.out)->required();

  pd::WeightsArgs wb;
  auto* weights = app.add_subcommand("weights", "Class weight commands");
  weights->require_subcommand(1);
  auto* weights_build = weights->add_subcommand("build", "Relative class-distance weights");
  weights_build->add_option("--index", wb.index, "Euclidean distances between representatives");
  weights_build->add_option("--hierarchy", wb.hierarchy, "Tree distances through the LCA");
  weights_build->add_option("--external", wb.external, "PDW1 raw distance matrix (repeatable)");
  weights_build->add_flag("--combine", wb.combine, "Elementwise squared minimum of all sources");
  weights_build->add_option("--out", wb.out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pd::kExitOk : pd::kExitUsage;
  }

  pd::Run run;
  run.threads = threads;
  const auto start = std::chrono::steady_clock::now();
  int status = pd::kExitOk;
  try {
    const CLI::App* leaf = &app;
    while (!leaf->get_subcommands().empty()) {
      leaf = leaf->get_subcommands().front();
      run.command += (run.command.empty() ? "" : " ") + leaf->get_name();
      collect_flags(leaf, run.flags);
    }
    if (index_build->parsed()) {
      status = pd::index_build(run, ib);
    } else if (calibrate->parsed()) {
      status = pd::calibrate_k(run, ck);
    } else if (threat_eval->parsed()) {
      status = pd::threat_eval(run, te);
    } else if (project->parsed()) {
      status = pd::project(run, pj);
    } else if (oracle->parsed()) {
      status = pd::oracle2d(run, o2);
    } else if (corrupt->parsed()) {
      status = pd::corrupt(run, co);
    } else if (report->parsed()) {
      status = pd::report(run, rp);
    } else if (blobs->parsed()) {
      status = pd::synth_blobs(run, bl);
    } else if (pairs->parsed()) {
      status = pd::pairs(run, pa);
    } else if (weights_build->parsed()) {
      status = pd::weights_build(run, wb);
    }
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    pd::write_manifests(run, elapsed.count());
  } catch (const pdthreat::Error& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return pd::kExitData;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return pd::kExitData;
  }
  return status;
}
