#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <regex>
#include <string>

#include "tca/hull.hpp"
#include "tca/ingest.hpp"
#include "tca/npy.hpp"
#include "tca/parallel.hpp"
#include "tca/rank_selection.hpp"
#include "tca/similarity.hpp"
#include "tca/solvers.hpp"
#include "tca/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes are part of the interface: 0 ok, 2 bad arguments, 3 I/O,
// 4 solver degeneracy with no usable replicate, 5 no stable rank,
// 6 rank mismatch, 7 hull too small.
int exit_code_for(const tca::Error& e) {
  switch (e.code()) {
    case tca::errc::invalid_argument:
    case tca::errc::invalid_spec:
    case tca::errc::negative_input:
    case tca::errc::index_out_of_range:
    case tca::errc::too_few_ranks:
    case tca::errc::too_many_tasks:
      return 2;
    case tca::errc::io_error:
    case tca::errc::bad_magic:
    case tca::errc::unsupported_dtype:
    case tca::errc::fortran_order_unsupported:
    case tca::errc::shape_mismatch_across_snapshots:
    case tca::errc::empty_manifest:
    case tca::errc::length_mismatch:
    case tca::errc::non_finite_entry:
      return 3;
    case tca::errc::no_stable_rank:
      return 5;
    case tca::errc::rank_mismatch:
      return 6;
    case tca::errc::hull_too_small:
      return 7;
    default:
      return 1;
  }
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0 = all hardware threads
  std::string out_dir = ".";
};

void require_file(const std::string& path) {
  if (!fs::exists(path)) tca::raise(tca::errc::io_error, path + " does not exist");
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) tca::raise(tca::errc::io_error, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) tca::raise(tca::errc::io_error, "short write to " + path.string());
}

void write_factors_dir(const tca::KruskalFactors& f, const fs::path& dir, json meta) {
  fs::create_directories(dir);
  tca::write_npy((dir / "U.npy").string(), {f.u.rows, f.u.cols}, f.u.data);
  tca::write_npy((dir / "V.npy").string(), {f.v.rows, f.v.cols}, f.v.data);
  tca::write_npy((dir / "W.npy").string(), {f.w.rows, f.w.cols}, f.w.data);
  tca::write_npy((dir / "lambda.npy").string(), {f.weights.size()}, f.weights);
  meta["rank"] = f.rank();
  meta["dims"] = {f.u.rows, f.v.rows, f.w.rows};
  write_text_file(dir / "meta.json", meta.dump(2) + "\n");
}

tca::Dense3Tensor load_input_tensor(const std::string& tensor_path,
                                    const std::string& manifest_path) {
  if (!tensor_path.empty()) {
    require_file(tensor_path);
    return tca::load_tensor(tensor_path);
  }
  require_file(manifest_path);
  return tca::assemble_tensor(tca::SnapshotManifest::load(manifest_path));
}

struct FitArgs {
  std::string tensor_path;
  std::string manifest_path;
  std::size_t rank = 0;
  std::string algorithm = "nn-bcd";
  std::size_t replicates = 1;
  std::size_t max_iters = 500;
  double tol = 1e-6;
};

bool usable(const tca::FitResult& result) {
  return result.degenerate_components.size() < result.factors.rank();
}

int cmd_fit(const GlobalOptions& global, const FitArgs& args) {
  tca::Dense3Tensor x = load_input_tensor(args.tensor_path, args.manifest_path);
  tca::Algorithm algorithm = tca::algorithm_from_name(args.algorithm);

  tca::FitOptions opts;
  opts.max_iters = args.max_iters;
  opts.rel_tol = args.tol;

  std::vector<std::optional<tca::FitResult>> results(args.replicates);
  std::vector<std::string> failures(args.replicates);
  std::optional<tca::Error> hard_error;
  tca::parallel_for(args.replicates, global.threads, [&](std::size_t rep) {
    tca::FitOptions rep_opts = opts;
    rep_opts.seed = global.seed + rep;
    try {
      results[rep] = tca::fit(x, args.rank, algorithm, rep_opts);
    } catch (const tca::Error& e) {
      failures[rep] = e.what();
      // Precondition failures hit every replicate the same way; surface them
      // with their own exit code instead of the generic "no usable replicate".
      if (e.code() == tca::errc::negative_input || e.code() == tca::errc::zero_tensor ||
          e.code() == tca::errc::invalid_argument) {
        if (!hard_error) hard_error = e;
      }
    } catch (const std::exception& e) {
      failures[rep] = e.what();
    }
  });
  if (hard_error) throw *hard_error;

  std::optional<std::size_t> best;
  for (std::size_t rep = 0; rep < args.replicates; ++rep) {
    if (!results[rep] || !usable(*results[rep])) continue;
    if (!best || results[rep]->final_error < results[*best]->final_error) best = rep;
  }
  if (!best) {
    std::fprintf(stderr, "error: no usable replicate (all fits failed or fully degenerate)\n");
    return 4;
  }

  fs::path out(global.out_dir);
  fs::create_directories(out);
  std::string source = args.tensor_path.empty() ? args.manifest_path : args.tensor_path;
  tca::export_factors(*results[*best], (out / "factors").string(), source);

  json replicates = json::array();
  for (std::size_t rep = 0; rep < args.replicates; ++rep) {
    json entry = {{"replicate", rep}, {"seed", global.seed + rep}};
    if (results[rep]) {
      entry["final_error"] = results[rep]->final_error;
      entry["iterations"] = results[rep]->iterations;
      entry["converged"] = results[rep]->converged;
      entry["degenerate_components"] = results[rep]->degenerate_components;
    } else {
      entry["final_error"] = nullptr;
      entry["failure"] = failures[rep];
    }
    replicates.push_back(entry);
  }
  json report = {{"algorithm", args.algorithm},
                 {"rank", args.rank},
                 {"dims", {x.dim(0), x.dim(1), x.dim(2)}},
                 {"seed_base", global.seed},
                 {"source", source},
                 {"best_replicate", *best},
                 {"best_error", results[*best]->final_error},
                 {"replicates", replicates}};
  write_text_file(out / "fit_report.json", report.dump(2) + "\n");

  std::printf("fit rank=%zu algorithm=%s best_error=%.6g replicate=%zu\n", args.rank,
              args.algorithm.c_str(), results[*best]->final_error, *best);
  return 0;
}

struct SweepArgs {
  std::string tensor_path;
  std::string manifest_path;
  std::string ranks;
  std::size_t replicates = 10;
  std::string algorithm = "nn-bcd";
  bool select = false;
  double threshold = 0.8;
  std::size_t max_iters = 500;
  double tol = 1e-6;
};

int cmd_sweep(const GlobalOptions& global, const SweepArgs& args) {
  std::smatch match;
  if (!std::regex_match(args.ranks, match, std::regex(R"((\d+)\.\.(\d+))")))
    tca::raise(tca::errc::invalid_argument, "--ranks must look like A..B");
  std::size_t lo = std::stoull(match[1]);
  std::size_t hi = std::stoull(match[2]);
  if (lo == 0 || hi < lo)
    tca::raise(tca::errc::invalid_argument, "--ranks must satisfy 1 <= A <= B");
  if (args.select && args.replicates < 2)
    tca::raise(tca::errc::invalid_argument, "--select needs at least 2 replicates");

  tca::Dense3Tensor x = load_input_tensor(args.tensor_path, args.manifest_path);
  tca::FitOptions opts;
  opts.max_iters = args.max_iters;
  opts.rel_tol = args.tol;
  opts.seed = global.seed;

  tca::SweepReport report =
      tca::sweep_ranks(x, lo, hi, args.replicates, tca::algorithm_from_name(args.algorithm),
                       opts, global.threads);

  fs::path out(global.out_dir);
  fs::create_directories(out);
  write_text_file(out / "sweep.json", tca::sweep_to_json(report));
  write_text_file(out / "sweep.csv", tca::sweep_to_csv(report));

  if (args.select) {
    tca::RankSelection selection = tca::select_rank(report, args.threshold);
    json doc = {{"selected_rank", selection.rank},
                {"elbow", {selection.elbow.lo, selection.elbow.hi}},
                {"no_elbow", selection.elbow.no_elbow},
                {"threshold", args.threshold}};
    write_text_file(out / "selection.json", doc.dump(2) + "\n");
    std::printf("selected_rank %zu (elbow %zu..%zu)\n", selection.rank, selection.elbow.lo,
                selection.elbow.hi);
  } else {
    std::printf("sweep ranks %zu..%zu done\n", lo, hi);
  }
  return 0;
}

struct CompareArgs {
  std::string a_dir;
  std::string b_dir;
};

int cmd_compare(const GlobalOptions& global, const CompareArgs& args) {
  require_file(args.a_dir);
  require_file(args.b_dir);
  tca::ImportedFactors a = tca::import_factors(args.a_dir);
  tca::ImportedFactors b = tca::import_factors(args.b_dir);

  tca::SimilarityResult match = tca::similarity_score(a.factors, b.factors);
  tca::KruskalFactors aligned = tca::align(a.factors, b.factors);

  fs::path out(global.out_dir);
  fs::create_directories(out);
  write_factors_dir(aligned, out / "aligned_b",
                    {{"algorithm", b.algorithm},
                     {"seed", b.seed},
                     {"final_error", b.final_error},
                     {"aligned_to", args.a_dir}});

  json per_component = json::array();
  for (std::size_t r = 0; r < match.per_component.size(); ++r)
    per_component.push_back({{"component_a", r},
                             {"component_b", match.permutation[r]},
                             {"similarity", match.per_component[r]}});
  json doc = {{"score", match.score},
              {"permutation", match.permutation},
              {"per_component", per_component},
              {"a", args.a_dir},
              {"b", args.b_dir}};
  write_text_file(out / "comparison.json", doc.dump(2) + "\n");

  std::printf("similarity %.6f\n", match.score);
  return 0;
}

struct CurateArgs {
  std::string embedding_csv;
  std::string coords_npy;
  std::string labels_npy;
  std::size_t initial = 0;
  std::size_t tasks = 0;
};

int cmd_curate(const GlobalOptions& global, const CurateArgs& args) {
  std::vector<tca::EmbeddedPoint> points;
  if (!args.embedding_csv.empty()) {
    require_file(args.embedding_csv);
    points = tca::read_embedding_csv(args.embedding_csv);
  } else {
    require_file(args.coords_npy);
    require_file(args.labels_npy);
    points = tca::read_embedding_npy(args.coords_npy, args.labels_npy);
  }

  tca::TaskPlan plan =
      tca::curate_tasks(tca::class_centroids(points), args.initial, args.tasks, global.seed);
  std::string text = tca::task_plan_to_json(plan);

  fs::path out(global.out_dir);
  fs::create_directories(out);
  write_text_file(out / "taskplan.json", text);
  std::fputs(text.c_str(), stdout);
  return 0;
}

int cmd_build_tensor(const GlobalOptions& global, const std::string& manifest_path) {
  require_file(manifest_path);
  tca::Dense3Tensor t = tca::assemble_tensor(tca::SnapshotManifest::load(manifest_path));
  tca::save_tensor(t, global.out_dir);
  std::printf("tensor %zux%zux%zu -> %s/tensor.npy\n", t.dim(0), t.dim(1), t.dim(2),
              global.out_dir.c_str());
  return 0;
}

int cmd_synth(const GlobalOptions& global, const std::string& spec_path) {
  require_file(spec_path);
  std::ifstream in(spec_path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  tca::PlantedSpec spec = tca::PlantedSpec::from_json_text(text);

  tca::Planted planted = tca::generate(spec);
  tca::save_tensor(planted.tensor, global.out_dir);
  write_factors_dir(planted.truth, fs::path(global.out_dir) / "truth",
                    {{"algorithm", "planted"}, {"seed", spec.seed}, {"final_error", 0.0}});
  std::printf("synth tensor %zux%zux%zu rank=%zu -> %s\n", planted.tensor.dim(0),
              planted.tensor.dim(1), planted.tensor.dim(2), spec.rank,
              global.out_dir.c_str());
  return 0;
}

struct MaskArgs {
  std::string factors_dir;
  std::size_t component = 0;
  std::size_t top_k = 0;
  std::string layer;
};

int cmd_mask(const GlobalOptions& global, const MaskArgs& args) {
  require_file(args.factors_dir);
  tca::ImportedFactors imported = tca::import_factors(args.factors_dir);
  tca::NeuronMask mask = tca::export_neuron_mask(imported.factors, args.component, args.top_k);
  mask.layer = args.layer;
  mask.source = args.factors_dir;

  fs::path out(global.out_dir);
  fs::create_directories(out);
  tca::save_neuron_mask(mask, (out / "mask").string());
  std::printf("mask component=%zu top_k=%zu -> %s/mask.npy\n", args.component, args.top_k,
              global.out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor component analysis of model-snapshot activation dumps"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Base RNG seed")->envname("TCA_SEED");
  app.add_option("--threads", global.threads, "Worker threads (0 = all cores)");
  app.add_option("--out-dir", global.out_dir, "Directory for artifacts");

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Fit one CP model (best of N replicates)");
  fit->add_option("--tensor", fit_args.tensor_path, "3-D .npy tensor file");
  fit->add_option("--manifest", fit_args.manifest_path, "Snapshot manifest JSON");
  fit->add_option("--rank", fit_args.rank, "Number of components")
      ->required()
      ->check(CLI::PositiveNumber);
  fit->add_option("--algorithm", fit_args.algorithm, "als | nn-hals | nn-bcd")
      ->check(CLI::IsMember({"als", "nn-hals", "nn-bcd"}));
  fit->add_option("--replicates", fit_args.replicates)->check(CLI::PositiveNumber);
  fit->add_option("--max-iters", fit_args.max_iters)->check(CLI::PositiveNumber);
  fit->add_option("--tol", fit_args.tol)->check(CLI::PositiveNumber);

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand("sweep", "Fit replicates across a rank range");
  sweep->add_option("--tensor", sweep_args.tensor_path, "3-D .npy tensor file");
  sweep->add_option("--manifest", sweep_args.manifest_path, "Snapshot manifest JSON");
  sweep->add_option("--ranks", sweep_args.ranks, "Inclusive range, e.g. 1..20")->required();
  sweep->add_option("--replicates", sweep_args.replicates)->check(CLI::PositiveNumber);
  sweep->add_option("--algorithm", sweep_args.algorithm)
      ->check(CLI::IsMember({"als", "nn-hals", "nn-bcd"}));
  sweep->add_flag("--select", sweep_args.select, "Pick the lowest stable rank");
  sweep->add_option("--threshold", sweep_args.threshold, "Replicate similarity threshold");
  sweep->add_option("--max-iters", sweep_args.max_iters)->check(CLI::PositiveNumber);
  sweep->add_option("--tol", sweep_args.tol)->check(CLI::PositiveNumber);

  CompareArgs compare_args;
  CLI::App* compare = app.add_subcommand("compare", "Similarity of two factor directories");
  compare->add_option("--a", compare_args.a_dir)->required();
  compare->add_option("--b", compare_args.b_dir)->required();

  CurateArgs curate_args;
  CLI::App* curate = app.add_subcommand("curate", "Hull-based task plan from 2-D embeddings");
  curate->add_option("--embedding", curate_args.embedding_csv, "CSV with header class,x,y");
  curate->add_option("--coords", curate_args.coords_npy, "N x 2 .npy coordinates");
  curate->add_option("--labels", curate_args.labels_npy, "Length-N .npy integer labels");
  curate->add_option("--initial", curate_args.initial, "Initial task size")->required();
  curate->add_option("--tasks", curate_args.tasks, "Number of later tasks")->required();

  std::string manifest_path;
  CLI::App* build = app.add_subcommand("build-tensor", "Assemble a tensor from a manifest");
  build->add_option("--manifest", manifest_path)->required();

  std::string spec_path;
  CLI::App* synth = app.add_subcommand("synth", "Generate a planted tensor with ground truth");
  synth->add_option("--spec", spec_path, "Planted spec JSON")->required();

  MaskArgs mask_args;
  CLI::App* mask = app.add_subcommand("mask", "Export a top-k unit mask from a component");
  mask->add_option("--factors", mask_args.factors_dir)->required();
  mask->add_option("--component", mask_args.component)->required();
  mask->add_option("--top-k", mask_args.top_k)->required();
  mask->add_option("--layer", mask_args.layer, "Layer id recorded in the mask sidecar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fit->parsed()) {
      if (fit_args.tensor_path.empty() == fit_args.manifest_path.empty())
        tca::raise(tca::errc::invalid_argument, "need exactly one of --tensor / --manifest");
      return cmd_fit(global, fit_args);
    }
    if (sweep->parsed()) {
      if (sweep_args.tensor_path.empty() == sweep_args.manifest_path.empty())
        tca::raise(tca::errc::invalid_argument, "need exactly one of --tensor / --manifest");
      return cmd_sweep(global, sweep_args);
    }
    if (compare->parsed()) return cmd_compare(global, compare_args);
    if (curate->parsed()) {
      bool csv = !curate_args.embedding_csv.empty();
      bool npy = !curate_args.coords_npy.empty() && !curate_args.labels_npy.empty();
      if (csv == npy)
        tca::raise(tca::errc::invalid_argument,
                   "need either --embedding or both --coords and --labels");
      return cmd_curate(global, curate_args);
    }
    if (build->parsed()) return cmd_build_tensor(global, manifest_path);
    if (synth->parsed()) return cmd_synth(global, spec_path);
    if (mask->parsed()) return cmd_mask(global, mask_args);
  } catch (const tca::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
