// Command line front end: run one configuration, run the full grid, dump the
// feature catalog, or generate the synthetic benchmark dataset.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "harlearn/harness.hpp"
#include "harlearn/synth.hpp"
#include "harlearn/version.hpp"

namespace {

using namespace harlearn;

void print_summary(const SummaryTable& table, std::ostream& out) {
  auto line = [&](const std::string& pos, const std::string& kind,
                  const SummaryRow& row) {
    if (!row.complete) {
      out << "  " << pos << "/" << kind << ": FAILED\n";
      return;
    }
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "  %-5s / %-4s  ui %5.1f  nonsup %5.1f  semi90 %5.1f (%4.1f)  "
                  "semi95 %5.1f (%4.1f)  sup %5.1f",
                  pos.c_str(), kind.c_str(), row.user_independent, row.non_supervised,
                  row.semi_090, row.semi_090_queried, row.semi_095,
                  row.semi_095_queried, row.supervised);
    out << buf << '\n';
  };
  out << "error rates in percent (queried fraction in parentheses)\n";
  for (const auto& row : table.rows)
    line(std::string(to_string(row.position)), std::string(to_string(row.classifier)),
         row);
  line("mean", "all", table.mean);
}

struct CommonArgs {
  std::string data_dir;
  std::string manifest_path;
  std::string out_dir;
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::size_t sfs_max_features = 15;
  double sampling_fraction = 0.6;
  int cart_min_leaf = 3;
  double shrinkage = 0.05;
};

ExperimentConfig make_config(const CommonArgs& args) {
  ExperimentConfig config = ExperimentConfig::defaults();
  config.master_seed = args.seed;
  config.recipe.sfs_max_features = args.sfs_max_features;
  config.recipe.sampling_fraction = args.sampling_fraction;
  config.classifier.tree.min_leaf_size = args.cart_min_leaf;
  config.classifier.shrinkage = args.shrinkage;
  return config;
}

int run_matrix_command(const CommonArgs& args, const ExperimentConfig& config,
                       const MatrixOptions& options) {
  const DatasetManifest manifest = load_manifest(args.manifest_path);
  FeatureStore store(args.data_dir, manifest, config.master_seed, args.threads);
  const MatrixResult result = run_matrix(config, store, options);
  if (!args.out_dir.empty()) {
    emit_reports(result, config, options, store, args.out_dir);
    std::cout << "reports written to " << args.out_dir << "\n";
  }
  print_summary(result.summary, std::cout);
  if (!result.failed_cells.empty()) {
    for (const auto& f : result.failed_cells) std::cerr << "failed cell: " << f << "\n";
    return 1;
  }
  return 0;
}

/// One (position, classifier, strategy) cell: LOSO over every included
/// subject with that strategy only.
int run_single_command(const CommonArgs& args, const ExperimentConfig& config) {
  const DatasetManifest manifest = load_manifest(args.manifest_path);
  FeatureStore store(args.data_dir, manifest, config.master_seed, args.threads);

  std::vector<SubjectRunResult> runs(manifest.included_subjects.size());
  std::vector<std::string> failures(manifest.included_subjects.size());
  FeatureStore::run_parallel(
      manifest.included_subjects.size(), args.threads, [&](std::size_t i) {
        try {
          runs[i] = run_loso_subject(config, store, manifest.included_subjects[i]);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      });

  double err_sum = 0.0, queried_sum = 0.0;
  std::size_t ok = 0;
  std::cout << "subject  error_at_9  queried\n";
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!failures[i].empty()) {
      std::cout << manifest.included_subjects[i] << "  FAILED: " << failures[i] << "\n";
      continue;
    }
    const double err = runs[i].curve.points.back().error_rate * 100.0;
    const double queried = runs[i].stats.queried_fraction * 100.0;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-8s %9.1f%% %7.1f%%",
                  manifest.included_subjects[i].c_str(), err, queried);
    std::cout << buf << "\n";
    err_sum += err;
    queried_sum += queried;
    ++ok;
  }
  if (ok > 0) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-8s %9.1f%% %7.1f%%", "mean",
                  err_sum / double(ok), queried_sum / double(ok));
    std::cout << buf << "\n";
  }

  if (!args.out_dir.empty()) {
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path out = args.out_dir;
    std::vector<SubjectRunResult> valid;
    for (std::size_t i = 0; i < runs.size(); ++i)
      if (failures[i].empty()) valid.push_back(runs[i]);
    {
      std::ofstream f(out / "learning_curves.csv", std::ios::binary);
      write_learning_curves_csv(valid, f);
    }
    {
      std::ofstream f(out / "query_log.csv", std::ios::binary);
      write_query_log_csv(valid, f);
    }
    {
      std::ofstream f(out / "training_audit.csv", std::ios::binary);
      write_training_audit_csv(valid, f);
    }
    {
      std::ofstream f(out / "feature_catalog.csv", std::ios::binary);
      write_feature_catalog_csv(store.catalog(), f);
    }
    {
      MatrixOptions options;
      options.positions = {config.position};
      options.classifiers = {config.base_kind};
      std::ofstream f(out / "run_config.json", std::ios::binary);
      write_run_config_json(config, options, manifest, store.catalog().total_count(), f);
    }
    std::cout << "reports written to " << args.out_dir << "\n";
  }

  for (const auto& f : failures)
    if (!f.empty()) return 1;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incremental personalization of activity recognition ensembles"};
  app.set_version_flag("--version", std::string(harlearn::kVersion));
  app.require_subcommand(1);

  CommonArgs args;

  // run: one position/classifier/strategy over all subjects
  auto* run_cmd = app.add_subcommand("run", "run one configuration (LOSO over all subjects)");
  std::string position_str = "arm", classifier_str = "lda", strategy_str = "nonsup";
  double threshold = 0.95;
  run_cmd->add_option("--data", args.data_dir, "dataset directory")->required();
  run_cmd->add_option("--manifest", args.manifest_path, "manifest file")->required();
  run_cmd->add_option("--position", position_str, "arm|waist|wrist")
      ->check(CLI::IsMember({"arm", "waist", "wrist"}));
  run_cmd->add_option("--classifier", classifier_str, "lda|qda|cart")
      ->check(CLI::IsMember({"lda", "qda", "cart"}));
  run_cmd->add_option("--strategy", strategy_str, "nonsup|semi|sup")
      ->check(CLI::IsMember({"nonsup", "semi", "sup"}));
  run_cmd->add_option("--threshold", threshold, "semi-supervised confidence threshold");
  run_cmd->add_option("--seed", args.seed, "master seed");
  run_cmd->add_option("--out", args.out_dir, "report output directory");
  run_cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
  run_cmd->add_option("--sfs-max-features", args.sfs_max_features,
                      "feature selection cap");
  run_cmd->add_option("--sampling-fraction", args.sampling_fraction,
                      "stratified share of each chunk per base model");
  run_cmd->add_option("--cart-min-leaf", args.cart_min_leaf, "minimum CART leaf size");

  // matrix: the full grid
  auto* matrix_cmd = app.add_subcommand("matrix", "run the full position x classifier grid");
  matrix_cmd->add_option("--data", args.data_dir, "dataset directory")->required();
  matrix_cmd->add_option("--manifest", args.manifest_path, "manifest file")->required();
  matrix_cmd->add_option("--out", args.out_dir, "report output directory")->required();
  matrix_cmd->add_option("--seed", args.seed, "master seed");
  matrix_cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
  matrix_cmd->add_option("--sfs-max-features", args.sfs_max_features,
                         "feature selection cap");
  matrix_cmd->add_option("--sampling-fraction", args.sampling_fraction,
                         "stratified share of each chunk per base model");
  matrix_cmd->add_option("--cart-min-leaf", args.cart_min_leaf,
                         "minimum CART leaf size");
  matrix_cmd->add_option("--shrinkage", args.shrinkage, "LDA/QDA diagonal shrinkage");

  // catalog: dump feature catalog
  auto* catalog_cmd = app.add_subcommand("catalog", "dump the feature catalog as CSV");
  std::string catalog_out;
  catalog_cmd->add_option("--out", catalog_out, "output file (default stdout)");

  // synth: generate the benchmark dataset
  auto* synth_cmd = app.add_subcommand("synth", "generate the synthetic benchmark dataset");
  harlearn::SynthParams synth_params;
  std::string synth_out;
  synth_cmd->add_option("--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--subjects", synth_params.included_subjects,
                        "number of included subjects");
  synth_cmd->add_option("--windows-per-class", synth_params.windows_per_class,
                        "windows per activity per subject");
  synth_cmd->add_option("--seed", synth_params.seed, "generator seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run_cmd)) {
      ExperimentConfig config = make_config(args);
      config.position = *harlearn::position_from_string(position_str);
      config.base_kind = *harlearn::base_kind_from_string(classifier_str);
      if (strategy_str == "semi")
        config.strategy = LabelingStrategy::semi_supervised(threshold);
      else if (strategy_str == "sup")
        config.strategy = LabelingStrategy::supervised();
      else
        config.strategy = LabelingStrategy::non_supervised();
      return run_single_command(args, config);
    }
    if (app.got_subcommand(matrix_cmd)) {
      ExperimentConfig config = make_config(args);
      MatrixOptions options;
      options.n_threads = args.threads;
      return run_matrix_command(args, config, options);
    }
    if (app.got_subcommand(catalog_cmd)) {
      const auto catalog = harlearn::FeatureCatalog::standard();
      if (catalog_out.empty()) {
        harlearn::write_feature_catalog_csv(catalog, std::cout);
      } else {
        std::ofstream f(catalog_out, std::ios::binary);
        if (!f) throw harlearn::IoError("cannot write " + catalog_out);
        harlearn::write_feature_catalog_csv(catalog, f);
      }
      return 0;
    }
    if (app.got_subcommand(synth_cmd)) {
      harlearn::write_synth_dataset(synth_out, synth_params);
      std::cout << "synthetic dataset written to " << synth_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
