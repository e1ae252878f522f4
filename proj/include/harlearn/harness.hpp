#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "harlearn/dataset.hpp"
#include "harlearn/ensemble.hpp"
#include "harlearn/features.hpp"
#include "harlearn/metrics.hpp"
#include "harlearn/personalization.hpp"
#include "harlearn/version.hpp"

namespace harlearn {

/// error_rate = 1 - balanced_accuracy; see metrics.hpp for the confusion form.
inline double error_rate(const ConfusionMatrix& confusion) {
  return 1.0 - balanced_accuracy(confusion);
}

struct ExperimentConfig {
  BodyPosition position = BodyPosition::arm;
  BaseKind base_kind = BaseKind::lda;
  LabelingStrategy strategy;
  TrainingRecipe recipe;
  ClassifierParams classifier;
  std::size_t models_per_step = 3;
  std::uint64_t master_seed = 1;

  /// Harness default: near-raw CART leaf confidences, so confident
  /// predictions clear the 0.90/0.95 thresholds the way raw leaf
  /// frequencies would. Library-level TreeParams keep alpha = 1.
  static ExperimentConfig defaults() {
    ExperimentConfig c;
    c.classifier.tree.leaf_smoothing = 0.01;
    return c;
  }
};

struct CurvePoint {
  std::size_t n_models = 0;
  double error_rate = 0.0;
};

struct LearningCurve {
  std::string subject_id;
  std::vector<CurvePoint> points;
  std::vector<std::string> notes;  // skipped-model events and similar
};

/// Strategy axis of the summary: the four personalization variants plus the
/// user-independent baseline read off the shared Step-1 prefix.
enum class VariantKind : std::uint8_t {
  user_independent = 0,
  non_supervised,
  semi_090,
  semi_095,
  supervised,
};

constexpr std::string_view variant_name(VariantKind v) {
  switch (v) {
    case VariantKind::user_independent: return "user_independent";
    case VariantKind::non_supervised: return "non_supervised";
    case VariantKind::semi_090: return "semi_supervised";
    case VariantKind::semi_095: return "semi_supervised";
    case VariantKind::supervised: return "supervised";
  }
  return "?";
}

inline std::optional<double> variant_threshold(VariantKind v) {
  if (v == VariantKind::semi_090) return 0.90;
  if (v == VariantKind::semi_095) return 0.95;
  return std::nullopt;
}

inline LabelingStrategy variant_strategy(VariantKind v) {
  switch (v) {
    case VariantKind::non_supervised: return LabelingStrategy::non_supervised();
    case VariantKind::semi_090: return LabelingStrategy::semi_supervised(0.90);
    case VariantKind::semi_095: return LabelingStrategy::semi_supervised(0.95);
    case VariantKind::supervised: return LabelingStrategy::supervised();
    case VariantKind::user_independent: break;
  }
  throw Error("user_independent has no labeling strategy");
}

struct QueryLogRow {
  std::string subject;
  BodyPosition position = BodyPosition::arm;
  BaseKind classifier = BaseKind::lda;
  std::string strategy;
  std::optional<double> threshold;
  int step = 0;
  std::size_t row_index = 0;
  LabelSource source = LabelSource::predicted;
  ActivityClass predicted = ActivityClass::walking;
  double confidence = 0.0;
  ActivityClass final_label = ActivityClass::walking;
};

struct SubjectRunResult {
  BodyPosition position = BodyPosition::arm;
  BaseKind classifier = BaseKind::lda;
  VariantKind variant = VariantKind::non_supervised;
  LearningCurve curve;
  QueryStats stats;
  std::vector<QueryLogRow> query_log;
  std::vector<TrainingAudit> audits;
};

// ---------------------------------------------------------------------------
// Feature store: per-position features and splits, computed once and shared
// ---------------------------------------------------------------------------

class FeatureStore {
 public:
  FeatureStore(const std::filesystem::path& data_dir, DatasetManifest manifest,
               std::uint64_t master_seed, std::size_t n_threads = 0)
      : manifest_(std::move(manifest)), catalog_(FeatureCatalog::standard()) {
    std::vector<std::pair<std::string, BodyPosition>> keys;
    for (const auto& s : manifest_.included_subjects)
      for (BodyPosition p : manifest_.positions) keys.emplace_back(s, p);
    std::vector<FeatureMatrix> feats(keys.size());
    std::vector<SubjectSplit> splits(keys.size());
    std::vector<std::string> errors(keys.size());

    run_parallel(keys.size(), n_threads, [&](std::size_t i) {
      const auto& [subject, pos] = keys[i];
      std::filesystem::path file =
          data_dir / (subject + "_" + std::string(to_string(pos)) + ".csv");
      if (!std::filesystem::exists(file)) {
        errors[i] = "manifest includes '" + subject + "' but " + file.string() +
                    " is missing";
        return;
      }
      const RawRecording rec = load_recording(file, subject, pos);
      feats[i] = extract_matrix(rec, catalog_);
      splits[i] = split_three_parts(
          feats[i], derive_seed(master_seed, {hash_string(subject),
                                              hash_string(to_string(pos)), 0x5917}));
    });
    for (const auto& e : errors)
      if (!e.empty()) throw MissingSubject(e);
    for (std::size_t i = 0; i < keys.size(); ++i) {
      features_.emplace(keys[i], std::move(feats[i]));
      splits_.emplace(keys[i], std::move(splits[i]));
    }
  }

  const DatasetManifest& manifest() const { return manifest_; }
  const FeatureCatalog& catalog() const { return catalog_; }

  const FeatureMatrix& features(const std::string& subject, BodyPosition pos) const {
    return features_.at({subject, pos});
  }
  const SubjectSplit& split(const std::string& subject, BodyPosition pos) const {
    return splits_.at({subject, pos});
  }

  /// Simple deterministic-output parallel for. Exceptions inside tasks are
  /// rethrown on the caller thread.
  static void run_parallel(std::size_t n_tasks, std::size_t n_threads,
                           const std::function<void(std::size_t)>& task) {
    if (n_threads == 0) n_threads = std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, n_tasks > 0 ? n_tasks : 1);
    if (n_threads <= 1) {
      for (std::size_t i = 0; i < n_tasks; ++i) task(i);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (std::size_t w = 0; w < n_threads; ++w) {
      workers.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= n_tasks) return;
          try {
            task(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
  }

 private:
  DatasetManifest manifest_;
  FeatureCatalog catalog_;
  std::map<std::pair<std::string, BodyPosition>, FeatureMatrix> features_;
  std::map<std::pair<std::string, BodyPosition>, SubjectSplit> splits_;
};

// ---------------------------------------------------------------------------
// LOSO runs
// ---------------------------------------------------------------------------

namespace detail {

inline void check_no_test_leakage(const FeatureMatrix& training,
                                  const std::string& held_out) {
  for (std::size_t i = 0; i < training.rows(); ++i) {
    const RowProvenance& p = training.provenance(i);
    if (p.subject == held_out && p.part == 2)
      throw TestLeakage("held-out test row leaked into training: subject " +
                        p.subject + " window " + std::to_string(p.window));
  }
}

inline double evaluate_error(const EnsembleModel& ensemble, const FeatureMatrix& test) {
  const auto cmap = class_index_map(ensemble.class_list());
  ConfusionMatrix confusion(ensemble.class_list().size());
  for (std::size_t i = 0; i < test.rows(); ++i) {
    const EnsemblePrediction p = ensemble.predict(test.row(i));
    confusion.add(static_cast<std::size_t>(cmap[static_cast<std::size_t>(test.label(i))]),
                  static_cast<std::size_t>(
                      cmap[static_cast<std::size_t>(p.predicted)]));
  }
  return error_rate(confusion);
}

}  // namespace detail

/// Step 1 of the protocol: a user-independent ensemble of models_per_step
/// base models trained on the pooled windows of every other included subject.
/// The curve gets one point per added model, evaluated on the held-out
/// subject's test part.
inline std::pair<EnsembleModel, LearningCurve> train_user_independent(
    const ExperimentConfig& config, const FeatureStore& store,
    const std::string& held_out) {
  const auto& manifest = store.manifest();
  FeatureMatrix pool(store.catalog().total_count());
  for (const auto& subject : manifest.included_subjects) {
    if (subject == held_out) continue;
    pool.append_rows_of(store.features(subject, config.position));
  }
  if (pool.rows() == 0) throw Error("no training subjects besides " + held_out);
  detail::check_no_test_leakage(pool, held_out);

  const SubjectSplit& split = store.split(held_out, config.position);
  const FeatureMatrix& test = split.parts[2];

  std::vector<ActivityClass> class_list(kAllActivities.begin(), kAllActivities.end());
  EnsembleModel ensemble(class_list, store.catalog().total_count(),
                         config.models_per_step);

  LearningCurve curve;
  curve.subject_id = held_out;
  TrainingRecipe recipe = config.recipe;
  recipe.seed = derive_seed(config.master_seed, {hash_string(held_out), 1});
  train_chunk_models(ensemble, pool, config.base_kind, recipe, config.classifier,
                     [&](const EnsembleModel& e) {
                       curve.points.push_back({e.size(), detail::evaluate_error(e, test)});
                     });
  for (const auto& s : ensemble.skipped())
    curve.notes.push_back("step 1 model " + std::to_string(s.chunk_model_index) +
                          " skipped: " + s.reason);
  return {std::move(ensemble), std::move(curve)};
}

/// Steps 2 and 3: two personalization chunks, three models each. The curve
/// continues from the Step-1 prefix.
inline SubjectRunResult personalize_subject(const ExperimentConfig& config,
                                            const FeatureStore& store,
                                            const std::string& held_out,
                                            EnsembleModel ensemble,
                                            LearningCurve curve) {
  SubjectRunResult result;
  result.position = config.position;
  result.classifier = config.base_kind;
  result.curve = std::move(curve);

  const SubjectSplit& split = store.split(held_out, config.position);
  const auto [chunk1, chunk2, test] = chunks_for_personalization(split);

  std::size_t total_rows = 0, total_queries = 0, total_replaced = 0;
  const std::size_t audits_before = ensemble.audits().size();

  for (int step = 2; step <= 3; ++step) {
    const FeatureMatrix& chunk = step == 2 ? *chunk1 : *chunk2;
    detail::check_no_test_leakage(chunk, held_out);
    Oracle oracle(chunk.labels());
    TrainingRecipe recipe = config.recipe;
    recipe.seed = derive_seed(config.master_seed,
                              {hash_string(held_out), static_cast<std::uint64_t>(step)});
    const std::size_t skipped_before = ensemble.skipped().size();
    auto [labeled, stats] = personalize_step(
        ensemble, chunk, config.strategy, oracle, config.base_kind, recipe,
        config.classifier, [&](const EnsembleModel& e) {
          result.curve.points.push_back({e.size(), detail::evaluate_error(e, *test)});
        });
    for (std::size_t s = skipped_before; s < ensemble.skipped().size(); ++s)
      result.curve.notes.push_back(
          "step " + std::to_string(step) + " model " +
          std::to_string(ensemble.skipped()[s].chunk_model_index) +
          " skipped: " + ensemble.skipped()[s].reason);

    total_rows += chunk.rows();
    total_queries += static_cast<std::size_t>(
        std::llround(stats.queried_fraction * static_cast<double>(chunk.rows())));
    total_replaced += static_cast<std::size_t>(
        std::llround(stats.replaced_fraction * static_cast<double>(chunk.rows())));

    for (std::size_t i = 0; i < chunk.rows(); ++i) {
      QueryLogRow row;
      row.subject = held_out;
      row.position = config.position;
      row.classifier = config.base_kind;
      row.strategy = std::string(to_string(config.strategy.kind));
      if (config.strategy.kind == StrategyKind::semi_supervised)
        row.threshold = config.strategy.threshold;
      row.step = step;
      row.row_index = i;
      row.source = labeled.sources[i];
      row.predicted = labeled.predicted[i];
      row.confidence = labeled.confidences[i];
      row.final_label = labeled.labels[i];
      result.query_log.push_back(std::move(row));
    }
  }

  result.stats.queried_fraction =
      static_cast<double>(total_queries) / static_cast<double>(total_rows);
  result.stats.replaced_fraction =
      static_cast<double>(total_replaced) / static_cast<double>(total_rows);
  result.audits.assign(ensemble.audits().begin() + audits_before,
                       ensemble.audits().end());
  return result;
}

/// Full three-step protocol for one held-out subject.
inline SubjectRunResult run_loso_subject(const ExperimentConfig& config,
                                         const FeatureStore& store,
                                         const std::string& held_out) {
  auto [ensemble, curve] = train_user_independent(config, store, held_out);
  SubjectRunResult result = personalize_subject(config, store, held_out,
                                                std::move(ensemble), std::move(curve));
  switch (config.strategy.kind) {
    case StrategyKind::non_supervised:
      result.variant = VariantKind::non_supervised;
      break;
    case StrategyKind::supervised:
      result.variant = VariantKind::supervised;
      break;
    case StrategyKind::semi_supervised:
      result.variant = config.strategy.threshold < 0.925 ? VariantKind::semi_090
                                                         : VariantKind::semi_095;
      break;
  }
  return result;
}

// ---------------------------------------------------------------------------
// The full grid
// ---------------------------------------------------------------------------

struct SummaryRow {
  BodyPosition position = BodyPosition::arm;
  BaseKind classifier = BaseKind::lda;
  bool complete = true;
  // error rates in percent
  double user_independent = 0.0;
  double non_supervised = 0.0;
  double semi_090 = 0.0;
  double semi_095 = 0.0;
  double supervised = 0.0;
  // queried fractions in percent
  double semi_090_queried = 0.0;
  double semi_095_queried = 0.0;

  double error_of(VariantKind v) const {
    switch (v) {
      case VariantKind::user_independent: return user_independent;
      case VariantKind::non_supervised: return non_supervised;
      case VariantKind::semi_090: return semi_090;
      case VariantKind::semi_095: return semi_095;
      case VariantKind::supervised: return supervised;
    }
    return 0.0;
  }
};

struct SummaryTable {
  std::vector<SummaryRow> rows;
  SummaryRow mean;  // position/classifier fields unused
};

struct MatrixOptions {
  std::vector<BodyPosition> positions{BodyPosition::arm, BodyPosition::waist,
                                      BodyPosition::wrist};
  std::vector<BaseKind> classifiers{BaseKind::lda, BaseKind::qda, BaseKind::cart};
  std::size_t n_threads = 0;
};

struct MatrixResult {
  std::vector<SubjectRunResult> runs;
  SummaryTable summary;
  std::vector<std::string> failed_cells;
  std::size_t feature_count = 0;
};

inline constexpr std::array<VariantKind, 5> kAllVariants = {
    VariantKind::user_independent, VariantKind::non_supervised,
    VariantKind::semi_090, VariantKind::semi_095, VariantKind::supervised};

/// Runs every (position, classifier) cell: the Step-1 ensemble is trained
/// once per held-out subject and shared by the four personalization variants;
/// the user-independent variant is its flat 9-point curve.
inline MatrixResult run_matrix(const ExperimentConfig& base_config,
                               const FeatureStore& store,
                               const MatrixOptions& options = {}) {
  MatrixResult result;
  result.feature_count = store.catalog().total_count();
  const auto& subjects = store.manifest().included_subjects;

  struct Task {
    BodyPosition position;
    BaseKind classifier;
    std::string subject;
  };
  std::vector<Task> tasks;
  for (BodyPosition pos : options.positions)
    for (BaseKind kind : options.classifiers)
      for (const auto& s : subjects) tasks.push_back({pos, kind, s});

  std::vector<std::vector<SubjectRunResult>> task_runs(tasks.size());
  std::vector<std::string> task_errors(tasks.size());

  FeatureStore::run_parallel(tasks.size(), options.n_threads, [&](std::size_t t) {
    const Task& task = tasks[t];
    try {
      ExperimentConfig config = base_config;
      config.position = task.position;
      config.base_kind = task.classifier;

      auto [step1, curve1] = train_user_independent(config, store, task.subject);

      // user-independent record: flat continuation of the 3-model point
      SubjectRunResult ui;
      ui.position = task.position;
      ui.classifier = task.classifier;
      ui.variant = VariantKind::user_independent;
      ui.curve = curve1;
      if (!ui.curve.points.empty()) {
        const double flat = ui.curve.points.back().error_rate;
        while (ui.curve.points.size() < 3 * config.models_per_step)
          ui.curve.points.push_back({ui.curve.points.back().n_models + 1, flat});
      }
      task_runs[t].push_back(std::move(ui));

      for (VariantKind v :
           {VariantKind::non_supervised, VariantKind::semi_090, VariantKind::semi_095,
            VariantKind::supervised}) {
        ExperimentConfig vconfig = config;
        vconfig.strategy = variant_strategy(v);
        SubjectRunResult run = personalize_subject(vconfig, store, task.subject,
                                                   step1, curve1);
        run.variant = v;
        task_runs[t].push_back(std::move(run));
      }
    } catch (const std::exception& e) {
      task_errors[t] = e.what();
    }
  });

  // deterministic order: position, classifier, variant, subject
  std::map<std::pair<BodyPosition, BaseKind>, std::string> cell_failures;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    if (!task_errors[t].empty()) {
      cell_failures[{tasks[t].position, tasks[t].classifier}] =
          tasks[t].subject + ": " + task_errors[t];
      continue;
    }
    for (auto& run : task_runs[t]) {
      run.curve.subject_id = tasks[t].subject;
      result.runs.push_back(std::move(run));
    }
  }
  std::stable_sort(result.runs.begin(), result.runs.end(),
                   [](const SubjectRunResult& a, const SubjectRunResult& b) {
                     if (a.position != b.position) return a.position < b.position;
                     if (a.classifier != b.classifier) return a.classifier < b.classifier;
                     if (a.variant != b.variant) return a.variant < b.variant;
                     return a.curve.subject_id < b.curve.subject_id;
                   });

  // summary: mean error at the final point per variant, queried fractions
  for (BodyPosition pos : options.positions) {
    for (BaseKind kind : options.classifiers) {
      SummaryRow row;
      row.position = pos;
      row.classifier = kind;
      if (auto it = cell_failures.find({pos, kind}); it != cell_failures.end()) {
        row.complete = false;
        result.failed_cells.push_back(std::string(to_string(pos)) + "/" +
                                      std::string(to_string(kind)) + ": " + it->second);
        result.summary.rows.push_back(row);
        continue;
      }
      for (VariantKind v : kAllVariants) {
        double err_sum = 0.0, queried_sum = 0.0;
        std::size_t count = 0;
        for (const auto& run : result.runs) {
          if (run.position != pos || run.classifier != kind || run.variant != v)
            continue;
          err_sum += run.curve.points.back().error_rate;
          queried_sum += run.stats.queried_fraction;
          ++count;
        }
        if (count == 0) continue;
        const double err = 100.0 * err_sum / static_cast<double>(count);
        const double queried = 100.0 * queried_sum / static_cast<double>(count);
        switch (v) {
          case VariantKind::user_independent: row.user_independent = err; break;
          case VariantKind::non_supervised: row.non_supervised = err; break;
          case VariantKind::semi_090:
            row.semi_090 = err;
            row.semi_090_queried = queried;
            break;
          case VariantKind::semi_095:
            row.semi_095 = err;
            row.semi_095_queried = queried;
            break;
          case VariantKind::supervised: row.supervised = err; break;
        }
      }
      result.summary.rows.push_back(row);
    }
  }

  std::size_t complete = 0;
  SummaryRow& mean = result.summary.mean;
  for (const auto& row : result.summary.rows) {
    if (!row.complete) continue;
    mean.user_independent += row.user_independent;
    mean.non_supervised += row.non_supervised;
    mean.semi_090 += row.semi_090;
    mean.semi_095 += row.semi_095;
    mean.supervised += row.supervised;
    mean.semi_090_queried += row.semi_090_queried;
    mean.semi_095_queried += row.semi_095_queried;
    ++complete;
  }
  if (complete > 0) {
    const double inv = 1.0 / static_cast<double>(complete);
    mean.user_independent *= inv;
    mean.non_supervised *= inv;
    mean.semi_090 *= inv;
    mean.semi_095 *= inv;
    mean.supervised *= inv;
    mean.semi_090_queried *= inv;
    mean.semi_095_queried *= inv;
  }
  return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string format_threshold(const std::optional<double>& th) {
  if (!th) return "";
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%.2f", *th);
  return buf;
}

}  // namespace detail

inline void write_feature_catalog_csv(const FeatureCatalog& catalog, std::ostream& out) {
  out << "feature_index,feature_name,channel,extractor\n";
  for (std::size_t i = 0; i < catalog.total_count(); ++i) {
    const auto& e = catalog.entry(i);
    out << i << ',' << e.name << ',' << kChannelNames[e.channel] << ',' << e.extractor
        << '\n';
  }
}

inline void write_summary_csv(const SummaryTable& table, std::ostream& out) {
  out << "position,classifier,user_independent,non_supervised,semi_th090,"
         "semi_th090_queried,semi_th095,semi_th095_queried,supervised\n";
  auto emit = [&](const std::string& pos, const std::string& kind,
                  const SummaryRow& row) {
    out << pos << ',' << kind << ',';
    if (row.complete) {
      out << detail::format_double(row.user_independent) << ','
          << detail::format_double(row.non_supervised) << ','
          << detail::format_double(row.semi_090) << ','
          << detail::format_double(row.semi_090_queried) << ','
          << detail::format_double(row.semi_095) << ','
          << detail::format_double(row.semi_095_queried) << ','
          << detail::format_double(row.supervised);
    } else {
      out << ",,,,,,";
    }
    out << '\n';
  };
  for (const auto& row : table.rows)
    emit(std::string(to_string(row.position)), std::string(to_string(row.classifier)),
         row);
  emit("mean", "all", table.mean);
}

inline SummaryTable parse_summary_csv(std::istream& in) {
  SummaryTable table;
  std::string line;
  if (!std::getline(in, line)) throw IoError("summary.csv is empty");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> tok;
    std::stringstream ss(line);
    std::string t;
    while (std::getline(ss, t, ',')) tok.push_back(t);
    tok.resize(9);
    SummaryRow row;
    row.complete = !tok[2].empty();
    if (row.complete) {
      row.user_independent = std::stod(tok[2]);
      row.non_supervised = std::stod(tok[3]);
      row.semi_090 = std::stod(tok[4]);
      row.semi_090_queried = std::stod(tok[5]);
      row.semi_095 = std::stod(tok[6]);
      row.semi_095_queried = std::stod(tok[7]);
      row.supervised = std::stod(tok[8]);
    }
    if (tok[0] == "mean") {
      table.mean = row;
    } else {
      row.position = *position_from_string(tok[0]);
      row.classifier = *base_kind_from_string(tok[1]);
      table.rows.push_back(row);
    }
  }
  return table;
}

inline void write_learning_curves_csv(const std::vector<SubjectRunResult>& runs,
                                      std::ostream& out) {
  out << "position,classifier,strategy,threshold,subject,n_models,error_rate\n";
  for (const auto& run : runs) {
    for (const auto& p : run.curve.points) {
      out << to_string(run.position) << ',' << to_string(run.classifier) << ','
          << variant_name(run.variant) << ','
          << detail::format_threshold(variant_threshold(run.variant)) << ','
          << run.curve.subject_id << ',' << p.n_models << ','
          << detail::format_double(p.error_rate) << '\n';
    }
  }
}

inline void write_query_log_csv(const std::vector<SubjectRunResult>& runs,
                                std::ostream& out) {
  out << "subject,position,classifier,strategy,threshold,step,row_index,source,"
         "predicted,confidence,final_label\n";
  for (const auto& run : runs) {
    for (const auto& q : run.query_log) {
      out << q.subject << ',' << to_string(q.position) << ','
          << to_string(q.classifier) << ',' << q.strategy << ','
          << detail::format_threshold(q.threshold) << ',' << q.step << ','
          << q.row_index << ',' << to_string(q.source) << ',' << to_string(q.predicted)
          << ',' << detail::format_double(q.confidence) << ','
          << to_string(q.final_label) << '\n';
    }
  }
}

inline void write_training_audit_csv(const std::vector<SubjectRunResult>& runs,
                                     std::ostream& out) {
  out << "position,classifier,strategy,threshold,subject,model_index,seed,"
         "chunk_rows,sample_rows,injected_rows,validation_score,selected_features\n";
  for (const auto& run : runs) {
    for (const auto& a : run.audits) {
      out << to_string(run.position) << ',' << to_string(run.classifier) << ','
          << variant_name(run.variant) << ','
          << detail::format_threshold(variant_threshold(run.variant)) << ','
          << run.curve.subject_id << ',' << a.model_index << ',' << a.seed << ','
          << a.chunk_rows << ',' << a.sample_rows << ',' << a.injected_rows << ','
          << detail::format_double(a.validation_score) << ',';
      for (std::size_t i = 0; i < a.selected.size(); ++i) {
        if (i) out << ' ';
        out << a.selected[i];
      }
      out << '\n';
    }
  }
}

inline void write_run_config_json(const ExperimentConfig& config,
                                  const MatrixOptions& options,
                                  const DatasetManifest& manifest,
                                  std::size_t feature_count, std::ostream& out) {
  auto str = [](std::string_view s) { return "\"" + std::string(s) + "\""; };
  out << "{\n";
  out << "  \"library_version\": " << str(kVersion) << ",\n";
  out << "  \"master_seed\": " << config.master_seed << ",\n";
  out << "  \"models_per_step\": " << config.models_per_step << ",\n";
  out << "  \"feature_count\": " << feature_count << ",\n";
  out << "  \"recipe\": {\n";
  out << "    \"sampling_fraction\": " << detail::format_double(config.recipe.sampling_fraction) << ",\n";
  out << "    \"noise_copies\": " << config.recipe.noise_copies << ",\n";
  out << "    \"noise_scale\": " << detail::format_double(config.recipe.noise_scale) << ",\n";
  out << "    \"sfs_max_features\": " << config.recipe.sfs_max_features << ",\n";
  out << "    \"sfs_validation_fraction\": " << detail::format_double(config.recipe.sfs_validation_fraction) << "\n";
  out << "  },\n";
  out << "  \"classifier_params\": {\n";
  out << "    \"shrinkage\": " << detail::format_double(config.classifier.shrinkage) << ",\n";
  out << "    \"cart_max_depth\": " << config.classifier.tree.max_depth << ",\n";
  out << "    \"cart_min_leaf_size\": " << config.classifier.tree.min_leaf_size << ",\n";
  out << "    \"cart_leaf_smoothing\": " << detail::format_double(config.classifier.tree.leaf_smoothing) << "\n";
  out << "  },\n";
  out << "  \"positions\": [";
  for (std::size_t i = 0; i < options.positions.size(); ++i)
    out << (i ? ", " : "") << str(to_string(options.positions[i]));
  out << "],\n";
  out << "  \"classifiers\": [";
  for (std::size_t i = 0; i < options.classifiers.size(); ++i)
    out << (i ? ", " : "") << str(to_string(options.classifiers[i]));
  out << "],\n";
  out << "  \"included_subjects\": [";
  for (std::size_t i = 0; i < manifest.included_subjects.size(); ++i)
    out << (i ? ", " : "") << str(manifest.included_subjects[i]);
  out << "],\n";
  out << "  \"excluded_subjects\": [";
  for (std::size_t i = 0; i < manifest.excluded_subjects.size(); ++i)
    out << (i ? ", " : "") << str(manifest.excluded_subjects[i].first);
  out << "]\n";
  out << "}\n";
}

/// Writes summary.csv, learning_curves.csv, query_log.csv,
/// feature_catalog.csv, training_audit.csv and run_config.json. Output is
/// byte-stable for identical results.
inline void emit_reports(const MatrixResult& result, const ExperimentConfig& config,
                         const MatrixOptions& options, const FeatureStore& store,
                         const std::filesystem::path& out_dir) {
  if (result.runs.empty()) throw Error("no results to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw IoError("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("summary.csv");
    write_summary_csv(result.summary, f);
  }
  {
    auto f = open("learning_curves.csv");
    write_learning_curves_csv(result.runs, f);
  }
  {
    auto f = open("query_log.csv");
    write_query_log_csv(result.runs, f);
  }
  {
    auto f = open("feature_catalog.csv");
    write_feature_catalog_csv(store.catalog(), f);
  }
  {
    auto f = open("training_audit.csv");
    write_training_audit_csv(result.runs, f);
  }
  {
    auto f = open("run_config.json");
    write_run_config_json(config, options, store.manifest(),
                          store.catalog().total_count(), f);
  }
}

}  // namespace harlearn
