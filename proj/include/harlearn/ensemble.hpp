#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "harlearn/classifiers.hpp"
#include "harlearn/errors.hpp"
#include "harlearn/feature_matrix.hpp"
#include "harlearn/metrics.hpp"
#include "harlearn/rng.hpp"

namespace harlearn {

/// Everything one ensemble-update step needs besides the data itself.
struct TrainingRecipe {
  double sampling_fraction = 0.6;       // stratified share of the chunk per model
  std::size_t noise_copies = 2;         // jittered replicas appended per row
  double noise_scale = 0.1;             // noise stddev as a fraction of column std
  std::size_t sfs_max_features = 15;
  double sfs_validation_fraction = 0.30;
  std::uint64_t seed = 0;
};

struct ClassifierParams {
  double shrinkage = 0.05;  // LDA/QDA diagonal shrinkage
  TreeParams tree;
};

/// Appends `copies` jittered replicas of every row. Replica feature j gets
/// zero-mean Gaussian noise with stddev scale * column_std(j). copies = 0
/// returns the input unchanged.
inline FeatureMatrix noise_inject(const FeatureMatrix& x, std::size_t copies,
                                  double scale, std::uint64_t seed) {
  FeatureMatrix out(x.cols());
  out.append_rows_of(x);
  if (copies == 0) return out;
  const std::vector<double> stddev = x.column_stddev();
  Rng rng(seed);
  for (std::size_t k = 0; k < copies; ++k) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const auto row = x.row(i);
      std::vector<double> jittered(row.begin(), row.end());
      for (std::size_t j = 0; j < jittered.size(); ++j)
        jittered[j] += rng.normal() * scale * stddev[j];
      out.append_row(jittered, x.label(i), x.provenance(i));
    }
  }
  return out;
}

/// Seeded stratified sample: per class keeps max(1, round(fraction * n_c))
/// rows. Returned indices are ascending.
inline std::vector<std::uint32_t> stratified_sample(
    std::span<const ActivityClass> labels, double fraction, Rng& rng) {
  std::map<ActivityClass, std::vector<std::uint32_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(static_cast<std::uint32_t>(i));
  std::vector<std::uint32_t> picked;
  for (auto& [cls, rows] : by_class) {
    (void)cls;
    std::size_t k = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(rows.size())));
    k = std::clamp<std::size_t>(k, 1, rows.size());
    rng.shuffle(rows);
    picked.insert(picked.end(), rows.begin(), rows.begin() + k);
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

struct SfsResult {
  std::vector<std::size_t> selected;
  double validation_score = 0.0;
};

/// Greedy sequential forward selection. Each round trains a base_kind model
/// on the train portion of a seeded stratified split and scores balanced
/// accuracy on the held-out portion; the best strictly-improving feature is
/// added (ties to the lowest index) until max_features or no improvement.
/// The first round always returns at least one feature.
inline SfsResult sfs_select(const FeatureMatrix& x, BaseKind kind,
                            std::span<const ActivityClass> class_list,
                            std::size_t max_features, double validation_fraction,
                            std::uint64_t seed, const ClassifierParams& params) {
  if (x.rows() == 0) throw EmptyInput("feature selection on an empty matrix");
  if (max_features < 1) throw Error("max_features must be >= 1");

  // stratified train/validation split
  std::map<ActivityClass, std::vector<std::uint32_t>> by_class;
  for (std::size_t i = 0; i < x.rows(); ++i)
    by_class[x.label(i)].push_back(static_cast<std::uint32_t>(i));
  Rng rng(seed);
  std::vector<std::uint32_t> train_idx, val_idx;
  for (auto& [cls, rows] : by_class) {
    (void)cls;
    std::size_t n_val = 0;
    if (rows.size() >= 3) {
      n_val = static_cast<std::size_t>(
          std::llround(validation_fraction * static_cast<double>(rows.size())));
      n_val = std::clamp<std::size_t>(n_val, 1, rows.size() - 2);
    }
    rng.shuffle(rows);
    val_idx.insert(val_idx.end(), rows.begin(), rows.begin() + n_val);
    train_idx.insert(train_idx.end(), rows.begin() + n_val, rows.end());
  }
  std::sort(train_idx.begin(), train_idx.end());
  std::sort(val_idx.begin(), val_idx.end());

  const FeatureMatrix train = x.gather_rows(train_idx);
  const FeatureMatrix val = x.gather_rows(val_idx);
  const auto cmap = class_index_map(class_list);
  const std::size_t nc = class_list.size();

  // per-kind training state shared across candidates
  std::optional<GaussianScatterCache> gauss_cache;
  std::optional<TreeTrainingContext> tree_ctx;
  if (kind == BaseKind::cart)
    tree_ctx.emplace(train, train.labels(), class_list);
  else
    gauss_cache.emplace(train, train.labels(), class_list);

  std::vector<double> xbuf, diff, scratch;
  auto score_candidate = [&](std::span<const std::size_t> cols) -> double {
    if (val.rows() == 0) return 0.0;
    ConfusionMatrix confusion(nc);
    const std::size_t dim = cols.size();
    xbuf.resize(dim);
    diff.resize(dim);
    scratch.resize(dim);
    if (kind == BaseKind::cart) {
      DecisionTreeModel model = DecisionTreeModel::train(*tree_ctx, cols, params.tree);
      for (std::size_t v = 0; v < val.rows(); ++v) {
        const auto row = val.row(v);
        for (std::size_t j = 0; j < dim; ++j) xbuf[j] = row[cols[j]];
        const auto& counts = model.leaf_counts()[model.find_leaf(xbuf)];
        std::size_t best_c = 0;
        for (std::size_t c = 1; c < counts.size(); ++c)
          if (counts[c] > counts[best_c]) best_c = c;
        confusion.add(
            static_cast<std::size_t>(cmap[static_cast<std::size_t>(val.label(v))]),
            best_c);
      }
    } else {
      GaussianDiscriminantModel model =
          GaussianDiscriminantModel::assemble(kind, *gauss_cache, cols, params.shrinkage);
      for (std::size_t v = 0; v < val.rows(); ++v) {
        const auto row = val.row(v);
        for (std::size_t j = 0; j < dim; ++j) xbuf[j] = row[cols[j]];
        const std::size_t best_c = model.predict_class_index(xbuf, diff, scratch);
        confusion.add(
            static_cast<std::size_t>(cmap[static_cast<std::size_t>(val.label(v))]),
            best_c);
      }
    }
    return mean_recall_present(confusion);
  };

  SfsResult result;
  result.validation_score = -std::numeric_limits<double>::infinity();
  std::vector<char> in_set(x.cols(), 0);
  std::vector<std::size_t> candidate;

  while (result.selected.size() < max_features) {
    double round_best = -std::numeric_limits<double>::infinity();
    std::size_t round_feature = x.cols();
    candidate = result.selected;
    candidate.push_back(0);
    for (std::size_t f = 0; f < x.cols(); ++f) {
      if (in_set[f]) continue;
      candidate.back() = f;
      const double score = score_candidate(candidate);
      if (score > round_best) {
        round_best = score;
        round_feature = f;
      }
    }
    if (round_feature == x.cols()) break;
    const bool first_round = result.selected.empty();
    if (!first_round && round_best <= result.validation_score) break;
    result.selected.push_back(round_feature);
    in_set[round_feature] = 1;
    result.validation_score = first_round ? round_best
                                          : std::max(result.validation_score, round_best);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Learn++-style ensemble
// ---------------------------------------------------------------------------

struct EnsemblePrediction {
  ActivityClass predicted = ActivityClass::walking;
  double confidence = 0.0;
  PosteriorDistribution posterior;
};

/// One audit line per trained base model.
struct TrainingAudit {
  std::size_t model_index = 0;
  std::uint64_t seed = 0;
  std::size_t chunk_rows = 0;
  std::size_t sample_rows = 0;
  std::size_t injected_rows = 0;
  std::vector<std::size_t> selected;
  double validation_score = 0.0;
  std::vector<std::pair<std::string, int>> provenance;  // distinct (subject, part)
};

struct SkippedModelEvent {
  std::size_t chunk_model_index = 0;
  std::string reason;
};

/// Ordered, equal-weight collection of base models. Each entry keeps the
/// global indices of its selected features; prediction averages the per-model
/// posteriors over the shared class list.
class EnsembleModel {
 public:
  struct Entry {
    BaseModel model;
    std::vector<std::size_t> selected;
  };

  EnsembleModel() = default;
  EnsembleModel(std::vector<ActivityClass> class_list, std::size_t feature_dim,
                std::size_t models_per_chunk = 3)
      : class_list_(std::move(class_list)),
        feature_dim_(feature_dim),
        models_per_chunk_(models_per_chunk) {}

  const std::vector<ActivityClass>& class_list() const { return class_list_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t models_per_chunk() const { return models_per_chunk_; }
  std::size_t size() const { return models_.size(); }
  bool empty() const { return models_.empty(); }
  const std::vector<Entry>& models() const { return models_; }
  const std::vector<TrainingAudit>& audits() const { return audits_; }
  const std::vector<SkippedModelEvent>& skipped() const { return skipped_; }

  void append(BaseModel model, std::vector<std::size_t> selected, TrainingAudit audit) {
    if (model.class_list() != class_list_)
      throw Error("base model class list differs from ensemble class list");
    audit.model_index = models_.size();
    models_.push_back(Entry{std::move(model), std::move(selected)});
    audits_.push_back(std::move(audit));
  }

  void record_skip(SkippedModelEvent event) { skipped_.push_back(std::move(event)); }

  EnsemblePrediction predict(std::span<const double> x) const {
    if (models_.empty()) throw EmptyEnsemble("ensemble has no base models");
    if (x.size() != feature_dim_)
      throw DimensionMismatch("input has " + std::to_string(x.size()) +
                              " features, expected " + std::to_string(feature_dim_));
    const std::size_t nc = class_list_.size();
    PosteriorDistribution mean(nc, 0.0);
    std::vector<double> buf;
    for (const Entry& e : models_) {
      buf.resize(e.selected.size());
      for (std::size_t j = 0; j < e.selected.size(); ++j) buf[j] = x[e.selected[j]];
      const PosteriorDistribution post = e.model.predict_posterior(buf);
      for (std::size_t c = 0; c < nc; ++c) mean[c] += post[c];
    }
    const double inv = 1.0 / static_cast<double>(models_.size());
    for (auto& p : mean) p *= inv;
    EnsemblePrediction out;
    std::size_t best = 0;
    for (std::size_t c = 1; c < nc; ++c)
      if (mean[c] > mean[best]) best = c;
    out.predicted = class_list_[best];
    out.confidence = mean[best];
    out.posterior = std::move(mean);
    return out;
  }

 private:
  std::vector<ActivityClass> class_list_;
  std::size_t feature_dim_ = 0;
  std::size_t models_per_chunk_ = 3;
  std::vector<Entry> models_;
  std::vector<TrainingAudit> audits_;
  std::vector<SkippedModelEvent> skipped_;
};

inline EnsemblePrediction ensemble_predict(const EnsembleModel& ensemble,
                                           std::span<const double> x) {
  return ensemble.predict(x);
}

/// Trains models_per_chunk new base models from one labeled chunk (stratified
/// sample, noise injection, SFS) and appends them with equal weight. Existing
/// models are never touched. A single-class chunk trains CART anyway but
/// records a skipped-model event for LDA/QDA.
inline void train_chunk_models(
    EnsembleModel& ensemble, const FeatureMatrix& chunk, BaseKind kind,
    const TrainingRecipe& recipe, const ClassifierParams& params,
    const std::function<void(const EnsembleModel&)>& on_model_added = {}) {
  if (chunk.rows() == 0) throw EmptyChunk("chunk has no rows");
  if (chunk.cols() != ensemble.feature_dim())
    throw DimensionMismatch("chunk feature width does not match ensemble");

  bool single_class = true;
  for (std::size_t i = 1; i < chunk.rows(); ++i)
    if (chunk.label(i) != chunk.label(0)) {
      single_class = false;
      break;
    }

  for (std::size_t m = 0; m < ensemble.models_per_chunk(); ++m) {
    if (single_class && kind != BaseKind::cart) {
      ensemble.record_skip({m, "single-class chunk, " +
                                   std::string(to_string(kind)) +
                                   " needs at least two classes"});
      continue;
    }
    const std::uint64_t model_seed = derive_seed(recipe.seed, {m});
    Rng sample_rng(derive_seed(model_seed, {0}));
    const std::vector<std::uint32_t> sample_idx =
        stratified_sample(chunk.labels(), recipe.sampling_fraction, sample_rng);
    const FeatureMatrix sample = chunk.gather_rows(sample_idx);
    const FeatureMatrix injected = noise_inject(
        sample, recipe.noise_copies, recipe.noise_scale, derive_seed(model_seed, {1}));

    SfsResult sfs = sfs_select(injected, kind, ensemble.class_list(),
                               recipe.sfs_max_features, recipe.sfs_validation_fraction,
                               derive_seed(model_seed, {2}), params);

    BaseModel model;
    if (kind == BaseKind::cart) {
      TreeTrainingContext ctx(injected, injected.labels(), ensemble.class_list());
      model = BaseModel(DecisionTreeModel::train(ctx, sfs.selected, params.tree));
    } else {
      GaussianScatterCache cache(injected, injected.labels(), ensemble.class_list());
      model = BaseModel(GaussianDiscriminantModel::assemble(kind, cache, sfs.selected,
                                                            params.shrinkage));
    }

    TrainingAudit audit;
    audit.seed = model_seed;
    audit.chunk_rows = chunk.rows();
    audit.sample_rows = sample.rows();
    audit.injected_rows = injected.rows();
    audit.selected = sfs.selected;
    audit.validation_score = sfs.validation_score;
    std::map<std::pair<std::string, int>, bool> seen;
    for (std::size_t i = 0; i < injected.rows(); ++i) {
      const RowProvenance& p = injected.provenance(i);
      seen[{p.subject, p.part == kNoPart ? -1 : static_cast<int>(p.part)}] = true;
    }
    for (const auto& [key, _] : seen) audit.provenance.push_back(key);

    ensemble.append(std::move(model), sfs.selected, std::move(audit));
    if (on_model_added) on_model_added(ensemble);
  }
}

}  // namespace harlearn
