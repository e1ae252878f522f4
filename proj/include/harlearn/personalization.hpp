#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "harlearn/ensemble.hpp"
#include "harlearn/errors.hpp"
#include "harlearn/feature_matrix.hpp"

namespace harlearn {

enum class StrategyKind : std::uint8_t { non_supervised = 0, semi_supervised, supervised };

constexpr std::string_view to_string(StrategyKind k) {
  switch (k) {
    case StrategyKind::non_supervised: return "non_supervised";
    case StrategyKind::semi_supervised: return "semi_supervised";
    case StrategyKind::supervised: return "supervised";
  }
  return "?";
}

/// How update labels are produced. threshold is only meaningful for
/// semi_supervised; values > 1 query every window.
struct LabelingStrategy {
  StrategyKind kind = StrategyKind::non_supervised;
  double threshold = 0.0;

  static LabelingStrategy non_supervised() { return {StrategyKind::non_supervised, 0.0}; }
  static LabelingStrategy semi_supervised(double th) {
    return {StrategyKind::semi_supervised, th};
  }
  static LabelingStrategy supervised() { return {StrategyKind::supervised, 0.0}; }
};

enum class LabelSource : std::uint8_t { predicted = 0, user_query, user_propagated };

constexpr std::string_view to_string(LabelSource s) {
  switch (s) {
    case LabelSource::predicted: return "predicted";
    case LabelSource::user_query: return "user_query";
    case LabelSource::user_propagated: return "user_propagated";
  }
  return "?";
}

/// Simulated user: answers with the window's ground-truth label and counts
/// every distinct row query.
class Oracle {
 public:
  explicit Oracle(std::span<const ActivityClass> ground_truth)
      : truth_(ground_truth.begin(), ground_truth.end()) {}

  std::size_t size() const { return truth_.size(); }
  std::size_t query_count() const { return query_count_; }

  ActivityClass query(std::size_t row) {
    ++query_count_;
    return truth_[row];
  }

 private:
  std::vector<ActivityClass> truth_;
  std::size_t query_count_ = 0;
};

struct QueryStats {
  double queried_fraction = 0.0;
  double replaced_fraction = 0.0;  // user-sourced labels (queried + propagated)
};

/// The chunk with the labels the update step will actually train on, plus
/// per-row bookkeeping for the query log.
struct LabeledChunk {
  std::vector<ActivityClass> labels;
  std::vector<LabelSource> sources;
  std::vector<double> confidences;
  std::vector<ActivityClass> predicted;  // ensemble prediction per row
};

/// Produces update labels for one chunk under the given strategy.
///
/// semi_supervised scans rows in temporal order: a row keeps its predicted
/// label while confidence >= th; every row with confidence < th is queried
/// and the answer is copied to the up-to-four neighbours within distance 2
/// that are not themselves queried. A queried row always carries its own
/// answer; a neighbour already holding a user-sourced label is not
/// overwritten by a later propagation.
inline std::pair<LabeledChunk, QueryStats> label_chunk(const EnsembleModel& ensemble,
                                                       const FeatureMatrix& chunk,
                                                       const LabelingStrategy& strategy,
                                                       Oracle& oracle) {
  const std::size_t n = chunk.rows();
  if (n == 0) throw EmptyChunk("cannot label an empty chunk");

  LabeledChunk out;
  out.labels.resize(n);
  out.sources.assign(n, LabelSource::predicted);
  out.confidences.resize(n);
  out.predicted.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const EnsemblePrediction p = ensemble.predict(chunk.row(i));
    out.predicted[i] = p.predicted;
    out.confidences[i] = p.confidence;
    out.labels[i] = p.predicted;
  }

  const std::size_t queries_before = oracle.query_count();
  switch (strategy.kind) {
    case StrategyKind::non_supervised:
      break;
    case StrategyKind::supervised:
      for (std::size_t i = 0; i < n; ++i) {
        out.labels[i] = oracle.query(i);
        out.sources[i] = LabelSource::user_query;
      }
      break;
    case StrategyKind::semi_supervised: {
      std::vector<char> uncertain(n, 0);
      for (std::size_t i = 0; i < n; ++i)
        uncertain[i] = out.confidences[i] < strategy.threshold ? 1 : 0;
      for (std::size_t w = 0; w < n; ++w) {
        if (!uncertain[w]) continue;
        const ActivityClass answer = oracle.query(w);
        out.labels[w] = answer;
        out.sources[w] = LabelSource::user_query;
        const std::size_t lo = w >= 2 ? w - 2 : 0;
        const std::size_t hi = std::min(n - 1, w + 2);
        for (std::size_t j = lo; j <= hi; ++j) {
          if (j == w || uncertain[j]) continue;  // queried rows keep their own answer
          if (out.sources[j] != LabelSource::predicted) continue;
          out.labels[j] = answer;
          out.sources[j] = LabelSource::user_propagated;
        }
      }
      break;
    }
  }

  QueryStats stats;
  stats.queried_fraction =
      static_cast<double>(oracle.query_count() - queries_before) / static_cast<double>(n);
  std::size_t user_sourced = 0;
  for (LabelSource s : out.sources)
    if (s != LabelSource::predicted) ++user_sourced;
  stats.replaced_fraction = static_cast<double>(user_sourced) / static_cast<double>(n);
  return {std::move(out), stats};
}

/// One personalization step: label the chunk with the pre-update ensemble,
/// then grow the ensemble by models_per_chunk new base models trained on
/// those labels.
inline std::pair<LabeledChunk, QueryStats> personalize_step(
    EnsembleModel& ensemble, const FeatureMatrix& chunk,
    const LabelingStrategy& strategy, Oracle& oracle, BaseKind kind,
    const TrainingRecipe& recipe, const ClassifierParams& params,
    const std::function<void(const EnsembleModel&)>& on_model_added = {}) {
  auto [labeled, stats] = label_chunk(ensemble, chunk, strategy, oracle);

  FeatureMatrix training(chunk.cols());
  training.append_rows_of(chunk);
  training.raw_labels() = labeled.labels;

  train_chunk_models(ensemble, training, kind, recipe, params, on_model_added);
  return {std::move(labeled), stats};
}

}  // namespace harlearn
