#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <vector>

#include "harlearn/personalization.hpp"
#include "harlearn/rng.hpp"

using namespace harlearn;

namespace {

const std::vector<ActivityClass> kTwo = {ActivityClass::walking, ActivityClass::sitting};

/// Depth-1 tree on feature 0: x <= 5 lands in a pure confident leaf, x > 5 in
/// a 50/50 leaf. With unsmoothed leaves the ensemble confidence is exactly
/// 1.0 on the left and 0.5 on the right.
BaseModel split_model(const std::vector<ActivityClass>& classes) {
  DecisionTreeModel tree;
  TreeParams params;
  params.leaf_smoothing = 0.0;
  DecisionTreeModel::Node root, left, right;
  root.feature = 0;
  root.threshold = 5.0;
  root.left = 1;
  root.right = 2;
  left.leaf = 0;
  right.leaf = 1;
  tree.set_state(classes, 1, params, {root, left, right},
                 {{100, 0}, {50, 50}});
  return BaseModel(std::move(tree));
}

EnsembleModel confident_ensemble() {
  std::vector<ActivityClass> classes = kTwo;
  EnsembleModel e(classes, 1, 3);
  e.append(split_model(classes), {0}, {});
  return e;
}

/// Chunk whose rows are confident (value 0) except at `uncertain_rows`
/// (value 10). Ground truth is sitting everywhere unless stated.
FeatureMatrix make_chunk(std::size_t n, const std::vector<std::size_t>& uncertain_rows,
                         std::vector<ActivityClass> truth = {}) {
  FeatureMatrix m(1);
  if (truth.empty()) truth.assign(n, ActivityClass::sitting);
  for (std::size_t i = 0; i < n; ++i) {
    double v[1] = {0.0};
    for (std::size_t u : uncertain_rows)
      if (u == i) v[0] = 10.0;
    m.append_row(v, truth[i], RowProvenance{"s01", 0, static_cast<std::uint32_t>(i)});
  }
  return m;
}

}  // namespace

TEST_CASE("non-supervised labels are the predictions, with zero queries") {
  const auto ensemble = confident_ensemble();
  const auto chunk = make_chunk(20, {3, 4});
  Oracle oracle(chunk.labels());
  const auto [labeled, stats] =
      label_chunk(ensemble, chunk, LabelingStrategy::non_supervised(), oracle);
  CHECK(stats.queried_fraction == 0.0);
  CHECK(stats.replaced_fraction == 0.0);
  CHECK(oracle.query_count() == 0);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(labeled.labels[i] == labeled.predicted[i]);
    CHECK(labeled.sources[i] == LabelSource::predicted);
  }
}

TEST_CASE("supervised labels every row from the oracle") {
  const auto ensemble = confident_ensemble();
  std::vector<ActivityClass> truth(20, ActivityClass::sitting);
  truth[5] = ActivityClass::walking;
  const auto chunk = make_chunk(20, {}, truth);
  Oracle oracle(chunk.labels());
  const auto [labeled, stats] =
      label_chunk(ensemble, chunk, LabelingStrategy::supervised(), oracle);
  CHECK(stats.queried_fraction == 1.0);
  CHECK(stats.replaced_fraction == 1.0);
  CHECK(oracle.query_count() == 20);
  for (std::size_t i = 0; i < 20; ++i) {
    CHECK(labeled.labels[i] == truth[i]);
    CHECK(labeled.sources[i] == LabelSource::user_query);
  }
}

TEST_CASE("one uncertain row queries once and propagates two windows each way") {
  const auto ensemble = confident_ensemble();
  std::vector<ActivityClass> truth(30, ActivityClass::sitting);
  const auto chunk = make_chunk(30, {10}, truth);
  Oracle oracle(chunk.labels());
  const auto [labeled, stats] =
      label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.9), oracle);

  CHECK(oracle.query_count() == 1);
  CHECK(stats.queried_fraction == doctest::Approx(1.0 / 30.0));
  CHECK(stats.replaced_fraction == doctest::Approx(5.0 / 30.0));
  for (std::size_t i = 0; i < 30; ++i) {
    if (i == 10) {
      CHECK(labeled.sources[i] == LabelSource::user_query);
      CHECK(labeled.labels[i] == ActivityClass::sitting);
    } else if (i >= 8 && i <= 12) {
      CHECK(labeled.sources[i] == LabelSource::user_propagated);
      CHECK(labeled.labels[i] == ActivityClass::sitting);
    } else {
      CHECK(labeled.sources[i] == LabelSource::predicted);
    }
  }
}

TEST_CASE("propagation clips at chunk boundaries") {
  const auto ensemble = confident_ensemble();
  const auto chunk = make_chunk(6, {0});
  Oracle oracle(chunk.labels());
  const auto [labeled, stats] =
      label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.9), oracle);
  CHECK(labeled.sources[0] == LabelSource::user_query);
  CHECK(labeled.sources[1] == LabelSource::user_propagated);
  CHECK(labeled.sources[2] == LabelSource::user_propagated);
  CHECK(labeled.sources[3] == LabelSource::predicted);
  CHECK(stats.replaced_fraction == doctest::Approx(3.0 / 6.0));
}

TEST_CASE("every uncertain row is queried; propagation never overwrites user labels") {
  const auto ensemble = confident_ensemble();
  // truth changes at row 7: propagation from row 5 must not mislabel row 7,
  // because row 7 is queried in its own right
  std::vector<ActivityClass> truth(12, ActivityClass::sitting);
  for (std::size_t i = 7; i < 12; ++i) truth[i] = ActivityClass::walking;
  const auto chunk = make_chunk(12, {5, 7}, truth);
  Oracle oracle(chunk.labels());
  const auto [labeled, stats] =
      label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.9), oracle);

  CHECK(oracle.query_count() == 2);
  CHECK(labeled.sources[5] == LabelSource::user_query);
  CHECK(labeled.labels[5] == ActivityClass::sitting);
  CHECK(labeled.sources[7] == LabelSource::user_query);
  CHECK(labeled.labels[7] == ActivityClass::walking);  // own truth, not row 5's
  // neighbours: 3,4 from row 5; 6 from row 5 (first writer wins); 8,9 from row 7
  CHECK(labeled.labels[3] == ActivityClass::sitting);
  CHECK(labeled.labels[4] == ActivityClass::sitting);
  CHECK(labeled.sources[6] == LabelSource::user_propagated);
  CHECK(labeled.labels[6] == ActivityClass::sitting);
  CHECK(labeled.labels[8] == ActivityClass::walking);
  CHECK(labeled.labels[9] == ActivityClass::walking);
  CHECK(labeled.sources[10] == LabelSource::predicted);
}

TEST_CASE("propagation overwrites high-confidence predicted neighbours") {
  const auto ensemble = confident_ensemble();
  // rows around 4 are confident (prediction walking), truth is sitting
  std::vector<ActivityClass> truth(9, ActivityClass::sitting);
  const auto chunk = make_chunk(9, {4}, truth);
  Oracle oracle(chunk.labels());
  const auto [labeled, stats] =
      label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.9), oracle);
  // rows 2,3,5,6 were confidently predicted walking but take the user label
  for (std::size_t i : {2u, 3u, 5u, 6u}) {
    CHECK(labeled.sources[i] == LabelSource::user_propagated);
    CHECK(labeled.labels[i] == ActivityClass::sitting);
    CHECK(labeled.predicted[i] == ActivityClass::walking);
  }
}

TEST_CASE("threshold zero reproduces non-supervised byte for byte") {
  const auto ensemble = confident_ensemble();
  std::vector<ActivityClass> truth(25, ActivityClass::sitting);
  const auto chunk = make_chunk(25, {2, 9, 10, 17}, truth);
  Oracle o1(chunk.labels()), o2(chunk.labels());
  const auto [nonsup, s1] =
      label_chunk(ensemble, chunk, LabelingStrategy::non_supervised(), o1);
  const auto [semi0, s2] =
      label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.0), o2);
  CHECK(o2.query_count() == 0);
  CHECK(s2.queried_fraction == 0.0);
  CHECK(nonsup.labels == semi0.labels);
  CHECK(nonsup.sources == semi0.sources);
  CHECK(nonsup.confidences == semi0.confidences);
  CHECK(nonsup.predicted == semi0.predicted);
}

TEST_CASE("threshold above one reproduces the supervised label vector exactly") {
  const auto ensemble = confident_ensemble();
  // include truth boundaries at awkward offsets
  std::vector<ActivityClass> truth(23, ActivityClass::sitting);
  for (std::size_t i = 4; i < 11; ++i) truth[i] = ActivityClass::walking;
  for (std::size_t i = 16; i < 23; ++i) truth[i] = ActivityClass::jogging;
  FeatureMatrix chunk(1);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const double v[1] = {0.0};
    chunk.append_row(v, truth[i]);
  }
  std::vector<ActivityClass> classes = {ActivityClass::walking, ActivityClass::sitting,
                                        ActivityClass::jogging};
  EnsembleModel ensemble3(classes, 1, 3);
  {
    DecisionTreeModel tree;
    TreeParams params;
    params.leaf_smoothing = 0.0;
    DecisionTreeModel::Node leaf;
    leaf.leaf = 0;
    tree.set_state(classes, 1, params, {leaf}, {{80, 10, 10}});
    ensemble3.append(BaseModel(std::move(tree)), {0}, {});
  }

  Oracle o1(chunk.labels()), o2(chunk.labels());
  const auto [sup, s1] =
      label_chunk(ensemble3, chunk, LabelingStrategy::supervised(), o1);
  const auto [semi, s2] =
      label_chunk(ensemble3, chunk, LabelingStrategy::semi_supervised(1.01), o2);
  CHECK(semi.labels == sup.labels);
  CHECK(s2.queried_fraction == 1.0);
  CHECK(s2.replaced_fraction == 1.0);
}

TEST_CASE("accounting invariants hold on random chunks") {
  const auto ensemble = confident_ensemble();
  Rng rng(123);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 10 + rng.below(40);
    std::vector<std::size_t> uncertain;
    for (std::size_t i = 0; i < n; ++i)
      if (rng.uniform01() < 0.25) uncertain.push_back(i);
    const auto chunk = make_chunk(n, uncertain);
    Oracle oracle(chunk.labels());
    const auto [labeled, stats] =
        label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.9), oracle);

    CHECK(stats.queried_fraction * double(n) ==
          doctest::Approx(double(oracle.query_count())));
    CHECK(stats.replaced_fraction >= stats.queried_fraction);
    for (std::size_t i = 0; i < n; ++i) {
      if (labeled.sources[i] == LabelSource::user_query)
        CHECK(labeled.labels[i] == ActivityClass::sitting);  // oracle truth
      if (labeled.sources[i] == LabelSource::user_propagated) {
        bool near_query = false;
        for (std::size_t d = 1; d <= 2; ++d) {
          if (i >= d && labeled.sources[i - d] == LabelSource::user_query)
            near_query = true;
          if (i + d < n && labeled.sources[i + d] == LabelSource::user_query)
            near_query = true;
        }
        CHECK(near_query);
      }
    }
    // determinism
    Oracle oracle2(chunk.labels());
    const auto [again, stats2] =
        label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.9), oracle2);
    CHECK(again.labels == labeled.labels);
    CHECK(again.sources == labeled.sources);
  }
}

TEST_CASE("empty chunks are rejected") {
  const auto ensemble = confident_ensemble();
  FeatureMatrix chunk(1);
  Oracle oracle(chunk.labels());
  CHECK_THROWS_AS(label_chunk(ensemble, chunk, LabelingStrategy::supervised(), oracle),
                  EmptyChunk);
}

TEST_CASE("personalize_step grows the ensemble and reports the stats") {
  Rng rng(88);
  FeatureMatrix chunk(3);
  std::vector<double> row(3);
  for (int i = 0; i < 40; ++i) {
    const bool second = i >= 20;
    for (auto& v : row) v = rng.normal(0.0, 1.0);
    row[0] += second ? 6.0 : 0.0;
    chunk.append_row(row, second ? ActivityClass::sitting : ActivityClass::walking);
  }

  TrainingRecipe recipe;
  recipe.sfs_max_features = 2;
  recipe.seed = 77;
  ClassifierParams params;

  std::vector<ActivityClass> classes = kTwo;
  // pre-update ensemble: three confident models
  EnsembleModel ensemble(classes, 3, 3);
  TrainingRecipe warm = recipe;
  warm.seed = 1;
  train_chunk_models(ensemble, chunk, BaseKind::lda, warm, params);
  REQUIRE(ensemble.size() == 3);

  SUBCASE("supervised step: stats are (1, 1)") {
    Oracle oracle(chunk.labels());
    auto copy = ensemble;
    const auto [labeled, stats] =
        personalize_step(copy, chunk, LabelingStrategy::supervised(), oracle,
                         BaseKind::lda, recipe, params);
    CHECK(copy.size() == 6);
    CHECK(stats.queried_fraction == 1.0);
    CHECK(stats.replaced_fraction == 1.0);
  }

  SUBCASE("non-supervised step: stats are (0, 0)") {
    Oracle oracle(chunk.labels());
    auto copy = ensemble;
    const auto [labeled, stats] =
        personalize_step(copy, chunk, LabelingStrategy::non_supervised(), oracle,
                         BaseKind::lda, recipe, params);
    CHECK(copy.size() == 6);
    CHECK(stats.queried_fraction == 0.0);
    CHECK(stats.replaced_fraction == 0.0);
  }

  SUBCASE("labels are fixed by the pre-update ensemble") {
    Oracle o1(chunk.labels()), o2(chunk.labels());
    auto copy = ensemble;
    const auto [from_step, s1] =
        personalize_step(copy, chunk, LabelingStrategy::semi_supervised(0.95), o1,
                         BaseKind::lda, recipe, params);
    const auto [direct, s2] =
        label_chunk(ensemble, chunk, LabelingStrategy::semi_supervised(0.95), o2);
    CHECK(from_step.labels == direct.labels);
    CHECK(from_step.sources == direct.sources);
  }
}
