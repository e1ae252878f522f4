#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <functional>
#include <vector>

#include "harlearn/classifiers.hpp"
#include "harlearn/rng.hpp"
#include "harlearn/serialization.hpp"

#include "oracles.hpp"

using namespace harlearn;

namespace {

const std::vector<ActivityClass> kTwo = {ActivityClass::walking, ActivityClass::sitting};

FeatureMatrix matrix_1d(const std::vector<std::pair<double, ActivityClass>>& rows) {
  FeatureMatrix m(1);
  for (const auto& [v, c] : rows) {
    const double buf[1] = {v};
    m.append_row(buf, c);
  }
  return m;
}

void gaussian_blob(Rng& rng, std::size_t n, const std::vector<double>& mean,
                   double spread, ActivityClass label, FeatureMatrix& into) {
  std::vector<double> row(mean.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < row.size(); ++j) row[j] = mean[j] + rng.normal(0.0, spread);
    into.append_row(row, label);
  }
}

oracles::DenseMat to_dense(const SymMatrix& s) {
  oracles::DenseMat d{s.size(), std::vector<double>(s.size() * s.size())};
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) d.at(i, j) = s.at(i, j);
  return d;
}

}  // namespace

TEST_CASE("lda: symmetric classes meet at the midpoint") {
  std::vector<std::pair<double, ActivityClass>> rows;
  for (double v : {-3.0, -2.0, -1.0}) rows.push_back({v, ActivityClass::walking});
  for (double v : {1.0, 2.0, 3.0}) rows.push_back({v, ActivityClass::sitting});
  const auto m = matrix_1d(rows);
  const auto model = train_lda(m, m.labels(), kTwo, 0.0);

  const double mid[1] = {0.0};
  const auto post = model.predict_posterior(mid);
  CHECK(post[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(post[1] == doctest::Approx(0.5).epsilon(1e-6));

  const double left[1] = {-2.0};
  CHECK(model.predict_posterior(left)[0] > 0.9);
}

TEST_CASE("lda: priors follow class frequencies") {
  std::vector<std::pair<double, ActivityClass>> rows;
  for (int i = 0; i < 9; ++i) rows.push_back({-2.0 + 0.1 * i, ActivityClass::walking});
  for (int i = 0; i < 3; ++i) rows.push_back({2.0 + 0.1 * i, ActivityClass::sitting});
  const auto m = matrix_1d(rows);
  const auto model = train_lda(m, m.labels(), kTwo, 0.05);
  CHECK(model.priors()[0] == doctest::Approx(0.75));
  CHECK(model.priors()[1] == doctest::Approx(0.25));
}

TEST_CASE("lda posteriors match brute-force Gaussian Bayes with the pooled covariance") {
  Rng rng(101);
  FeatureMatrix m(2);
  gaussian_blob(rng, 60, {0.0, 0.0}, 1.0, ActivityClass::walking, m);
  gaussian_blob(rng, 40, {2.5, 1.0}, 1.0, ActivityClass::sitting, m);
  const auto model = train_lda(m, m.labels(), kTwo, 0.05);

  const auto pooled = to_dense(model.covariances()[0]);
  const std::vector<std::vector<double>> means = {model.means()[0], model.means()[1]};
  const std::vector<oracles::DenseMat> covs = {pooled, pooled};
  const std::vector<double> priors = {model.priors()[0], model.priors()[1]};

  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x = {rng.normal(1.0, 2.0), rng.normal(0.5, 2.0)};
    const auto want = oracles::bayes_posterior(x, means, covs, priors);
    const auto got = model.predict_posterior(x);
    CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-6));
    CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-6));
  }
}

TEST_CASE("qda posteriors match brute-force Gaussian Bayes with per-class covariances") {
  Rng rng(707);
  FeatureMatrix m(2);
  gaussian_blob(rng, 50, {0.0, 0.0}, 0.8, ActivityClass::walking, m);
  gaussian_blob(rng, 50, {1.5, -1.0}, 2.0, ActivityClass::sitting, m);
  const auto model = train_qda(m, m.labels(), kTwo, 0.05);

  const std::vector<std::vector<double>> means = {model.means()[0], model.means()[1]};
  const std::vector<oracles::DenseMat> covs = {to_dense(model.covariances()[0]),
                                               to_dense(model.covariances()[1])};
  const std::vector<double> priors = {model.priors()[0], model.priors()[1]};

  for (int trial = 0; trial < 200; ++trial) {
    const std::vector<double> x = {rng.normal(0.5, 2.0), rng.normal(-0.5, 2.0)};
    const auto want = oracles::bayes_posterior(x, means, covs, priors);
    const auto got = model.predict_posterior(x);
    CHECK(got[0] == doctest::Approx(want[0]).epsilon(1e-6));
    CHECK(got[1] == doctest::Approx(want[1]).epsilon(1e-6));
  }
}

TEST_CASE("qda: equal means, the low-variance class wins at the shared mean") {
  FeatureMatrix m(1);
  // symmetric samples keep the fitted means at exactly 0
  for (int i = 1; i <= 20; ++i) {
    const double v = 0.05 * i;
    const double a[1] = {v}, b[1] = {-v};
    m.append_row(a, ActivityClass::walking);
    m.append_row(b, ActivityClass::walking);
  }
  for (int i = 1; i <= 20; ++i) {
    const double v = 0.15 * i;
    const double a[1] = {v}, b[1] = {-v};
    m.append_row(a, ActivityClass::sitting);
    m.append_row(b, ActivityClass::sitting);
  }
  const auto model = train_qda(m, m.labels(), kTwo, 0.0);
  const double mid[1] = {0.0};
  const auto post = model.predict_posterior(mid);
  CHECK(post[0] > post[1]);

  const double d0 =
      oracles::gaussian_density({0.0}, model.means()[0], to_dense(model.covariances()[0]));
  const double d1 =
      oracles::gaussian_density({0.0}, model.means()[1], to_dense(model.covariances()[1]));
  CHECK(d0 > d1);
  CHECK(post[0] == doctest::Approx(d0 * 0.5 / (d0 * 0.5 + d1 * 0.5)).epsilon(1e-6));
}

TEST_CASE("qda equals lda when per-class covariances are identical") {
  Rng rng(77);
  FeatureMatrix m(2);
  // class B is an exact translate of class A, so the scatters match exactly
  std::vector<std::vector<double>> base;
  for (int i = 0; i < 40; ++i)
    base.push_back({rng.normal(0.0, 1.0), rng.normal(0.0, 0.7)});
  for (const auto& r : base) m.append_row(r, ActivityClass::walking);
  for (const auto& r : base) {
    const std::vector<double> shifted = {r[0] + 3.0, r[1] - 1.0};
    m.append_row(shifted, ActivityClass::sitting);
  }
  const auto lda = train_lda(m, m.labels(), kTwo, 0.05);
  const auto qda = train_qda(m, m.labels(), kTwo, 0.05);
  Rng probe(78);
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x = {probe.normal(1.5, 2.0), probe.normal(-0.5, 2.0)};
    CHECK(lda.predict_posterior(x)[0] ==
          doctest::Approx(qda.predict_posterior(x)[0]).epsilon(1e-6));
  }
}

TEST_CASE("shrinkage keeps singular scatter trainable") {
  // the second feature is constant within each class: rank-deficient scatter
  FeatureMatrix m(2);
  Rng rng(3);
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> a = {rng.normal(0.0, 1.0), 1.0};
    m.append_row(a, ActivityClass::walking);
  }
  for (int i = 0; i < 10; ++i) {
    const std::vector<double> b = {rng.normal(4.0, 1.0), 1.0};
    m.append_row(b, ActivityClass::sitting);
  }
  CHECK_THROWS_AS(train_qda(m, m.labels(), kTwo, 0.0), SingularCovariance);
  const auto model = train_qda(m, m.labels(), kTwo, 0.1);
  const std::vector<double> x = {0.0, 1.0};
  const auto post = model.predict_posterior(x);
  CHECK(post[0] + post[1] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate classes are rejected") {
  FeatureMatrix m(1);
  const double a[1] = {0.0}, b[1] = {1.0}, c[1] = {2.0};
  m.append_row(a, ActivityClass::walking);
  m.append_row(b, ActivityClass::walking);
  m.append_row(c, ActivityClass::sitting);  // single row
  CHECK_THROWS_AS(train_lda(m, m.labels(), kTwo, 0.05), DegenerateClass);
}

TEST_CASE("cart: separable 1-d data yields one split at the gap midpoint") {
  std::vector<std::pair<double, ActivityClass>> rows;
  for (double v : {-3.0, -2.0, -1.2, -0.4}) rows.push_back({v, ActivityClass::walking});
  for (double v : {0.8, 1.5, 2.2, 3.0}) rows.push_back({v, ActivityClass::sitting});
  const auto m = matrix_1d(rows);
  TreeParams params;
  params.min_leaf_size = 1;
  const auto tree = train_cart(m, m.labels(), kTwo, params);
  REQUIRE(tree.nodes().size() == 3);  // root and two leaves
  CHECK(tree.nodes()[0].feature == 0);
  CHECK(tree.nodes()[0].threshold == doctest::Approx(0.5 * (-0.4 + 0.8)));
}

TEST_CASE("cart: pure input stops at a single leaf with posterior 1") {
  FeatureMatrix m(1);
  for (int i = 0; i < 12; ++i) {
    const double v[1] = {double(i)};
    m.append_row(v, ActivityClass::jogging);
  }
  const std::vector<ActivityClass> one = {ActivityClass::jogging};
  const auto tree = train_cart(m, m.labels(), one);
  CHECK(tree.nodes().size() == 1);
  const double x[1] = {4.0};
  CHECK(tree.predict_posterior(x)[0] == doctest::Approx(1.0));
}

TEST_CASE("cart leaf posterior uses the documented Laplace form") {
  // a pure leaf with counts (8, 0) over 2 classes
  FeatureMatrix m(1);
  for (int i = 0; i < 8; ++i) {
    const double v[1] = {double(i)};
    m.append_row(v, ActivityClass::walking);
  }
  for (int i = 0; i < 8; ++i) {
    const double v[1] = {10.0 + double(i)};
    m.append_row(v, ActivityClass::sitting);
  }
  const auto tree = train_cart(m, m.labels(), kTwo);
  const double x[1] = {0.0};
  const auto post = tree.predict_posterior(x);
  CHECK(post[0] == doctest::Approx(9.0 / 10.0));
  CHECK(post[1] == doctest::Approx(1.0 / 10.0));
}

TEST_CASE("cart predictions match region-membership brute force") {
  Rng rng(202);
  const std::vector<ActivityClass> three = {ActivityClass::walking,
                                            ActivityClass::sitting,
                                            ActivityClass::jogging};
  FeatureMatrix m(3);
  std::vector<double> row(3);
  for (int i = 0; i < 50; ++i) {
    for (auto& v : row) v = rng.normal(0.0, 2.0);
    m.append_row(row, three[rng.below(3)]);
  }
  const auto tree = train_cart(m, m.labels(), three);

  struct Region {
    int leaf;
    std::vector<std::pair<double, double>> bounds;  // (lo, hi] per feature
  };
  std::vector<Region> regions;
  std::function<void(int, std::vector<std::pair<double, double>>)> walk =
      [&](int node, std::vector<std::pair<double, double>> bounds) {
        const auto& n = tree.nodes()[node];
        if (n.leaf >= 0) {
          regions.push_back({n.leaf, bounds});
          return;
        }
        auto left = bounds, right = bounds;
        left[n.feature].second = std::min(left[n.feature].second, n.threshold);
        right[n.feature].first = std::max(right[n.feature].first, n.threshold);
        walk(n.left, left);
        walk(n.right, right);
      };
  const double inf = std::numeric_limits<double>::infinity();
  walk(0, std::vector<std::pair<double, double>>(3, {-inf, inf}));

  for (int trial = 0; trial < 500; ++trial) {
    for (auto& v : row) v = rng.normal(0.0, 2.5);
    int hits = 0, leaf = -1;
    for (const auto& r : regions) {
      bool inside = true;
      for (int f = 0; f < 3; ++f)
        if (!(row[f] > r.bounds[f].first && row[f] <= r.bounds[f].second))
          inside = false;
      if (inside) {
        ++hits;
        leaf = r.leaf;
      }
    }
    CHECK(hits == 1);  // leaf regions partition the space
    CHECK(tree.find_leaf(row) == leaf);
  }
}

TEST_CASE("cart: weighted child impurity decreases at every split") {
  Rng rng(33);
  FeatureMatrix m(2);
  std::vector<double> row(2);
  for (int i = 0; i < 120; ++i) {
    for (auto& v : row) v = rng.normal(0.0, 1.0);
    m.append_row(row, kTwo[row[0] + 0.3 * row[1] > 0 ? 0 : 1]);
  }
  const auto tree = train_cart(m, m.labels(), kTwo);

  // recompute per-node class counts by routing the training rows
  std::vector<std::array<double, 2>> counts(tree.nodes().size(), {0, 0});
  for (std::size_t i = 0; i < m.rows(); ++i) {
    int node = 0;
    const auto x = m.row(i);
    while (true) {
      counts[node][m.label(i) == kTwo[0] ? 0 : 1] += 1;
      const auto& n = tree.nodes()[node];
      if (n.leaf >= 0) break;
      node = x[n.feature] <= n.threshold ? n.left : n.right;
    }
  }
  auto gini = [](const std::array<double, 2>& c) {
    const double n = c[0] + c[1];
    if (n == 0) return 0.0;
    return 1.0 - (c[0] / n) * (c[0] / n) - (c[1] / n) * (c[1] / n);
  };
  int internal = 0;
  for (std::size_t i = 0; i < tree.nodes().size(); ++i) {
    const auto& n = tree.nodes()[i];
    if (n.leaf >= 0) continue;
    ++internal;
    const double total = counts[i][0] + counts[i][1];
    const double nl = counts[n.left][0] + counts[n.left][1];
    const double nr = counts[n.right][0] + counts[n.right][1];
    const double weighted =
        (nl / total) * gini(counts[n.left]) + (nr / total) * gini(counts[n.right]);
    CHECK(weighted < gini(counts[i]));
  }
  CHECK(internal > 0);
}

TEST_CASE("posteriors normalise for every model family") {
  Rng rng(404);
  FeatureMatrix m(3);
  const std::vector<ActivityClass> three = {ActivityClass::walking,
                                            ActivityClass::sitting,
                                            ActivityClass::biking};
  std::vector<double> row(3);
  for (int i = 0; i < 90; ++i) {
    for (auto& v : row) v = rng.normal(0.0, 1.5);
    m.append_row(row, three[i % 3]);
  }
  const auto lda = train_lda(m, m.labels(), three, 0.05);
  const auto qda = train_qda(m, m.labels(), three, 0.05);
  const auto cart = train_cart(m, m.labels(), three);
  for (int trial = 0; trial < 1000; ++trial) {
    for (auto& v : row) v = rng.normal(0.0, 3.0);
    for (const auto& post :
         {lda.predict_posterior(row), qda.predict_posterior(row),
          cart.predict_posterior(row)}) {
      double sum = 0.0;
      for (double p : post) {
        CHECK(p >= 0.0);
        CHECK(p <= 1.0);
        sum += p;
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("identical inputs produce byte-equal serialized models") {
  Rng rng_a(7), rng_b(7);
  FeatureMatrix a(2), b(2);
  gaussian_blob(rng_a, 30, {0, 0}, 1.0, ActivityClass::walking, a);
  gaussian_blob(rng_a, 30, {3, 1}, 1.0, ActivityClass::sitting, a);
  gaussian_blob(rng_b, 30, {0, 0}, 1.0, ActivityClass::walking, b);
  gaussian_blob(rng_b, 30, {3, 1}, 1.0, ActivityClass::sitting, b);

  const auto qa = train_qda(a, a.labels(), kTwo, 0.05);
  const auto qb = train_qda(b, b.labels(), kTwo, 0.05);
  CHECK(to_json(qa).dump() == to_json(qb).dump());

  const auto ta = train_cart(a, a.labels(), kTwo);
  const auto tb = train_cart(b, b.labels(), kTwo);
  CHECK(to_json(ta).dump() == to_json(tb).dump());
}

TEST_CASE("serialization round trip reproduces posteriors bit for bit") {
  Rng rng(88);
  FeatureMatrix m(2);
  gaussian_blob(rng, 25, {0, 0}, 1.0, ActivityClass::walking, m);
  gaussian_blob(rng, 25, {2, 2}, 1.3, ActivityClass::sitting, m);

  const auto qda = train_qda(m, m.labels(), kTwo, 0.05);
  const auto qda2 = gaussian_from_json(nlohmann::json::parse(to_json(qda).dump()));
  const auto cart = train_cart(m, m.labels(), kTwo);
  const auto cart2 = tree_from_json(nlohmann::json::parse(to_json(cart).dump()));

  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<double> x = {rng.normal(1, 2), rng.normal(1, 2)};
    const auto p1 = qda.predict_posterior(x);
    const auto p2 = qda2.predict_posterior(x);
    CHECK(p1[0] == p2[0]);  // exact
    CHECK(p1[1] == p2[1]);
    CHECK(cart.predict_posterior(x)[0] == cart2.predict_posterior(x)[0]);
  }
  CHECK(to_json(qda).dump() == to_json(qda2).dump());
  CHECK(to_json(cart).dump() == to_json(cart2).dump());
}

TEST_CASE("dimension mismatches are rejected") {
  FeatureMatrix m(2);
  Rng rng(1);
  gaussian_blob(rng, 10, {0, 0}, 1.0, ActivityClass::walking, m);
  gaussian_blob(rng, 10, {4, 4}, 1.0, ActivityClass::sitting, m);
  const auto model = train_lda(m, m.labels(), kTwo, 0.05);
  const std::vector<double> bad = {1.0, 2.0, 3.0};
  CHECK_THROWS_AS(model.predict_posterior(bad), DimensionMismatch);
}
