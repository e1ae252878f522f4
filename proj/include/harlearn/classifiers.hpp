#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "harlearn/activity.hpp"
#include "harlearn/errors.hpp"
#include "harlearn/feature_matrix.hpp"
#include "harlearn/linalg.hpp"

namespace harlearn {

enum class BaseKind : std::uint8_t { lda = 0, qda, cart };

constexpr std::string_view to_string(BaseKind k) {
  switch (k) {
    case BaseKind::lda: return "lda";
    case BaseKind::qda: return "qda";
    case BaseKind::cart: return "cart";
  }
  return "?";
}

inline std::optional<BaseKind> base_kind_from_string(std::string_view s) {
  for (BaseKind k : {BaseKind::lda, BaseKind::qda, BaseKind::cart})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

/// Class posterior in class_list order: entries in [0,1], summing to 1.
using PosteriorDistribution = std::vector<double>;

inline std::array<int, kActivityCount> class_index_map(
    std::span<const ActivityClass> class_list) {
  std::array<int, kActivityCount> map;
  map.fill(-1);
  for (std::size_t i = 0; i < class_list.size(); ++i)
    map[static_cast<std::size_t>(class_list[i])] = static_cast<int>(i);
  return map;
}

// ---------------------------------------------------------------------------
// Gaussian discriminants (LDA / QDA)
// ---------------------------------------------------------------------------

/// Per-class first and second moments over a fixed training set, computed
/// lazily per column pair. Shared between direct training and the wrapper
/// feature selection, which probes many overlapping column subsets.
class GaussianScatterCache {
 public:
  GaussianScatterCache(const FeatureMatrix& x, std::span<const ActivityClass> y,
                       std::span<const ActivityClass> class_list)
      : cols_(x.cols()), class_list_(class_list.begin(), class_list.end()) {
    const auto cmap = class_index_map(class_list);
    const std::size_t n_classes = class_list.size();
    class_rows_.resize(n_classes);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const int c = cmap[static_cast<std::size_t>(y[i])];
      if (c < 0) throw Error("label outside class_list");
      class_rows_[static_cast<std::size_t>(c)].push_back(static_cast<std::uint32_t>(i));
    }
    n_total_ = x.rows();

    // column-major copy with rows grouped by class, centered per class
    means_.assign(n_classes, std::vector<double>(cols_, 0.0));
    centered_.assign(cols_, std::vector<double>(n_total_, 0.0));
    class_offsets_.resize(n_classes + 1, 0);
    std::size_t cursor = 0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      class_offsets_[c] = cursor;
      for (std::uint32_t r : class_rows_[c]) {
        const auto row = x.row(r);
        for (std::size_t j = 0; j < cols_; ++j) means_[c][j] += row[j];
        ++cursor;
      }
      class_offsets_[c + 1] = cursor;
      const double nc = static_cast<double>(class_rows_[c].size());
      if (nc > 0)
        for (auto& m : means_[c]) m /= nc;
      cursor = class_offsets_[c];
      for (std::uint32_t r : class_rows_[c]) {
        const auto row = x.row(r);
        for (std::size_t j = 0; j < cols_; ++j)
          centered_[j][cursor] = row[j] - means_[c][j];
        ++cursor;
      }
    }
  }

  std::size_t n_rows() const { return n_total_; }
  std::size_t n_classes() const { return class_list_.size(); }
  const std::vector<ActivityClass>& class_list() const { return class_list_; }
  std::size_t class_count(std::size_t c) const { return class_rows_[c].size(); }
  double class_mean(std::size_t c, std::size_t col) const { return means_[c][col]; }

  /// Within-class scatter pooled over all classes: sum over rows of
  /// centered_i * centered_j. Memoized.
  double pooled_scatter(std::size_t i, std::size_t j) const {
    const std::uint64_t key = pair_key(i, j);
    if (auto it = pooled_memo_.find(key); it != pooled_memo_.end()) return it->second;
    const double* a = centered_[i].data();
    const double* b = centered_[j].data();
    double s = 0.0;
    for (std::size_t r = 0; r < n_total_; ++r) s += a[r] * b[r];
    pooled_memo_.emplace(key, s);
    return s;
  }

  /// Within-class scatter for one class. Memoized.
  double class_scatter(std::size_t c, std::size_t i, std::size_t j) const {
    const std::uint64_t key = pair_key(i, j) * class_list_.size() + c;
    if (auto it = class_memo_.find(key); it != class_memo_.end()) return it->second;
    const double* a = centered_[i].data();
    const double* b = centered_[j].data();
    double s = 0.0;
    for (std::size_t r = class_offsets_[c]; r < class_offsets_[c + 1]; ++r)
      s += a[r] * b[r];
    class_memo_.emplace(key, s);
    return s;
  }

 private:
  std::uint64_t pair_key(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::uint64_t>(i) * cols_ + j;
  }

  std::size_t cols_;
  std::size_t n_total_ = 0;
  std::vector<ActivityClass> class_list_;
  std::vector<std::vector<std::uint32_t>> class_rows_;
  std::vector<std::size_t> class_offsets_;
  std::vector<std::vector<double>> means_;    // per class, all columns
  std::vector<std::vector<double>> centered_; // column-major, class-grouped rows
  mutable std::unordered_map<std::uint64_t, double> pooled_memo_;
  mutable std::unordered_map<std::uint64_t, double> class_memo_;
};

/// LDA or QDA over a fixed class list. Classes absent from training data get
/// zero posterior mass. Covariances are shrunk toward their diagonal.
class GaussianDiscriminantModel {
 public:
  BaseKind kind() const { return kind_; }
  const std::vector<ActivityClass>& class_list() const { return class_list_; }
  std::size_t dim() const { return dim_; }
  double shrinkage() const { return shrinkage_; }
  const std::vector<double>& priors() const { return priors_; }
  const std::vector<std::vector<double>>& means() const { return means_; }
  const std::vector<SymMatrix>& covariances() const { return covariances_; }

  PosteriorDistribution predict_posterior(std::span<const double> x) const {
    if (x.size() != dim_)
      throw DimensionMismatch("input has " + std::to_string(x.size()) +
                              " features, model expects " + std::to_string(dim_));
    const std::size_t nc = class_list_.size();
    std::vector<double> score(nc, -std::numeric_limits<double>::infinity());
    std::vector<double> diff(dim_);
    for (std::size_t c = 0; c < nc; ++c) {
      if (priors_[c] <= 0.0) continue;
      for (std::size_t j = 0; j < dim_; ++j) diff[j] = x[j] - means_[c][j];
      const auto& f = factors_[kind_ == BaseKind::lda ? 0 : c];
      score[c] = log_priors_[c] - 0.5 * (f->quad_form(diff) + f->log_det());
    }
    double best = -std::numeric_limits<double>::infinity();
    for (double s : score) best = std::max(best, s);
    PosteriorDistribution post(nc, 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      if (std::isfinite(score[c])) {
        post[c] = std::exp(score[c] - best);
        total += post[c];
      }
    }
    for (auto& p : post) p /= total;
    return post;
  }

  /// Argmax class without allocating; scratch spans must hold dim() doubles.
  std::size_t predict_class_index(std::span<const double> x, std::span<double> diff,
                                  std::span<double> scratch) const {
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_c = 0;
    for (std::size_t c = 0; c < class_list_.size(); ++c) {
      if (priors_[c] <= 0.0) continue;
      for (std::size_t j = 0; j < dim_; ++j) diff[j] = x[j] - means_[c][j];
      const auto& f = factors_[kind_ == BaseKind::lda ? 0 : c];
      const double s =
          log_priors_[c] - 0.5 * (f->quad_form(diff, scratch) + f->log_det());
      if (s > best) {
        best = s;
        best_c = c;
      }
    }
    return best_c;
  }

  // Assembled by the train functions below.
  static GaussianDiscriminantModel assemble(BaseKind kind,
                                            const GaussianScatterCache& cache,
                                            std::span<const std::size_t> cols,
                                            double shrinkage) {
    if (kind != BaseKind::lda && kind != BaseKind::qda)
      throw Error("gaussian model kind must be lda or qda");
    GaussianDiscriminantModel m;
    m.kind_ = kind;
    m.class_list_ = cache.class_list();
    m.dim_ = cols.size();
    m.shrinkage_ = shrinkage;
    const std::size_t nc = m.class_list_.size();

    std::size_t present = 0, n_rows = 0;
    for (std::size_t c = 0; c < nc; ++c) {
      const std::size_t count = cache.class_count(c);
      if (count == 1)
        throw DegenerateClass("class " + std::string(to_string(m.class_list_[c])) +
                              " has a single training row");
      if (count > 0) ++present;
      n_rows += count;
    }
    if (present < 2) throw DegenerateClass("training data has fewer than two classes");

    m.priors_.resize(nc);
    m.means_.assign(nc, {});
    for (std::size_t c = 0; c < nc; ++c) {
      m.priors_[c] = static_cast<double>(cache.class_count(c)) /
                     static_cast<double>(n_rows);
      if (cache.class_count(c) == 0) continue;
      m.means_[c].resize(m.dim_);
      for (std::size_t j = 0; j < m.dim_; ++j)
        m.means_[c][j] = cache.class_mean(c, cols[j]);
    }
    m.cache_log_priors();

    auto shrink_and_factor = [&](SymMatrix& cov) {
      for (std::size_t i = 0; i < m.dim_; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
          double v = cov.at(i, j);
          if (i == j) {
            const double d = std::max(v, 1e-12);
            v = (1.0 - shrinkage) * v + shrinkage * d;
          } else {
            v = (1.0 - shrinkage) * v;
          }
          cov.set_sym(i, j, v);
        }
      }
      auto f = cholesky(cov);
      if (!f)
        throw SingularCovariance("covariance is singular (shrinkage " +
                                 std::to_string(shrinkage) + ")");
      return std::make_shared<CholeskyFactor>(std::move(*f));
    };

    if (kind == BaseKind::lda) {
      SymMatrix cov(m.dim_);
      const double denom = static_cast<double>(n_rows - present);
      for (std::size_t i = 0; i < m.dim_; ++i)
        for (std::size_t j = 0; j <= i; ++j)
          cov.set_sym(i, j, cache.pooled_scatter(cols[i], cols[j]) / denom);
      m.covariances_.push_back(cov);
      m.factors_.push_back(shrink_and_factor(m.covariances_.back()));
    } else {
      m.covariances_.resize(nc);
      m.factors_.resize(nc);
      for (std::size_t c = 0; c < nc; ++c) {
        if (cache.class_count(c) == 0) {
          m.covariances_[c] = SymMatrix(0);
          continue;
        }
        SymMatrix cov(m.dim_);
        const double denom = static_cast<double>(cache.class_count(c) - 1);
        for (std::size_t i = 0; i < m.dim_; ++i)
          for (std::size_t j = 0; j <= i; ++j)
            cov.set_sym(i, j, cache.class_scatter(c, cols[i], cols[j]) / denom);
        m.covariances_[c] = cov;
        m.factors_[c] = shrink_and_factor(m.covariances_[c]);
      }
    }
    return m;
  }

  /// Rebuilds Cholesky factors after deserialization.
  void refactor() {
    factors_.clear();
    if (kind_ == BaseKind::lda) {
      auto f = cholesky(covariances_[0]);
      if (!f) throw SingularCovariance("stored covariance is singular");
      factors_.push_back(std::make_shared<CholeskyFactor>(std::move(*f)));
    } else {
      factors_.resize(covariances_.size());
      for (std::size_t c = 0; c < covariances_.size(); ++c) {
        if (covariances_[c].size() == 0) continue;
        auto f = cholesky(covariances_[c]);
        if (!f) throw SingularCovariance("stored covariance is singular");
        factors_[c] = std::make_shared<CholeskyFactor>(std::move(*f));
      }
    }
  }

  void set_state(BaseKind kind, std::vector<ActivityClass> class_list,
                 std::size_t dim, double shrinkage, std::vector<double> priors,
                 std::vector<std::vector<double>> means,
                 std::vector<SymMatrix> covariances) {
    kind_ = kind;
    class_list_ = std::move(class_list);
    dim_ = dim;
    shrinkage_ = shrinkage;
    priors_ = std::move(priors);
    means_ = std::move(means);
    covariances_ = std::move(covariances);
    cache_log_priors();
    refactor();
  }

 private:
  void cache_log_priors() {
    log_priors_.assign(priors_.size(), -std::numeric_limits<double>::infinity());
    for (std::size_t c = 0; c < priors_.size(); ++c)
      if (priors_[c] > 0.0) log_priors_[c] = std::log(priors_[c]);
  }

  BaseKind kind_ = BaseKind::lda;
  std::vector<ActivityClass> class_list_;
  std::size_t dim_ = 0;
  double shrinkage_ = 0.0;
  std::vector<double> priors_;
  std::vector<double> log_priors_;
  std::vector<std::vector<double>> means_;
  std::vector<SymMatrix> covariances_;  // one pooled (LDA) or per class (QDA)
  std::vector<std::shared_ptr<CholeskyFactor>> factors_;
};

inline std::vector<std::size_t> all_columns(const FeatureMatrix& x) {
  std::vector<std::size_t> cols(x.cols());
  for (std::size_t j = 0; j < cols.size(); ++j) cols[j] = j;
  return cols;
}

inline GaussianDiscriminantModel train_lda(const FeatureMatrix& x,
                                           std::span<const ActivityClass> y,
                                           std::span<const ActivityClass> class_list,
                                           double shrinkage = 0.05) {
  GaussianScatterCache cache(x, y, class_list);
  const auto cols = all_columns(x);
  return GaussianDiscriminantModel::assemble(BaseKind::lda, cache, cols, shrinkage);
}

inline GaussianDiscriminantModel train_qda(const FeatureMatrix& x,
                                           std::span<const ActivityClass> y,
                                           std::span<const ActivityClass> class_list,
                                           double shrinkage = 0.05) {
  GaussianScatterCache cache(x, y, class_list);
  const auto cols = all_columns(x);
  return GaussianDiscriminantModel::assemble(BaseKind::qda, cache, cols, shrinkage);
}

// ---------------------------------------------------------------------------
// CART
// ---------------------------------------------------------------------------

struct TreeParams {
  int max_depth = 12;
  int min_leaf_size = 3;
  double leaf_smoothing = 1.0;  // Laplace alpha for leaf posteriors
};

/// Sorted row orders per column over a fixed training set. Built lazily and
/// cached; the wrapper feature selection reuses them across candidate trees.
class TreeTrainingContext {
 public:
  TreeTrainingContext(const FeatureMatrix& x, std::span<const ActivityClass> y,
                      std::span<const ActivityClass> class_list)
      : x_(&x), class_list_(class_list.begin(), class_list.end()) {
    const auto cmap = class_index_map(class_list);
    class_of_.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
      const int c = cmap[static_cast<std::size_t>(y[i])];
      if (c < 0) throw Error("label outside class_list");
      class_of_[i] = static_cast<std::uint16_t>(c);
    }
    sorted_.resize(x.cols());
  }

  const FeatureMatrix& matrix() const { return *x_; }
  const std::vector<ActivityClass>& class_list() const { return class_list_; }
  std::uint16_t class_of(std::uint32_t row) const { return class_of_[row]; }

  const std::vector<std::uint32_t>& sorted_rows(std::size_t col) {
    auto& v = sorted_[col];
    if (v.empty() && x_->rows() > 0) {
      v.resize(x_->rows());
      for (std::uint32_t i = 0; i < v.size(); ++i) v[i] = i;
      const FeatureMatrix& x = *x_;
      std::sort(v.begin(), v.end(), [&](std::uint32_t a, std::uint32_t b) {
        const double va = x.at(a, col), vb = x.at(b, col);
        return va < vb || (va == vb && a < b);
      });
    }
    return v;
  }

 private:
  const FeatureMatrix* x_;
  std::vector<ActivityClass> class_list_;
  std::vector<std::uint16_t> class_of_;
  std::vector<std::vector<std::uint32_t>> sorted_;
};

/// Binary CART with greedy Gini splits. Split ties are broken toward the
/// lowest feature index, then the lowest threshold, so growth is fully
/// deterministic.
class DecisionTreeModel {
 public:
  struct Node {
    int feature = -1;        // local column index; -1 for leaves
    double threshold = 0.0;  // x[feature] <= threshold goes left
    int left = -1;
    int right = -1;
    int leaf = -1;           // index into leaf_counts_ for leaves
  };

  const std::vector<ActivityClass>& class_list() const { return class_list_; }
  std::size_t dim() const { return dim_; }
  const TreeParams& params() const { return params_; }
  void set_leaf_smoothing(double alpha) { params_.leaf_smoothing = alpha; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::vector<std::uint32_t>>& leaf_counts() const {
    return leaf_counts_;
  }

  int find_leaf(std::span<const double> x) const {
    if (x.size() != dim_)
      throw DimensionMismatch("input has " + std::to_string(x.size()) +
                              " features, tree expects " + std::to_string(dim_));
    int node = 0;
    while (nodes_[node].leaf < 0)
      node = x[nodes_[node].feature] <= nodes_[node].threshold ? nodes_[node].left
                                                               : nodes_[node].right;
    return nodes_[node].leaf;
  }

  /// Laplace-smoothed leaf histogram: (count + alpha) / (total + alpha * C).
  PosteriorDistribution predict_posterior(std::span<const double> x) const {
    const auto& counts = leaf_counts_[find_leaf(x)];
    const double alpha = params_.leaf_smoothing;
    double total = 0.0;
    for (std::uint32_t c : counts) total += c;
    PosteriorDistribution post(counts.size());
    const double denom = total + alpha * static_cast<double>(counts.size());
    for (std::size_t c = 0; c < counts.size(); ++c)
      post[c] = (static_cast<double>(counts[c]) + alpha) / denom;
    return post;
  }

  static DecisionTreeModel train(TreeTrainingContext& ctx,
                                 std::span<const std::size_t> cols,
                                 const TreeParams& params) {
    const FeatureMatrix& x = ctx.matrix();
    if (x.rows() == 0) throw EmptyInput("cannot train a tree on no rows");
    DecisionTreeModel m;
    m.class_list_ = ctx.class_list();
    m.dim_ = cols.size();
    m.params_ = params;
    m.global_cols_.assign(cols.begin(), cols.end());

    // one sorted row array per selected feature
    std::vector<std::vector<std::uint32_t>> order(cols.size());
    for (std::size_t f = 0; f < cols.size(); ++f) order[f] = ctx.sorted_rows(cols[f]);
    m.grow(ctx, order, 0);
    return m;
  }

  void set_state(std::vector<ActivityClass> class_list, std::size_t dim,
                 TreeParams params, std::vector<Node> nodes,
                 std::vector<std::vector<std::uint32_t>> leaf_counts) {
    class_list_ = std::move(class_list);
    dim_ = dim;
    params_ = params;
    nodes_ = std::move(nodes);
    leaf_counts_ = std::move(leaf_counts);
  }

 private:
  static double gini(std::span<const std::uint32_t> counts, double total) {
    if (total <= 0.0) return 0.0;
    double g = 1.0;
    for (std::uint32_t c : counts) {
      const double p = static_cast<double>(c) / total;
      g -= p * p;
    }
    return g;
  }

  int grow(TreeTrainingContext& ctx, std::vector<std::vector<std::uint32_t>>& order,
           int depth) {
    const FeatureMatrix& x = ctx.matrix();
    const std::size_t n = order[0].size();
    const std::size_t nc = class_list_.size();

    std::vector<std::uint32_t> counts(nc, 0);
    for (std::uint32_t r : order[0]) counts[ctx.class_of(r)]++;
    const double parent_gini = gini(counts, static_cast<double>(n));

    bool pure = false;
    for (std::uint32_t c : counts)
      if (c == n) pure = true;

    const std::size_t min_leaf = static_cast<std::size_t>(params_.min_leaf_size);
    int best_feature = -1;
    double best_gain = 1e-12;
    double best_threshold = 0.0;
    if (!pure && depth < params_.max_depth && n >= 2 * min_leaf) {
      std::vector<std::uint32_t> left(nc);
      for (std::size_t f = 0; f < order.size(); ++f) {
        const auto& rows = order[f];
        const std::size_t col = global_cols_[f];
        std::fill(left.begin(), left.end(), 0);
        for (std::size_t i = 1; i < n; ++i) {
          left[ctx.class_of(rows[i - 1])]++;
          const double prev = x.at(rows[i - 1], col);
          const double cur = x.at(rows[i], col);
          if (!(cur > prev)) continue;
          if (i < min_leaf || n - i < min_leaf) continue;
          double gl = 1.0, gr = 1.0;
          const double nl = static_cast<double>(i), nr = static_cast<double>(n - i);
          for (std::size_t c = 0; c < nc; ++c) {
            const double pl = static_cast<double>(left[c]) / nl;
            const double pr = static_cast<double>(counts[c] - left[c]) / nr;
            gl -= pl * pl;
            gr -= pr * pr;
          }
          const double gain = parent_gini - (nl * gl + nr * gr) / static_cast<double>(n);
          if (gain > best_gain) {
            best_gain = gain;
            best_feature = static_cast<int>(f);
            best_threshold = 0.5 * (prev + cur);
          }
        }
      }
    }

    if (best_feature < 0) {
      Node leaf;
      leaf.leaf = static_cast<int>(leaf_counts_.size());
      leaf_counts_.push_back(counts);
      nodes_.push_back(leaf);
      return static_cast<int>(nodes_.size()) - 1;
    }

    // stable partition of every feature order by the chosen predicate
    const std::size_t split_col = global_cols_[static_cast<std::size_t>(best_feature)];
    std::vector<std::vector<std::uint32_t>> left_order(order.size());
    std::vector<std::vector<std::uint32_t>> right_order(order.size());
    for (std::size_t f = 0; f < order.size(); ++f) {
      for (std::uint32_t r : order[f]) {
        if (x.at(r, split_col) <= best_threshold)
          left_order[f].push_back(r);
        else
          right_order[f].push_back(r);
      }
      order[f].clear();
      order[f].shrink_to_fit();
    }

    const int self = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_[self].feature = best_feature;
    nodes_[self].threshold = best_threshold;
    const int left_child = grow(ctx, left_order, depth + 1);
    const int right_child = grow(ctx, right_order, depth + 1);
    nodes_[self].left = left_child;
    nodes_[self].right = right_child;
    return self;
  }

  std::vector<ActivityClass> class_list_;
  std::size_t dim_ = 0;
  TreeParams params_;
  std::vector<std::size_t> global_cols_;  // training-time only
  std::vector<Node> nodes_;
  std::vector<std::vector<std::uint32_t>> leaf_counts_;
};

/// `seed` is accepted for interface stability; growth is deterministic and
/// does not consume randomness.
inline DecisionTreeModel train_cart(const FeatureMatrix& x,
                                    std::span<const ActivityClass> y,
                                    std::span<const ActivityClass> class_list,
                                    const TreeParams& params = {},
                                    std::uint64_t seed = 0) {
  (void)seed;
  TreeTrainingContext ctx(x, y, class_list);
  const auto cols = all_columns(x);
  return DecisionTreeModel::train(ctx, cols, params);
}

// ---------------------------------------------------------------------------
// BaseModel: one trained weak classifier plus its selected feature set
// ---------------------------------------------------------------------------

class BaseModel {
 public:
  BaseModel() = default;
  BaseModel(GaussianDiscriminantModel m) : model_(std::move(m)) {}
  BaseModel(DecisionTreeModel m) : model_(std::move(m)) {}

  BaseKind kind() const {
    if (const auto* g = std::get_if<GaussianDiscriminantModel>(&model_))
      return g->kind();
    return BaseKind::cart;
  }

  std::size_t dim() const {
    if (const auto* g = std::get_if<GaussianDiscriminantModel>(&model_))
      return g->dim();
    return std::get<DecisionTreeModel>(model_).dim();
  }

  const std::vector<ActivityClass>& class_list() const {
    if (const auto* g = std::get_if<GaussianDiscriminantModel>(&model_))
      return g->class_list();
    return std::get<DecisionTreeModel>(model_).class_list();
  }

  PosteriorDistribution predict_posterior(std::span<const double> x) const {
    if (const auto* g = std::get_if<GaussianDiscriminantModel>(&model_))
      return g->predict_posterior(x);
    return std::get<DecisionTreeModel>(model_).predict_posterior(x);
  }

  const GaussianDiscriminantModel* gaussian() const {
    return std::get_if<GaussianDiscriminantModel>(&model_);
  }
  const DecisionTreeModel* tree() const {
    return std::get_if<DecisionTreeModel>(&model_);
  }
  DecisionTreeModel* tree() { return std::get_if<DecisionTreeModel>(&model_); }

 private:
  std::variant<GaussianDiscriminantModel, DecisionTreeModel> model_;
};

inline PosteriorDistribution predict_posterior(const BaseModel& model,
                                               std::span<const double> x) {
  return model.predict_posterior(x);
}

}  // namespace harlearn
