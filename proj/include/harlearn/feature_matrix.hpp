#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "harlearn/activity.hpp"
#include "harlearn/errors.hpp"

namespace harlearn {

inline constexpr std::uint8_t kNoPart = 255;

/// Where a feature row came from. Carried through sampling, noise injection
/// and training so leakage of the held-out test part is checkable.
struct RowProvenance {
  std::string subject;
  std::uint8_t part = kNoPart;   // 0..2 once split, kNoPart before
  std::uint32_t window = 0;      // window index within the recording
};

/// Rows are windows, columns follow the FeatureCatalog order. Labels are
/// optional; when present there is exactly one per row.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

  std::size_t rows() const { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double at(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  bool has_labels() const { return !labels_.empty(); }
  ActivityClass label(std::size_t i) const { return labels_[i]; }
  const std::vector<ActivityClass>& labels() const { return labels_; }
  const RowProvenance& provenance(std::size_t i) const { return provenance_[i]; }

  void append_row(std::span<const double> values, ActivityClass label,
                  RowProvenance prov = {}) {
    if (values.size() != cols_) throw DimensionMismatch("row width does not match matrix");
    data_.insert(data_.end(), values.begin(), values.end());
    labels_.push_back(label);
    provenance_.push_back(std::move(prov));
  }

  void append_rows_of(const FeatureMatrix& other) {
    if (other.cols_ != cols_) throw DimensionMismatch("column count mismatch");
    data_.insert(data_.end(), other.data_.begin(), other.data_.end());
    labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
    provenance_.insert(provenance_.end(), other.provenance_.begin(),
                       other.provenance_.end());
  }

  FeatureMatrix gather_rows(std::span<const std::uint32_t> idx) const {
    FeatureMatrix out(cols_);
    out.data_.reserve(idx.size() * cols_);
    for (std::uint32_t i : idx) {
      out.data_.insert(out.data_.end(), data_.begin() + i * cols_,
                       data_.begin() + (i + 1) * cols_);
      out.labels_.push_back(labels_[i]);
      out.provenance_.push_back(provenance_[i]);
    }
    return out;
  }

  /// Per-column sample standard deviation (n-1 divisor; 0 for n < 2).
  std::vector<double> column_stddev() const {
    const std::size_t n = rows();
    std::vector<double> mean(cols_, 0.0), out(cols_, 0.0);
    if (n < 2) return out;
    for (std::size_t i = 0; i < n; ++i) {
      const double* r = data_.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) mean[j] += r[j];
    }
    for (auto& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double* r = data_.data() + i * cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        const double d = r[j] - mean[j];
        out[j] += d * d;
      }
    }
    for (auto& v : out) v = std::sqrt(v / static_cast<double>(n - 1));
    return out;
  }

  std::vector<double>& raw_data() { return data_; }
  const std::vector<double>& raw_data() const { return data_; }
  std::vector<ActivityClass>& raw_labels() { return labels_; }
  std::vector<RowProvenance>& raw_provenance() { return provenance_; }

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<ActivityClass> labels_;
  std::vector<RowProvenance> provenance_;
};

}  // namespace harlearn
