#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "harlearn/activity.hpp"
#include "harlearn/errors.hpp"

namespace harlearn {

/// Square class-by-class count matrix; rows are true classes, columns
/// predictions, both in class_list order.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes)
      : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  std::size_t size() const { return n_; }
  void add(std::size_t true_class, std::size_t predicted_class) {
    counts_[true_class * n_ + predicted_class]++;
  }
  std::uint64_t at(std::size_t t, std::size_t p) const { return counts_[t * n_ + p]; }

  std::uint64_t row_total(std::size_t t) const {
    std::uint64_t s = 0;
    for (std::size_t p = 0; p < n_; ++p) s += at(t, p);
    return s;
  }

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

/// Mean per-class recall. Every true class must appear at least once.
inline double balanced_accuracy(const ConfusionMatrix& confusion) {
  double sum = 0.0;
  for (std::size_t t = 0; t < confusion.size(); ++t) {
    const std::uint64_t total = confusion.row_total(t);
    if (total == 0)
      throw MissingClassInTest("class index " + std::to_string(t) +
                               " has no test rows");
    sum += static_cast<double>(confusion.at(t, t)) / static_cast<double>(total);
  }
  return sum / static_cast<double>(confusion.size());
}

/// Mean recall over the classes that do appear; used for wrapper-selection
/// scoring where a stratified validation split may miss rare classes.
inline double mean_recall_present(const ConfusionMatrix& confusion) {
  double sum = 0.0;
  std::size_t present = 0;
  for (std::size_t t = 0; t < confusion.size(); ++t) {
    const std::uint64_t total = confusion.row_total(t);
    if (total == 0) continue;
    sum += static_cast<double>(confusion.at(t, t)) / static_cast<double>(total);
    ++present;
  }
  return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

}  // namespace harlearn
