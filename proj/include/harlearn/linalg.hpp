#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace harlearn {

/// Dense symmetric matrix, full row-major storage. Dimensions in this library
/// stay small (selected-feature covariances, <= a few dozen), so no packing.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }

  void set_sym(std::size_t i, std::size_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Lower-triangular Cholesky factor L with A = L Lᵀ.
class CholeskyFactor {
 public:
  CholeskyFactor(std::size_t n, std::vector<double> l) : n_(n), l_(std::move(l)) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += std::log(l_[i * n_ + i]);
    log_det_ = 2.0 * s;
  }

  std::size_t size() const { return n_; }

  double log_det() const { return log_det_; }

  /// (x)ᵀ A⁻¹ (x) via one forward substitution.
  double quad_form(std::span<const double> x) const {
    std::vector<double> z(n_);
    return quad_form(x, z);
  }

  /// Same, with caller-provided scratch of size() doubles.
  double quad_form(std::span<const double> x, std::span<double> scratch) const {
    // solve L z = x, return |z|^2
    double q = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double s = x[i];
      const double* row = &l_[i * n_];
      for (std::size_t j = 0; j < i; ++j) s -= row[j] * scratch[j];
      scratch[i] = s / row[i];
      q += scratch[i] * scratch[i];
    }
    return q;
  }

  /// Solves A y = b.
  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> y(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      double s = b[i];
      const double* row = &l_[i * n_];
      for (std::size_t j = 0; j < i; ++j) s -= row[j] * y[j];
      y[i] = s / row[i];
    }
    for (std::size_t ii = n_; ii-- > 0;) {
      double s = y[ii];
      for (std::size_t j = ii + 1; j < n_; ++j) s -= l_[j * n_ + ii] * y[j];
      y[ii] = s / l_[ii * n_ + ii];
    }
    return y;
  }

 private:
  std::size_t n_;
  std::vector<double> l_;
  double log_det_ = 0.0;
};

/// Returns nullopt when the matrix is not positive definite.
inline std::optional<CholeskyFactor> cholesky(const SymMatrix& a) {
  const std::size_t n = a.size();
  std::vector<double> l(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = a.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) return std::nullopt;
        l[i * n + i] = std::sqrt(s);
      } else {
        l[i * n + j] = s / l[j * n + j];
      }
    }
  }
  return CholeskyFactor(n, std::move(l));
}

}  // namespace harlearn
