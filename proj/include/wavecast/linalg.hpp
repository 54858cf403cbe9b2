#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wavecast/errors.hpp"

namespace wavecast {

// Dense row-major matrix. Just enough linear algebra for the transform
// matrices, kernel caches and LSTM weights; not a general BLAS.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // y = M * x
  std::vector<double> multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw ShapeError("matrix-vector size mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* m = data_.data() + r * cols_;
      double acc = 0.0;
      for (std::size_t c = 0; c < cols_; ++c) acc += m[c] * x[c];
      y[r] = acc;
    }
    return y;
  }

  // y = M^T * x
  std::vector<double> multiply_transposed(std::span<const double> x) const {
    if (x.size() != rows_) throw ShapeError("matrix-vector size mismatch");
    std::vector<double> y(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
      const double* m = data_.data() + r * cols_;
      const double s = x[r];
      for (std::size_t c = 0; c < cols_; ++c) y[c] += m[c] * s;
    }
    return y;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

inline double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace wavecast
