#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "tca/error.hpp"

namespace tca {

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  /// Takes ownership of a flat row-major buffer; length must be rows*cols.
  static Matrix from_data(std::size_t r, std::size_t c, std::vector<double> values);

  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  double* row_ptr(std::size_t r) { return data.data() + r * cols; }
  const double* row_ptr(std::size_t r) const { return data.data() + r * cols; }

  std::vector<double> column(std::size_t c) const;
  double column_norm(std::size_t c) const;
  void scale_column(std::size_t c, double factor);
};

using AxisLabels = std::optional<std::vector<std::string>>;

/// Immutable dense 3-way tensor. Storage is row-major with the last axis
/// fastest: entry (i, j, k) lives at i*J*K + j*K + k.
class Dense3Tensor {
public:
  Dense3Tensor(std::array<std::size_t, 3> dims, std::vector<double> values);
  Dense3Tensor(std::array<std::size_t, 3> dims, std::vector<double> values,
               std::array<AxisLabels, 3> labels);

  const std::array<std::size_t, 3>& dims() const noexcept { return dims_; }
  std::size_t dim(std::size_t axis) const { return dims_[axis]; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * dims_[1] + j) * dims_[2] + k];
  }

  const std::vector<double>& values() const noexcept { return data_; }
  const AxisLabels& labels(std::size_t axis) const { return labels_[axis]; }

private:
  std::array<std::size_t, 3> dims_;
  std::vector<double> data_;
  std::array<AxisLabels, 3> labels_;
};

/// Mode-n matricization. Column conventions are frozen:
///   mode 0: I x (J*K), column j + J*k
///   mode 1: J x (I*K), column i + I*k
///   mode 2: K x (I*J), column i + I*j
Matrix unfold(const Dense3Tensor& t, int mode);

/// Inverse of unfold for the same mode and dims; exact bijection.
Dense3Tensor fold(const Matrix& m, int mode, std::array<std::size_t, 3> dims);

/// Column-wise Kronecker product: row a*B.rows + b, col r is A(a,r)*B(b,r).
Matrix khatri_rao(const Matrix& a, const Matrix& b);

double frobenius_norm(const Dense3Tensor& t);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// A^T A, symmetric cols x cols.
Matrix gram(const Matrix& a);

}  // namespace tca
