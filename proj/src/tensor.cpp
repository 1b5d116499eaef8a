#include "tca/tensor.hpp"

#include <cmath>

namespace tca {

Matrix Matrix::from_data(std::size_t r, std::size_t c, std::vector<double> values) {
  if (values.size() != r * c)
    raise(errc::length_mismatch, "matrix data length " + std::to_string(values.size()) +
                                     " does not match " + std::to_string(r) + "x" +
                                     std::to_string(c));
  Matrix m;
  m.rows = r;
  m.cols = c;
  m.data = std::move(values);
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows);
  for (std::size_t r = 0; r < rows; ++r) out[r] = data[r * cols + c];
  return out;
}

double Matrix::column_norm(std::size_t c) const {
  double acc = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    double v = data[r * cols + c];
    acc += v * v;
  }
  return std::sqrt(acc);
}

void Matrix::scale_column(std::size_t c, double factor) {
  for (std::size_t r = 0; r < rows; ++r) data[r * cols + c] *= factor;
}

namespace {

void validate_tensor(const std::array<std::size_t, 3>& dims,
                     const std::vector<double>& values,
                     const std::array<AxisLabels, 3>& labels) {
  std::size_t expected = dims[0] * dims[1] * dims[2];
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
    raise(errc::invalid_argument, "tensor dims must be positive");
  if (values.size() != expected)
    raise(errc::length_mismatch, "expected " + std::to_string(expected) + " values, got " +
                                     std::to_string(values.size()));
  for (std::size_t n = 0; n < values.size(); ++n) {
    if (!std::isfinite(values[n]))
      raise(errc::non_finite_entry, "non-finite entry at flat index " + std::to_string(n));
  }
  for (std::size_t axis = 0; axis < 3; ++axis) {
    if (labels[axis] && labels[axis]->size() != dims[axis])
      raise(errc::length_mismatch, "axis " + std::to_string(axis) + " has " +
                                       std::to_string(labels[axis]->size()) + " labels for dim " +
                                       std::to_string(dims[axis]));
  }
}

}  // namespace

Dense3Tensor::Dense3Tensor(std::array<std::size_t, 3> dims, std::vector<double> values)
    : Dense3Tensor(dims, std::move(values), {}) {}

Dense3Tensor::Dense3Tensor(std::array<std::size_t, 3> dims, std::vector<double> values,
                           std::array<AxisLabels, 3> labels)
    : dims_(dims), data_(std::move(values)), labels_(std::move(labels)) {
  validate_tensor(dims_, data_, labels_);
}

Matrix unfold(const Dense3Tensor& t, int mode) {
  if (mode < 0 || mode > 2) raise(errc::invalid_mode, "mode " + std::to_string(mode));
  const std::size_t I = t.dim(0), J = t.dim(1), K = t.dim(2);
  const double* x = t.values().data();

  switch (mode) {
    case 0: {
      Matrix m(I, J * K);
      for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t k = 0; k < K; ++k)
            m(i, j + J * k) = x[(i * J + j) * K + k];
      return m;
    }
    case 1: {
      Matrix m(J, I * K);
      for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t k = 0; k < K; ++k)
            m(j, i + I * k) = x[(i * J + j) * K + k];
      return m;
    }
    default: {
      Matrix m(K, I * J);
      for (std::size_t i = 0; i < I; ++i)
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t k = 0; k < K; ++k)
            m(k, i + I * j) = x[(i * J + j) * K + k];
      return m;
    }
  }
}

Dense3Tensor fold(const Matrix& m, int mode, std::array<std::size_t, 3> dims) {
  if (mode < 0 || mode > 2) raise(errc::invalid_mode, "mode " + std::to_string(mode));
  const std::size_t I = dims[0], J = dims[1], K = dims[2];
  std::size_t expected_rows = dims[static_cast<std::size_t>(mode)];
  std::size_t expected_cols = I * J * K / expected_rows;
  if (m.rows != expected_rows || m.cols != expected_cols)
    raise(errc::dim_mismatch, "unfolding shape does not match target dims");

  std::vector<double> out(I * J * K);
  for (std::size_t i = 0; i < I; ++i)
    for (std::size_t j = 0; j < J; ++j)
      for (std::size_t k = 0; k < K; ++k) {
        double v = 0.0;
        switch (mode) {
          case 0: v = m(i, j + J * k); break;
          case 1: v = m(j, i + I * k); break;
          default: v = m(k, i + I * j); break;
        }
        out[(i * J + j) * K + k] = v;
      }
  return Dense3Tensor(dims, std::move(out));
}

Matrix khatri_rao(const Matrix& a, const Matrix& b) {
  if (a.cols != b.cols)
    raise(errc::column_mismatch, std::to_string(a.cols) + " vs " + std::to_string(b.cols));
  const std::size_t R = a.cols;
  Matrix out(a.rows * b.rows, R);
  for (std::size_t ra = 0; ra < a.rows; ++ra) {
    const double* arow = a.row_ptr(ra);
    for (std::size_t rb = 0; rb < b.rows; ++rb) {
      const double* brow = b.row_ptr(rb);
      double* orow = out.row_ptr(ra * b.rows + rb);
      for (std::size_t r = 0; r < R; ++r) orow[r] = arow[r] * brow[r];
    }
  }
  return out;
}

double frobenius_norm(const Dense3Tensor& t) {
  double acc = 0.0;
  for (double v : t.values()) acc += v * v;
  return std::sqrt(acc);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols != b.rows)
    raise(errc::dim_mismatch, "matmul " + std::to_string(a.cols) + " vs " +
                                  std::to_string(b.rows));
  Matrix c(a.rows, b.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    double* crow = c.row_ptr(i);
    for (std::size_t k = 0; k < a.cols; ++k) {
      double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (std::size_t j = 0; j < b.cols; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) t(j, i) = a(i, j);
  return t;
}

Matrix gram(const Matrix& a) {
  Matrix g(a.cols, a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    for (std::size_t r = 0; r < a.cols; ++r) {
      double v = arow[r];
      if (v == 0.0) continue;
      double* grow = g.row_ptr(r);
      for (std::size_t s = 0; s < a.cols; ++s) grow[s] += v * arow[s];
    }
  }
  return g;
}

}  // namespace tca
