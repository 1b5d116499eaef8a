#include "tca/kruskal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tca {

void KruskalFactors::validate() const {
  const std::size_t R = rank();
  if (u.cols != R || v.cols != R || w.cols != R)
    raise(errc::rank_mismatch, "factor matrices disagree on component count");
}

Dense3Tensor reconstruct(const KruskalFactors& f, std::array<std::size_t, 3> dims) {
  f.validate();
  if (f.u.rows != dims[0] || f.v.rows != dims[1] || f.w.rows != dims[2])
    raise(errc::dim_mismatch, "factor row counts do not match requested dims");

  const std::size_t I = dims[0], J = dims[1], K = dims[2], R = f.rank();
  std::vector<double> out(I * J * K, 0.0);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < I; ++i) {
    const double* urow = f.u.row_ptr(i);
    for (std::size_t j = 0; j < J; ++j) {
      const double* vrow = f.v.row_ptr(j);
      for (std::size_t k = 0; k < K; ++k, ++idx) {
        const double* wrow = f.w.row_ptr(k);
        double acc = 0.0;
        for (std::size_t r = 0; r < R; ++r)
          acc += f.weights[r] * urow[r] * vrow[r] * wrow[r];
        out[idx] = acc;
      }
    }
  }
  return Dense3Tensor(dims, std::move(out));
}

double normalized_error(const Dense3Tensor& x, const KruskalFactors& f) {
  f.validate();
  if (f.u.rows != x.dim(0) || f.v.rows != x.dim(1) || f.w.rows != x.dim(2))
    raise(errc::dim_mismatch, "factor row counts do not match tensor dims");

  const std::size_t I = x.dim(0), J = x.dim(1), K = x.dim(2), R = f.rank();
  const double* data = x.values().data();
  double residual_sq = 0.0;
  double norm_sq = 0.0;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < I; ++i) {
    const double* urow = f.u.row_ptr(i);
    for (std::size_t j = 0; j < J; ++j) {
      const double* vrow = f.v.row_ptr(j);
      for (std::size_t k = 0; k < K; ++k, ++idx) {
        const double* wrow = f.w.row_ptr(k);
        double approx = 0.0;
        for (std::size_t r = 0; r < R; ++r)
          approx += f.weights[r] * urow[r] * vrow[r] * wrow[r];
        double v = data[idx];
        double d = v - approx;
        residual_sq += d * d;
        norm_sq += v * v;
      }
    }
  }
  if (norm_sq == 0.0) raise(errc::zero_tensor, "normalized_error needs ||X||_F > 0");
  return std::sqrt(residual_sq) / std::sqrt(norm_sq);
}

KruskalFactors normalize_columns(const KruskalFactors& f) {
  f.validate();
  KruskalFactors out = f;
  for (std::size_t r = 0; r < out.rank(); ++r) {
    double nu = out.u.column_norm(r);
    double nv = out.v.column_norm(r);
    double nw = out.w.column_norm(r);
    if (nu == 0.0 || nv == 0.0 || nw == 0.0) {
      if (out.weights[r] != 0.0)
        raise(errc::degenerate_component,
              "component " + std::to_string(r) + " has a zero column with nonzero weight");
      // Dead component: zero everything so it is inert and canonical.
      out.u.scale_column(r, 0.0);
      out.v.scale_column(r, 0.0);
      out.w.scale_column(r, 0.0);
      continue;
    }
    out.u.scale_column(r, 1.0 / nu);
    out.v.scale_column(r, 1.0 / nv);
    out.w.scale_column(r, 1.0 / nw);
    out.weights[r] *= nu * nv * nw;
  }
  return out;
}

KruskalFactors reorder_components(const KruskalFactors& f,
                                  const std::vector<std::size_t>& order) {
  f.validate();
  const std::size_t R = f.rank();
  if (order.size() != R)
    raise(errc::rank_mismatch, "component order has wrong length");
  KruskalFactors out;
  out.weights.resize(R);
  out.u = Matrix(f.u.rows, R);
  out.v = Matrix(f.v.rows, R);
  out.w = Matrix(f.w.rows, R);
  for (std::size_t dst = 0; dst < R; ++dst) {
    std::size_t src = order[dst];
    if (src >= R) raise(errc::index_out_of_range, "component order entry out of range");
    out.weights[dst] = f.weights[src];
    for (std::size_t i = 0; i < f.u.rows; ++i) out.u(i, dst) = f.u(i, src);
    for (std::size_t i = 0; i < f.v.rows; ++i) out.v(i, dst) = f.v(i, src);
    for (std::size_t i = 0; i < f.w.rows; ++i) out.w(i, dst) = f.w(i, src);
  }
  return out;
}

KruskalFactors normalize_components(const KruskalFactors& f,
                                    std::vector<std::size_t>& permutation) {
  KruskalFactors scaled = normalize_columns(f);
  const std::size_t R = scaled.rank();

  // order[dst] = source component; descending weight, ties by U column.
  std::vector<std::size_t> order(R);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scaled.weights[a] != scaled.weights[b]) return scaled.weights[a] > scaled.weights[b];
    for (std::size_t i = 0; i < scaled.u.rows; ++i) {
      double va = scaled.u(i, a), vb = scaled.u(i, b);
      if (va != vb) return va < vb;
    }
    return a < b;
  });

  permutation.assign(R, 0);
  for (std::size_t dst = 0; dst < R; ++dst) permutation[order[dst]] = dst;
  return reorder_components(scaled, order);
}

KruskalFactors normalize_components(const KruskalFactors& f) {
  std::vector<std::size_t> permutation;
  return normalize_components(f, permutation);
}

ComponentSlice component_slice(const KruskalFactors& f, std::size_t r) {
  f.validate();
  if (r >= f.rank())
    raise(errc::index_out_of_range,
          "component " + std::to_string(r) + " of " + std::to_string(f.rank()));
  return ComponentSlice{f.weights[r], f.u.column(r), f.v.column(r), f.w.column(r)};
}

}  // namespace tca
