#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "tca/tensor.hpp"

namespace tca {

/// Kruskal-form CP model: per-component weights plus factor matrices
/// U (I x R), V (J x R), W (K x R). Component r is
/// weights[r] * u_r (outer) v_r (outer) w_r.
struct KruskalFactors {
  std::vector<double> weights;
  Matrix u;
  Matrix v;
  Matrix w;

  std::size_t rank() const noexcept { return weights.size(); }
  std::array<std::size_t, 3> dims() const { return {u.rows, v.rows, w.rows}; }

  /// Throws unless all factor matrices share column count rank().
  void validate() const;
};

/// One component, copied out; (weight, u_r, v_r, w_r).
struct ComponentSlice {
  double weight;
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> w;
};

Dense3Tensor reconstruct(const KruskalFactors& f, std::array<std::size_t, 3> dims);

/// || X - X_hat ||_F / || X ||_F. The scale makes errors comparable across
/// tensors of different size.
double normalized_error(const Dense3Tensor& x, const KruskalFactors& f);

/// Rescales every factor column to unit L2 norm, folding the removed norms
/// into the weights, then orders components by descending weight (ties by
/// lexicographic U column). Reconstruction is unchanged.
KruskalFactors normalize_components(const KruskalFactors& f);

/// Like normalize_components but also reports where each input component
/// ended up: new index = permutation[old index].
KruskalFactors normalize_components(const KruskalFactors& f,
                                    std::vector<std::size_t>& permutation);

/// Unit-normalizes columns without reordering components.
KruskalFactors normalize_columns(const KruskalFactors& f);

ComponentSlice component_slice(const KruskalFactors& f, std::size_t r);

/// Rebuilds f with component order[dst] moved to slot dst.
KruskalFactors reorder_components(const KruskalFactors& f,
                                  const std::vector<std::size_t>& order);

}  // namespace tca
