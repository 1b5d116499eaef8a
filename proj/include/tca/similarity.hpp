#pragma once

#include <cstddef>
#include <vector>

#include "tca/kruskal.hpp"

namespace tca {

struct SimilarityResult {
  double score = 0.0;
  /// permutation[r] = index of the B component matched to A component r.
  std::vector<std::size_t> permutation;
  std::vector<double> per_component;
};

/// S(r, s) = cos(u_a^r, u_b^s) * cos(v_a^r, v_b^s) * cos(w_a^r, w_b^s).
/// Both models must already have unit-norm columns (zero columns are allowed
/// only for zero-weight components and contribute similarity 0).
Matrix component_similarity_matrix(const KruskalFactors& a, const KruskalFactors& b);

/// Permutation maximizing (or minimizing) the total matched value;
/// Kuhn-Munkres in O(R^3).
std::vector<std::size_t> solve_assignment(const Matrix& s, bool maximize = true);

/// Assignment-matched mean component similarity. Inputs are column-normalized
/// internally (without reordering), so the reported permutation refers to the
/// caller's component order. With weight_penalized, each matched similarity
/// is additionally scaled by 1 - |lambda_a - lambda_b| / max(lambda_a, lambda_b).
SimilarityResult similarity_score(const KruskalFactors& a, const KruskalFactors& b,
                                  bool weight_penalized = false);

/// Returns b with components reordered to line up with a, row for row.
/// Reconstruction is unchanged.
KruskalFactors align(const KruskalFactors& a, const KruskalFactors& b);

}  // namespace tca
