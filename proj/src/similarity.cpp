#include "tca/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tca {

namespace {

double column_dot(const Matrix& a, std::size_t ca, const Matrix& b, std::size_t cb) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i) acc += a(i, ca) * b(i, cb);
  return acc;
}

void check_normalized(const KruskalFactors& f, const char* side) {
  constexpr double kTol = 1e-8;
  for (std::size_t r = 0; r < f.rank(); ++r) {
    for (const Matrix* m : {&f.u, &f.v, &f.w}) {
      double norm = m->column_norm(r);
      if (norm == 0.0 && f.weights[r] == 0.0) continue;  // inert component
      if (std::abs(norm - 1.0) > kTol)
        raise(errc::not_normalized, std::string(side) + " factor column " +
                                        std::to_string(r) + " has norm " +
                                        std::to_string(norm));
    }
  }
}

Matrix similarity_matrix_unchecked(const KruskalFactors& a, const KruskalFactors& b) {
  const std::size_t R = a.rank();
  Matrix s(R, R);
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t c = 0; c < R; ++c)
      s(r, c) = column_dot(a.u, r, b.u, c) * column_dot(a.v, r, b.v, c) *
                column_dot(a.w, r, b.w, c);
  return s;
}

/// Min-cost assignment via shortest augmenting paths with potentials.
std::vector<std::size_t> assignment_min(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows);
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> pot_row(n + 1, 0.0), pot_col(n + 1, 0.0), min_col(n + 1);
  std::vector<int> matched(n + 1, 0), path(n + 1, 0);

  for (int row = 1; row <= n; ++row) {
    matched[0] = row;
    int j0 = 0;
    std::fill(min_col.begin(), min_col.end(), kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      int i0 = matched[j0], j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        double reduced = cost(i0 - 1, j - 1) - pot_row[i0] - pot_col[j];
        if (reduced < min_col[j]) {
          min_col[j] = reduced;
          path[j] = j0;
        }
        if (min_col[j] < delta) {
          delta = min_col[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          pot_row[matched[j]] += delta;
          pot_col[j] -= delta;
        } else {
          min_col[j] -= delta;
        }
      }
      j0 = j1;
    } while (matched[j0] != 0);
    do {
      int j1 = path[j0];
      matched[j0] = matched[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> result(n);
  for (int j = 1; j <= n; ++j)
    if (matched[j] != 0) result[static_cast<std::size_t>(matched[j] - 1)] =
        static_cast<std::size_t>(j - 1);
  return result;
}

}  // namespace

Matrix component_similarity_matrix(const KruskalFactors& a, const KruskalFactors& b) {
  a.validate();
  b.validate();
  if (a.rank() != b.rank())
    raise(errc::rank_mismatch, std::to_string(a.rank()) + " vs " + std::to_string(b.rank()));
  check_normalized(a, "left");
  check_normalized(b, "right");
  return similarity_matrix_unchecked(a, b);
}

std::vector<std::size_t> solve_assignment(const Matrix& s, bool maximize) {
  if (s.rows != s.cols)
    raise(errc::non_square, std::to_string(s.rows) + "x" + std::to_string(s.cols));
  for (double v : s.data)
    if (!std::isfinite(v)) raise(errc::non_finite_entry, "assignment matrix");
  if (s.rows == 0) return {};
  if (!maximize) return assignment_min(s);
  Matrix negated = s;
  for (double& v : negated.data) v = -v;
  return assignment_min(negated);
}

SimilarityResult similarity_score(const KruskalFactors& a, const KruskalFactors& b,
                                  bool weight_penalized) {
  a.validate();
  b.validate();
  if (a.rank() != b.rank())
    raise(errc::rank_mismatch, std::to_string(a.rank()) + " vs " + std::to_string(b.rank()));

  KruskalFactors an = normalize_columns(a);
  KruskalFactors bn = normalize_columns(b);
  Matrix s = similarity_matrix_unchecked(an, bn);
  if (weight_penalized) {
    for (std::size_t r = 0; r < s.rows; ++r)
      for (std::size_t c = 0; c < s.cols; ++c) {
        double heavier = std::max({an.weights[r], bn.weights[c],
                                   std::numeric_limits<double>::min()});
        s(r, c) *= 1.0 - std::abs(an.weights[r] - bn.weights[c]) / heavier;
      }
  }

  SimilarityResult result;
  result.permutation = solve_assignment(s, true);
  result.per_component.resize(s.rows);
  double total = 0.0;
  for (std::size_t r = 0; r < s.rows; ++r) {
    result.per_component[r] = s(r, result.permutation[r]);
    total += result.per_component[r];
  }
  result.score = s.rows == 0 ? 0.0 : total / static_cast<double>(s.rows);
  return result;
}

KruskalFactors align(const KruskalFactors& a, const KruskalFactors& b) {
  SimilarityResult match = similarity_score(a, b);
  return reorder_components(normalize_columns(b), match.permutation);
}

}  // namespace tca
