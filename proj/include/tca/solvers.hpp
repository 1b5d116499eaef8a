#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tca/kruskal.hpp"
#include "tca/tensor.hpp"

namespace tca {

enum class Algorithm { als, nn_hals, nn_bcd };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct FitOptions {
  std::size_t max_iters = 500;
  double rel_tol = 1e-6;       // on relative change in normalized error per sweep
  std::uint64_t seed = 0;
  bool nonnegative = false;    // initialization flavor for the unconstrained solver
  double epsilon_div = 1e-12;  // denominator guard
};

struct FitResult {
  KruskalFactors factors;  // normalized, components in descending-weight order
  std::vector<double> error_trace;  // entry 0 is the error of the initial factors
  double final_error = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::als;
  /// Components (post-normalization indices) that collapsed to zero and could
  /// not be rescued; their weight is zero.
  std::vector<std::size_t> degenerate_components;
  /// Count of rank-deficient least-squares updates (ALS only); pseudoinverse
  /// fallback was used, not fatal.
  std::size_t singular_updates = 0;
};

/// Deterministic random factors: uniform [0,1) entries when nonnegative,
/// standard normal otherwise; weights all one. Sampling order is U, V, W,
/// each row-major, so a seed pins every entry.
KruskalFactors init_random(std::array<std::size_t, 3> dims, std::size_t rank,
                           std::uint64_t seed, bool nonnegative);

FitResult fit_cp_als(const Dense3Tensor& x, std::size_t rank, const FitOptions& opts);
FitResult fit_nn_hals(const Dense3Tensor& x, std::size_t rank, const FitOptions& opts);
FitResult fit_nn_bcd(const Dense3Tensor& x, std::size_t rank, const FitOptions& opts);

/// Single entry point; `init` overrides the seeded random initialization.
FitResult fit(const Dense3Tensor& x, std::size_t rank, Algorithm algorithm,
              const FitOptions& opts, const KruskalFactors* init = nullptr);

}  // namespace tca
