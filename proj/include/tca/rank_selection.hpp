#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tca/solvers.hpp"

namespace tca {

struct ReplicateOutcome {
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::optional<FitResult> result;  // absent when the fit raised
  std::string failure;              // error text for failed fits
};

struct RankStats {
  std::size_t rank = 0;
  std::vector<ReplicateOutcome> replicates;
  double min_error = 0.0;
  double mean_error = 0.0;
  double std_error = 0.0;
  /// Mean / min similarity over all pairs of successful replicate fits;
  /// absent with fewer than two successes.
  std::optional<double> mean_pairwise_similarity;
  std::optional<double> min_pairwise_similarity;
};

struct SweepReport {
  std::size_t rank_lo = 0;
  std::size_t rank_hi = 0;
  std::size_t n_replicates = 0;
  Algorithm algorithm = Algorithm::nn_bcd;
  std::uint64_t seed_base = 0;
  std::vector<RankStats> ranks;
};

/// Fits n_replicates models per rank in [rank_lo, rank_hi]. Replicate seeds
/// are opts.seed + 1000*rank + replicate, so results are independent of
/// thread scheduling and of extending the range. Solver failures are recorded
/// per replicate, never fatal. threads = 0 uses all hardware threads.
SweepReport sweep_ranks(const Dense3Tensor& x, std::size_t rank_lo, std::size_t rank_hi,
                        std::size_t n_replicates, Algorithm algorithm,
                        const FitOptions& opts, std::size_t threads = 0);

struct ElbowInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;
  bool no_elbow = false;  // rule never fired; interval collapsed to top rank
};

/// Elbow rule: the smallest rank r such that the relative improvement
/// (err(r') - err(r'+1)) / err(r') stays below improvement_tol for every
/// r' >= r. Returns [elbow, elbow+2] clipped to the range.
ElbowInterval detect_elbow(const std::vector<double>& min_errors, std::size_t rank_lo,
                           double improvement_tol = 0.05);

struct RankSelection {
  std::size_t rank = 0;
  ElbowInterval elbow;
};

/// Lowest rank inside the elbow interval whose mean pairwise replicate
/// similarity exceeds threshold. Raises NoStableRank (naming the best
/// candidate) when nothing clears it.
RankSelection select_rank(const SweepReport& report, double threshold = 0.8,
                          double improvement_tol = 0.05);

std::string sweep_to_json(const SweepReport& report, int indent = 2);
std::string sweep_to_csv(const SweepReport& report);

}  // namespace tca
