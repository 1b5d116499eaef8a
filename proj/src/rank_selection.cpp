#include "tca/rank_selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <nlohmann/json.hpp>

#include "tca/parallel.hpp"
#include "tca/similarity.hpp"

namespace tca {

namespace {

void fill_stats(RankStats& stats) {
  std::vector<const FitResult*> ok;
  for (const auto& rep : stats.replicates)
    if (rep.result) ok.push_back(&*rep.result);

  if (ok.empty()) {
    stats.min_error = std::numeric_limits<double>::quiet_NaN();
    stats.mean_error = stats.min_error;
    stats.std_error = stats.min_error;
    return;
  }

  double min = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (const FitResult* f : ok) {
    min = std::min(min, f->final_error);
    sum += f->final_error;
  }
  double mean = sum / static_cast<double>(ok.size());
  double var = 0.0;
  for (const FitResult* f : ok) {
    double d = f->final_error - mean;
    var += d * d;
  }
  stats.min_error = min;
  stats.mean_error = mean;
  stats.std_error = std::sqrt(var / static_cast<double>(ok.size()));

  if (ok.size() >= 2) {
    double total = 0.0;
    double lowest = std::numeric_limits<double>::infinity();
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < ok.size(); ++i)
      for (std::size_t j = i + 1; j < ok.size(); ++j) {
        double s = similarity_score(ok[i]->factors, ok[j]->factors).score;
        total += s;
        lowest = std::min(lowest, s);
        ++pairs;
      }
    stats.mean_pairwise_similarity = total / static_cast<double>(pairs);
    stats.min_pairwise_similarity = lowest;
  }
}

}  // namespace

SweepReport sweep_ranks(const Dense3Tensor& x, std::size_t rank_lo, std::size_t rank_hi,
                        std::size_t n_replicates, Algorithm algorithm,
                        const FitOptions& opts, std::size_t threads) {
  if (rank_lo == 0 || rank_hi < rank_lo)
    raise(errc::invalid_argument, "rank range must satisfy 1 <= lo <= hi");
  if (n_replicates == 0) raise(errc::invalid_argument, "need at least one replicate");

  const std::size_t n_ranks = rank_hi - rank_lo + 1;
  SweepReport report;
  report.rank_lo = rank_lo;
  report.rank_hi = rank_hi;
  report.n_replicates = n_replicates;
  report.algorithm = algorithm;
  report.seed_base = opts.seed;
  report.ranks.resize(n_ranks);
  for (std::size_t ri = 0; ri < n_ranks; ++ri) {
    report.ranks[ri].rank = rank_lo + ri;
    report.ranks[ri].replicates.resize(n_replicates);
  }

  parallel_for(n_ranks * n_replicates, threads, [&](std::size_t task) {
    std::size_t ri = task / n_replicates;
    std::size_t rep = task % n_replicates;
    std::size_t rank = rank_lo + ri;
    FitOptions fit_opts = opts;
    fit_opts.seed = opts.seed + 1000 * rank + rep;

    ReplicateOutcome& slot = report.ranks[ri].replicates[rep];
    slot.replicate = rep;
    slot.seed = fit_opts.seed;
    try {
      slot.result = fit(x, rank, algorithm, fit_opts);
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  });

  for (auto& stats : report.ranks) fill_stats(stats);
  return report;
}

ElbowInterval detect_elbow(const std::vector<double>& min_errors, std::size_t rank_lo,
                           double improvement_tol) {
  if (min_errors.size() < 3)
    raise(errc::too_few_ranks, "elbow detection needs at least 3 ranks");
  for (double e : min_errors)
    if (!std::isfinite(e)) raise(errc::non_finite_entry, "elbow detection");

  const std::size_t n = min_errors.size();
  // Longest suffix over which every step improvement is small; the top rank
  // alone does not count (it has no improvement to judge).
  std::size_t elbow_index = n;  // sentinel: rule never fired
  for (std::size_t i = n - 1; i-- > 0;) {
    double err = min_errors[i];
    double improvement = err <= 0.0 ? 0.0 : (err - min_errors[i + 1]) / err;
    if (improvement < improvement_tol)
      elbow_index = i;
    else
      break;
  }

  ElbowInterval interval;
  if (elbow_index == n) {
    interval.lo = interval.hi = rank_lo + n - 1;
    interval.no_elbow = true;
  } else {
    interval.lo = rank_lo + elbow_index;
    interval.hi = std::min(rank_lo + n - 1, interval.lo + 2);
  }
  return interval;
}

RankSelection select_rank(const SweepReport& report, double threshold,
                          double improvement_tol) {
  std::vector<double> min_errors;
  min_errors.reserve(report.ranks.size());
  for (const auto& stats : report.ranks) {
    if (!std::isfinite(stats.min_error))
      raise(errc::invalid_argument,
            "rank " + std::to_string(stats.rank) + " has no successful fits");
    min_errors.push_back(stats.min_error);
  }

  RankSelection selection;
  selection.elbow = detect_elbow(min_errors, report.rank_lo, improvement_tol);

  double best_similarity = -std::numeric_limits<double>::infinity();
  std::size_t best_rank = selection.elbow.lo;
  for (std::size_t rank = selection.elbow.lo; rank <= selection.elbow.hi; ++rank) {
    const RankStats& stats = report.ranks[rank - report.rank_lo];
    if (!stats.mean_pairwise_similarity)
      raise(errc::invalid_argument,
            "rank " + std::to_string(rank) + " has no replicate similarities");
    double sim = *stats.mean_pairwise_similarity;
    if (sim > threshold) {
      selection.rank = rank;
      return selection;
    }
    if (sim > best_similarity) {
      best_similarity = sim;
      best_rank = rank;
    }
  }
  raise(errc::no_stable_rank,
        "no rank in [" + std::to_string(selection.elbow.lo) + ", " +
            std::to_string(selection.elbow.hi) + "] clears similarity " +
            std::to_string(threshold) + "; best candidate rank " +
            std::to_string(best_rank) + " at " + std::to_string(best_similarity));
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string sweep_to_json(const SweepReport& report, int indent) {
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& stats : report.ranks) {
    nlohmann::json errors = nlohmann::json::array();
    nlohmann::json seeds = nlohmann::json::array();
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& rep : stats.replicates) {
      seeds.push_back(rep.seed);
      if (rep.result) {
        errors.push_back(rep.result->final_error);
      } else {
        errors.push_back(nullptr);
        failures.push_back("replicate " + std::to_string(rep.replicate) + ": " + rep.failure);
      }
    }
    ranks.push_back({{"rank", stats.rank},
                     {"errors", errors},
                     {"seeds", seeds},
                     {"failures", failures},
                     {"min_error", finite_or_null(stats.min_error)},
                     {"mean_error", finite_or_null(stats.mean_error)},
                     {"std_error", finite_or_null(stats.std_error)},
                     {"mean_pairwise_similarity", optional_number(stats.mean_pairwise_similarity)},
                     {"min_pairwise_similarity", optional_number(stats.min_pairwise_similarity)}});
  }
  nlohmann::json doc = {{"rank_range", {report.rank_lo, report.rank_hi}},
                        {"n_replicates", report.n_replicates},
                        {"algorithm", algorithm_name(report.algorithm)},
                        {"seed_base", report.seed_base},
                        {"ranks", ranks}};
  return doc.dump(indent) + "\n";
}

std::string sweep_to_csv(const SweepReport& report) {
  std::string out = "rank,replicate,error,mean_similarity\n";
  char buf[64];
  for (const auto& stats : report.ranks) {
    for (const auto& rep : stats.replicates) {
      if (!rep.result) continue;
      out += std::to_string(stats.rank);
      out += ',';
      out += std::to_string(rep.replicate);
      out += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", rep.result->final_error);
      out += buf;
      out += ',';
      if (stats.mean_pairwise_similarity) {
        std::snprintf(buf, sizeof(buf), "%.17g", *stats.mean_pairwise_similarity);
        out += buf;
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace tca
