#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "tca/rng.hpp"
#include "tca/similarity.hpp"
#include "tca/solvers.hpp"
#include "tca/synth.hpp"

using tca::Algorithm;
using tca::Dense3Tensor;
using tca::FitOptions;
using tca::FitResult;
using tca::KruskalFactors;
using tca::Matrix;

namespace {

Dense3Tensor planted_nonneg(std::array<std::size_t, 3> dims, std::size_t rank,
                            std::uint64_t seed) {
  return reconstruct(tca::init_random(dims, rank, seed, true), dims);
}

FitResult best_of(const Dense3Tensor& x, std::size_t rank, Algorithm algorithm,
                  std::size_t n_seeds, FitOptions opts = {}) {
  FitResult best;
  best.final_error = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n_seeds; ++s) {
    opts.seed = 100 + s;
    FitResult r = fit(x, rank, algorithm, opts);
    if (r.final_error < best.final_error) best = r;
  }
  return best;
}

void check_trace_monotone(const FitResult& r, double slack = 1e-10) {
  for (std::size_t t = 1; t < r.error_trace.size(); ++t)
    CHECK(r.error_trace[t] <= r.error_trace[t - 1] + slack);
}

void check_nonnegative(const KruskalFactors& f) {
  for (const Matrix* m : {&f.u, &f.v, &f.w})
    for (double v : m->data) CHECK(v >= 0.0);
}

}  // namespace

TEST_CASE("init_random is deterministic and respects the nonnegative flag") {
  KruskalFactors a = tca::init_random({4, 3, 2}, 3, 42, true);
  KruskalFactors b = tca::init_random({4, 3, 2}, 3, 42, true);
  CHECK(a.u.data == b.u.data);
  CHECK(a.v.data == b.v.data);
  CHECK(a.w.data == b.w.data);
  for (double v : a.u.data) CHECK(v >= 0.0);

  KruskalFactors c = tca::init_random({4, 3, 2}, 3, 43, true);
  CHECK(a.u.data != c.u.data);

  bool negative_seen = false;
  KruskalFactors g = tca::init_random({10, 10, 10}, 2, 7, false);
  for (double v : g.u.data) negative_seen |= v < 0.0;
  CHECK(negative_seen);
}

TEST_CASE("cp_als recovers an exact rank-1 tensor") {
  Dense3Tensor x = planted_nonneg({8, 5, 6}, 1, 3);
  FitResult r = fit_cp_als(x, 1, {});
  CHECK(r.final_error < 1e-6);
  CHECK(r.final_error == r.error_trace.back());
}

TEST_CASE("cp_als with one iteration reports non-convergence") {
  FitOptions opts;
  opts.max_iters = 1;
  Dense3Tensor x = planted_nonneg({5, 4, 3}, 2, 5);
  FitResult r = fit_cp_als(x, 2, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.error_trace.size() == 2);  // init error plus one sweep
}

TEST_CASE("cp_als spans the full column space at saturating rank") {
  tca::Rng rng(17);
  std::vector<double> data(3 * 2 * 2);
  for (double& v : data) v = rng.normal();
  Dense3Tensor x({3, 2, 2}, data);
  FitResult r = fit_cp_als(x, 3, {});
  CHECK(r.final_error <= 1e-3);
}

TEST_CASE("solvers reject invalid input") {
  Dense3Tensor zero({2, 2, 2}, std::vector<double>(8, 0.0));
  CHECK_THROWS_AS(fit_cp_als(zero, 1, {}), tca::Error);

  std::vector<double> with_negative(8, 1.0);
  with_negative[2] = -0.5;
  Dense3Tensor neg({2, 2, 2}, with_negative);
  try {
    fit_nn_hals(neg, 1, {});
    FAIL("expected NegativeInput");
  } catch (const tca::Error& e) {
    CHECK(e.code() == tca::errc::negative_input);
  }
  CHECK_THROWS_AS(fit_nn_bcd(neg, 1, {}), tca::Error);
  CHECK_NOTHROW(fit_cp_als(neg, 1, {}));

  CHECK_THROWS_AS(fit_nn_hals(planted_nonneg({2, 2, 2}, 1, 1), 0, {}), tca::Error);
}

TEST_CASE("nn_hals recovers a planted nonnegative rank-3 tensor") {
  Dense3Tensor x = planted_nonneg({40, 10, 12}, 3, 9);
  FitResult best = best_of(x, 3, Algorithm::nn_hals, 10);
  CHECK(best.final_error <= 1e-4);
  check_nonnegative(best.factors);
}

TEST_CASE("nn_hals fits a constant tensor exactly at rank 1") {
  Dense3Tensor x({6, 5, 4}, std::vector<double>(120, 3.25));
  FitResult r = fit_nn_hals(x, 1, {});
  CHECK(r.final_error <= 1e-8);
}

TEST_CASE("nn_bcd recovers the same planted tensor") {
  Dense3Tensor x = planted_nonneg({40, 10, 12}, 3, 9);
  FitResult best = best_of(x, 3, Algorithm::nn_bcd, 10);
  CHECK(best.final_error <= 1e-3);
  check_nonnegative(best.factors);
}

TEST_CASE("nn_bcd flags a zero-column initialization as degenerate") {
  Dense3Tensor x = planted_nonneg({6, 5, 4}, 2, 13);
  KruskalFactors init = tca::init_random({6, 5, 4}, 2, 77, true);
  init.u.scale_column(1, 0.0);  // multiplicative fixed point
  FitResult r = fit(x, 2, Algorithm::nn_bcd, {}, &init);
  REQUIRE(r.degenerate_components.size() == 1);
  std::size_t dead = r.degenerate_components[0];
  CHECK(r.factors.weights[dead] == 0.0);
  check_trace_monotone(r);
}

TEST_CASE("hals and bcd land close together on a planted noisy tensor") {
  tca::PlantedSpec spec;
  spec.dims = {40, 10, 12};
  spec.rank = 3;
  spec.seed = 19;
  spec.noise_level = 0.05;
  spec.structure = tca::TaskGated{{4, 8, 12}, 0.2};
  Dense3Tensor x = tca::generate(spec).tensor;

  double e_hals = best_of(x, 3, Algorithm::nn_hals, 10).final_error;
  double e_bcd = best_of(x, 3, Algorithm::nn_bcd, 10).final_error;
  CHECK(std::abs(e_hals - e_bcd) <= 0.02);
}

TEST_CASE("fits are bit-identical for identical inputs") {
  Dense3Tensor x = planted_nonneg({12, 6, 5}, 2, 23);
  FitOptions opts;
  opts.seed = 4;
  opts.max_iters = 40;
  for (Algorithm algorithm : {Algorithm::als, Algorithm::nn_hals, Algorithm::nn_bcd}) {
    FitResult a = fit(x, 2, algorithm, opts);
    FitResult b = fit(x, 2, algorithm, opts);
    CHECK(a.error_trace == b.error_trace);
    CHECK(a.factors.u.data == b.factors.u.data);
    CHECK(a.factors.weights == b.factors.weights);
  }
}

TEST_CASE("nonnegative solvers keep traces monotone and factors nonnegative") {
  tca::Rng rng(31);
  for (int instance = 0; instance < 6; ++instance) {
    std::array<std::size_t, 3> dims = {8 + static_cast<std::size_t>(instance), 6, 5};
    std::vector<double> data(dims[0] * dims[1] * dims[2]);
    for (double& v : data) v = rng.uniform01();
    Dense3Tensor x(dims, data);

    FitOptions opts;
    opts.seed = static_cast<std::uint64_t>(instance);
    opts.max_iters = 60;
    for (Algorithm algorithm : {Algorithm::nn_hals, Algorithm::nn_bcd}) {
      FitResult r = fit(x, 1 + instance % 3, algorithm, opts);
      check_trace_monotone(r);
      check_nonnegative(r.factors);
    }
  }
}

TEST_CASE("planted factors are recovered up to high similarity") {
  tca::PlantedSpec spec;
  spec.dims = {40, 10, 12};
  spec.rank = 4;
  spec.seed = 37;
  spec.structure = tca::TaskGated{{4, 8, 12}, 0.2};
  tca::Planted planted = tca::generate(spec);

  FitResult best;
  double best_sim = -1.0;
  FitOptions opts;
  for (std::size_t s = 0; s < 10; ++s) {
    opts.seed = s;
    FitResult r = fit(planted.tensor, 4, Algorithm::nn_hals, opts);
    double sim = similarity_score(r.factors, planted.truth).score;
    if (sim > best_sim) {
      best_sim = sim;
      best = r;
    }
  }
  CHECK(best_sim >= 0.99);
}
