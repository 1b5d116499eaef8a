#include "tca/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "tca/rng.hpp"

namespace tca {

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::als: return "als";
    case Algorithm::nn_hals: return "nn-hals";
    case Algorithm::nn_bcd: return "nn-bcd";
  }
  return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "als") return Algorithm::als;
  if (name == "nn-hals" || name == "nn_hals") return Algorithm::nn_hals;
  if (name == "nn-bcd" || name == "nn_bcd") return Algorithm::nn_bcd;
  raise(errc::invalid_argument, "unknown algorithm '" + name + "'");
}

KruskalFactors init_random(std::array<std::size_t, 3> dims, std::size_t rank,
                           std::uint64_t seed, bool nonnegative) {
  if (rank == 0) raise(errc::invalid_argument, "rank must be >= 1");
  if (dims[0] == 0 || dims[1] == 0 || dims[2] == 0)
    raise(errc::invalid_argument, "dims must be positive");

  Rng rng(seed);
  KruskalFactors f;
  f.weights.assign(rank, 1.0);
  for (Matrix* m : {&f.u, &f.v, &f.w}) {
    std::size_t axis = (m == &f.u) ? dims[0] : (m == &f.v) ? dims[1] : dims[2];
    *m = Matrix(axis, rank);
    for (double& entry : m->data)
      entry = nonnegative ? rng.uniform01() : rng.normal();
  }
  return f;
}

namespace {

using EMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EMap = Eigen::Map<EMatrix>;
using ECMap = Eigen::Map<const EMatrix>;

Matrix hadamard(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (std::size_t n = 0; n < out.data.size(); ++n) out.data[n] *= b.data[n];
  return out;
}

struct ComponentState {
  bool born_dead = false;  // zero column already at initialization
  bool rescued = false;
  bool degenerate = false;
};

class CpFit {
public:
  CpFit(const Dense3Tensor& x, std::size_t rank, Algorithm algorithm,
        const FitOptions& opts, const KruskalFactors* init)
      : x_(x), rank_(rank), algorithm_(algorithm), opts_(opts) {
    if (rank_ == 0) raise(errc::invalid_argument, "rank must be >= 1");
    if (opts_.max_iters == 0) raise(errc::invalid_argument, "max_iters must be >= 1");
    if (opts_.rel_tol <= 0.0 || opts_.epsilon_div <= 0.0)
      raise(errc::invalid_argument, "tolerances must be positive");

    bool nn = algorithm_ != Algorithm::als;
    if (nn) {
      for (std::size_t n = 0; n < x_.values().size(); ++n)
        if (x_.values()[n] < 0.0)
          raise(errc::negative_input,
                "nonnegative solver given a negative entry at flat index " + std::to_string(n));
    }
    double norm = frobenius_norm(x_);
    if (norm == 0.0) raise(errc::zero_tensor, "cannot fit an all-zero tensor");

    if (init) {
      init->validate();
      if (init->dims() != x_.dims() || init->rank() != rank_)
        raise(errc::dim_mismatch, "initial factors do not match tensor dims or rank");
      if (nn) {
        for (const Matrix* m : {&init->u, &init->v, &init->w})
          for (double v : m->data)
            if (v < 0.0) raise(errc::negative_input, "nonnegative solver given negative init");
      }
      factors_ = *init;
      // Weights stay implicit (all one) during the sweeps; fold any provided
      // weights into the first-mode columns.
      for (std::size_t r = 0; r < rank_; ++r)
        if (factors_.weights[r] != 1.0) factors_.u.scale_column(r, factors_.weights[r]);
      factors_.weights.assign(rank_, 1.0);
    } else {
      factors_ = init_random(x_.dims(), rank_, opts_.seed,
                             nn || opts_.nonnegative);
    }

    unfoldings_ = {unfold(x_, 0), unfold(x_, 1), unfold(x_, 2)};
    components_.resize(rank_);
    for (std::size_t r = 0; r < rank_; ++r)
      components_[r].born_dead = column_collapsed(r);
  }

  FitResult run() {
    FitResult result;
    result.seed = opts_.seed;
    result.algorithm = algorithm_;

    error_trace_.push_back(normalized_error(x_, factors_));
    bool converged = false;
    std::size_t iterations = 0;
    while (iterations < opts_.max_iters && !converged) {
      for (int mode = 0; mode < 3; ++mode) sweep_mode(mode);
      ++iterations;
      handle_collapses(iterations);
      double err = normalized_error(x_, factors_);
      double prev = error_trace_.back();
      error_trace_.push_back(err);
      if (prev == 0.0 || std::abs(prev - err) < opts_.rel_tol * prev) converged = true;
    }

    // Canonicalize dead components before normalizing: fully zero columns,
    // zero weight, reported as degenerate.
    for (std::size_t r = 0; r < rank_; ++r) {
      if (components_[r].degenerate || column_collapsed(r)) {
        components_[r].degenerate = true;
        factors_.weights[r] = 0.0;
        factors_.u.scale_column(r, 0.0);
        factors_.v.scale_column(r, 0.0);
        factors_.w.scale_column(r, 0.0);
      }
    }

    std::vector<std::size_t> permutation;
    result.factors = normalize_components(factors_, permutation);
    for (std::size_t r = 0; r < rank_; ++r)
      if (components_[r].degenerate)
        result.degenerate_components.push_back(permutation[r]);
    std::sort(result.degenerate_components.begin(), result.degenerate_components.end());

    result.error_trace = std::move(error_trace_);
    result.final_error = result.error_trace.back();
    result.iterations = iterations;
    result.converged = converged;
    result.singular_updates = singular_updates_;
    return result;
  }

private:
  Matrix& factor(int mode) {
    return mode == 0 ? factors_.u : mode == 1 ? factors_.v : factors_.w;
  }

  bool column_collapsed(std::size_t r) const {
    return factors_.u.column_norm(r) == 0.0 || factors_.v.column_norm(r) == 0.0 ||
           factors_.w.column_norm(r) == 0.0;
  }

  void sweep_mode(int mode) {
    // Partner factors: the Khatri-Rao ordering matches the unfolding columns.
    const Matrix& first = (mode == 0 || mode == 1) ? factors_.w : factors_.v;
    const Matrix& second = (mode == 0) ? factors_.v : factors_.u;
    Matrix kr = khatri_rao(first, second);
    Matrix mttkrp = matmul(unfoldings_[static_cast<std::size_t>(mode)], kr);
    Matrix g = hadamard(gram(first), gram(second));
    Matrix& a = factor(mode);

    switch (algorithm_) {
      case Algorithm::als: update_als(a, mttkrp, g); break;
      case Algorithm::nn_hals: update_hals(a, mttkrp, g); break;
      case Algorithm::nn_bcd: update_bcd(a, mttkrp, g); break;
    }
  }

  void update_als(Matrix& a, const Matrix& mttkrp, const Matrix& g) {
    ECMap gm(g.data.data(), static_cast<Eigen::Index>(g.rows),
             static_cast<Eigen::Index>(g.cols));
    ECMap mm(mttkrp.data.data(), static_cast<Eigen::Index>(mttkrp.rows),
             static_cast<Eigen::Index>(mttkrp.cols));
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gm);
    if (cod.rank() < static_cast<Eigen::Index>(rank_)) ++singular_updates_;
    // A = M G^+; G is symmetric so G^+ is too.
    EMap am(a.data.data(), static_cast<Eigen::Index>(a.rows),
            static_cast<Eigen::Index>(a.cols));
    am = cod.solve(mm.transpose()).transpose();
  }

  void update_hals(Matrix& a, const Matrix& mttkrp, const Matrix& g) {
    const std::size_t R = rank_;
    for (std::size_t r = 0; r < R; ++r) {
      double grr = g(r, r);
      if (grr <= opts_.epsilon_div) continue;  // dead column, handled by rescue
      const double* gcol = g.row_ptr(r);       // symmetric: row r == column r
      for (std::size_t i = 0; i < a.rows; ++i) {
        double* arow = a.row_ptr(i);
        double correction = mttkrp(i, r);
        for (std::size_t s = 0; s < R; ++s) correction -= arow[s] * gcol[s];
        arow[r] = std::max(0.0, arow[r] + correction / grr);
      }
    }
  }

  void update_bcd(Matrix& a, const Matrix& mttkrp, const Matrix& g) {
    Matrix ag = matmul(a, g);
    for (std::size_t n = 0; n < a.data.size(); ++n)
      a.data[n] *= mttkrp.data[n] / (ag.data[n] + opts_.epsilon_div);
  }

  void handle_collapses(std::size_t iteration) {
    for (std::size_t r = 0; r < rank_; ++r) {
      ComponentState& state = components_[r];
      if (state.degenerate) continue;
      if (!column_collapsed(r)) {
        state.born_dead = false;  // revived by an additive update
        continue;
      }
      // A component that was zero at initialization never had a signal to
      // lose; report it instead of rescuing. Mid-fit collapses get one
      // re-seed, provided a refinement sweep remains.
      if (state.born_dead || state.rescued || iteration >= opts_.max_iters) {
        state.degenerate = true;
        continue;
      }
      state.rescued = true;
      if (!rescue_component(r)) state.degenerate = true;
    }
  }

  /// Re-seeds component r from the leading positive part of the residual,
  /// scaled by an exact line search so the objective cannot increase.
  bool rescue_component(std::size_t r) {
    const std::size_t I = x_.dim(0), J = x_.dim(1), K = x_.dim(2), R = rank_;
    const double* data = x_.values().data();
    std::vector<double> residual(I * J * K);
    std::vector<double> u0(I, 0.0), v0(J, 0.0), w0(K, 0.0);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < I; ++i) {
      const double* urow = factors_.u.row_ptr(i);
      for (std::size_t j = 0; j < J; ++j) {
        const double* vrow = factors_.v.row_ptr(j);
        for (std::size_t k = 0; k < K; ++k, ++idx) {
          const double* wrow = factors_.w.row_ptr(k);
          double approx = 0.0;
          for (std::size_t s = 0; s < R; ++s) approx += urow[s] * vrow[s] * wrow[s];
          double res = data[idx] - approx;
          residual[idx] = res;
          double pos = std::max(0.0, res);
          u0[i] += pos;
          v0[j] += pos;
          w0[k] += pos;
        }
      }
    }
    auto unit = [](std::vector<double>& v) {
      double acc = 0.0;
      for (double e : v) acc += e * e;
      if (acc == 0.0) return false;
      double inv = 1.0 / std::sqrt(acc);
      for (double& e : v) e *= inv;
      return true;
    };
    if (!unit(u0) || !unit(v0) || !unit(w0)) return false;

    // alpha = <residual, u0 (outer) v0 (outer) w0>; optimal rank-1 step size.
    double alpha = 0.0;
    idx = 0;
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < J; ++j) {
        double uv = u0[i] * v0[j];
        for (std::size_t k = 0; k < K; ++k, ++idx) alpha += residual[idx] * uv * w0[k];
      }
    if (alpha <= 0.0) return false;

    double scale = std::cbrt(alpha);
    for (std::size_t i = 0; i < I; ++i) factors_.u(i, r) = scale * u0[i];
    for (std::size_t j = 0; j < J; ++j) factors_.v(j, r) = scale * v0[j];
    for (std::size_t k = 0; k < K; ++k) factors_.w(k, r) = scale * w0[k];
    return true;
  }

  const Dense3Tensor& x_;
  std::size_t rank_;
  Algorithm algorithm_;
  FitOptions opts_;
  KruskalFactors factors_;
  std::array<Matrix, 3> unfoldings_;
  std::vector<ComponentState> components_;
  std::vector<double> error_trace_;
  std::size_t singular_updates_ = 0;
};

}  // namespace

FitResult fit(const Dense3Tensor& x, std::size_t rank, Algorithm algorithm,
              const FitOptions& opts, const KruskalFactors* init) {
  CpFit engine(x, rank, algorithm, opts, init);
  return engine.run();
}

FitResult fit_cp_als(const Dense3Tensor& x, std::size_t rank, const FitOptions& opts) {
  return fit(x, rank, Algorithm::als, opts);
}

FitResult fit_nn_hals(const Dense3Tensor& x, std::size_t rank, const FitOptions& opts) {
  return fit(x, rank, Algorithm::nn_hals, opts);
}

FitResult fit_nn_bcd(const Dense3Tensor& x, std::size_t rank, const FitOptions& opts) {
  return fit(x, rank, Algorithm::nn_bcd, opts);
}

}  // namespace tca
