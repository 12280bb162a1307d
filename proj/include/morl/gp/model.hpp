#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "morl/error.hpp"
#include "morl/gp/kernel.hpp"

namespace morl::gp {

/// Row-per-sample input matrix.
using InputMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Per-dimension affine map to zero mean / unit variance, plus the same for targets.
/// Constant columns keep scale 1.
struct Standardization {
  Eigen::VectorXd x_mean;
  Eigen::VectorXd x_scale;
  double y_mean = 0.0;
  double y_scale = 1.0;

  static Standardization from_data(const InputMatrix& x, const Eigen::VectorXd& y) {
    Standardization st;
    const auto n = static_cast<double>(x.rows());
    st.x_mean = x.colwise().mean().transpose();
    st.x_scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const double var = (x.col(j).array() - st.x_mean[j]).square().sum() / n;
      st.x_scale[j] = var > 0.0 ? std::sqrt(var) : 1.0;
    }
    st.y_mean = y.mean();
    const double yvar = (y.array() - st.y_mean).square().sum() / n;
    st.y_scale = yvar > 0.0 ? std::sqrt(yvar) : 1.0;
    return st;
  }

  InputMatrix apply(const InputMatrix& x) const {
    InputMatrix z = x;
    for (Eigen::Index j = 0; j < x.cols(); ++j) z.col(j) = (x.col(j).array() - x_mean[j]) / x_scale[j];
    return z;
  }
  Eigen::VectorXd apply_targets(const Eigen::VectorXd& y) const { return (y.array() - y_mean) / y_scale; }
  double restore_target(double z) const { return z * y_scale + y_mean; }
};

struct Prediction {
  double mean = 0.0;
  double std = 0.0;
};

/// Diagonal jitter tried, in order, after a failed factorization.
inline constexpr std::array<double, 5> kJitterLadder{1e-10, 1e-9, 1e-8, 1e-7, 1e-6};

class Model;
Model fit(const InputMatrix& x, const Eigen::VectorXd& y, const MaternKernel& kernel, double noise_variance);

/// Fitted exact GP. Immutable; predictions are pure.
class Model {
 public:
  const InputMatrix& inputs() const noexcept { return x_raw_; }
  const Eigen::VectorXd& targets() const noexcept { return y_raw_; }
  const MaternKernel& kernel() const noexcept { return kernel_; }
  double noise_variance() const noexcept { return noise_; }
  /// Extra diagonal jitter that the factorization needed (0 if none).
  double jitter() const noexcept { return jitter_; }
  const Standardization& standardization() const noexcept { return st_; }
  const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }
  const Eigen::VectorXd& dual_coefficients() const noexcept { return alpha_; }
  const InputMatrix& standardized_inputs() const noexcept { return x_; }
  const Eigen::VectorXd& standardized_targets() const noexcept { return y_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(x_.rows()); }
  std::size_t dims() const noexcept { return static_cast<std::size_t>(x_.cols()); }

  /// Gram matrix k(X, X) on standardized inputs, without noise.
  Eigen::MatrixXd gram() const {
    const auto n = x_.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      k(i, i) = 1.0;
      for (Eigen::Index j = 0; j < i; ++j) k(i, j) = k(j, i) = kernel_(row(x_, i), row(x_, j));
    }
    return k;
  }

 private:
  friend Model fit(const InputMatrix&, const Eigen::VectorXd&, const MaternKernel&, double);
  friend Model fit_from_distances(const InputMatrix&, const Eigen::VectorXd&, const MaternKernel&, double,
                                  const Eigen::MatrixXd&);

  static std::span<const double> row(const InputMatrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
  }

  // Factorizes gram + noise I, walking the jitter ladder on failure.
  void factorize(Eigen::MatrixXd gram) {
    gram.diagonal().array() += noise_;
    std::string tried = "0";
    for (std::size_t step = 0; step <= kJitterLadder.size(); ++step) {
      const double jitter = step == 0 ? 0.0 : kJitterLadder[step - 1];
      if (step > 0) tried += ", " + std::to_string(jitter);
      Eigen::MatrixXd a = gram;
      a.diagonal().array() += jitter;
      Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(a);
      if (llt.info() == Eigen::Success && llt.matrixLLT().diagonal().allFinite() &&
          (llt.matrixLLT().diagonal().array() > 0.0).all()) {
        chol_ = llt.matrixL();
        alpha_ = llt.solve(y_);
        jitter_ = jitter;
        return;
      }
    }
    throw NumericalError("Cholesky factorization failed after jitter ladder {" + tried + "}");
  }

  InputMatrix x_raw_;
  Eigen::VectorXd y_raw_;
  InputMatrix x_;
  Eigen::VectorXd y_;
  MaternKernel kernel_;
  double noise_ = 0.0;
  double jitter_ = 0.0;
  Standardization st_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
};

namespace detail {

inline void check_training_data(const InputMatrix& x, const Eigen::VectorXd& y, double noise) {
  if (x.rows() < 1) throw InvalidArgument("GP fit needs at least one training point");
  if (x.rows() != y.size()) throw InvalidArgument("GP inputs and targets have different lengths");
  if (x.cols() < 1) throw InvalidArgument("GP inputs need at least one dimension");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("GP training data must be finite");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("noise variance must be finite and >= 0");
}

}  // namespace detail

/// Exact GP fit on standardized inputs and targets. Deterministic.
inline Model fit(const InputMatrix& x, const Eigen::VectorXd& y, const MaternKernel& kernel, double noise_variance) {
  detail::check_training_data(x, y, noise_variance);
  Model m;
  m.x_raw_ = x;
  m.y_raw_ = y;
  m.kernel_ = kernel;
  m.noise_ = noise_variance;
  m.st_ = Standardization::from_data(x, y);
  m.x_ = m.st_.apply(x);
  m.y_ = m.st_.apply_targets(y);
  m.factorize(m.gram());
  return m;
}

/// Pairwise Euclidean distances between rows.
inline Eigen::MatrixXd pairwise_distances(const InputMatrix& z) {
  const auto n = z.rows();
  Eigen::MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = 0; j < i; ++j) d(i, j) = d(j, i) = (z.row(i) - z.row(j)).norm();
  }
  return d;
}

/// Isotropic fit reusing precomputed standardized-input distances (used by tuning).
inline Model fit_from_distances(const InputMatrix& x, const Eigen::VectorXd& y, const MaternKernel& kernel,
                                double noise_variance, const Eigen::MatrixXd& distances) {
  detail::check_training_data(x, y, noise_variance);
  if (!kernel.isotropic()) throw InvalidArgument("distance-based fit requires an isotropic kernel");
  Model m;
  m.x_raw_ = x;
  m.y_raw_ = y;
  m.kernel_ = kernel;
  m.noise_ = noise_variance;
  m.st_ = Standardization::from_data(x, y);
  m.x_ = m.st_.apply(x);
  m.y_ = m.st_.apply_targets(y);
  const double l = kernel.length_scales()[0];
  Eigen::MatrixXd k = distances.unaryExpr([&](double d) { return kernel.of_scaled_distance(d / l); });
  m.factorize(std::move(k));
  return m;
}

/// Posterior predictive mean and standard deviation (noise included) in target units.
inline std::vector<Prediction> predict(const Model& model, const InputMatrix& queries) {
  if (static_cast<std::size_t>(queries.cols()) != model.dims()) {
    throw InvalidArgument("query dimension " + std::to_string(queries.cols()) + " does not match training dimension " +
                          std::to_string(model.dims()));
  }
  const InputMatrix z = model.standardization().apply(queries);
  const auto& xs = model.standardized_inputs();
  const auto n = xs.rows();
  const auto& st = model.standardization();
  std::vector<Prediction> out(static_cast<std::size_t>(z.rows()));

  constexpr Eigen::Index kChunk = 512;
  for (Eigen::Index begin = 0; begin < z.rows(); begin += kChunk) {
    const auto m = std::min(kChunk, z.rows() - begin);
    Eigen::MatrixXd kstar(n, m);
    for (Eigen::Index q = 0; q < m; ++q) {
      const std::span<const double> zq(z.data() + (begin + q) * z.cols(), static_cast<std::size_t>(z.cols()));
      for (Eigen::Index i = 0; i < n; ++i) {
        kstar(i, q) = model.kernel()(zq, {xs.data() + i * xs.cols(), static_cast<std::size_t>(xs.cols())});
      }
    }
    const Eigen::VectorXd mean = kstar.transpose() * model.dual_coefficients();
    const Eigen::MatrixXd v = model.cholesky().triangularView<Eigen::Lower>().solve(kstar);
    for (Eigen::Index q = 0; q < m; ++q) {
      const double var = std::max(0.0, 1.0 + model.noise_variance() - v.col(q).squaredNorm());
      out[static_cast<std::size_t>(begin + q)] = {st.restore_target(mean[q]), std::sqrt(var) * st.y_scale};
    }
  }
  return out;
}

inline Prediction predict_one(const Model& model, std::span<const double> query) {
  InputMatrix q(1, static_cast<Eigen::Index>(query.size()));
  for (std::size_t j = 0; j < query.size(); ++j) q(0, static_cast<Eigen::Index>(j)) = query[j];
  return predict(model, q).front();
}

/// -1/2 y^T alpha - sum log diag(L) - n/2 log(2 pi), on standardized targets.
inline double log_marginal_likelihood(const Model& model) {
  const auto& y = model.standardized_targets();
  const double n = static_cast<double>(y.size());
  return -0.5 * y.dot(model.dual_coefficients()) - model.cholesky().diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

inline const std::vector<double>& default_length_scale_grid() {
  static const std::vector<double> grid{0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0};
  return grid;
}

/// Isotropic length scale maximizing the log marginal likelihood over `candidates`.
/// Ties go to the smallest length scale. Candidates whose factorization fails are skipped.
inline MaternKernel tune_length_scale(const InputMatrix& x, const Eigen::VectorXd& y, Smoothness nu,
                                      double noise_variance, std::vector<double> candidates) {
  if (candidates.empty()) throw InvalidArgument("length-scale candidate grid is empty");
  std::sort(candidates.begin(), candidates.end());
  detail::check_training_data(x, y, noise_variance);
  const auto distances = pairwise_distances(Standardization::from_data(x, y).apply(x));

  std::optional<MaternKernel> best;
  double best_lml = -std::numeric_limits<double>::infinity();
  std::string failures;
  for (double l : candidates) {
    const MaternKernel k(nu, l);
    try {
      const double lml = log_marginal_likelihood(fit_from_distances(x, y, k, noise_variance, distances));
      if (!best || lml > best_lml) {
        best = k;
        best_lml = lml;
      }
    } catch (const NumericalError& e) {
      failures += " " + std::to_string(l);
    }
  }
  if (!best) throw NumericalError("every length-scale candidate failed to factorize:" + failures);
  return *best;
}

/// Per-dimension length scales by coordinate ascent over the same candidate
/// grid, starting from the best isotropic scale. Each pass visits dimensions
/// in order and keeps a candidate only if it strictly improves the log
/// marginal likelihood; ties keep the current scale.
inline MaternKernel tune_length_scales_per_dimension(const InputMatrix& x, const Eigen::VectorXd& y, Smoothness nu,
                                                     double noise_variance, std::vector<double> candidates,
                                                     int passes = 2) {
  std::sort(candidates.begin(), candidates.end());
  const auto iso = tune_length_scale(x, y, nu, noise_variance, candidates);
  std::vector<double> scales(static_cast<std::size_t>(x.cols()), iso.length_scales()[0]);
  double best_lml = log_marginal_likelihood(fit(x, y, MaternKernel(nu, scales), noise_variance));
  for (int pass = 0; pass < passes; ++pass) {
    bool changed = false;
    for (std::size_t dim = 0; dim < scales.size(); ++dim) {
      for (double l : candidates) {
        if (l == scales[dim]) continue;
        auto trial = scales;
        trial[dim] = l;
        try {
          const double lml = log_marginal_likelihood(fit(x, y, MaternKernel(nu, trial), noise_variance));
          if (lml > best_lml) {
            best_lml = lml;
            scales = std::move(trial);
            changed = true;
          }
        } catch (const NumericalError&) {
        }
      }
    }
    if (!changed) break;
  }
  return MaternKernel(nu, scales);
}

}  // namespace morl::gp
