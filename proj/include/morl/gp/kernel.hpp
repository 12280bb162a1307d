#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "morl/error.hpp"

namespace morl::gp {

enum class Smoothness { kHalf, kThreeHalves, kFiveHalves };

inline Smoothness smoothness_from_nu(double nu) {
  if (nu == 0.5) return Smoothness::kHalf;
  if (nu == 1.5) return Smoothness::kThreeHalves;
  if (nu == 2.5) return Smoothness::kFiveHalves;
  throw InvalidArgument("Matern smoothness must be 0.5, 1.5 or 2.5, got " + std::to_string(nu));
}

inline double nu_value(Smoothness s) {
  switch (s) {
    case Smoothness::kHalf: return 0.5;
    case Smoothness::kThreeHalves: return 1.5;
    case Smoothness::kFiveHalves: return 2.5;
  }
  return 1.5;
}

/// Unit-variance Matern covariance. One length scale means isotropic;
/// otherwise one per input dimension.
class MaternKernel {
 public:
  MaternKernel() = default;
  MaternKernel(Smoothness nu, std::vector<double> length_scales) : nu_(nu), length_scales_(std::move(length_scales)) {
    if (length_scales_.empty()) throw InvalidArgument("kernel needs at least one length scale");
    for (double l : length_scales_) {
      if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("kernel length scales must be positive and finite");
    }
  }
  MaternKernel(Smoothness nu, double length_scale) : MaternKernel(nu, std::vector<double>{length_scale}) {}

  Smoothness smoothness() const noexcept { return nu_; }
  const std::vector<double>& length_scales() const noexcept { return length_scales_; }
  bool isotropic() const noexcept { return length_scales_.size() == 1; }

  /// Covariance as a function of the scaled distance r = ||(x - x') / l||.
  double of_scaled_distance(double r) const {
    switch (nu_) {
      case Smoothness::kHalf: return std::exp(-r);
      case Smoothness::kThreeHalves: {
        const double t = std::sqrt(3.0) * r;
        return (1.0 + t) * std::exp(-t);
      }
      case Smoothness::kFiveHalves: {
        const double t = std::sqrt(5.0) * r;
        return (1.0 + t + t * t / 3.0) * std::exp(-t);
      }
    }
    return 0.0;
  }

  double scaled_distance(std::span<const double> x, std::span<const double> y) const {
    if (x.size() != y.size()) throw InvalidArgument("kernel inputs have different dimensions");
    if (!isotropic() && length_scales_.size() != x.size()) {
      throw InvalidArgument("kernel has " + std::to_string(length_scales_.size()) + " length scales for " +
                            std::to_string(x.size()) + "-dimensional inputs");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = (x[i] - y[i]) / (isotropic() ? length_scales_[0] : length_scales_[i]);
      sq += d * d;
    }
    return std::sqrt(sq);
  }

  double operator()(std::span<const double> x, std::span<const double> y) const {
    return of_scaled_distance(scaled_distance(x, y));
  }

 private:
  Smoothness nu_ = Smoothness::kThreeHalves;
  std::vector<double> length_scales_{1.0};
};

}  // namespace morl::gp
