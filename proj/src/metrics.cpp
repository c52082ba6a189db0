#include "cs/metrics.hpp"

#include <cmath>

#include "cs/errors.hpp"

namespace cs {

namespace {

void check_same_length(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat,
                       const char* what) {
  if (s.size() != s_hat.size()) {
    throw InvalidDimensionError(std::string(what) + ": length mismatch, " +
                                std::to_string(s.size()) + " vs " +
                                std::to_string(s_hat.size()));
  }
}

}  // namespace

double reconstruction_error(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat) {
  check_same_length(s, s_hat, "reconstruction_error");
  const double denom = s.norm();
  if (denom == 0.0) {
    throw UndefinedMetricError("reconstruction_error: reference signal has zero norm");
  }
  return (s_hat - s).norm() / denom;
}

double reconstruction_error(const SparseSignal& s, const Eigen::VectorXd& s_hat) {
  return reconstruction_error(s.values, s_hat);
}

double mean_square_error(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat) {
  check_same_length(s, s_hat, "mean_square_error");
  if (s.size() == 0) {
    throw InvalidDimensionError("mean_square_error: empty signals");
  }
  return (s - s_hat).squaredNorm() / static_cast<double>(s.size());
}

double mean_square_error(const SparseSignal& s, const Eigen::VectorXd& s_hat) {
  return mean_square_error(s.values, s_hat);
}

std::optional<double> correlation(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat) {
  check_same_length(s, s_hat, "correlation");
  const auto n = s.size();
  if (n < 2) {
    throw InvalidDimensionError("correlation: need at least 2 samples");
  }
  // Centered form of the raw-moment quotient; same quantity, without the
  // cancellation the raw sums suffer under large means.
  const double mean_s = s.mean();
  const double mean_h = s_hat.mean();
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double dx = s[i] - mean_s;
    const double dy = s_hat[i] - mean_h;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double cc = sxy / (std::sqrt(sxx) * std::sqrt(syy));
  if (cc > 1.0 && cc <= 1.0 + 1e-12) cc = 1.0;
  if (cc < -1.0 && cc >= -1.0 - 1e-12) cc = -1.0;
  return cc;
}

std::optional<double> correlation(const SparseSignal& s, const Eigen::VectorXd& s_hat) {
  return correlation(s.values, s_hat);
}

}  // namespace cs
