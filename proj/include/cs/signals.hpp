#ifndef CS_SIGNALS_HPP
#define CS_SIGNALS_HPP

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "cs/rng.hpp"

namespace cs {

/// Amplitude law for spike generation.
struct AmplitudeSpec {
  enum class Kind { pm_one, gaussian, uniform };
  Kind kind = Kind::pm_one;
  double lo = 0.0;  // uniform only
  double hi = 1.0;

  static AmplitudeSpec pm_one() { return {}; }
  static AmplitudeSpec gaussian() { return {Kind::gaussian, 0.0, 0.0}; }
  static AmplitudeSpec uniform(double lo, double hi) {
    return {Kind::uniform, lo, hi};
  }
};

/// Length-n real signal with at most k nonzeros. When generated
/// synthetically, true_support records the ground-truth nonzero positions
/// (ascending) and entries off the support are bit-exact zeros.
struct SparseSignal {
  Eigen::VectorXd values;
  std::optional<std::vector<int>> true_support;
  int n = 0;
  int k = 0;  // nominal sparsity
};

/// Length-m observation. noise_sigma holds the true noise level when the
/// measurements are synthetic.
struct MeasurementVector {
  Eigen::VectorXd values;
  std::optional<double> noise_sigma;
};

/// k spike positions drawn uniformly without replacement, amplitudes from
/// the chosen law (default +-1), everything else exactly zero.
SparseSignal generate_spikes(Rng& rng, int n, int k,
                             const AmplitudeSpec& amplitude = AmplitudeSpec::pm_one());

/// clean + w with w ~ iid N(0, sigma^2); sigma = 0 returns the input
/// unchanged. noise_sigma is recorded as sigma.
MeasurementVector add_awgn(Rng& rng, const MeasurementVector& clean, double sigma);

/// Plain-text columnar serialization: one "index value" line per entry.
void write_signal_columns(const std::string& path, const Eigen::VectorXd& values);
Eigen::VectorXd read_signal_columns(const std::string& path);

}  // namespace cs

#endif  // CS_SIGNALS_HPP
