#ifndef CS_METRICS_HPP
#define CS_METRICS_HPP

#include <Eigen/Core>
#include <chrono>
#include <optional>

#include "cs/signals.hpp"

namespace cs {

/// One trial's evaluation: the three reconstruction metrics plus the
/// sampling / recovery / total wall times in seconds. cc is absent when the
/// correlation is undefined (a constant input).
struct MetricReport {
  double re = 0.0;
  double mse = 0.0;
  std::optional<double> cc;
  int support_size = 0;
  double t_s = 0.0;
  double t_r = 0.0;
  double t_p = 0.0;
};

/// ||s_hat - s||_2 / ||s||_2. Throws UndefinedMetricError when ||s|| = 0.
double reconstruction_error(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat);
double reconstruction_error(const SparseSignal& s, const Eigen::VectorXd& s_hat);

/// (1/N) * sum (s_i - s_hat_i)^2.
double mean_square_error(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat);
double mean_square_error(const SparseSignal& s, const Eigen::VectorXd& s_hat);

/// Pearson correlation coefficient; nullopt when either input has zero
/// variance. Clamped to [-1, 1] only against sub-1e-12 float overshoot.
std::optional<double> correlation(const Eigen::VectorXd& s, const Eigen::VectorXd& s_hat);
std::optional<double> correlation(const SparseSignal& s, const Eigen::VectorXd& s_hat);

enum class TimedSection { sampling, recovery, total };

/// Monotone-clock interval timer. Confined to the creating thread.
class Stopwatch {
public:
  explicit Stopwatch(TimedSection section) : section_(section) { start(); }

  void start() { begin_ = std::chrono::steady_clock::now(); }

  /// Seconds since the last start().
  double stop() {
    auto end = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(end - begin_).count();
  }

  TimedSection section() const { return section_; }

private:
  TimedSection section_;
  std::chrono::steady_clock::time_point begin_;
};

}  // namespace cs

#endif  // CS_METRICS_HPP
