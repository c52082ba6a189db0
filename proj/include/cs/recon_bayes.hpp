#ifndef CS_RECON_BAYES_HPP
#define CS_RECON_BAYES_HPP

#include <Eigen/Core>
#include <vector>

#include "cs/sensing.hpp"
#include "cs/signals.hpp"

namespace cs {

/// How a scalar hyperparameter is initialized.
struct InitRule {
  enum class Kind { data_driven, fixed };
  Kind kind = Kind::data_driven;
  double value = 1.0;  // fixed only

  static InitRule data_driven() { return {}; }
  static InitRule fixed(double v) { return {Kind::fixed, v}; }
};

/// Sparse Bayesian solver configuration. Defaults:
///   a0_rule data_driven  -> a0 = 1/var(r)
///   b0_rule data_driven  -> b0 = 1/(0.01 * var(r))
///   tol 1e-8 on the max relative change of a, max_iter 1000,
///   a_prune 1e12, support_tol 1e-6 (relative to max |estimate|).
struct BayesConfig {
  InitRule a0_rule;
  InitRule b0_rule;
  double tol = 1e-8;
  int max_iter = 1000;
  double a_prune = 1e12;
  double support_tol = 1e-6;
};

/// Noise-precision cap for exact-fit (zero residual) updates.
inline constexpr double kBayesNoisePrecisionCap = 1e12;

/// State of the evidence-maximization loop. After update_posterior, mu and
/// sigma satisfy, on the active set,
///
///   sigma = (b * Phi^T Phi + A)^-1,   mu = b * sigma * Phi^T r,
///
/// with A = diag(a) restricted to the active set. Entries of mu off the
/// active set are zero; sigma is ordered like active_set.
struct PosteriorState {
  Eigen::VectorXd a;            // per-coefficient precision, length n, > 0
  double b = 1.0;               // noise precision, > 0
  std::vector<int> active_set;  // ascending coefficient indices
  Eigen::VectorXd mu;           // posterior mean, length n
  Eigen::MatrixXd sigma;        // posterior covariance over the active set
  int iteration = 0;
  bool trivial = false;         // all-zero measurements; loop is skipped
};

/// Output shared by both reconstruction solvers.
struct ReconstructionResult {
  Eigen::VectorXd estimate;
  /// Bayes: final 1/b. BP baseline: residual mean square ||r - Phi*x||^2 / M.
  double estimated_noise_variance = 0.0;
  int support_size = 0;      // |v| > support_tol * max|v|
  int support_size_raw = 0;  // |v| > 0
  int iterations = 0;
  bool converged = false;
  double recovery_time = 0.0;  // seconds
};

/// Initial state: a uniform at a0, b at b0, active set = all indices,
/// posterior computed once. Zero measurements yield the trivial converged
/// state with mu = 0.
PosteriorState init_state(const SensingOperator& op, const MeasurementVector& r,
                          const BayesConfig& cfg);

/// Recomputes (mu, sigma) over the active set for the current (a, b).
/// Throws IllConditionedError when the system cannot be factorized.
PosteriorState update_posterior(const PosteriorState& state, const SensingOperator& op,
                                const MeasurementVector& r);

/// Evidence-maximization fixed point: for each active i,
///   gamma_i = 1 - a_i * sigma_ii,   a_i <- gamma_i / mu_i^2,
///   b <- (M - sum gamma_i) / ||r - Phi*mu||^2  (capped at 1e12),
/// pruning coefficients whose updated a_i exceeds a_prune or whose update
/// degenerates (mu_i = 0, gamma_i = 0). Requires (mu, sigma) current for
/// the state's (a, b).
PosteriorState update_hyperparameters(const PosteriorState& state,
                                      const SensingOperator& op,
                                      const MeasurementVector& r,
                                      double a_prune = 1e12);

/// Full iterative loop: alternate hyperparameter and posterior updates with
/// pruning until the max relative change in a drops to cfg.tol (with a
/// stable active set) or max_iter is reached.
ReconstructionResult reconstruct_bayes(const SensingOperator& op,
                                       const MeasurementVector& r,
                                       const BayesConfig& cfg = {});

}  // namespace cs

#endif  // CS_RECON_BAYES_HPP
