#ifndef CS_RECON_BP_HPP
#define CS_RECON_BP_HPP

#include <Eigen/Core>
#include <optional>

#include "cs/recon_bayes.hpp"  // ReconstructionResult
#include "cs/sensing.hpp"

namespace cs {

/// Basis pursuit denoising configuration. The objective is
///   F(x) = ||r - Phi*x||_2^2 + z * ||x||_1.
/// When z is unset it defaults to sigma_hat * sqrt(2 ln N) with sigma_hat
/// the recorded noise level (MAD fallback), floored at 1e-6 * ||Phi^T r||_inf
/// so the noiseless case approximates equality-constrained basis pursuit.
struct BpConfig {
  std::optional<double> z;
  enum class StepRule { fixed, backtracking };
  StepRule step_rule = StepRule::backtracking;
  double fixed_step = 0.0;  // 0 = auto (1/L via power iteration)
  double tol = 1e-10;       // relative objective change (secondary exit)
  int max_iter = 50000;
  double support_tol = 1e-6;  // relative to max |estimate|
  /// Absolute override of the default certificate stopping tolerance
  /// 1e-6 * (1 + ||Phi^T r||_inf); degenerate near-equality problems may
  /// need a tighter target.
  std::optional<double> certificate_tol;
};

/// Elementwise sign(x_i) * max(|x_i| - t, 0); t must be >= 0.
double soft_threshold(double x, double t);
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double t);

/// The effective regularization weight reconstruct_bp would use for (op, r)
/// under cfg (either cfg.z or the default rule above).
double resolve_regularization(const SensingOperator& op, const MeasurementVector& r,
                              const BpConfig& cfg);

/// Max coordinate violation of the subgradient optimality condition of F at
/// x: off the support max(0, |g_i| - z), on the support |g_i + z*sign(x_i)|,
/// with g = 2*Phi^T(Phi*x - r). Zero iff x minimizes F.
double bp_certificate_residual(const SensingOperator& op, const MeasurementVector& r,
                               const Eigen::VectorXd& x, double z);

/// Proximal-gradient (ISTA) solve of F with a monotone objective under
/// backtracking. Converged means the subgradient certificate fell below
/// 1e-6 * (1 + ||Phi^T r||_inf). Throws DivergenceError if the objective
/// becomes non-finite (bad fixed step).
ReconstructionResult reconstruct_bp(const SensingOperator& op, const MeasurementVector& r,
                                    const BpConfig& cfg = {});

}  // namespace cs

#endif  // CS_RECON_BP_HPP
