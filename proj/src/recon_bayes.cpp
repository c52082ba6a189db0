#include "cs/recon_bayes.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "cs/errors.hpp"
#include "cs/metrics.hpp"

namespace cs {

namespace {

// Population variance of the measurement entries; a constant nonzero vector
// (e.g. M = 1) falls back to its mean square so the data-driven init stays
// finite.
double measurement_variance(const Eigen::VectorXd& r) {
  const double mean = r.mean();
  const double var = (r.array() - mean).square().sum() / double(r.size());
  if (var > 0.0) return var;
  return r.squaredNorm() / double(r.size());
}

double resolve_init(const InitRule& rule, double data_driven_value) {
  return rule.kind == InitRule::Kind::fixed ? rule.value : data_driven_value;
}

void check_dims(const SensingOperator& op, const MeasurementVector& r) {
  if (r.values.size() != op.rows()) {
    throw InvalidDimensionError("recon_bayes: measurement length " +
                                std::to_string(r.values.size()) +
                                " != operator rows " + std::to_string(op.rows()));
  }
}

}  // namespace

PosteriorState init_state(const SensingOperator& op, const MeasurementVector& r,
                          const BayesConfig& cfg) {
  check_dims(op, r);
  const int n = op.cols();
  PosteriorState state;
  state.iteration = 0;
  state.active_set.resize(n);
  for (int i = 0; i < n; ++i) state.active_set[i] = i;

  if (r.values.norm() == 0.0) {
    state.trivial = true;
    state.a = Eigen::VectorXd::Constant(n, resolve_init(cfg.a0_rule, 1.0));
    state.b = resolve_init(cfg.b0_rule, 100.0);
    state.mu = Eigen::VectorXd::Zero(n);
    state.sigma.resize(0, 0);
    state.active_set.clear();
    return state;
  }

  const double var = measurement_variance(r.values);
  state.a = Eigen::VectorXd::Constant(n, resolve_init(cfg.a0_rule, 1.0 / var));
  state.b = resolve_init(cfg.b0_rule, 1.0 / (0.01 * var));
  return update_posterior(state, op, r);
}

PosteriorState update_posterior(const PosteriorState& state, const SensingOperator& op,
                                const MeasurementVector& r) {
  check_dims(op, r);
  PosteriorState next = state;
  const int s = static_cast<int>(next.active_set.size());
  next.mu = Eigen::VectorXd::Zero(op.cols());
  if (s == 0) {
    next.sigma.resize(0, 0);
    return next;
  }

  const Eigen::MatrixXd phi = extract_columns(op, next.active_set);
  Eigen::MatrixXd h = next.b * (phi.transpose() * phi);
  for (int p = 0; p < s; ++p) h(p, p) += next.a[next.active_set[p]];

  Eigen::LLT<Eigen::MatrixXd> llt;
  if (h.allFinite()) llt.compute(h);
  if (!h.allFinite() || llt.info() != Eigen::Success) {
    const double hi = h.allFinite() ? h.diagonal().maxCoeff()
                                    : std::numeric_limits<double>::infinity();
    const double lo = h.allFinite() ? h.diagonal().minCoeff() : 0.0;
    throw IllConditionedError(
        "update_posterior: posterior system could not be factorized",
        lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
  }

  next.sigma = llt.solve(Eigen::MatrixXd::Identity(s, s));

  const Eigen::VectorXd rhs = next.b * (phi.transpose() * r.values);
  Eigen::VectorXd mu = llt.solve(rhs);
  // A few refinement passes keep the posterior-mean residual tight even when
  // b has been capped and the system is badly scaled.
  const double rhs_norm = rhs.norm();
  for (int pass = 0; pass < 3 && rhs_norm > 0.0; ++pass) {
    const Eigen::VectorXd residual = rhs - h * mu;
    if (residual.norm() <= 1e-12 * rhs_norm) break;
    mu += llt.solve(residual);
  }

  for (int p = 0; p < s; ++p) next.mu[next.active_set[p]] = mu[p];
  return next;
}

PosteriorState update_hyperparameters(const PosteriorState& state,
                                      const SensingOperator& op,
                                      const MeasurementVector& r, double a_prune) {
  check_dims(op, r);
  PosteriorState next = state;
  next.iteration = state.iteration + 1;
  const int s = static_cast<int>(state.active_set.size());
  if (s == 0) return next;

  Eigen::VectorXd gamma(s);
  for (int p = 0; p < s; ++p) {
    const int i = state.active_set[p];
    gamma[p] = std::clamp(1.0 - state.a[i] * state.sigma(p, p), 0.0, 1.0);
  }

  // Noise precision from the current residual; exact fits push it to the cap.
  const double residual2 = (r.values - apply(op, state.mu)).squaredNorm();
  const double numer = std::max(double(op.rows()) - gamma.sum(), 1e-12);
  double b = residual2 > 0.0 ? numer / residual2 : kBayesNoisePrecisionCap;
  if (!std::isfinite(b)) b = kBayesNoisePrecisionCap;
  next.b = std::clamp(b, 1e-12, kBayesNoisePrecisionCap);

  std::vector<int> kept;
  std::vector<int> kept_positions;
  kept.reserve(s);
  kept_positions.reserve(s);
  for (int p = 0; p < s; ++p) {
    const int i = state.active_set[p];
    const double mu_i = state.mu[i];
    bool prune = mu_i == 0.0 || gamma[p] == 0.0;
    if (!prune) {
      const double a_new = gamma[p] / (mu_i * mu_i);
      prune = !std::isfinite(a_new) || a_new > a_prune;
      if (!prune) next.a[i] = a_new;
    }
    if (prune) {
      next.a[i] = a_prune;
      next.mu[i] = 0.0;
    } else {
      kept.push_back(i);
      kept_positions.push_back(p);
    }
  }

  if (static_cast<int>(kept.size()) < s) {
    Eigen::MatrixXd sigma(kept.size(), kept.size());
    for (int row = 0; row < static_cast<int>(kept.size()); ++row) {
      for (int col = 0; col < static_cast<int>(kept.size()); ++col) {
        sigma(row, col) = state.sigma(kept_positions[row], kept_positions[col]);
      }
    }
    next.sigma = std::move(sigma);
    next.active_set = std::move(kept);
  }
  return next;
}

ReconstructionResult reconstruct_bayes(const SensingOperator& op,
                                       const MeasurementVector& r,
                                       const BayesConfig& cfg) {
  Stopwatch timer(TimedSection::recovery);
  PosteriorState state = init_state(op, r, cfg);

  ReconstructionResult result;
  result.converged = state.trivial;

  // The b formula reads the fit residual, which is meaningless while the
  // active set is large enough to interpolate the measurements; learned
  // values are accepted only once the active set is at most M/2.
  const std::size_t b_accept_limit = static_cast<std::size_t>(op.rows()) / 2;

  if (!state.trivial) {
    for (int it = 1; it <= cfg.max_iter; ++it) {
      const Eigen::VectorXd old_a = state.a;
      const std::size_t old_active = state.active_set.size();
      const double held_b = state.b;

      state = update_hyperparameters(state, op, r, cfg.a_prune);
      if (state.active_set.size() > b_accept_limit) state.b = held_b;
      result.iterations = it;
      if (state.active_set.empty()) {
        result.converged = true;  // nothing left to update
        break;
      }
      state = update_posterior(state, op, r);

      const bool pruned = state.active_set.size() < old_active;
      double max_rel = 0.0;
      for (int i : state.active_set) {
        max_rel = std::max(max_rel, std::abs(state.a[i] - old_a[i]) / old_a[i]);
      }
      if (!pruned && max_rel <= cfg.tol) {
        result.converged = true;
        break;
      }
    }
  }

  result.estimate = state.mu;
  result.estimated_noise_variance = 1.0 / state.b;
  result.recovery_time = timer.stop();

  const double peak =
      result.estimate.size() > 0 ? result.estimate.cwiseAbs().maxCoeff() : 0.0;
  const double threshold = cfg.support_tol * peak;
  for (Eigen::Index i = 0; i < result.estimate.size(); ++i) {
    const double v = std::abs(result.estimate[i]);
    if (v > 0.0) ++result.support_size_raw;
    if (peak > 0.0 && v > threshold) ++result.support_size;
  }
  return result;
}

}  // namespace cs
