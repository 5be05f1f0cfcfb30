#pragma once

#include <optional>
#include <vector>

#include "bilevel/problem.hpp"

namespace bilevel {

struct InnerResult {
  Vector y_hat;
  int iters = 0;
  std::optional<double> final_lower_gap;  // g(x, y_hat) - v(x) when v is known
  double final_grad_norm = 0.0;           // |grad_y g| or the projected-gradient norm
};

inline constexpr double kDivergenceThreshold = 1e12;

/// T steps of w <- w - beta grad_y g(x, w) from w = y0. Lower level must be unconstrained.
InnerResult lower_gd(const ProblemSpec& p, const Vector& x, const Vector& y0, double beta, int T);

/// T steps of w <- Proj_U(w - beta grad_y g(x, w)).
InnerResult lower_projected_gd(const ProblemSpec& p, const Vector& x, const Vector& y0,
                               double beta, int T);

/// Stochastic steps with beta_t = 1 / (L_g sqrt(t)), t = 1..T. The output is
/// the iterate produced by step i, with i drawn with probability
/// proportional to beta_i. T = 0 returns y0.
InnerResult lower_sgd_weighted(const ProblemSpec& p, const Vector& x, const Vector& y0, int T,
                               double L_g, Rng& rng);

/// Normalized sampling weights beta_t / sum(beta) for t = 1..T.
std::vector<double> sgd_sampling_weights(int T, double L_g);

/// Sum of beta_t^2 for the decaying schedule.
double sgd_step_square_sum(int T, double L_g);

enum class ScheduleMode { Unconstrained, Constrained };

/// Inner iteration count for outer index k >= 1:
/// unconstrained: max{-log_c(16 L_g^2), -2 log_c(2 alpha k)},
/// constrained:   -2 log_c(2 alpha gamma k),
/// with c = 1 - beta / (2 mu); ceiling, floored at 1.
int inner_iteration_schedule(int k, double alpha, double beta, double gamma, double mu,
                             double L_g, ScheduleMode mode);

}  // namespace bilevel
