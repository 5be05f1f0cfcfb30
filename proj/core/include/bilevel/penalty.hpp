#pragma once

#include <optional>

#include "bilevel/problem.hpp"

namespace bilevel {

/// ValueGap: g(x,y) - v, with v taken from v_hat or else analytic_v.
/// GradNormSq: |grad_y g|^2. GradNorm: |grad_y g|.
double penalty_value(const ProblemSpec& p, PenaltyKind kind, const Vector& x, const Vector& y,
                     std::optional<double> v_hat = std::nullopt);

/// F_gamma(x, y) = f(x, y) + gamma * penalty_value. gamma = 0 gives f.
double penalized_objective(const ProblemSpec& p, PenaltyKind kind, double gamma, const Vector& x,
                           const Vector& y, std::optional<double> v_hat = std::nullopt);

/// grad f(x,y) + gamma (grad g(x,y) - (grad_x g(x, y_hat), 0)).
Vector penalized_gradient_value_gap(const ProblemSpec& p, double gamma, const Vector& x,
                                    const Vector& y, const Vector& y_hat);

/// grad f(x,y) + 2 gamma (grad_xy g grad_y g, grad_yy g grad_y g).
Vector penalized_gradient_grad_norm_sq(const ProblemSpec& p, double gamma, const Vector& x,
                                       const Vector& y);

struct ProjectedGradient {
  double norm_sq = 0.0;
  Vector G;
};

/// G = (z - Proj_Z(z - alpha grad)) / alpha with Z = upper_set x lower_set.
ProjectedGradient projected_gradient_metric(const ProblemSpec& p, double alpha, const Vector& x,
                                            const Vector& y, const Vector& grad);

/// Same metric with the gradient assembled here. For ValueGap the lower
/// solution is y_hat when given, else the analytic solution.
ProjectedGradient projected_gradient_metric(const ProblemSpec& p, PenaltyKind kind, double gamma,
                                            double alpha, const Vector& x, const Vector& y,
                                            const std::optional<Vector>& y_hat = std::nullopt);

/// Penalty value as recorded in traces.
struct TracedPenalty {
  double value = 0.0;
  bool v_estimated = false;
  bool clamped = false;
  bool negative = false;
};

inline constexpr double kValueGapClampFloor = -1e-10;

/// Value-gap bookkeeping for traces: exact v when the problem has it,
/// otherwise g(x, y_hat) flagged as an estimate. Values in [-1e-10, 0)
/// are clamped to 0; anything lower is kept and flagged.
TracedPenalty traced_value_gap(const ProblemSpec& p, const Vector& x, const Vector& y,
                               const Vector& y_hat);

}  // namespace bilevel
