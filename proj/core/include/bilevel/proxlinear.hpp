#pragma once

#include "bilevel/problem.hpp"

namespace bilevel {

/// Local model around z^k of F~ = f + gamma |grad_y g|:
/// l(z) = f(z^k) + <grad f(z^k), z - z^k> + gamma |c + J (z - z^k)| + |z - z^k|^2 / (2t)
/// with c = grad_y g(z^k) and J its dense Jacobian.
struct SurrogateModel {
  Vector anchor;
  double f_anchor = 0.0;
  Vector grad_f;
  Vector c;
  Matrix J;
  double gamma = 0.0;
  double t = 1.0;
};

SurrogateModel build_surrogate(const ProblemSpec& p, const Vector& x, const Vector& y, double gamma,
                               double t);

double surrogate_eval(const SurrogateModel& m, const Vector& z);

/// F~(x, y) = f(x, y) + gamma |grad_y g(x, y)|.
double nonsmooth_penalized_objective(const ProblemSpec& p, double gamma, const Vector& x,
                                     const Vector& y);

struct SubproblemResult {
  Vector z;
  double primal = 0.0;  // l(z)
  double dual = 0.0;    // certified lower bound on min l
  double gap = 0.0;     // primal - dual
  Vector u;             // dual multiplier, |u| <= gamma
  int iters = 0;
};

/// Minimizes l over the box-like set upper x lower by accelerated
/// projected ascent on the dual ball |u| <= gamma. Returns once the
/// duality gap is at most delta; throws BudgetExceeded otherwise.
SubproblemResult solve_subproblem(const SurrogateModel& m, const ConstraintSet& upper,
                                  const ConstraintSet& lower, double delta, int max_iters = 200000,
                                  const Vector& u0 = Vector());

struct ProxGradientMapping {
  double norm_sq = 0.0;
  Vector G;
  SubproblemResult solution;
};

/// G_t = (z^k - argmin l) / t with a tight tolerance 1e-12 (1 + |l(z^k)|).
ProxGradientMapping prox_gradient_mapping(const SurrogateModel& m, const ConstraintSet& upper,
                                          const ConstraintSet& lower, int max_iters = 200000);

/// Step bound 1 / (L_f + gamma L_g2) for a problem, if its constants allow.
std::optional<double> prox_linear_step_bound(const ProblemSpec& p, double gamma);

/// Prox-linear outer loop with delta_k = delta0 / (k + 1)^q. Trace rows
/// record F~ in F_gamma, |grad_y g| in penalty_value, |G_t|^2 in
/// proj_grad_norm_sq and the certified gap in subproblem_gap.
SolveReport pbpl(const ProblemSpec& p, const SolverConfig& config);

}  // namespace bilevel
