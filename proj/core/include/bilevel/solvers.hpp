#pragma once

#include "bilevel/inner.hpp"
#include "bilevel/penalty.hpp"

namespace bilevel {

/// Generic penalty loop. ValueGap runs an inner solve per iteration
/// (projected when the lower set is bounded); GradNormSq uses the exact
/// penalty gradient. alpha must be set or derivable from the step rule.
SolveReport pbgd(const ProblemSpec& p, const SolverConfig& config);

/// V-PBGD: value-gap penalty, warm-started inner GD, unconstrained lower level.
/// Auto alpha = 1 / (L_f + gamma (2 L_g + L_g^2 mu)), auto beta = 1 / L_g.
SolveReport v_pbgd(const ProblemSpec& p, const SolverConfig& config);

/// V-PBGD over a bounded lower set with projected inner GD.
/// Auto alpha = 1 / (L_f + gamma (L_g + L_v)), auto beta = 1 / L_g.
SolveReport v_pbgd_constrained(const ProblemSpec& p, const SolverConfig& config);

/// PBGD with the squared gradient-norm penalty. alpha must be given.
SolveReport g_pbgd(const ProblemSpec& p, const SolverConfig& config);

/// Stochastic V-PBGD with minibatch outer steps and weighted inner SGD.
SolveReport v_pbsgd(const ProblemSpec& p, const SolverConfig& config);

/// Outer step size the named algorithm would use for this problem and config.
double resolve_alpha(const ProblemSpec& p, const SolverConfig& config, std::string_view algorithm);

}  // namespace bilevel
