#pragma once

#include <functional>
#include <optional>
#include <string>

#include "bilevel/constraint_set.hpp"
#include "bilevel/types.hpp"

namespace bilevel {

using ScalarFn = std::function<double(const Vector& x, const Vector& y)>;
using GradFn = std::function<Vector(const Vector& x, const Vector& y)>;
using ProductFn = std::function<Vector(const Vector& x, const Vector& y, const Vector& v)>;
using SampleFn = std::function<Vector(const Vector& x, const Vector& y, Rng& rng)>;

/// A bilevel instance: min f(x,y) s.t. y in argmin_{y in U} g(x,y), x in C.
///
/// Oracles must be free of side effects so that concurrent solves can
/// share one instance. Gradients return the stacked (x-block, y-block).
/// Stochastic oracles must consume the generator identically regardless
/// of the evaluation point, so that one saved generator state replays the
/// same sample at two points.
struct ProblemSpec {
  std::string name;
  Eigen::Index dx = 0;
  Eigen::Index dy = 0;

  ScalarFn f_eval;
  GradFn f_grad;
  ScalarFn g_eval;
  GradFn g_grad;

  ProductFn g_hvp_yy;  // v in R^dy  -> grad_yy g v in R^dy
  ProductFn g_hvp_xy;  // v in R^dy  -> grad_xy g v in R^dx
  ProductFn g_hvp_yx;  // v in R^dx  -> grad_yx g v in R^dy

  ConstraintSet upper_set;
  ConstraintSet lower_set;

  std::function<Vector(const Vector& x)> analytic_lower_solution;
  std::function<double(const Vector& x)> analytic_v;

  SampleFn f_grad_sample;
  SampleFn g_grad_sample;

  SmoothnessConstants constants;

  bool has_hvp() const { return static_cast<bool>(g_hvp_yy) && static_cast<bool>(g_hvp_xy); }
  bool has_lower_solution() const { return static_cast<bool>(analytic_lower_solution); }
  bool has_v() const { return static_cast<bool>(analytic_v); }
  bool lower_unconstrained() const { return !lower_set.bounded(); }

  /// Throws InvalidArgument when required oracles are missing or the
  /// constraint sets disagree with the dimensions.
  void validate() const;
};

/// grad_y g(x, y).
Vector grad_y_g(const ProblemSpec& p, const Vector& x, const Vector& y);
/// grad_x g(x, y).
Vector grad_x_g(const ProblemSpec& p, const Vector& x, const Vector& y);

/// Dense Jacobian of grad_y g at (x, y): the d_y by (d_x + d_y) matrix
/// [grad_yx g, grad_yy g]. Needs g_hvp_yy and g_hvp_xy.
Matrix lower_gradient_jacobian(const ProblemSpec& p, const Vector& x, const Vector& y);

/// Default starting point: the given vector, or the projection of 0.
Vector default_start(const ConstraintSet& set, const Vector& given);

}  // namespace bilevel
