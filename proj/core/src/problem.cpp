#include "bilevel/problem.hpp"

#include "bilevel/errors.hpp"

namespace bilevel {

void ProblemSpec::validate() const {
  if (dx < 0 || dy < 1) throw InvalidArgument("problem '" + name + "' has invalid dimensions");
  if (!f_eval || !f_grad || !g_eval || !g_grad) {
    throw InvalidArgument("problem '" + name + "' lacks a first-order oracle");
  }
  if (upper_set.dim() != dx) throw InvalidArgument("upper set dimension differs from d_x");
  if (lower_set.dim() != dy) throw InvalidArgument("lower set dimension differs from d_y");
  constants.validate();
}

Vector grad_y_g(const ProblemSpec& p, const Vector& x, const Vector& y) {
  return p.g_grad(x, y).tail(p.dy);
}

Vector grad_x_g(const ProblemSpec& p, const Vector& x, const Vector& y) {
  return p.g_grad(x, y).head(p.dx);
}

Matrix lower_gradient_jacobian(const ProblemSpec& p, const Vector& x, const Vector& y) {
  if (!p.has_hvp()) {
    throw MissingOracle("problem '" + p.name + "' has no Hessian-vector product oracles");
  }
  Matrix J(p.dy, p.dx + p.dy);
  for (Eigen::Index j = 0; j < p.dy; ++j) {
    const Vector e = Vector::Unit(p.dy, j);
    J.col(p.dx + j) = p.g_hvp_yy(x, y, e);
    // column j of grad_xy g is row j of grad_yx g
    if (p.dx > 0) J.block(j, 0, 1, p.dx) = p.g_hvp_xy(x, y, e).transpose();
  }
  return J;
}

Vector default_start(const ConstraintSet& set, const Vector& given) {
  if (given.size() == 0) return set.project(Vector::Zero(set.dim()));
  if (given.size() != set.dim()) throw InvalidArgument("starting point has the wrong dimension");
  if (!given.allFinite()) throw InvalidArgument("starting point is not finite");
  return set.project(given);
}

}  // namespace bilevel
