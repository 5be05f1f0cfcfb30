#include "bilevel/penalty.hpp"

#include "bilevel/errors.hpp"

namespace bilevel {

namespace {

void check_dims(const ProblemSpec& p, const Vector& x, const Vector& y) {
  if (x.size() != p.dx || y.size() != p.dy) {
    throw InvalidArgument("point dimensions do not match problem '" + p.name + "'");
  }
}

}  // namespace

double penalty_value(const ProblemSpec& p, PenaltyKind kind, const Vector& x, const Vector& y,
                     std::optional<double> v_hat) {
  check_dims(p, x, y);
  switch (kind) {
    case PenaltyKind::ValueGap: {
      if (!v_hat) {
        if (!p.has_v()) {
          throw MissingOracle("value-gap penalty needs v(x) but problem '" + p.name +
                              "' has no analytic value function and none was supplied");
        }
        v_hat = p.analytic_v(x);
      }
      return p.g_eval(x, y) - *v_hat;
    }
    case PenaltyKind::GradNormSq:
      return grad_y_g(p, x, y).squaredNorm();
    case PenaltyKind::GradNorm:
      return grad_y_g(p, x, y).norm();
  }
  throw InvalidArgument("unknown penalty kind");
}

double penalized_objective(const ProblemSpec& p, PenaltyKind kind, double gamma, const Vector& x,
                           const Vector& y, std::optional<double> v_hat) {
  if (gamma == 0.0) {
    check_dims(p, x, y);
    return p.f_eval(x, y);
  }
  return p.f_eval(x, y) + gamma * penalty_value(p, kind, x, y, v_hat);
}

Vector penalized_gradient_value_gap(const ProblemSpec& p, double gamma, const Vector& x,
                                    const Vector& y, const Vector& y_hat) {
  check_dims(p, x, y);
  if (y_hat.size() != p.dy) throw InvalidArgument("y_hat has the wrong dimension");
  Vector grad = p.f_grad(x, y) + gamma * p.g_grad(x, y);
  if (p.dx > 0) grad.head(p.dx) -= gamma * grad_x_g(p, x, y_hat);
  return grad;
}

Vector penalized_gradient_grad_norm_sq(const ProblemSpec& p, double gamma, const Vector& x,
                                       const Vector& y) {
  check_dims(p, x, y);
  if (!p.has_hvp()) {
    throw MissingOracle("grad-norm-sq penalty gradient needs Hessian-vector products; problem '" +
                        p.name + "' has none");
  }
  const Vector gy = grad_y_g(p, x, y);
  Vector grad = p.f_grad(x, y);
  if (p.dx > 0) grad.head(p.dx) += 2.0 * gamma * p.g_hvp_xy(x, y, gy);
  grad.tail(p.dy) += 2.0 * gamma * p.g_hvp_yy(x, y, gy);
  return grad;
}

ProjectedGradient projected_gradient_metric(const ProblemSpec& p, double alpha, const Vector& x,
                                            const Vector& y, const Vector& grad) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  const Vector z = join(x, y);
  if (grad.size() != z.size()) throw InvalidArgument("gradient has the wrong dimension");
  ProjectedGradient out;
  out.G = (z - project_product(p.upper_set, p.lower_set, z - alpha * grad)) / alpha;
  out.norm_sq = out.G.squaredNorm();
  return out;
}

ProjectedGradient projected_gradient_metric(const ProblemSpec& p, PenaltyKind kind, double gamma,
                                            double alpha, const Vector& x, const Vector& y,
                                            const std::optional<Vector>& y_hat) {
  switch (kind) {
    case PenaltyKind::ValueGap: {
      Vector yh;
      if (y_hat) {
        yh = *y_hat;
      } else if (p.has_lower_solution()) {
        yh = p.analytic_lower_solution(x);
      } else {
        throw MissingOracle("value-gap metric needs a lower-level solution for problem '" + p.name +
                            "'");
      }
      return projected_gradient_metric(p, alpha, x, y,
                                       penalized_gradient_value_gap(p, gamma, x, y, yh));
    }
    case PenaltyKind::GradNormSq:
      return projected_gradient_metric(p, alpha, x, y,
                                       penalized_gradient_grad_norm_sq(p, gamma, x, y));
    case PenaltyKind::GradNorm:
      throw InvalidArgument("grad-norm penalty is nonsmooth; use the prox-gradient mapping");
  }
  throw InvalidArgument("unknown penalty kind");
}

TracedPenalty traced_value_gap(const ProblemSpec& p, const Vector& x, const Vector& y,
                               const Vector& y_hat) {
  TracedPenalty out;
  double v;
  if (p.has_v()) {
    v = p.analytic_v(x);
  } else {
    v = p.g_eval(x, y_hat);
    out.v_estimated = true;
  }
  out.value = p.g_eval(x, y) - v;
  if (out.value < 0.0) {
    if (out.value >= kValueGapClampFloor) {
      out.value = 0.0;
      out.clamped = true;
    } else {
      out.negative = true;
    }
  }
  return out;
}

}  // namespace bilevel
