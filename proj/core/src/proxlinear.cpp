#include "bilevel/proxlinear.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "bilevel/errors.hpp"
#include "bilevel/inner.hpp"

namespace bilevel {

SurrogateModel build_surrogate(const ProblemSpec& p, const Vector& x, const Vector& y, double gamma,
                               double t) {
  if (!(t > 0.0)) throw InvalidArgument("prox-linear step t must be > 0");
  if (!(gamma >= 0.0)) throw InvalidArgument("gamma must be >= 0");
  SurrogateModel m;
  m.anchor = join(x, y);
  m.f_anchor = p.f_eval(x, y);
  m.grad_f = p.f_grad(x, y);
  m.c = grad_y_g(p, x, y);
  m.J = lower_gradient_jacobian(p, x, y);
  m.gamma = gamma;
  m.t = t;
  return m;
}

double surrogate_eval(const SurrogateModel& m, const Vector& z) {
  if (z.size() != m.anchor.size()) throw InvalidArgument("surrogate dimension mismatch");
  const Vector d = z - m.anchor;
  return m.f_anchor + m.grad_f.dot(d) + m.gamma * (m.c + m.J * d).norm() +
         d.squaredNorm() / (2.0 * m.t);
}

double nonsmooth_penalized_objective(const ProblemSpec& p, double gamma, const Vector& x,
                                     const Vector& y) {
  return p.f_eval(x, y) + gamma * grad_y_g(p, x, y).norm();
}

namespace {

Vector project_ball(const Vector& u, double radius) {
  const double n = u.norm();
  if (n <= radius) return u;
  if (radius == 0.0) return Vector::Zero(u.size());
  return (radius / n) * u;
}

struct DualPoint {
  Vector z;
  Vector d;
  double value;
  Vector grad;
};

}  // namespace

SubproblemResult solve_subproblem(const SurrogateModel& m, const ConstraintSet& upper,
                                  const ConstraintSet& lower, double delta, int max_iters,
                                  const Vector& u0) {
  if (!(delta > 0.0)) throw InvalidArgument("subproblem tolerance must be > 0");
  if (!upper.is_box_like() || !lower.is_box_like()) {
    throw InvalidConfiguration("prox-linear subproblem supports full-space or box sets only");
  }
  const Eigen::Index n = m.anchor.size();
  if (upper.dim() + lower.dim() != n) throw InvalidArgument("subproblem dimension mismatch");

  const auto eval = [&](const Vector& u) {
    DualPoint dp;
    dp.z = project_product(upper, lower, m.anchor - m.t * (m.grad_f + m.J.transpose() * u));
    dp.d = dp.z - m.anchor;
    const Vector r = m.c + m.J * dp.d;
    dp.value = m.f_anchor + m.grad_f.dot(dp.d) + u.dot(r) + dp.d.squaredNorm() / (2.0 * m.t);
    dp.grad = r;
    return dp;
  };

  const double lip = m.t * m.J.squaredNorm();
  const double step = lip > 0.0 ? 1.0 / lip : 1e12;

  Vector u = u0.size() == m.c.size() ? project_ball(u0, m.gamma) : Vector::Zero(m.c.size());
  Vector u_prev = u;
  double momentum = 1.0;

  SubproblemResult best;
  best.primal = std::numeric_limits<double>::infinity();
  best.dual = -std::numeric_limits<double>::infinity();

  DualPoint cur = eval(u);
  double last_dual = cur.value;
  for (int it = 0; it <= max_iters; ++it) {
    const double primal = surrogate_eval(m, cur.z);
    if (primal < best.primal) {
      best.primal = primal;
      best.z = cur.z;
    }
    if (cur.value > best.dual) {
      best.dual = cur.value;
      best.u = u;
    }
    best.gap = best.primal - best.dual;
    best.iters = it;
    if (best.gap <= delta) return best;
    if (it == max_iters) break;

    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const Vector v = u + ((momentum - 1.0) / momentum_next) * (u - u_prev);
    const DualPoint at_v = eval(v);
    u_prev = u;
    u = project_ball(v + step * at_v.grad, m.gamma);
    momentum = momentum_next;
    cur = eval(u);
    if (cur.value < last_dual) {
      // function-value restart
      momentum = 1.0;
      u_prev = u;
    }
    last_dual = cur.value;
  }
  throw BudgetExceeded("prox-linear subproblem did not reach the requested gap", best.gap);
}

ProxGradientMapping prox_gradient_mapping(const SurrogateModel& m, const ConstraintSet& upper,
                                          const ConstraintSet& lower, int max_iters) {
  const double at_anchor = surrogate_eval(m, m.anchor);
  const double delta = 1e-12 * (1.0 + std::abs(at_anchor));
  ProxGradientMapping out;
  out.solution = solve_subproblem(m, upper, lower, delta, max_iters);
  out.G = (m.anchor - out.solution.z) / m.t;
  out.norm_sq = out.G.squaredNorm();
  return out;
}

std::optional<double> prox_linear_step_bound(const ProblemSpec& p, double gamma) {
  if (!p.constants.L_f || !p.constants.L_g2) return std::nullopt;
  const double denom = *p.constants.L_f + gamma * *p.constants.L_g2;
  if (denom <= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

SolveReport pbpl(const ProblemSpec& p, const SolverConfig& config) {
  config.validate(true);
  p.validate();
  if (!(config.gamma > 0.0)) throw InvalidArgument("solvers need gamma > 0");
  if (!p.lower_unconstrained()) {
    throw InvalidConfiguration("pbpl needs an unconstrained lower level");
  }
  if (!p.has_hvp()) {
    throw MissingOracle("pbpl needs Hessian-vector products; problem '" + p.name + "' has none");
  }
  if (!p.upper_set.is_box_like()) {
    throw InvalidConfiguration("pbpl supports full-space or box upper sets only");
  }

  SolveReport report;
  report.algorithm = "pbpl";
  report.config = config;
  double t;
  if (config.t) {
    t = *config.t;
  } else {
    const std::optional<double> bound = prox_linear_step_bound(p, config.gamma);
    if (!bound) throw InvalidConfiguration("pbpl needs t or the constants L_f and L_g2");
    if (std::isinf(*bound)) {
      t = 1.0;
      report.notes.push_back("L_f + gamma L_g2 = 0, every t conforms; using t = 1");
    } else {
      t = *bound;
    }
  }
  report.t_used = t;

  Vector x = default_start(p.upper_set, config.x0);
  Vector y = default_start(p.lower_set, config.y0);
  const double tol_sq = config.tol_proj_grad * config.tol_proj_grad;
  Vector u_warm;

  for (int k = 0; k < config.K; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const SurrogateModel model = build_surrogate(p, x, y, config.gamma, t);
    IterateRecord rec;
    rec.k = k;
    rec.f_value = model.f_anchor;
    rec.penalty_value = model.c.norm();
    rec.F_gamma = rec.f_value + config.gamma * rec.penalty_value;

    const ProxGradientMapping mapping =
        prox_gradient_mapping(model, p.upper_set, p.lower_set, config.subproblem_max_iters);
    rec.proj_grad_norm_sq = mapping.norm_sq;
    if (rec.proj_grad_norm_sq <= tol_sq) {
      if (config.record_timing) {
        rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      }
      report.trace.push_back(rec);
      report.termination = Termination::StationarityReached;
      break;
    }

    const double delta_k = config.delta0 / std::pow(static_cast<double>(k + 1), config.q);
    const SubproblemResult step = solve_subproblem(model, p.upper_set, p.lower_set, delta_k,
                                                   config.subproblem_max_iters, u_warm);
    u_warm = step.u;
    rec.inner_iters = step.iters;
    rec.subproblem_gap = step.gap;
    if (config.record_timing) {
      rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
    }
    report.trace.push_back(rec);

    if (!step.z.allFinite() || step.z.norm() > kDivergenceThreshold) {
      report.termination = Termination::Diverged;
      report.notes.push_back("prox-linear iterate exceeded the divergence threshold at k=" +
                             std::to_string(k));
      break;
    }
    x = step.z.head(p.dx);
    y = step.z.tail(p.dy);
  }
  report.x = x;
  report.y = y;
  return report;
}

}  // namespace bilevel
