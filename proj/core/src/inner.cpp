#include "bilevel/inner.hpp"

#include <algorithm>
#include <cmath>

#include "bilevel/errors.hpp"

namespace bilevel {

namespace {

void guard(const Vector& w, const Vector& last, int t) {
  if (!w.allFinite() || w.norm() > kDivergenceThreshold) {
    throw Diverged("inner iterate diverged at step " + std::to_string(t), last, t);
  }
}

void fill_stats(const ProblemSpec& p, const Vector& x, InnerResult& r, bool projected,
                double beta) {
  const Vector gy = grad_y_g(p, x, r.y_hat);
  if (projected) {
    r.final_grad_norm = ((r.y_hat - p.lower_set.project(r.y_hat - beta * gy)) / beta).norm();
  } else {
    r.final_grad_norm = gy.norm();
  }
  if (p.has_v()) r.final_lower_gap = p.g_eval(x, r.y_hat) - p.analytic_v(x);
}

void check_inputs(const ProblemSpec& p, const Vector& x, const Vector& y0, int T) {
  if (x.size() != p.dx || y0.size() != p.dy) throw InvalidArgument("inner solve dimension mismatch");
  if (T < 0) throw InvalidArgument("inner iteration count must be >= 0");
}

}  // namespace

InnerResult lower_gd(const ProblemSpec& p, const Vector& x, const Vector& y0, double beta, int T) {
  check_inputs(p, x, y0, T);
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  if (!p.lower_unconstrained()) {
    throw InvalidConfiguration("lower_gd needs an unconstrained lower level; use projected GD");
  }
  InnerResult r;
  r.y_hat = y0;
  for (int t = 1; t <= T; ++t) {
    Vector next = r.y_hat - beta * grad_y_g(p, x, r.y_hat);
    guard(next, r.y_hat, t);
    r.y_hat = std::move(next);
  }
  r.iters = T;
  fill_stats(p, x, r, false, beta);
  return r;
}

InnerResult lower_projected_gd(const ProblemSpec& p, const Vector& x, const Vector& y0,
                               double beta, int T) {
  check_inputs(p, x, y0, T);
  if (!(beta > 0.0)) throw InvalidArgument("beta must be > 0");
  InnerResult r;
  r.y_hat = y0;
  for (int t = 1; t <= T; ++t) {
    Vector next = p.lower_set.project(r.y_hat - beta * grad_y_g(p, x, r.y_hat));
    guard(next, r.y_hat, t);
    r.y_hat = std::move(next);
  }
  r.iters = T;
  fill_stats(p, x, r, true, beta);
  return r;
}

std::vector<double> sgd_sampling_weights(int T, double L_g) {
  if (T < 1) throw InvalidArgument("weights need T >= 1");
  if (!(L_g > 0.0)) throw InvalidArgument("L_g must be > 0");
  std::vector<double> w(static_cast<std::size_t>(T));
  double sum = 0.0;
  for (int t = 1; t <= T; ++t) {
    w[static_cast<std::size_t>(t - 1)] = 1.0 / (L_g * std::sqrt(static_cast<double>(t)));
    sum += w[static_cast<std::size_t>(t - 1)];
  }
  for (double& v : w) v /= sum;
  return w;
}

double sgd_step_square_sum(int T, double L_g) {
  double s = 0.0;
  for (int t = 1; t <= T; ++t) s += 1.0 / (L_g * L_g * static_cast<double>(t));
  return s;
}

InnerResult lower_sgd_weighted(const ProblemSpec& p, const Vector& x, const Vector& y0, int T,
                               double L_g, Rng& rng) {
  check_inputs(p, x, y0, T);
  if (!p.g_grad_sample) {
    throw MissingOracle("problem '" + p.name + "' has no stochastic lower-level gradient");
  }
  if (!(L_g > 0.0)) throw InvalidArgument("L_g must be > 0");
  InnerResult r;
  r.y_hat = y0;
  if (T == 0) {
    fill_stats(p, x, r, false, 1.0 / L_g);
    return r;
  }
  const std::vector<double> weights = sgd_sampling_weights(T, L_g);
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  // Draw the index first so the step samples do not depend on it.
  const int chosen = pick(rng) + 1;

  Vector w = y0;
  for (int t = 1; t <= T; ++t) {
    const double beta_t = 1.0 / (L_g * std::sqrt(static_cast<double>(t)));
    const Vector sample = p.g_grad_sample(x, w, rng);
    Vector next = w - beta_t * sample.tail(p.dy);
    if (!p.lower_unconstrained()) next = p.lower_set.project(next);
    guard(next, w, t);
    w = std::move(next);
    if (t == chosen) r.y_hat = w;
  }
  r.iters = T;
  fill_stats(p, x, r, !p.lower_unconstrained(), 1.0 / L_g);
  return r;
}

int inner_iteration_schedule(int k, double alpha, double beta, double gamma, double mu,
                             double L_g, ScheduleMode mode) {
  if (k < 1) throw InvalidArgument("schedule index k must be >= 1");
  if (!(alpha > 0.0) || !(beta > 0.0) || !(mu > 0.0) || !(L_g > 0.0)) {
    throw InvalidArgument("schedule constants must be positive");
  }
  const double c = 1.0 - beta / (2.0 * mu);
  if (!(c > 0.0 && c < 1.0)) {
    throw InvalidArgument("contraction factor 1 - beta/(2 mu) must lie in (0, 1)");
  }
  const double log_c = std::log(c);
  const auto neg_log_c = [&](double v) { return -std::log(v) / log_c; };
  double bound;
  if (mode == ScheduleMode::Unconstrained) {
    bound = std::max(neg_log_c(16.0 * L_g * L_g), 2.0 * neg_log_c(2.0 * alpha * k));
  } else {
    if (!(gamma > 0.0)) throw InvalidArgument("gamma must be > 0");
    bound = 2.0 * neg_log_c(2.0 * alpha * gamma * k);
  }
  const double T = std::ceil(bound);
  if (T > 1e6) throw InvalidArgument("inner schedule exceeds 1e6 iterations");
  return std::max(1, static_cast<int>(T));
}

}  // namespace bilevel
