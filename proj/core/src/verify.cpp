#include "bilevel/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bilevel/errors.hpp"
#include "bilevel/inner.hpp"
#include "bilevel/penalty.hpp"
#include "bilevel/proxlinear.hpp"

namespace bilevel {

namespace {

constexpr std::size_t kMaxDetails = 5;

class Tracker {
 public:
  Tracker(std::string name, double tolerance) {
    report_.name = std::move(name);
    report_.tolerance = tolerance;
  }

  // Records a residual; fails the check when it exceeds the tolerance.
  void observe(double residual, const std::string& where) {
    ++report_.samples;
    if (!(residual <= report_.tolerance)) {
      report_.status = CheckStatus::Failed;
      if (report_.details.size() < kMaxDetails) {
        std::ostringstream msg;
        msg << where << ": residual " << residual;
        report_.details.push_back(msg.str());
      }
    }
    if (std::isnan(residual)) {
      report_.worst_residual = residual;
    } else if (!std::isnan(report_.worst_residual)) {
      report_.worst_residual = std::max(report_.worst_residual, residual);
    }
  }

  // A boolean condition that is not a residual.
  void require(bool ok, const std::string& what) {
    if (!ok) {
      report_.status = CheckStatus::Failed;
      if (report_.details.size() < kMaxDetails) report_.details.push_back(what);
    }
  }

  CheckReport& report() { return report_; }

 private:
  CheckReport report_;
};

CheckReport skipped(std::string name, std::string reason) {
  CheckReport r;
  r.name = std::move(name);
  r.status = CheckStatus::Skipped;
  r.details.push_back(std::move(reason));
  return r;
}

double rel_error(const Vector& analytic, const Vector& reference) {
  return (analytic - reference).norm() / (1.0 + analytic.norm());
}

std::string point_text(const Vector& x, const Vector& y) {
  std::ostringstream out;
  out.precision(6);
  if (x.size() <= 3 && y.size() <= 3) {
    out << "x=(" << x.transpose() << ") y=(" << y.transpose() << ")";
  } else {
    out << "|x|=" << x.norm() << " |y|=" << y.norm();
  }
  return out.str();
}

Vector random_unit(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  const double norm = v.norm();
  return norm > 0.0 ? Vector(v / norm) : Vector(Vector::Unit(n, 0));
}

}  // namespace

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Passed:
      return "passed";
    case CheckStatus::Failed:
      return "failed";
    case CheckStatus::Skipped:
      return "skipped";
  }
  return "unknown";
}

std::string_view to_string(Bound t) {
  switch (t) {
    case Bound::Unconstrained:
      return "value-gap";
    case Bound::Constrained:
      return "constrained";
    case Bound::ProxLinear:
      return "prox-linear";
  }
  return "unknown";
}

Vector finite_difference_grad(const std::function<double(const Vector&)>& fn, const Vector& z,
                              double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  Vector grad(z.size());
  Vector work = z;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double saved = work[i];
    work[i] = saved + h;
    const double up = fn(work);
    work[i] = saved - h;
    const double down = fn(work);
    work[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

CheckReport check_gradients(const ProblemCatalogEntry& entry, int n_points, Rng& rng) {
  const ProblemSpec& p = entry.spec;
  Tracker t(entry.name + "/gradients", kGradientTolerance);
  const double h = kFiniteDifferenceStep;
  for (int s = 0; s < n_points; ++s) {
    const auto [x, y] = entry.sample_point(rng);
    const Vector z = join(x, y);
    const std::string where = point_text(x, y);
    auto split = [&](const std::function<double(const Vector&, const Vector&)>& fn) {
      return [&, fn](const Vector& zz) { return fn(zz.head(p.dx), zz.tail(p.dy)); };
    };
    t.observe(rel_error(p.f_grad(x, y), finite_difference_grad(split(p.f_eval), z, h)),
              "f_grad at " + where);
    t.observe(rel_error(p.g_grad(x, y), finite_difference_grad(split(p.g_eval), z, h)),
              "g_grad at " + where);

    const Vector u = random_unit(p.dy, rng);
    if (p.g_hvp_yy) {
      const Vector fd = (grad_y_g(p, x, y + h * u) - grad_y_g(p, x, y - h * u)) / (2.0 * h);
      t.observe(rel_error(p.g_hvp_yy(x, y, u), fd), "g_hvp_yy at " + where);
    }
    if (p.g_hvp_xy && p.dx > 0) {
      const Vector fd = (grad_x_g(p, x, y + h * u) - grad_x_g(p, x, y - h * u)) / (2.0 * h);
      t.observe(rel_error(p.g_hvp_xy(x, y, u), fd), "g_hvp_xy at " + where);
    }
    if (p.g_hvp_yx && p.dx > 0) {
      const Vector v = random_unit(p.dx, rng);
      const Vector fd = (grad_y_g(p, x + h * v, y) - grad_y_g(p, x - h * v, y)) / (2.0 * h);
      t.observe(rel_error(p.g_hvp_yx(x, y, v), fd), "g_hvp_yx at " + where);
    }
  }
  return t.report();
}

CheckReport check_lower_solution(const ProblemCatalogEntry& entry, int n_points, Rng& rng) {
  const ProblemSpec& p = entry.spec;
  if (!p.has_lower_solution()) {
    return skipped(entry.name + "/lower-solution", "no lower-level solution oracle");
  }
  Tracker t(entry.name + "/lower-solution", 1e-8);
  for (int s = 0; s < n_points; ++s) {
    const Vector x = entry.sample_point(rng).first;
    const Vector ys = p.analytic_lower_solution(x);
    t.require(p.lower_set.contains(ys), "solution outside the lower set");
    const Vector gy = grad_y_g(p, x, ys);
    double residual;
    if (p.lower_unconstrained()) {
      residual = gy.norm();
    } else {
      residual = (ys - p.lower_set.project(ys - gy)).norm();
    }
    t.observe(residual, "x=" + point_text(x, ys));
  }
  return t.report();
}

CheckReport check_squared_distance_bound(const ProblemCatalogEntry& entry, PenaltyKind kind,
                                         double rho, int n_samples, Rng& rng) {
  const ProblemSpec& p = entry.spec;
  std::ostringstream name;
  name << entry.name << "/growth/" << to_string(kind) << "/rho=" << rho;
  if (!p.has_lower_solution()) throw MissingOracle("squared-distance check needs a solution oracle");
  if (kind == PenaltyKind::ValueGap && !p.has_v()) {
    throw MissingOracle("squared-distance check needs v(x)");
  }
  if (kind != PenaltyKind::ValueGap && !p.lower_unconstrained()) {
    return skipped(name.str(), "gradient penalties need an unconstrained lower level");
  }
  constexpr double kRoundoff = 1e-12;
  Tracker t(name.str(), kRoundoff);
  for (int s = 0; s < n_samples; ++s) {
    const auto [x, y] = entry.sample_point(rng);
    const Vector ys = p.analytic_lower_solution(x);
    const double v = kind == PenaltyKind::ValueGap ? p.analytic_v(x) : 0.0;
    const std::optional<double> v_hat =
        kind == PenaltyKind::ValueGap ? std::optional<double>(v) : std::nullopt;
    const double pen = penalty_value(p, kind, x, y, v_hat);
    const double d = (y - ys).norm();
    const std::string where = point_text(x, y);

    // Nonnegativity and the squared-distance bound, relative to the scale of d^2.
    t.observe(std::max(0.0, -pen) / (1.0 + std::abs(v)), "p < 0 at " + where);
    t.observe(std::max(0.0, d * d - rho * pen) / (1.0 + d * d), "rho p < d^2 at " + where);
    if (pen <= 1e-10) t.require(d <= 1e-5, "p <= 1e-10 but d > 1e-5 at " + where);

    // On-set companion sample.
    const double pen_on = penalty_value(p, kind, x, ys, v_hat);
    t.require(pen_on <= 1e-10 && pen_on >= -1e-10,
              "penalty does not vanish on the solution set at x of " + where);
  }
  t.report().estimated = entry.solution_numeric;
  return t.report();
}

CheckReport check_danskin(const ProblemCatalogEntry& entry, const Vector& x, double h) {
  const ProblemSpec& p = entry.spec;
  if (!p.has_v() || !p.has_lower_solution()) {
    return skipped(entry.name + "/danskin", "needs v(x) and a lower-level solution");
  }
  Tracker t(entry.name + "/danskin", kDanskinTolerance);
  const Vector fd = finite_difference_grad([&](const Vector& xx) { return p.analytic_v(xx); }, x, h);
  const Vector analytic = grad_x_g(p, x, p.analytic_lower_solution(x));
  t.observe(rel_error(analytic, fd), x.size() <= 3 ? "x=" + point_text(x, Vector()) : "sampled x");
  return t.report();
}

CheckReport check_projection_properties(const ConstraintSet& set, int n_pairs, Rng& rng,
                                        double scale, const std::string& label) {
  Tracker t("projection/" + (label.empty() ? set.describe() : label), 1e-12);
  std::uniform_real_distribution<double> coord(-scale, scale);
  auto draw = [&]() {
    Vector v(set.dim());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = coord(rng);
    return v;
  };
  for (int s = 0; s < n_pairs; ++s) {
    const Vector u = draw();
    const Vector v = draw();
    const Vector pu = set.project(u);
    const Vector pv = set.project(v);
    const double unit = 1.0 + pu.norm();
    t.require(set.contains(pu, 1e-12 * unit), "projection left the set");
    t.observe((set.project(pu) - pu).norm() / unit, "idempotence");
    t.observe(std::max(0.0, (pu - pv).norm() - (u - v).norm()) / unit, "non-expansiveness");
    // Fixed point: a point of the set projects to itself.
    t.observe((set.project(pv) - pv).norm() / (1.0 + pv.norm()), "fixed point");
  }
  return t.report();
}

CheckReport check_inner_rate(const ProblemCatalogEntry& entry, int n_samples, int T_max, Rng& rng) {
  const ProblemSpec& p = entry.spec;
  const std::string name = entry.name + "/inner-rate";
  if (!p.lower_unconstrained()) return skipped(name, "lower level is constrained");
  if (!p.has_lower_solution() || !p.has_v()) return skipped(name, "needs S(x) and v(x)");
  if (!p.constants.mu || !p.constants.L_g) return skipped(name, "needs mu and L_g");
  const double mu = *p.constants.mu;
  const double beta = 1.0 / *p.constants.L_g;
  const double c = std::max(0.0, 1.0 - beta / (2.0 * mu));
  Tracker t(name, 1e-12);
  for (int s = 0; s < n_samples; ++s) {
    const auto [x, w1] = entry.sample_point(rng);
    const Vector ys = p.analytic_lower_solution(x);
    const double v = p.analytic_v(x);
    const double gap0 = p.g_eval(x, w1) - v;
    Vector w = w1;
    double g_prev = p.g_eval(x, w);
    for (int T = 1; T <= T_max; ++T) {
      w = w - beta * grad_y_g(p, x, w);
      const double g_now = p.g_eval(x, w);
      const double d2 = (w - ys).squaredNorm();
      const double rhs = mu * std::pow(c, T) * gap0;
      // Residuals are scaled by the initial gap so that roundoff stays comparable.
      t.observe(std::max(0.0, d2 - rhs) / (1.0 + gap0),
                "T=" + std::to_string(T) + " at " + point_text(x, w1));
      t.observe(std::max(0.0, g_now - g_prev) / (1.0 + std::abs(g_prev)),
                "descent T=" + std::to_string(T) + " at " + point_text(x, w1));
      g_prev = g_now;
    }
  }
  return t.report();
}

CheckReport check_projected_inner_decay(const ProblemCatalogEntry& entry, int n_samples, int T_max,
                                        Rng& rng) {
  const ProblemSpec& p = entry.spec;
  const std::string name = entry.name + "/projected-inner-decay";
  if (p.lower_unconstrained()) return skipped(name, "lower level is unconstrained");
  if (!p.has_v()) return skipped(name, "needs v(x)");
  if (!p.constants.mu || !p.constants.L_g) return skipped(name, "needs mu and L_g");
  const double beta = 1.0 / *p.constants.L_g;
  const double c = 1.0 - beta / (2.0 * *p.constants.mu);
  Tracker t(name, 1e-12);
  for (int s = 0; s < n_samples; ++s) {
    const auto [x, w1] = entry.sample_point(rng);
    const double v = p.analytic_v(x);
    const double gap0 = p.g_eval(x, w1) - v;
    const InnerResult r0 = lower_projected_gd(p, x, w1, beta, 0);
    Vector w = r0.y_hat;
    for (int T = 1; T <= T_max; ++T) {
      w = lower_projected_gd(p, x, w, beta, 1).y_hat;
      t.require(p.lower_set.contains(w), "iterate left the lower set");
      const double gap = p.g_eval(x, w) - v;
      t.observe(std::max(0.0, gap - std::pow(c, T) * gap0) / (1.0 + gap0),
                "T=" + std::to_string(T) + " at " + point_text(x, w1));
    }
  }
  return t.report();
}

double fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw InvalidArgument("slope fit needs at least 3 pairs");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [a, b] : pairs) {
    if (!(a > 0.0) || !(b > 0.0)) throw InvalidArgument("slope fit needs positive values");
    const double lx = std::log(a);
    const double ly = std::log(b);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(pairs.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw InvalidArgument("slope fit needs distinct abscissae");
  return (n * sxy - sx * sy) / denom;
}

CheckReport convergence_bound_check(const std::vector<IterateRecord>& trace, Bound bound,
                                    const BoundInputs& in) {
  if (trace.empty()) throw InvalidArgument("bound check needs a nonempty trace");
  const std::string name = std::string("bound/") + std::string(to_string(bound));
  if (!in.conforming) return skipped(name, "precondition violated: " + in.nonconforming_reason);

  std::vector<int> prefixes = in.prefixes;
  if (prefixes.empty()) {
    for (int K = 1; K <= static_cast<int>(trace.size()); ++K) prefixes.push_back(K);
  }
  std::sort(prefixes.begin(), prefixes.end());
  const bool settled = trace.back().proj_grad_norm_sq == 0.0;

  Tracker t(name, 0.0);
  t.report().estimated = in.C_g_estimated;
  double running_sum = 0.0;
  double running_min = std::numeric_limits<double>::infinity();
  double running_delta = 0.0;
  std::size_t consumed = 0;
  for (const int K : prefixes) {
    if (K < 1) throw InvalidArgument("prefix K must be >= 1");
    if (static_cast<std::size_t>(K) > trace.size() && !settled) {
      t.report().details.push_back("prefix K=" + std::to_string(K) + " exceeds the trace");
      continue;
    }
    // Rows past the end of a trace that stopped at an exact fixed point contribute 0.
    while (consumed < static_cast<std::size_t>(K) && consumed < trace.size()) {
      const IterateRecord& r = trace[consumed];
      running_sum += r.proj_grad_norm_sq;
      running_min = std::min(running_min, r.proj_grad_norm_sq);
      running_delta += r.subproblem_gap;
      ++consumed;
    }
    const double Kd = static_cast<double>(K);
    double lhs = 0.0, rhs = 0.0;
    switch (bound) {
      case Bound::Unconstrained:
        lhs = running_sum / Kd;
        rhs = 18.0 * (trace.front().F_gamma - in.C_f) / (in.alpha * Kd) +
              10.0 * in.L * in.L * in.L_g * in.L_g / Kd;
        break;
      case Bound::Constrained:
        lhs = running_sum / Kd;
        rhs = 8.0 * (trace.front().F_gamma - in.C_f) / (in.alpha * Kd) +
              3.0 * in.L_g * in.L_g * in.mu * in.C_g / Kd;
        break;
      case Bound::ProxLinear:
        lhs = running_min;
        rhs = 2.0 / in.t * (trace.front().F_gamma - in.C_f + running_delta) / Kd;
        break;
    }
    // Positive residual means the bound is violated.
    t.observe(lhs - rhs, "K=" + std::to_string(K));
  }
  if (t.report().samples == 0) {
    t.report().status = CheckStatus::Skipped;
    t.report().details.push_back("no prefix could be evaluated");
  }
  return t.report();
}

std::optional<std::string> bound_nonconformance(const ProblemSpec& p, const SolveReport& report,
                                                bool constrained) {
  const auto& k = p.constants;
  if (!k.L_f || !k.L_g || !k.mu || (constrained && !k.L_v)) {
    return std::string("problem lacks the constants the bound needs");
  }
  const SolverConfig& c = report.config;
  const double L_f = *k.L_f, L_g = *k.L_g, mu = *k.mu;
  const double alpha_max = constrained ? 1.0 / (L_f + c.gamma * (L_g + *k.L_v))
                                       : 1.0 / (L_f + c.gamma * (2.0 * L_g + L_g * L_g * mu));
  const double slack = 1.0 + 1e-12;
  if (report.alpha_used > alpha_max * slack) {
    std::ostringstream msg;
    msg << "alpha " << report.alpha_used << " exceeds " << alpha_max;
    return msg.str();
  }
  if (report.beta_used > slack / L_g) return std::string("beta exceeds 1/L_g");
  if (!c.warm_start) return std::string("inner solves are not warm-started");
  if (c.penalty != PenaltyKind::ValueGap && report.algorithm == "pbgd") {
    return std::string("bound covers the value-gap penalty only");
  }
  const double cb = 1.0 - report.beta_used / (2.0 * mu);
  for (const IterateRecord& r : report.trace) {
    int need = 1;
    if (cb > 0.0) {
      need = inner_iteration_schedule(r.k + 1, report.alpha_used, report.beta_used, c.gamma, mu, L_g,
                                      constrained ? ScheduleMode::Constrained
                                                  : ScheduleMode::Unconstrained);
    }
    if (r.inner_iters < need) {
      return "inner iterations " + std::to_string(r.inner_iters) + " at k=" + std::to_string(r.k) +
             " below the schedule " + std::to_string(need);
    }
  }
  return std::nullopt;
}

double estimate_Cg(const ProblemSpec& p, int grid) {
  if (grid < 2) throw InvalidArgument("grid must have at least 2 points per axis");
  if (p.dx != 1 || p.dy != 1 || !p.upper_set.is_box_like() || !p.lower_set.is_box_like() ||
      !p.upper_set.bounded() || !p.lower_set.bounded()) {
    throw InvalidArgument("C_g grid estimate needs bounded one-dimensional sets");
  }
  if (!p.has_v()) throw MissingOracle("C_g estimate needs v(x)");
  const double x_lo = p.upper_set.lower_bounds()[0], x_hi = p.upper_set.upper_bounds()[0];
  const double y_lo = p.lower_set.lower_bounds()[0], y_hi = p.lower_set.upper_bounds()[0];
  double best = 0.0;
  for (int i = 0; i < grid; ++i) {
    const Vector x = Vector::Constant(1, x_lo + (x_hi - x_lo) * i / (grid - 1));
    const double v = p.analytic_v(x);
    for (int j = 0; j < grid; ++j) {
      const Vector y = Vector::Constant(1, y_lo + (y_hi - y_lo) * j / (grid - 1));
      best = std::max(best, p.g_eval(x, y) - v);
    }
  }
  return best;
}

CheckReport check_prox_descent(const std::vector<IterateRecord>& trace, double t) {
  Tracker tr("prox-descent", 0.0);
  for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
    const IterateRecord& a = trace[k];
    const IterateRecord& b = trace[k + 1];
    const double slack = 1e-12 * (1.0 + std::abs(a.F_gamma));
    const double violation =
        b.F_gamma - a.subproblem_gap + 0.5 * t * a.proj_grad_norm_sq - a.F_gamma - slack;
    tr.observe(std::max(0.0, violation), "k=" + std::to_string(k));
  }
  if (tr.report().samples == 0) {
    tr.report().status = CheckStatus::Skipped;
    tr.report().details.push_back("trace has fewer than two rows");
  }
  return tr.report();
}

CheckReport check_surrogate_bounds(const ProblemCatalogEntry& entry, double gamma, int n_pairs,
                                   Rng& rng) {
  const ProblemSpec& p = entry.spec;
  const std::string name = entry.name + "/surrogate-bounds";
  if (!p.has_hvp() || !p.lower_unconstrained()) {
    return skipped(name, "needs Hessian-vector products and an unconstrained lower level");
  }
  const std::optional<double> bound = prox_linear_step_bound(p, gamma);
  if (!bound) return skipped(name, "needs L_f and L_g2");
  const double t = std::isinf(*bound) ? 1.0 : *bound;
  const double curvature = *p.constants.L_f + gamma * *p.constants.L_g2;
  Tracker tr(name, 0.0);
  tr.report().estimated = true;
  for (int s = 0; s < n_pairs; ++s) {
    const auto [xk, yk] = entry.sample_point(rng);
    const auto [x, y] = entry.sample_point(rng);
    const SurrogateModel m = build_surrogate(p, xk, yk, gamma, t);
    const Vector z = join(x, y);
    const double d2 = (z - m.anchor).squaredNorm();
    const double F = nonsmooth_penalized_objective(p, gamma, x, y);
    const double l = surrogate_eval(m, z);
    const double slack = 1e-10 * (1.0 + std::abs(F) + std::abs(l));
    tr.observe(std::max(0.0, F - l - slack), "upper bound at " + point_text(x, y));
    tr.observe(std::max(0.0, std::abs(F - l + d2 / (2.0 * t)) - 0.5 * curvature * d2 - slack),
               "sandwich at " + point_text(x, y));
  }
  return tr.report();
}

CheckReport check_intro_pathology(const std::vector<double>& gammas) {
  const ProblemSpec p = make_example_intro();
  Tracker t("example-intro/grad-norm-sq-pathology", 1e-12);
  const Vector x = Vector::Zero(1);
  const Vector bad = Vector::Constant(1, 2.0 * std::numbers::pi / 3.0);
  const Vector good = Vector::Zero(1);
  for (const double gamma : gammas) {
    const Vector grad = penalized_gradient_grad_norm_sq(p, gamma, x, bad);
    t.observe(grad.norm() / (1.0 + gamma), "stationarity at gamma=" + std::to_string(gamma));
    const double pen = penalty_value(p, PenaltyKind::GradNormSq, x, bad);
    t.require(pen > 1.0, "y = 2 pi/3 should violate lower-level optimality");
    t.require(penalized_objective(p, PenaltyKind::GradNormSq, gamma, x, bad) >
                  penalized_objective(p, PenaltyKind::GradNormSq, gamma, x, good),
              "penalized objective at 2 pi/3 should exceed its value at y* = 0");
  }
  return t.report();
}

std::vector<CheckReport> run_entry_checks(const ProblemCatalogEntry& entry,
                                          const CatalogCheckOptions& o) {
  std::vector<CheckReport> out;
  std::uint64_t index = 0;
  auto stream = [&]() { return make_stream(o.seed, Stream::Checks, index++); };
  // Keep the expensive numeric-solution entries affordable.
  const int scale_down = entry.solution_numeric ? 10 : 1;

  {
    Rng rng = stream();
    out.push_back(check_gradients(entry, std::max(1, o.gradient_points / scale_down), rng));
  }
  {
    Rng rng = stream();
    out.push_back(check_lower_solution(entry, 20, rng));
  }
  for (const DeclaredPenalty& d : entry.declared) {
    Rng rng = stream();
    if (o.kind && *o.kind != d.kind) continue;
    out.push_back(check_squared_distance_bound(entry, d.kind, o.rho.value_or(d.rho),
                                               std::max(1, o.growth_samples / scale_down), rng));
  }
  if (o.kind && o.rho &&
      std::none_of(entry.declared.begin(), entry.declared.end(),
                   [&](const DeclaredPenalty& d) { return d.kind == *o.kind; })) {
    Rng rng = stream();
    out.push_back(check_squared_distance_bound(entry, *o.kind, *o.rho, o.growth_samples, rng));
  }
  {
    Rng rng = stream();
    const int n_x = entry.solution_numeric ? 3 : 20;
    CheckReport merged;
    merged.name = entry.name + "/danskin";
    merged.tolerance = kDanskinTolerance;
    for (int i = 0; i < n_x; ++i) {
      const CheckReport r = check_danskin(entry, entry.sample_point(rng).first);
      if (r.status == CheckStatus::Skipped) {
        merged = r;
        break;
      }
      merged.samples += r.samples;
      merged.worst_residual = std::max(merged.worst_residual, r.worst_residual);
      if (r.status == CheckStatus::Failed) {
        merged.status = CheckStatus::Failed;
        for (const auto& d : r.details) merged.details.push_back(d);
      }
    }
    out.push_back(merged);
  }
  {
    Rng rng = stream();
    out.push_back(check_inner_rate(entry, std::max(1, o.rate_samples / scale_down), 50, rng));
  }
  {
    Rng rng = stream();
    out.push_back(check_projected_inner_decay(entry, o.rate_samples, 50, rng));
  }
  {
    Rng rng = stream();
    out.push_back(check_projection_properties(entry.spec.upper_set, 200, rng, 5.0,
                                              entry.name + "/upper-set"));
    out.push_back(check_projection_properties(entry.spec.lower_set, 200, rng, 5.0,
                                              entry.name + "/lower-set"));
  }
  {
    Rng rng = stream();
    out.push_back(check_surrogate_bounds(entry, 1.0, 200, rng));
  }
  return out;
}

std::vector<CheckReport> run_catalog_checks(const CatalogCheckOptions& o) {
  std::vector<CheckReport> out;
  for (const ProblemCatalogEntry& entry : catalog()) {
    auto part = run_entry_checks(entry, o);
    out.insert(out.end(), part.begin(), part.end());
  }
  out.push_back(check_intro_pathology());

  Rng rng = make_stream(o.seed, Stream::Checks, 1000);
  const std::vector<std::pair<std::string, ConstraintSet>> sets = {
      {"box", ConstraintSet::box(Vector::Constant(3, -1.0), Vector::Constant(3, 2.0))},
      {"ball", ConstraintSet::ball(Vector::Constant(3, 0.5), 2.0)},
      {"simplex", ConstraintSet::simplex(4, 1.0)},
      {"interval", ConstraintSet::interval(-0.5, 0.5, 2)},
      {"full-space", ConstraintSet::full_space(3)},
  };
  for (const auto& [label, set] : sets) {
    out.push_back(check_projection_properties(set, 1000, rng, 5.0, label));
  }
  return out;
}

}  // namespace bilevel
