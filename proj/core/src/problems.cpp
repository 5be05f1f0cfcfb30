#include "bilevel/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "bilevel/errors.hpp"

namespace bilevel {

namespace {

Vector scalar(double v) { return Vector::Constant(1, v); }

Vector pair(double a, double b) {
  Vector z(2);
  z << a, b;
  return z;
}

constexpr double kTwoPiThirds = 2.0 * std::numbers::pi / 3.0;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

ProblemSpec make_example_intro() {
  ProblemSpec p;
  p.name = "example-intro";
  p.dx = 1;
  p.dy = 1;
  p.f_eval = [](const Vector&, const Vector& y) {
    const double s = std::sin(y[0] - kTwoPiThirds);
    return s * s;
  };
  p.f_grad = [](const Vector&, const Vector& y) {
    return pair(0.0, std::sin(2.0 * (y[0] - kTwoPiThirds)));
  };
  p.g_eval = [](const Vector&, const Vector& y) {
    const double s = std::sin(y[0]);
    return y[0] * y[0] + 2.0 * s * s;
  };
  p.g_grad = [](const Vector&, const Vector& y) {
    return pair(0.0, 2.0 * y[0] + 2.0 * std::sin(2.0 * y[0]));
  };
  p.g_hvp_yy = [](const Vector&, const Vector& y, const Vector& v) {
    return Vector((2.0 + 4.0 * std::cos(2.0 * y[0])) * v);
  };
  p.g_hvp_xy = [](const Vector&, const Vector&, const Vector&) { return scalar(0.0); };
  p.g_hvp_yx = [](const Vector&, const Vector&, const Vector&) { return scalar(0.0); };
  p.upper_set = ConstraintSet::full_space(1);
  p.lower_set = ConstraintSet::full_space(1);
  p.analytic_lower_solution = [](const Vector&) { return scalar(0.0); };
  p.analytic_v = [](const Vector&) { return 0.0; };
  p.constants.L = 1.0;
  p.constants.L_f = 2.0;
  p.constants.L_g = 6.0;
  p.constants.L_g2 = 8.0;
  p.constants.mu = 1.0;
  p.constants.rho = 1.0;
  p.constants.L_v = 0.0;
  return p;
}

ProblemSpec make_quadratic(double noise, bool with_hvp) {
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw InvalidArgument("noise must be >= 0");
  ProblemSpec p;
  p.name = "quadratic";
  p.dx = 1;
  p.dy = 1;
  p.f_eval = [](const Vector&, const Vector& y) { return y[0]; };
  p.f_grad = [](const Vector&, const Vector&) { return pair(0.0, 1.0); };
  p.g_eval = [](const Vector&, const Vector& y) { return y[0] * y[0]; };
  p.g_grad = [](const Vector&, const Vector& y) { return pair(0.0, 2.0 * y[0]); };
  if (with_hvp) {
    p.g_hvp_yy = [](const Vector&, const Vector&, const Vector& v) { return Vector(2.0 * v); };
    p.g_hvp_xy = [](const Vector&, const Vector&, const Vector&) { return scalar(0.0); };
    p.g_hvp_yx = [](const Vector&, const Vector&, const Vector&) { return scalar(0.0); };
  }
  p.upper_set = ConstraintSet::full_space(1);
  p.lower_set = ConstraintSet::full_space(1);
  p.analytic_lower_solution = [](const Vector&) { return scalar(0.0); };
  p.analytic_v = [](const Vector&) { return 0.0; };
  p.f_grad_sample = [noise](const Vector&, const Vector&, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double a = n(rng);
    const double b = n(rng);
    return pair(noise * a, 1.0 + noise * b);
  };
  p.g_grad_sample = [noise](const Vector&, const Vector& y, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    const double a = n(rng);
    const double b = n(rng);
    return pair(noise * a, 2.0 * y[0] + noise * b);
  };
  p.constants.L = 1.0;
  p.constants.L_f = 0.0;
  p.constants.L_g = 2.0;
  p.constants.L_g2 = 0.0;
  p.constants.mu = 0.25;
  p.constants.rho = 1.0;
  p.constants.sigma = 2.0;
  p.constants.L_v = 0.0;
  return p;
}

ProblemSpec make_toy_nc() {
  ProblemSpec p;
  p.name = "toy-nc";
  p.dx = 1;
  p.dy = 1;
  p.f_eval = [](const Vector& x, const Vector& y) {
    const double a = 4.0 * x[0] - 2.0;
    return std::cos(4.0 * y[0] + 2.0) / (1.0 + std::exp(-a)) + 0.5 * std::log(a * a + 1.0);
  };
  p.f_grad = [](const Vector& x, const Vector& y) {
    const double a = 4.0 * x[0] - 2.0;
    const double s = 1.0 / (1.0 + std::exp(-a));
    const double c = std::cos(4.0 * y[0] + 2.0);
    return pair(c * 4.0 * s * (1.0 - s) + 4.0 * a / (a * a + 1.0),
                -4.0 * std::sin(4.0 * y[0] + 2.0) * s);
  };
  p.g_eval = [](const Vector& x, const Vector& y) {
    const double u = y[0] + x[0];
    const double s = std::sin(u);
    return u * u + x[0] * s * s;
  };
  p.g_grad = [](const Vector& x, const Vector& y) {
    const double u = y[0] + x[0];
    const double s = std::sin(u);
    const double gy = 2.0 * u + x[0] * std::sin(2.0 * u);
    return pair(gy + s * s, gy);
  };
  p.g_hvp_yy = [](const Vector& x, const Vector& y, const Vector& v) {
    const double u = y[0] + x[0];
    return Vector((2.0 + 2.0 * x[0] * std::cos(2.0 * u)) * v);
  };
  auto cross = [](const Vector& x, const Vector& y, const Vector& v) {
    const double u = y[0] + x[0];
    return Vector((2.0 + std::sin(2.0 * u) + 2.0 * x[0] * std::cos(2.0 * u)) * v);
  };
  p.g_hvp_xy = cross;
  p.g_hvp_yx = cross;
  p.upper_set = ConstraintSet::interval(0.0, 3.0);
  p.lower_set = ConstraintSet::full_space(1);
  p.analytic_lower_solution = [](const Vector& x) { return Vector(-x); };
  p.analytic_v = [](const Vector&) { return 0.0; };
  p.constants.L = 4.0;
  p.constants.L_f = 17.5;
  p.constants.L_g = 16.5;
  p.constants.L_g2 = 25.0;
  p.constants.mu = 2.9;
  p.constants.rho = 1.0;
  p.constants.L_v = 0.0;
  return p;
}

ProblemSpec make_constrained_toy() {
  ProblemSpec p;
  p.name = "constrained-toy";
  p.dx = 1;
  p.dy = 1;
  p.f_eval = [](const Vector& x, const Vector& y) {
    return (x[0] - 1.0) * (x[0] - 1.0) + (y[0] - 1.0) * (y[0] - 1.0);
  };
  p.f_grad = [](const Vector& x, const Vector& y) {
    return pair(2.0 * (x[0] - 1.0), 2.0 * (y[0] - 1.0));
  };
  p.g_eval = [](const Vector& x, const Vector& y) { return (y[0] - x[0]) * (y[0] - x[0]); };
  p.g_grad = [](const Vector& x, const Vector& y) {
    const double d = y[0] - x[0];
    return pair(-2.0 * d, 2.0 * d);
  };
  p.g_hvp_yy = [](const Vector&, const Vector&, const Vector& v) { return Vector(2.0 * v); };
  p.g_hvp_xy = [](const Vector&, const Vector&, const Vector& v) { return Vector(-2.0 * v); };
  p.g_hvp_yx = p.g_hvp_xy;
  p.upper_set = ConstraintSet::interval(0.0, 2.0);
  p.lower_set = ConstraintSet::interval(0.0, 1.0);
  p.analytic_lower_solution = [](const Vector& x) { return scalar(std::clamp(x[0], 0.0, 1.0)); };
  p.analytic_v = [](const Vector& x) {
    const double d = x[0] - std::clamp(x[0], 0.0, 1.0);
    return d * d;
  };
  p.constants.L = 2.0;
  p.constants.L_f = 2.0;
  p.constants.L_g = 4.0;
  p.constants.L_g2 = 0.0;
  p.constants.mu = 1.0;
  p.constants.rho = 1.0;
  p.constants.L_v = 2.0;
  return p;
}

std::vector<std::string> catalog_names() {
  return {"example-intro", "quadratic", "toy-nc", "constrained-toy", "hyperclean"};
}

namespace {

double param_double(const ProblemParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("problem parameter '" + key + "' is not a number: " + it->second);
  }
}

void reject_unknown(const ProblemParams& params, const std::vector<std::string>& allowed,
                    const std::string& problem) {
  for (const auto& [key, value] : params) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw InvalidArgument("problem '" + problem + "' has no parameter '" + key + "'");
    }
  }
}

int param_int(const ProblemParams& params, const std::string& key, int fallback) {
  const double v = param_double(params, key, fallback);
  if (v != std::floor(v)) throw InvalidArgument("problem parameter '" + key + "' must be an integer");
  return static_cast<int>(v);
}

}  // namespace

ProblemCatalogEntry make_catalog_entry(const std::string& name, const ProblemParams& params) {
  ProblemCatalogEntry e;
  e.name = name;
  if (name == "example-intro") {
    reject_unknown(params, {}, name);
    e.spec = make_example_intro();
    e.growth_class = "PL";
    e.declared = {{PenaltyKind::ValueGap, 1.0}, {PenaltyKind::GradNormSq, 0.8}};
    e.has_analytic_solution_set = true;
    e.sample_point = [](Rng& rng) {
      return std::make_pair(scalar(uniform(rng, -1.0, 1.0)), scalar(uniform(rng, -5.0, 5.0)));
    };
    e.penalized_infimum = [](PenaltyKind, double) -> std::optional<double> { return 0.0; };
    e.constant_notes = {
        "L = 1: |d/dy sin^2(y - 2pi/3)| = |sin(2y - 4pi/3)| <= 1",
        "L_f = 2, L_g = 6 (g'' = 2 + 4 cos 2y), L_g2 = 8 (|g'''| = |8 sin 2y|)",
        "mu = 1: covers quadratic growth (g >= y^2) and PL (sampled sup ~0.99)",
        "grad-norm-sq rho = 0.8: sampled sup of y^2 / g'(y)^2 is ~0.782 (estimated)"};
  } else if (name == "quadratic") {
    reject_unknown(params, {"noise", "hvp"}, name);
    e.spec = make_quadratic(param_double(params, "noise", 0.0), param_int(params, "hvp", 1) != 0);
    e.growth_class = "PL";
    e.declared = {{PenaltyKind::ValueGap, 1.0}, {PenaltyKind::GradNormSq, 0.25}};
    e.has_analytic_solution_set = true;
    e.grad_norm_convex = true;
    e.sample_point = [](Rng& rng) {
      return std::make_pair(scalar(uniform(rng, -1.0, 1.0)), scalar(uniform(rng, -2.0, 2.0)));
    };
    e.penalized_infimum = [](PenaltyKind kind, double gamma) -> std::optional<double> {
      if (gamma <= 0.0) return std::nullopt;
      switch (kind) {
        case PenaltyKind::ValueGap:
          return -1.0 / (4.0 * gamma);
        case PenaltyKind::GradNormSq:
          return -1.0 / (16.0 * gamma);
        case PenaltyKind::GradNorm:
          if (gamma >= 0.5) return 0.0;
          return std::nullopt;
      }
      return std::nullopt;
    };
    e.constant_notes = {"L = 1, L_g = 2, L_f = L_g2 = 0, sigma = 2",
                        "mu = 1/4: |2y|^2 = 4 y^2 (PL); quadratic growth holds with 1",
                        "value-gap rho = 1 and grad-norm-sq rho = 1/4 hold with equality"};
  } else if (name == "toy-nc") {
    reject_unknown(params, {}, name);
    e.spec = make_toy_nc();
    e.growth_class = "PL";
    e.declared = {{PenaltyKind::ValueGap, 1.0}, {PenaltyKind::GradNormSq, 2.1}};
    e.has_analytic_solution_set = true;
    e.sample_point = [](Rng& rng) {
      return std::make_pair(scalar(uniform(rng, 0.0, 3.0)), scalar(uniform(rng, -4.0, 1.0)));
    };
    e.penalized_infimum = [](PenaltyKind, double) -> std::optional<double> { return std::nullopt; };
    e.constant_notes = {
        "L = 4: |df/dy| <= 4",
        "L_f = 17.5, L_g = 16.5, L_g2 = 25 are estimated from Hessian samples over [0,3] x R",
        "mu = 2.9 is estimated: sampled sup of g / |grad_y g|^2 is ~2.85",
        "grad-norm-sq rho = 2.1 is estimated: sampled sup ~2.06"};
  } else if (name == "constrained-toy") {
    reject_unknown(params, {}, name);
    e.spec = make_constrained_toy();
    e.growth_class = "QG";
    e.declared = {{PenaltyKind::ValueGap, 1.0}};
    e.has_analytic_solution_set = true;
    e.grad_norm_convex = true;
    e.sample_point = [](Rng& rng) {
      return std::make_pair(scalar(uniform(rng, 0.0, 2.0)), scalar(uniform(rng, 0.0, 1.0)));
    };
    e.penalized_infimum = [](PenaltyKind kind, double) -> std::optional<double> {
      if (kind == PenaltyKind::ValueGap) return 0.0;
      return std::nullopt;
    };
    e.constant_notes = {"L = 2 on y in [0,1], L_f = 2, L_g = 4, L_v = 2",
                        "mu = 1: g - v = (1 - y)(2x - 1 - y) >= (1 - y)^2 for x >= 1"};
  } else if (name == "hyperclean") {
    reject_unknown(params, {"n_train", "n_val", "dim", "noise", "lambda", "seed", "batch"}, name);
    HypercleanOptions o;
    o.n_train = param_int(params, "n_train", o.n_train);
    o.n_val = param_int(params, "n_val", o.n_val);
    o.dim = param_int(params, "dim", o.dim);
    o.noise_rate = param_double(params, "noise", o.noise_rate);
    o.lambda_reg = param_double(params, "lambda", o.lambda_reg);
    o.seed = static_cast<std::uint64_t>(param_int(params, "seed", 0));
    o.batch = param_int(params, "batch", o.batch);
    HypercleanInstance inst = make_hyperclean_synthetic(o);
    e.spec = std::move(inst.spec);
    e.hyperclean = inst.data;
    e.growth_class = "PL";
    e.declared = {{PenaltyKind::ValueGap, 2.0 / o.lambda_reg},
                  {PenaltyKind::GradNormSq, 1.0 / (o.lambda_reg * o.lambda_reg)}};
    e.has_analytic_solution_set = true;
    e.solution_numeric = true;
    const Eigen::Index n = e.spec.dx;
    const Eigen::Index d = e.spec.dy;
    e.sample_point = [n, d](Rng& rng) {
      std::uniform_real_distribution<double> ux(-3.0, 3.0);
      std::normal_distribution<double> nw(0.0, 1.0);
      Vector x(n), w(d);
      for (Eigen::Index i = 0; i < n; ++i) x[i] = ux(rng);
      for (Eigen::Index i = 0; i < d; ++i) w[i] = nw(rng);
      return std::make_pair(x, w);
    };
    e.penalized_infimum = [](PenaltyKind, double) -> std::optional<double> { return 0.0; };
    e.constant_notes = {
        "lower level is lambda-strongly convex in w: mu = 2/lambda covers PL (1/(2 lambda)) and "
        "quadratic growth (2/lambda)",
        "L_g = lambda + lambda_max(A^T A / n) / 4 bounds the w-block only (estimated for the "
        "joint variable)",
        "the lower-level solution comes from Newton's method, not a closed form"};
  } else {
    throw InvalidArgument("unknown problem: " + name);
  }
  return e;
}

std::vector<ProblemCatalogEntry> catalog() {
  std::vector<ProblemCatalogEntry> out;
  for (const auto& name : catalog_names()) out.push_back(make_catalog_entry(name));
  return out;
}

}  // namespace bilevel
