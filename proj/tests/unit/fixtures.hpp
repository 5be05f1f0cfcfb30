#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <bilevel/problem.hpp>

namespace fixtures {

using bilevel::ConstraintSet;
using bilevel::ProblemSpec;
using bilevel::Vector;

using Scalar2 = std::function<double(double, double)>;
using Grad2 = std::function<std::pair<double, double>(double, double)>;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

/// Scalar x, scalar y instance from plain functions.
inline ProblemSpec scalar_problem(const std::string& name, Scalar2 f, Grad2 df, Scalar2 g, Grad2 dg,
                                  ConstraintSet upper = ConstraintSet::full_space(1),
                                  ConstraintSet lower = ConstraintSet::full_space(1)) {
  ProblemSpec p;
  p.name = name;
  p.dx = 1;
  p.dy = 1;
  p.f_eval = [f](const Vector& x, const Vector& y) { return f(x[0], y[0]); };
  p.f_grad = [df](const Vector& x, const Vector& y) {
    auto [a, b] = df(x[0], y[0]);
    return vec({a, b});
  };
  p.g_eval = [g](const Vector& x, const Vector& y) { return g(x[0], y[0]); };
  p.g_grad = [dg](const Vector& x, const Vector& y) {
    auto [a, b] = dg(x[0], y[0]);
    return vec({a, b});
  };
  p.upper_set = std::move(upper);
  p.lower_set = std::move(lower);
  return p;
}

/// f = 0, g = (y - x)^2 with Hessian products.
inline ProblemSpec shifted_square(ConstraintSet lower = ConstraintSet::full_space(1)) {
  ProblemSpec p = scalar_problem(
      "shifted-square", [](double, double) { return 0.0; },
      [](double, double) { return std::pair{0.0, 0.0}; },
      [](double x, double y) { return (y - x) * (y - x); },
      [](double x, double y) { return std::pair{-2.0 * (y - x), 2.0 * (y - x)}; },
      ConstraintSet::full_space(1), std::move(lower));
  p.g_hvp_yy = [](const Vector&, const Vector&, const Vector& v) { return Vector(2.0 * v); };
  p.g_hvp_xy = [](const Vector&, const Vector&, const Vector& v) { return Vector(-2.0 * v); };
  p.g_hvp_yx = [](const Vector&, const Vector&, const Vector& v) { return Vector(-2.0 * v); };
  p.constants.L_g = 4.0;
  p.constants.mu = 0.5;
  return p;
}

/// g = (y - 2)^2, f = 0.
inline ProblemSpec pinned_square(ConstraintSet lower) {
  return scalar_problem(
      "pinned-square", [](double, double) { return 0.0; },
      [](double, double) { return std::pair{0.0, 0.0}; },
      [](double, double y) { return (y - 2.0) * (y - 2.0); },
      [](double, double y) { return std::pair{0.0, 2.0 * (y - 2.0)}; },
      ConstraintSet::full_space(1), std::move(lower));
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace fixtures
