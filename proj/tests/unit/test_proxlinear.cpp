#include <cmath>

#include <gtest/gtest.h>

#include <bilevel/errors.hpp>
#include <bilevel/problems.hpp>
#include <bilevel/proxlinear.hpp>
#include <bilevel/verify.hpp>

#include "fixtures.hpp"

using namespace bilevel;
using fixtures::vec;

TEST(Surrogate, AnchorValueIsPenalizedObjective) {
  for (const ProblemSpec& p : {make_quadratic(), make_toy_nc(), make_example_intro()}) {
    const Vector x = p.upper_set.project(vec({0.7})), y = vec({0.4});
    const SurrogateModel m = build_surrogate(p, x, y, 3.0, 0.05);
    EXPECT_NEAR(surrogate_eval(m, join(x, y)), nonsmooth_penalized_objective(p, 3.0, x, y), 1e-13)
        << p.name;
  }
}

TEST(Surrogate, UpperBoundsObjectiveWithConformingStep) {
  const ProblemSpec p = make_example_intro();
  const double gamma = 2.0, t = *prox_linear_step_bound(p, gamma);
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    const Vector x = vec({0.0}), y = fixtures::random_vector(rng, 1, 4.0);
    const SurrogateModel m = build_surrogate(p, x, y, gamma, t);
    const Vector z = join(x, fixtures::random_vector(rng, 1, 4.0));
    EXPECT_GE(surrogate_eval(m, z) + 1e-12,
              nonsmooth_penalized_objective(p, gamma, z.head(1), z.tail(1)));
  }
}

TEST(Subproblem, QuadraticSoftThresholdIsExactlyAnchor) {
  const ProblemSpec p = make_quadratic();
  for (double gamma : {0.5, 1.0, 4.0}) {
    const SurrogateModel m = build_surrogate(p, vec({0}), vec({0}), gamma, 1.0);
    const SubproblemResult s =
        solve_subproblem(m, p.upper_set, p.lower_set, 1e-12, 200000);
    EXPECT_NEAR(s.z[1], 0.0, 1e-6) << "gamma=" << gamma;
    EXPECT_LE(s.gap, 1e-12);
    EXPECT_LE(s.u.norm(), gamma + 1e-12);
  }
}

TEST(Subproblem, ZeroGammaIsProjectedGradientStep) {
  const ProblemSpec p = make_constrained_toy();
  const Vector x = vec({1.5}), y = vec({0.2});
  const double t = 0.1;
  const SurrogateModel m = build_surrogate(p, x, y, 0.0, t);
  const SubproblemResult s = solve_subproblem(m, p.upper_set, p.lower_set, 1e-12);
  const Vector z = join(x, y);
  const Vector expected = project_product(p.upper_set, p.lower_set, z - t * p.f_grad(x, y));
  EXPECT_LE((s.z - expected).norm(), 1e-9);
}

TEST(Subproblem, GapCertifiesAgainstBruteForce) {
  const ProblemSpec p = make_toy_nc();
  const double gamma = 1.0, t = *prox_linear_step_bound(p, gamma);
  const SurrogateModel m = build_surrogate(p, vec({1.0}), vec({0.3}), gamma, t);
  const double delta = 1e-6;
  const SubproblemResult s = solve_subproblem(m, p.upper_set, p.lower_set, delta);
  double best = 1e300;
  for (int i = 0; i <= 600; ++i)
    for (int j = 0; j <= 600; ++j) {
      const Vector z = vec({0.0 + 3.0 * i / 600.0, -1.0 + 3.0 * j / 600.0});
      best = std::min(best, surrogate_eval(m, z));
    }
  EXPECT_LE(s.primal, best + delta);
  EXPECT_LE(s.dual, best + 1e-12);
  EXPECT_TRUE(p.upper_set.contains(s.z.head(1)));
}

TEST(Subproblem, BudgetExceededCarriesGap) {
  const ProblemSpec p = make_toy_nc();
  const SurrogateModel m = build_surrogate(p, vec({1.0}), vec({0.3}), 5.0, 0.01);
  try {
    solve_subproblem(m, p.upper_set, p.lower_set, 1e-300, 0);
    FAIL();
  } catch (const BudgetExceeded& e) {
    EXPECT_GT(e.achieved_gap(), 0.0);
  }
}

TEST(Subproblem, RequiresBoxLikeSets) {
  const ProblemSpec p = make_quadratic();
  const SurrogateModel m = build_surrogate(p, vec({0}), vec({0.5}), 1.0, 1.0);
  EXPECT_THROW(solve_subproblem(m, ConstraintSet::ball(vec({0}), 1.0), p.lower_set, 1e-8),
               InvalidConfiguration);
}

TEST(ProxMapping, ZeroAtExactPenaltySolution) {
  const ProblemSpec p = make_quadratic();
  const SurrogateModel m = build_surrogate(p, vec({0}), vec({0}), 1.0, 1.0);
  EXPECT_LE(prox_gradient_mapping(m, p.upper_set, p.lower_set).norm_sq, 1e-10);
}

TEST(ProxMapping, ZeroGammaIsGradient) {
  const ProblemSpec p = make_toy_nc();
  ProblemSpec q = p;
  q.upper_set = ConstraintSet::full_space(1);
  const Vector x = vec({1.3}), y = vec({0.2});
  const SurrogateModel m = build_surrogate(q, x, y, 0.0, 0.01);
  const ProxGradientMapping G = prox_gradient_mapping(m, q.upper_set, q.lower_set);
  EXPECT_LE((G.G - p.f_grad(x, y)).norm(), 1e-8 * (1 + G.G.norm()));
}

TEST(ProxMapping, PositiveAwayFromStationarity) {
  const ProblemSpec p = make_quadratic();
  const SurrogateModel m = build_surrogate(p, vec({0}), vec({0.8}), 1.0, 1.0);
  EXPECT_GT(prox_gradient_mapping(m, p.upper_set, p.lower_set).norm_sq, 1e-3);
}

TEST(StepBound, FromConstants) {
  EXPECT_FALSE(std::isfinite(*prox_linear_step_bound(make_quadratic(), 1.0)));
  EXPECT_DOUBLE_EQ(*prox_linear_step_bound(make_example_intro(), 2.0), 1.0 / (2 + 2 * 8));
}

TEST(Pbpl, QuadraticReachesExactSolution) {
  SolverConfig c;
  c.gamma = 1.0;
  c.K = 200;
  c.y0 = vec({1.0});
  const SolveReport r = pbpl(make_quadratic(), c);
  EXPECT_LE(std::abs(r.y[0]), 1e-4);
  EXPECT_TRUE(check_prox_descent(r.trace, r.t_used).passed());
}

TEST(Pbpl, ExampleIntroFromHalf) {
  SolverConfig c;
  c.gamma = 2.0;
  c.K = 500;
  c.y0 = vec({0.5});
  const SolveReport r = pbpl(make_example_intro(), c);
  EXPECT_LE(std::abs(r.y[0]), 1e-3);
  EXPECT_TRUE(check_prox_descent(r.trace, r.t_used).passed());
}

TEST(Pbpl, TraceRecordsCertifiedGaps) {
  SolverConfig c;
  c.gamma = 2.0;
  c.K = 20;
  c.y0 = vec({0.5});
  c.delta0 = 1e-3;
  const SolveReport r = pbpl(make_example_intro(), c);
  for (const IterateRecord& rec : r.trace)
    EXPECT_LE(rec.subproblem_gap, 1e-3 / std::pow(rec.k + 1, 2.0) * (1 + 1e-12));
}

TEST(Pbpl, NeedsJacobianOraclesAndSummableSchedule) {
  SolverConfig c;
  c.gamma = 1.0;
  EXPECT_THROW(pbpl(make_quadratic(0.0, false), c), MissingOracle);
  c.q = 1.0;
  EXPECT_THROW(pbpl(make_quadratic(), c), InvalidArgument);
}
