#include <cmath>

#include <gtest/gtest.h>

#include <bilevel/errors.hpp>
#include <bilevel/inner.hpp>
#include <bilevel/problems.hpp>

#include "fixtures.hpp"

using namespace bilevel;
using fixtures::vec;

TEST(LowerGd, QuadraticOneStepLandsOnMinimizer) {
  const ProblemSpec p = make_quadratic();
  const InnerResult r = lower_gd(p, vec({0}), vec({5}), 0.5, 1);
  EXPECT_EQ(r.y_hat[0], 0.0);
  EXPECT_EQ(r.iters, 1);
  ASSERT_TRUE(r.final_lower_gap);
  EXPECT_EQ(*r.final_lower_gap, 0.0);
}

TEST(LowerGd, ZeroStepsReturnsStart) {
  const ProblemSpec p = make_toy_nc();
  const InnerResult r = lower_gd(p, vec({1}), vec({0.37}), 0.1, 0);
  EXPECT_EQ(r.y_hat[0], 0.37);
  EXPECT_EQ(r.iters, 0);
}

TEST(LowerGd, ToyConvergesToMinusX) {
  const ProblemSpec p = make_toy_nc();
  const double beta = 1.0 / *p.constants.L_g;
  for (double x = 0.0; x <= 3.0; x += 0.25) {
    const InnerResult r = lower_gd(p, vec({x}), vec({x + 0.5}), beta, 200);
    EXPECT_LE(std::abs(r.y_hat[0] + x), 1e-6) << "x=" << x;
  }
}

TEST(LowerGd, RefusesBoundedLowerSet) {
  EXPECT_THROW(lower_gd(make_constrained_toy(), vec({1}), vec({0.5}), 0.25, 3),
               InvalidConfiguration);
}

TEST(LowerGd, DivergenceCarriesLastFiniteState) {
  const ProblemSpec p = make_quadratic();
  try {
    lower_gd(p, vec({0}), vec({1}), 10.0, 100);  // factor -19 per step
    FAIL() << "expected divergence";
  } catch (const Diverged& e) {
    EXPECT_TRUE(std::isfinite(e.last_state()[0]));
    EXPECT_GT(e.iteration(), 0);
  }
}

TEST(LowerGd, DescentEveryStep) {
  for (const ProblemSpec& p : {make_quadratic(), make_toy_nc(), make_example_intro()}) {
    const double beta = 1.0 / *p.constants.L_g;
    Rng rng(11);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int s = 0; s < 20; ++s) {
      const Vector x = p.upper_set.project(vec({u(rng)}));
      Vector w = vec({u(rng)});
      double prev = p.g_eval(x, w);
      for (int t = 0; t < 30; ++t) {
        w = lower_gd(p, x, w, beta, 1).y_hat;
        const double cur = p.g_eval(x, w);
        EXPECT_LE(cur, prev + 1e-12) << p.name;
        prev = cur;
      }
    }
  }
}

TEST(LowerProjectedGd, PinnedAtBoundary) {
  const ProblemSpec p = fixtures::pinned_square(ConstraintSet::interval(0, 1));
  const InnerResult r = lower_projected_gd(p, vec({0}), vec({0.2}), 0.5, 3);
  EXPECT_EQ(r.y_hat[0], 1.0);
}

TEST(LowerProjectedGd, InteriorMinimizer) {
  const ProblemSpec p = fixtures::shifted_square(ConstraintSet::interval(0, 1));
  const InnerResult r = lower_projected_gd(p, vec({0.4}), vec({0.9}), 0.25, 60);
  EXPECT_NEAR(r.y_hat[0], 0.4, 1e-12);
}

TEST(LowerProjectedGd, ConstrainedToyGapDecaysGeometrically) {
  const ProblemSpec p = make_constrained_toy();
  const double beta = 0.25, c = 1.0 - beta / (2.0 * *p.constants.mu);
  for (double x : {0.3, 1.0, 1.5, 2.0}) {
    const Vector xv = vec({x});
    const Vector w0 = vec({x > 0.5 ? 0.0 : 1.0});
    const double gap0 = p.g_eval(xv, w0) - p.analytic_v(xv);
    for (int T = 1; T <= 30; ++T) {
      const InnerResult r = lower_projected_gd(p, xv, w0, beta, T);
      EXPECT_LE(*r.final_lower_gap, std::pow(c, T) * gap0 + 1e-14) << "x=" << x << " T=" << T;
    }
  }
}

TEST(SgdWeights, NormalizedInverseSqrt) {
  const std::vector<double> w = sgd_sampling_weights(3, 1.0);
  ASSERT_EQ(w.size(), 3u);
  // (1, 1/sqrt2, 1/sqrt3) / 2.28446
  EXPECT_NEAR(w[0], 0.43774, 5e-5);
  EXPECT_NEAR(w[1], 0.30953, 5e-5);
  EXPECT_NEAR(w[2], 0.25273, 5e-5);
  EXPECT_NEAR(w[0] + w[1] + w[2], 1.0, 1e-15);
  EXPECT_THROW(sgd_sampling_weights(0, 1.0), InvalidArgument);
}

TEST(SgdWeights, StepSquareSumIsHarmonic) {
  // sum 1/(L^2 t) for t = 1..4 with L = 2
  EXPECT_NEAR(sgd_step_square_sum(4, 2.0), (1 + 0.5 + 1.0 / 3 + 0.25) / 4.0, 1e-15);
}

TEST(LowerSgdWeighted, ZeroStepsReturnsStart) {
  const ProblemSpec p = make_quadratic(0.1);
  Rng rng(3);
  EXPECT_EQ(lower_sgd_weighted(p, vec({0}), vec({0.7}), 0, 2.0, rng).y_hat[0], 0.7);
}

TEST(LowerSgdWeighted, DeterministicForFixedGenerator) {
  const ProblemSpec p = make_quadratic(0.5);
  Rng a(9), b(9);
  const double ya = lower_sgd_weighted(p, vec({0}), vec({1.5}), 25, 2.0, a).y_hat[0];
  const double yb = lower_sgd_weighted(p, vec({0}), vec({1.5}), 25, 2.0, b).y_hat[0];
  EXPECT_EQ(ya, yb);
}

TEST(LowerSgdWeighted, NoiselessMatchesSomeGdIterate) {
  // with zero noise the output must be one of omega_2 .. omega_{T+1}
  const ProblemSpec p = make_toy_nc();
  ProblemSpec q = p;
  q.g_grad_sample = [p](const Vector& x, const Vector& y, Rng&) { return p.g_grad(x, y); };
  const double L = *p.constants.L_g;
  Rng rng(4);
  const Vector x = vec({1.0});
  const double out = lower_sgd_weighted(q, x, vec({0.5}), 5, L, rng).y_hat[0];
  Vector w = vec({0.5});
  bool found = false;
  for (int t = 1; t <= 5; ++t) {
    w = w - (1.0 / (L * std::sqrt(static_cast<double>(t)))) * grad_y_g(p, x, w);
    found = found || w[0] == out;
  }
  EXPECT_TRUE(found);
}

TEST(LowerSgdWeighted, SelectedIndexFollowsWeights) {
  // Record the selected step by making the oracle count calls.
  const ProblemSpec base = make_quadratic();
  const int T = 3;
  std::vector<int> counts(T + 1, 0);
  for (int s = 0; s < 20000; ++s) {
    ProblemSpec q = base;
    q.g_grad_sample = [](const Vector&, const Vector& y, Rng&) {
      Vector g = Vector::Zero(2);
      g[1] = -1.0;  // each step adds beta_t to y
      return g;
    };
    Rng rng(static_cast<std::uint64_t>(s));
    const double y = lower_sgd_weighted(q, vec({0}), vec({0}), T, 1.0, rng).y_hat[0];
    double acc = 0.0;
    for (int t = 1; t <= T; ++t) {
      acc += 1.0 / std::sqrt(static_cast<double>(t));
      if (std::abs(y - acc) < 1e-12) ++counts[t];
    }
  }
  const std::vector<double> w = sgd_sampling_weights(T, 1.0);
  for (int t = 1; t <= T; ++t)
    EXPECT_NEAR(counts[t] / 20000.0, w[static_cast<std::size_t>(t - 1)], 0.015) << "t=" << t;
}

TEST(Schedule, WorkedExample) {
  EXPECT_EQ(inner_iteration_schedule(10, 0.1, 0.5, 1.0, 0.5, 1.0, ScheduleMode::Unconstrained), 4);
}

TEST(Schedule, FirstTermDominatesWhenStepSmall) {
  // 2 alpha k < 1 makes the second term negative
  const int T = inner_iteration_schedule(1, 0.01, 0.5, 1.0, 0.5, 1.0, ScheduleMode::Unconstrained);
  EXPECT_EQ(T, 4);
}

TEST(Schedule, ConstrainedRule) {
  // -2 log_{0.5}(2 * 0.1 * 10 * 5) = 2 log2(10) = 6.64 -> 7
  EXPECT_EQ(inner_iteration_schedule(5, 0.1, 0.5, 10.0, 0.5, 1.0, ScheduleMode::Constrained), 7);
  // below one the rule floors at 1
  EXPECT_EQ(inner_iteration_schedule(1, 1e-3, 0.5, 1.0, 0.5, 1.0, ScheduleMode::Constrained), 1);
}

TEST(Schedule, NondecreasingInK) {
  for (ScheduleMode m : {ScheduleMode::Unconstrained, ScheduleMode::Constrained}) {
    int prev = 0;
    for (int k = 1; k <= 5000; k += 7) {
      const int T = inner_iteration_schedule(k, 0.02, 0.25, 10.0, 1.0, 2.0, m);
      EXPECT_GE(T, prev);
      prev = T;
    }
  }
}

TEST(Schedule, RejectsContractionOutsideUnitInterval) {
  // beta / (2 mu) = 1 gives c = 0
  EXPECT_THROW(inner_iteration_schedule(1, 0.1, 1.0, 1.0, 0.5, 1.0, ScheduleMode::Unconstrained),
               InvalidArgument);
  EXPECT_THROW(inner_iteration_schedule(0, 0.1, 0.5, 1.0, 0.5, 1.0, ScheduleMode::Unconstrained),
               InvalidArgument);
}
