#include <benchmark/benchmark.h>

#include <bilevel/inner.hpp>
#include <bilevel/problems.hpp>
#include <bilevel/proxlinear.hpp>
#include <bilevel/solvers.hpp>

using namespace bilevel;

namespace {

void BM_SimplexProjection(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const ConstraintSet s = ConstraintSet::simplex(n);
  Rng rng(1);
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  for (auto _ : state) benchmark::DoNotOptimize(s.project(v));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SimplexProjection)->RangeMultiplier(8)->Range(8, 4096)->Complexity();

void BM_LowerGd(benchmark::State& state) {
  const ProblemSpec p = make_toy_nc();
  const Vector x = Vector::Constant(1, 1.3), y0 = Vector::Constant(1, 0.2);
  const int T = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(lower_gd(p, x, y0, 0.25, T));
}
BENCHMARK(BM_LowerGd)->Arg(10)->Arg(100);

void BM_VpbgdToy(benchmark::State& state) {
  const ProblemSpec p = make_toy_nc();
  SolverConfig c;
  c.gamma = 10.0;
  c.K = static_cast<int>(state.range(0));
  c.step_rule = StepRule::Smooth;
  c.x0 = Vector::Constant(1, 1.0);
  c.y0 = Vector::Constant(1, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(v_pbgd(p, c));
}
BENCHMARK(BM_VpbgdToy)->Arg(100)->Arg(1000);

void BM_HypercleanVpbsgd(benchmark::State& state) {
  const HypercleanInstance inst = make_hyperclean_synthetic(HypercleanOptions{});
  SolverConfig c;
  c.gamma = 3.0;
  c.alpha = 0.5;
  c.K = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(v_pbsgd(inst.spec, c));
}
BENCHMARK(BM_HypercleanVpbsgd)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ProxLinearSubproblem(benchmark::State& state) {
  const ProblemSpec p = make_toy_nc();
  const double gamma = 1.0, t = *prox_linear_step_bound(p, gamma);
  const SurrogateModel m =
      build_surrogate(p, Vector::Constant(1, 1.0), Vector::Constant(1, 0.3), gamma, t);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_subproblem(m, p.upper_set, p.lower_set, 1e-8));
}
BENCHMARK(BM_ProxLinearSubproblem);

}  // namespace
BENCHMARK_MAIN();
