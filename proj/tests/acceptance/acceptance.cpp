// One PASS/FAIL line per acceptance criterion. argv[1]: path to the bilevel executable.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include <bilevel/inner.hpp>
#include <bilevel/proxlinear.hpp>
#include <bilevel/solvers.hpp>
#include <bilevel/verify.hpp>

#include "commands.hpp"

using namespace bilevel;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Vector scalar(double v) { return Vector::Constant(1, v); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> facts;

  void require(bool ok, const std::string& fact) {
    pass = pass && ok;
    facts.push_back((ok ? "" : "[x] ") + fact);
  }
};

int failures = 0;

void report(const std::string& id, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  std::string joined;
  for (std::size_t i = 0; i < o.facts.size(); ++i) joined += (i ? "; " : "") + o.facts[i];
  std::cout << fmt::format("{} {} ({:.2f}s) {}", o.pass ? "PASS" : "FAIL", id, seconds_since(t0),
                           joined)
            << std::endl;
  if (!o.pass) ++failures;
}

Outcome closed_form_solution() {
  Outcome o;
  const ProblemSpec p = make_quadratic();
  for (double gamma : {1.0, 10.0, 100.0}) {
    SolverConfig c;
    c.gamma = gamma;
    c.K = 100000;
    c.inner.mode = InnerSchedule::Mode::Logarithmic;
    c.tol_proj_grad = 1e-10;
    c.y0 = scalar(1.0);
    const auto t0 = Clock::now();
    const SolveReport r = v_pbgd(p, c);
    const double dt = seconds_since(t0);
    const double err = std::abs(r.y[0] + 1.0 / (2.0 * gamma));
    const double tol = 1e-6 * (1.0 + 1.0 / (2.0 * gamma));
    o.require(err <= tol && dt < 1.0,
              fmt::format("gamma={} y_K={:.10g} err={:.2e} tol={:.2e} time={:.3f}s", gamma, r.y[0],
                          err, tol, dt));
  }
  return o;
}

Outcome gamma_scalings() {
  Outcome o;
  cli::SweepConfig c;
  c.base.problem = "toy-nc";
  c.base.algorithm = "v-pbgd";
  c.base.solver.step_rule = StepRule::Smooth;
  c.base.solver.inner.mode = InnerSchedule::Mode::Logarithmic;
  c.base.solver.K = 2000000;
  c.gammas = {1, 3, 10, 30, 100};
  c.starts = 20;
  c.tol_sq = 1e-4;
  const auto t0 = Clock::now();
  const cli::SweepResult r = cli::run_sweep(c);
  const double dt = seconds_since(t0);
  int unconverged = 0;
  for (const cli::SweepRow& row : r.rows) unconverged += row.runs - row.converged;
  o.require(unconverged == 0, fmt::format("unconverged members {}", unconverged));
  o.require(r.penalty_slope && *r.penalty_slope >= -2.3 && *r.penalty_slope <= -1.7,
            fmt::format("penalty slope {:.3f} in [-2.3,-1.7]", r.penalty_slope.value_or(NAN)));
  o.require(r.iteration_slope && *r.iteration_slope >= 0.7 && *r.iteration_slope <= 1.3,
            fmt::format("iteration slope {:.3f} in [0.7,1.3]", r.iteration_slope.value_or(NAN)));
  o.require(dt < 120.0, fmt::format("time {:.1f}s < 120s", dt));
  return o;
}

// Local minimizers of x -> f(x, -x) on [0, 3] from a 1e-4 grid.
std::vector<double> reduced_local_minimizers(const ProblemSpec& p) {
  const int n = 30000;
  std::vector<double> h(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = 3.0 * i / n;
    h[static_cast<std::size_t>(i)] = p.f_eval(scalar(x), scalar(-x));
  }
  std::vector<double> mins;
  for (int i = 0; i <= n; ++i) {
    const auto at = [&](int j) { return h[static_cast<std::size_t>(j)]; };
    const bool left = i == 0 || at(i) < at(i - 1);
    const bool right = i == n || at(i) <= at(i + 1);
    if (left && right) mins.push_back(3.0 * i / n);
  }
  return mins;
}

Outcome random_start_landscape() {
  Outcome o;
  const auto t0 = Clock::now();
  const ProblemSpec toy = make_toy_nc();
  const std::vector<double> minimizers = reduced_local_minimizers(toy);
  std::string list;
  for (double m : minimizers) list += fmt::format("{}{:.4f}", list.empty() ? "" : ",", m);
  o.facts.push_back("grid minimizers of f(x,-x): {" + list + "}");

  Rng starts = make_stream(2024, Stream::Starts, 0);
  std::uniform_real_distribution<double> ux(0.0, 3.0), uy(-4.0, 1.0);
  int off_graph = 0, off_minimizer = 0, not_stationary = 0;
  double worst_gap = 0.0, worst_dist = 0.0;
  for (int s = 0; s < 1000; ++s) {
    SolverConfig c;
    c.gamma = 10.0;
    c.K = 200000;
    c.step_rule = StepRule::Smooth;
    c.inner.T = 10;
    c.tol_proj_grad = 1e-6;
    c.x0 = scalar(ux(starts));
    c.y0 = scalar(uy(starts));
    const SolveReport r = v_pbgd(toy, c);
    if (r.termination != Termination::StationarityReached) ++not_stationary;
    const double gap = std::abs(r.y[0] + r.x[0]);
    double dist = 1e300;
    for (double m : minimizers) dist = std::min(dist, std::abs(r.x[0] - m));
    worst_gap = std::max(worst_gap, gap);
    worst_dist = std::max(worst_dist, dist);
    if (gap > 1e-3) ++off_graph;
    if (dist > 1e-2) ++off_minimizer;
  }
  o.require(not_stationary == 0, fmt::format("toy runs not stationary {}", not_stationary));
  o.require(off_graph == 0, fmt::format("toy |y+x|>1e-3 in {}/1000 runs (worst {:.4g})", off_graph,
                                        worst_gap));
  o.require(off_minimizer == 0, fmt::format("toy x off minimizer set by >1e-2 in {}/1000 runs "
                                            "(worst {:.4g})",
                                            off_minimizer, worst_dist));

  const ProblemSpec intro = make_example_intro();
  double worst_y = 0.0;
  for (int i = 0; i <= 100; ++i) {
    SolverConfig c;
    c.gamma = 10.0;
    c.K = 200000;
    c.tol_proj_grad = 1e-6;
    c.y0 = scalar(-2.0 + 5.0 * i / 100.0);
    worst_y = std::max(worst_y, std::abs(v_pbgd(intro, c).y[0]));
  }
  o.require(worst_y <= 0.05, fmt::format("example V-PBGD worst |y|={:.3g} over 101 starts in "
                                         "[-2,3]",
                                         worst_y));

  const double spurious = 2.0 * std::numbers::pi / 3.0;
  SolverConfig g;
  g.gamma = 10.0;
  g.alpha = 1e-3;
  g.K = 10000;
  g.y0 = scalar(spurious);
  const double moved = std::abs(g_pbgd(intro, g).y[0] - spurious);
  o.require(moved <= 1e-9, fmt::format("G-PBGD from 2pi/3 moved {:.3g}", moved));
  const double dt = seconds_since(t0);
  o.require(dt < 120.0, fmt::format("time {:.1f}s < 120s", dt));
  return o;
}

Outcome bound_monitors() {
  Outcome o;
  {
    const ProblemCatalogEntry e = make_catalog_entry("quadratic");
    SolverConfig c;
    c.gamma = 10.0;
    c.K = 1000;
    c.beta = 0.25;
    c.inner.mode = InnerSchedule::Mode::Logarithmic;
    c.y0 = scalar(1.0);
    const SolveReport r = v_pbgd(e.spec, c);
    const auto why = bound_nonconformance(e.spec, r, false);
    BoundInputs in;
    in.alpha = r.alpha_used;
    in.C_f = *e.penalized_infimum(PenaltyKind::ValueGap, c.gamma);
    in.L = *e.spec.constants.L;
    in.L_g = *e.spec.constants.L_g;
    in.conforming = !why;
    in.nonconforming_reason = why.value_or("");
    in.prefixes = {10, 100, 1000};
    const CheckReport rep = convergence_bound_check(r.trace, Bound::Unconstrained, in);
    o.require(rep.status == CheckStatus::Passed,
              fmt::format("unconstrained bound, quadratic: {} worst residual {:.3g} over {} prefixes",
                          to_string(rep.status), rep.worst_residual, rep.samples));
  }
  {
    const ProblemCatalogEntry e = make_catalog_entry("constrained-toy");
    SolverConfig c;
    c.gamma = 20.0;
    c.K = 1000;
    c.beta = 0.25;
    c.inner.mode = InnerSchedule::Mode::Logarithmic;
    const SolveReport r = v_pbgd_constrained(e.spec, c);
    const auto why = bound_nonconformance(e.spec, r, true);
    const double Cg = estimate_Cg(e.spec, 64);
    BoundInputs in;
    in.alpha = r.alpha_used;
    in.C_f = *e.penalized_infimum(PenaltyKind::ValueGap, c.gamma);
    in.L_g = *e.spec.constants.L_g;
    in.mu = *e.spec.constants.mu;
    in.C_g = 2.0 * Cg;
    in.C_g_estimated = true;
    in.conforming = !why;
    in.nonconforming_reason = why.value_or("");
    in.prefixes = {10, 100, 1000};
    const CheckReport rep = convergence_bound_check(r.trace, Bound::Constrained, in);
    o.require(rep.status == CheckStatus::Passed,
              fmt::format("constrained bound, constrained toy: {} worst residual {:.3g} over {} prefixes "
                          "(C_g = 2 x {:.3g}, estimated)",
                          to_string(rep.status), rep.worst_residual, rep.samples, Cg));
  }
  return o;
}

Outcome inner_rate() {
  Outcome o;
  for (const char* name : {"quadratic", "example-intro", "toy-nc"}) {
    Rng rng = make_stream(6, Stream::Checks, 0);
    const CheckReport r = check_inner_rate(make_catalog_entry(name), 100, 50, rng);
    o.require(r.status == CheckStatus::Passed,
              fmt::format("{}: {} over {} assertions, worst residual {:.3g}", name,
                          to_string(r.status), r.samples, r.worst_residual));
  }
  return o;
}

Outcome exact_penalty_contrast() {
  Outcome o;
  const ProblemCatalogEntry e = make_catalog_entry("quadratic");
  SolverConfig c;
  c.gamma = 1.0;
  c.K = 1000;
  c.y0 = scalar(1.0);
  const SolveReport pl = pbpl(e.spec, c);
  o.require(std::abs(pl.y[0]) <= 1e-4, fmt::format("PBPL |y_K|={:.3g}", std::abs(pl.y[0])));

  SolverConfig v = c;
  v.K = 100000;
  v.tol_proj_grad = 1e-10;
  const SolveReport vr = v_pbgd(e.spec, v);
  o.require(std::abs(vr.y[0] + 0.5) <= 1e-3, fmt::format("V-PBGD y_K={:.6f}", vr.y[0]));

  BoundInputs in;
  in.t = pl.t_used;
  in.C_f = *e.penalized_infimum(PenaltyKind::GradNorm, c.gamma);
  const CheckReport rep = convergence_bound_check(pl.trace, Bound::ProxLinear, in);
  o.require(rep.status == CheckStatus::Passed,
            fmt::format("prox-linear bound on PBPL trace: {} worst residual {:.3g} over {} prefixes",
                        to_string(rep.status), rep.worst_residual, rep.samples));
  return o;
}

Outcome property_suite(const std::string& cli_path) {
  Outcome o;
  const std::vector<CheckReport> reports = run_catalog_checks(CatalogCheckOptions{});
  int failed = 0, skipped = 0;
  for (const CheckReport& r : reports) {
    if (!r.passed()) {
      ++failed;
      o.facts.push_back("[x] " + r.name);
    }
    if (r.status == CheckStatus::Skipped) ++skipped;
  }
  o.require(failed == 0, fmt::format("{} checks, {} failed, {} not applicable", reports.size(),
                                     failed, skipped));
  const fs::path out = fs::temp_directory_path() / "bilevel_acceptance_check";
  fs::create_directories(out);
  const auto t0 = Clock::now();
  const int status =
      std::system((cli_path + " check all --out " + out.string() + " > /dev/null 2>&1").c_str());
  const double dt = seconds_since(t0);
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.require(code == 0 && dt < 60.0,
            fmt::format("`check all` exit {} in {:.2f}s (< 60s)", code, dt));
  return o;
}

Outcome stochastic_sanity() {
  Outcome o;
  const ProblemSpec p = make_quadratic(0.1);
  const auto terminal = [&](int M) {
    std::vector<double> ys;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      SolverConfig c;
      c.gamma = 10.0;
      c.alpha = 0.02;
      c.K = 2000;
      c.batch_size = M;
      c.seed = seed;
      c.inner.T = 10;
      c.y0 = scalar(1.0);
      ys.push_back(v_pbsgd(p, c).y[0]);
    }
    return ys;
  };
  const auto variance = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double a : v) m += a;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double a : v) s += (a - m) * (a - m);
    return s / static_cast<double>(v.size() - 1);
  };
  const std::vector<double> y64 = terminal(64), y16 = terminal(16);
  double mean_abs = 0.0;
  for (double y : y64) mean_abs += std::abs(y + 0.05);
  mean_abs /= static_cast<double>(y64.size());
  o.require(mean_abs <= 0.02, fmt::format("M=64 mean |y_K+0.05|={:.4g}", mean_abs));
  const double ratio = variance(y16) / variance(y64);
  o.require(ratio >= 2.5 && ratio <= 5.5,
            fmt::format("var(M=16)/var(M=64)={:.3f} in [2.5,5.5] (var16={:.3g}, var64={:.3g})",
                        ratio, variance(y16), variance(y64)));
  return o;
}

Outcome hyperclean() {
  Outcome o;
  cli::HypercleanConfig c;
  c.algorithm = "v-pbsgd";
  const cli::HypercleanResult a = cli::run_hyperclean(c);
  o.require(a.separation && *a.separation >= 0.15,
            fmt::format("clean mean {:.4f} - corrupted mean {:.4f} = {:.4f} >= 0.15",
                        a.clean_mean.value_or(NAN), a.corrupted_mean.value_or(NAN),
                        a.separation.value_or(NAN)));
  o.require(a.accuracy_learned > a.accuracy_uniform,
            fmt::format("val acc {:.3f} (learned) > {:.3f} (uniform)", a.accuracy_learned,
                        a.accuracy_uniform));
  const cli::HypercleanResult b = cli::run_hyperclean(c);
  const bool same = a.sample_weights == b.sample_weights &&
                    a.accuracy_learned == b.accuracy_learned && a.separation == b.separation;
  o.require(same, "repeat run bit-identical");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-bilevel>\n";
    return 2;
  }
  const std::string cli_path = argv[1];
  report("C1 closed-form penalized solution", closed_form_solution);
  report("C2 gamma scalings on toy", gamma_scalings);
  report("C3 random-start reproduction", random_start_landscape);
  report("C4 convergence bound monitors", bound_monitors);
  report("C5 inner linear rate", inner_rate);
  report("C6 exact-penalty contrast", exact_penalty_contrast);
  report("C7 property suite", [&] { return property_suite(cli_path); });
  report("C8 stochastic sanity", stochastic_sanity);
  report("C9 hyper-cleaning", hyperclean);
  std::cout << fmt::format("{} of 9 criteria failed", failures) << std::endl;
  return failures == 0 ? 0 : 1;
}
