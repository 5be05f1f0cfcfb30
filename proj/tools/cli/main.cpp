#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <bilevel/errors.hpp>

#include "commands.hpp"

namespace {

using namespace bilevel;
using namespace bilevel::cli;

ProblemParams parse_params(const std::vector<std::string>& items) {
  ProblemParams params;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw InvalidConfiguration("--param expects key=value, got '" + item + "'");
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

Vector to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

struct SolveFlags {
  std::string problem = "quadratic";
  std::vector<std::string> params;
  std::string algo = "v-pbgd";
  double gamma = 10.0;
  double alpha = 0.0, beta = 0.0, t = 0.0;
  CLI::Option *alpha_opt = nullptr, *beta_opt = nullptr, *t_opt = nullptr;
  bool auto_steps = false;
  std::string step_rule = "theory";
  int K = 1000;
  int T = 10;
  std::string schedule = "fixed";
  bool cold_start = false;
  double tol = 0.0;
  std::string penalty = "value-gap";
  int batch = 1;
  std::uint64_t seed = 0;
  double delta0 = 1e-2;
  double q = 2.0;
  std::vector<double> x0, y0;
  std::string out = ".";
  bool no_trace = false, no_summary = false, timing = false;

  void attach(CLI::App* app) {
    app->add_option("--problem", problem, "catalog problem")
        ->check(CLI::IsMember(catalog_names()));
    app->add_option("--param", params, "problem parameter key=value (repeatable)");
    app->add_option("--algo", algo, "algorithm")->check(CLI::IsMember(algorithm_names()));
    app->add_option("--gamma", gamma, "penalty constant");
    alpha_opt = app->add_option("--alpha", alpha, "outer step size");
    beta_opt = app->add_option("--beta", beta, "inner step size");
    t_opt = app->add_option("--t", t, "prox-linear step size");
    app->add_flag("--auto-steps", auto_steps,
                  "derive unset step sizes from the problem constants (explicit values win)");
    app->add_option("--step-rule", step_rule, "auto outer step: theory or smooth")
        ->check(CLI::IsMember({"theory", "smooth"}));
    app->add_option("--K", K, "outer iterations");
    app->add_option("--T", T, "inner iterations (fixed schedule)");
    app->add_option("--inner-schedule", schedule, "fixed or log")
        ->check(CLI::IsMember({"fixed", "log"}));
    app->add_flag("--cold-start", cold_start, "restart the inner solve from y0 every iteration");
    app->add_option("--tol", tol, "stop once the projected-gradient norm is at most tol");
    app->add_option("--penalty", penalty, "value-gap, grad-norm-sq or grad-norm")
        ->check(CLI::IsMember({"value-gap", "grad-norm-sq", "grad-norm"}));
    app->add_option("--batch", batch, "outer minibatch size (v-pbsgd)");
    app->add_option("--seed", seed, "64-bit seed");
    app->add_option("--delta0", delta0, "prox-linear subproblem accuracy scale");
    app->add_option("--q", q, "prox-linear accuracy decay exponent");
    app->add_option("--x0", x0, "upper start, comma separated")->delimiter(',');
    app->add_option("--y0", y0, "lower start, comma separated")->delimiter(',');
    app->add_option("--out", out, "output directory");
    app->add_flag("--no-trace", no_trace, "skip trace.csv");
    app->add_flag("--no-summary", no_summary, "skip summary.json");
    app->add_flag("--timing", timing, "record wall-clock time per iteration");
  }

  RunConfig build() const {
    RunConfig c;
    c.problem = problem;
    c.params = parse_params(params);
    c.algorithm = algo;
    SolverConfig& s = c.solver;
    s.gamma = gamma;
    if (alpha_opt->count()) s.alpha = alpha;
    if (beta_opt->count()) s.beta = beta;
    if (t_opt->count()) s.t = t;
    s.step_rule = step_rule == "smooth" ? StepRule::Smooth : StepRule::Theory;
    s.K = K;
    s.inner.T = T;
    s.inner.mode =
        schedule == "log" ? InnerSchedule::Mode::Logarithmic : InnerSchedule::Mode::Fixed;
    s.warm_start = !cold_start;
    s.tol_proj_grad = tol;
    s.penalty = parse_penalty_kind(penalty);
    if (algo == "g-pbgd") s.penalty = PenaltyKind::GradNormSq;
    if (algo == "pbpl") s.penalty = PenaltyKind::GradNorm;
    s.batch_size = batch;
    s.seed = seed;
    s.delta0 = delta0;
    s.q = q;
    s.x0 = to_vector(x0);
    s.y0 = to_vector(y0);
    s.record_timing = timing;
    c.out_dir = out;
    c.emit_trace = !no_trace;
    c.emit_summary = !no_summary;
    return c;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"Penalty-based bilevel gradient methods"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "",
                 "INI/TOML file with [solve], [sweep], [check] or [hyperclean] sections; "
                 "flags override it");
  app.allow_config_extras(CLI::config_extras_mode::error);

  CLI::App* solve = app.add_subcommand("solve", "run one solver and write trace.csv, summary.json");
  SolveFlags solve_flags;
  solve_flags.attach(solve);

  CLI::App* sweep = app.add_subcommand("sweep", "gamma sweep with log-log slope fits");
  SolveFlags sweep_flags;
  sweep_flags.problem = "toy-nc";
  sweep_flags.step_rule = "smooth";
  sweep_flags.schedule = "log";
  sweep_flags.K = 2000000;
  sweep_flags.attach(sweep);
  std::vector<double> gammas{1, 3, 10, 30, 100};
  int starts = 20;
  double tol_sq = 1e-4;
  unsigned workers = 0;
  sweep->add_option("--gammas", gammas, "comma separated penalty constants")->delimiter(',');
  sweep->add_option("--starts", starts, "random starts per gamma");
  sweep->add_option("--tol-sq", tol_sq, "stop once |G|^2 <= tol-sq");
  sweep->add_option("--workers", workers, "concurrent solves (0: hardware threads)");

  CLI::App* check = app.add_subcommand("check", "run the verification battery, write checks.json");
  std::string selector = "all";
  std::vector<std::string> check_params;
  std::string check_kind;
  double check_rho = 0.0;
  std::uint64_t check_seed = 0;
  std::string check_out = ".";
  check->add_option("selector", selector, "problem name or 'all'");
  check->add_option("--param", check_params, "problem parameter key=value (repeatable)");
  check->add_option("--kind", check_kind, "restrict the squared-distance checks to one penalty")
      ->check(CLI::IsMember({"value-gap", "grad-norm-sq", "grad-norm"}));
  CLI::Option* rho_opt = check->add_option("--rho", check_rho, "override the declared rho");
  check->add_option("--seed", check_seed, "64-bit seed");
  check->add_option("--out", check_out, "output directory");

  CLI::App* hc = app.add_subcommand("hyperclean", "learn sample weights on a noisy synthetic set");
  HypercleanConfig hc_config;
  std::string hc_out = ".";
  hc->add_option("--n-train", hc_config.data.n_train, "training samples");
  hc->add_option("--n-val", hc_config.data.n_val, "validation samples");
  hc->add_option("--dim", hc_config.data.dim, "feature dimension");
  hc->add_option("--noise", hc_config.data.noise_rate, "fraction of flipped training labels");
  hc->add_option("--lambda", hc_config.data.lambda_reg, "ridge weight");
  hc->add_option("--seed", hc_config.data.seed, "64-bit seed");
  hc->add_option("--data-batch", hc_config.data.batch, "samples per stochastic oracle call");
  hc->add_option("--algo", hc_config.algorithm, "v-pbgd or v-pbsgd")
      ->check(CLI::IsMember({"v-pbgd", "v-pbsgd"}));
  hc->add_option("--gamma", hc_config.gamma, "penalty constant");
  hc->add_option("--alpha", hc_config.alpha, "outer step size");
  hc->add_option("--K", hc_config.K, "outer iterations");
  hc->add_option("--T", hc_config.T, "inner iterations");
  hc->add_option("--batch", hc_config.batch_size, "outer minibatch size (v-pbsgd)");
  hc->add_option("--out", hc_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (solve->parsed()) return cmd_solve(solve_flags.build());
    if (sweep->parsed()) {
      SweepConfig c;
      c.base = sweep_flags.build();
      c.gammas = gammas;
      c.starts = starts;
      c.tol_sq = tol_sq;
      c.workers = workers;
      return cmd_sweep(c);
    }
    if (check->parsed()) {
      CheckCommand c;
      c.selector = selector;
      c.params = parse_params(check_params);
      if (!check_kind.empty()) c.options.kind = parse_penalty_kind(check_kind);
      if (rho_opt->count()) c.options.rho = check_rho;
      c.options.seed = check_seed;
      c.out_dir = check_out;
      return cmd_check(c);
    }
    if (hc->parsed()) {
      hc_config.out_dir = hc_out;
      return cmd_hyperclean(hc_config);
    }
  } catch (const InvalidConfiguration& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const MissingOracle& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << " (achieved gap " << e.achieved_gap() << ")\n";
    return kBudgetExceeded;
  } catch (const Diverged& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
