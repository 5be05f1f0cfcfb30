#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include <bilevel/errors.hpp>
#include <bilevel/proxlinear.hpp>
#include <bilevel/solvers.hpp>

#include "output.hpp"

namespace bilevel::cli {

using nlohmann::json;

namespace {

bool is_known_algorithm(const std::string& name) {
  const auto& names = algorithm_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::optional<double> final_penalty(const ProblemSpec& p, PenaltyKind kind, const Vector& x,
                                    const Vector& y) {
  if (kind == PenaltyKind::ValueGap && !p.has_v()) return std::nullopt;
  return penalty_value(p, kind, x, y);
}

json optional_json(const std::optional<double>& v) {
  return v ? number_or_null(*v) : json(nullptr);
}

json summary_json(const RunConfig& config, const ProblemSpec& p, const SolveReport& report) {
  const PenaltyKind kind =
      report.algorithm == "pbpl" ? PenaltyKind::GradNorm : report.config.penalty;
  json j;
  j["version"] = std::string(kVersion);
  j["seed"] = report.config.seed;
  j["problem"] = config.problem;
  j["params"] = config.params;
  j["algorithm"] = report.algorithm;
  j["config"] = config_json(report.config);
  j["termination"] = std::string(to_string(report.termination));
  j["iterations"] = report.trace.size();
  j["final_x"] = vector_json(report.x);
  j["final_y"] = vector_json(report.y);
  json m;
  const bool finite = all_finite(report.x) && all_finite(report.y);
  m["f_value"] = finite ? number_or_null(p.f_eval(report.x, report.y)) : json(nullptr);
  m["penalty_kind"] = std::string(to_string(kind));
  m["penalty_value"] =
      finite ? optional_json(final_penalty(p, kind, report.x, report.y)) : json(nullptr);
  if (!report.trace.empty()) {
    const IterateRecord& last = report.trace.back();
    m["last_recorded_proj_grad_norm_sq"] = number_or_null(last.proj_grad_norm_sq);
    m["last_recorded_F_gamma"] = number_or_null(last.F_gamma);
    m["last_recorded_penalty_value"] = number_or_null(last.penalty_value);
    m["v_estimated"] = last.v_estimated;
  }
  m["mean_proj_grad_norm_sq"] = number_or_null(report.mean_proj_grad_norm_sq());
  j["metrics"] = m;
  j["alpha_used"] = report.alpha_used;
  j["beta_used"] = report.beta_used;
  j["t_used"] = report.t_used;
  j["notes"] = report.notes;
  return j;
}

int exit_code_for(const SolveReport& report) {
  return report.termination == Termination::Diverged ? kDiverged : kOk;
}

}  // namespace

void validate_compatibility(const ProblemCatalogEntry& entry, const RunConfig& config) {
  const ProblemSpec& p = entry.spec;
  const std::string& a = config.algorithm;
  if (!is_known_algorithm(a)) throw InvalidConfiguration("unknown algorithm '" + a + "'");
  const auto fail = [&](const std::string& why) {
    throw InvalidConfiguration(a + " cannot run on " + entry.name + ": " + why);
  };
  if ((a == "v-pbgd" || a == "v-pbsgd") && !p.lower_unconstrained())
    fail("needs an unconstrained lower level (use v-pbgd-con)");
  if (a == "v-pbgd-con" && p.lower_unconstrained()) fail("needs a bounded lower-level set");
  if (a == "v-pbsgd" && !p.g_grad_sample) fail("needs stochastic lower-level gradients");
  if (a == "g-pbgd" && !p.has_hvp()) fail("needs Hessian-vector products");
  if (a == "g-pbgd" && !p.lower_unconstrained()) fail("needs an unconstrained lower level");
  if (a == "pbpl") {
    if (!p.has_hvp()) fail("needs Jacobian (Hessian-vector product) oracles");
    if (!p.lower_unconstrained()) fail("needs an unconstrained lower level");
    if (!p.upper_set.is_box_like()) fail("needs a box-like upper set");
  }
  if (a == "pbgd" && config.solver.penalty == PenaltyKind::GradNormSq && !p.has_hvp())
    fail("the squared gradient-norm penalty needs Hessian-vector products");
  if (a != "pbpl" && config.solver.penalty == PenaltyKind::GradNorm)
    fail("the gradient-norm penalty is only available with pbpl");
  if (config.solver.inner.mode == InnerSchedule::Mode::Logarithmic) {
    if (!p.constants.mu || !p.constants.L_g)
      fail("logarithmic inner scheduling needs mu and L_g");
  }
}

SolveReport run_algorithm(const ProblemSpec& p, const std::string& algorithm,
                          const SolverConfig& config) {
  if (algorithm == "pbgd") return pbgd(p, config);
  if (algorithm == "v-pbgd") return v_pbgd(p, config);
  if (algorithm == "v-pbgd-con") return v_pbgd_constrained(p, config);
  if (algorithm == "g-pbgd") return g_pbgd(p, config);
  if (algorithm == "v-pbsgd") return v_pbsgd(p, config);
  if (algorithm == "pbpl") return pbpl(p, config);
  throw InvalidConfiguration("unknown algorithm '" + algorithm + "'");
}

int cmd_solve(const RunConfig& config) {
  const ProblemCatalogEntry entry = make_catalog_entry(config.problem, config.params);
  validate_compatibility(entry, config);
  const SolveReport report = run_algorithm(entry.spec, config.algorithm, config.solver);
  if (config.emit_trace)
    write_file_atomic(config.out_dir / "trace.csv", trace_csv(report.trace));
  if (config.emit_summary)
    write_file_atomic(config.out_dir / "summary.json",
                      summary_json(config, entry.spec, report).dump(2) + "\n");
  std::cout << fmt::format("{} on {}: {} after {} iterations\n", report.algorithm, entry.name,
                           to_string(report.termination), report.trace.size());
  for (const std::string& note : report.notes) std::cout << "note: " << note << "\n";
  return exit_code_for(report);
}

SweepResult run_sweep(const SweepConfig& config) {
  if (config.gammas.size() < 3)
    throw InvalidConfiguration("a sweep needs at least 3 gamma values to fit a slope");
  if (config.starts < 1) throw InvalidConfiguration("a sweep needs at least one start");
  if (!(config.tol_sq > 0.0)) throw InvalidConfiguration("tol-sq must be positive");
  for (const double g : config.gammas)
    if (!(g > 0.0) || !std::isfinite(g)) throw InvalidConfiguration("gamma values must be positive");

  const ProblemCatalogEntry entry = make_catalog_entry(config.base.problem, config.base.params);
  validate_compatibility(entry, config.base);

  std::vector<std::pair<Vector, Vector>> starts;
  for (int s = 0; s < config.starts; ++s) {
    Rng rng = make_stream(config.base.solver.seed, Stream::Starts, static_cast<std::uint64_t>(s));
    starts.push_back(entry.sample_point(rng));
  }

  struct Member {
    std::size_t gamma_index;
    int start;
    std::optional<SolveReport> report;
    std::string error;
  };
  std::vector<Member> members;
  for (std::size_t gi = 0; gi < config.gammas.size(); ++gi)
    for (int s = 0; s < config.starts; ++s) members.push_back({gi, s, std::nullopt, {}});

  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < members.size(); i = next++) {
      Member& m = members[i];
      SolverConfig c = config.base.solver;
      c.gamma = config.gammas[m.gamma_index];
      c.tol_proj_grad = std::sqrt(config.tol_sq);
      c.x0 = starts[static_cast<std::size_t>(m.start)].first;
      c.y0 = starts[static_cast<std::size_t>(m.start)].second;
      try {
        m.report = run_algorithm(entry.spec, config.base.algorithm, c);
      } catch (const std::exception& e) {
        m.error = e.what();
      }
    }
  };
  unsigned workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(members.size())));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();

  SweepResult result;
  std::vector<std::pair<double, double>> penalty_pairs, iteration_pairs;
  for (std::size_t gi = 0; gi < config.gammas.size(); ++gi) {
    SweepRow row;
    row.gamma = config.gammas[gi];
    double iter_sum = 0.0, pen_sum = 0.0;
    for (const Member& m : members) {
      if (m.gamma_index != gi) continue;
      ++row.runs;
      if (!m.report) {
        row.failures.push_back(fmt::format("start {}: {}", m.start, m.error));
        continue;
      }
      const SolveReport& r = *m.report;
      if (r.termination == Termination::Diverged) {
        ++row.diverged;
        row.failures.push_back(fmt::format("start {}: diverged", m.start));
      } else if (r.termination == Termination::StationarityReached) {
        ++row.converged;
        iter_sum += r.trace.back().k;
        pen_sum += r.trace.back().penalty_value;
      } else {
        row.failures.push_back(fmt::format("start {}: tolerance not reached in K={}", m.start,
                                           r.config.K));
      }
    }
    if (row.converged > 0) {
      row.mean_iterations = iter_sum / row.converged;
      row.mean_penalty = pen_sum / row.converged;
      if (row.mean_penalty > 0.0) penalty_pairs.emplace_back(row.gamma, row.mean_penalty);
      if (row.mean_iterations > 0.0) iteration_pairs.emplace_back(row.gamma, row.mean_iterations);
    } else {
      row.mean_iterations = std::nan("");
      row.mean_penalty = std::nan("");
    }
    result.rows.push_back(std::move(row));
  }
  if (penalty_pairs.size() >= 3)
    result.penalty_slope = fit_loglog_slope(penalty_pairs);
  else
    result.notes.push_back("penalty slope undetermined: fewer than 3 gammas with converged runs");
  if (iteration_pairs.size() >= 3)
    result.iteration_slope = fit_loglog_slope(iteration_pairs);
  else
    result.notes.push_back("iteration slope undetermined: fewer than 3 gammas with converged runs");
  return result;
}

int cmd_sweep(const SweepConfig& config) {
  const SweepResult result = run_sweep(config);
  std::string csv =
      csv_row({"gamma", "iterations", "penalty", "converged", "diverged", "runs", "failures"});
  for (const SweepRow& r : result.rows) {
    std::string failures;
    for (std::size_t i = 0; i < r.failures.size(); ++i)
      failures += (i ? "; " : "") + r.failures[i];
    csv += csv_row({format_double(r.gamma), format_double(r.mean_iterations),
                    format_double(r.mean_penalty), std::to_string(r.converged),
                    std::to_string(r.diverged), std::to_string(r.runs), failures});
  }
  json slopes;
  slopes["version"] = std::string(kVersion);
  slopes["seed"] = config.base.solver.seed;
  slopes["problem"] = config.base.problem;
  slopes["algorithm"] = config.base.algorithm;
  slopes["gammas"] = config.gammas;
  slopes["starts"] = config.starts;
  slopes["tol_sq"] = config.tol_sq;
  slopes["penalty_vs_gamma"] = optional_json(result.penalty_slope);
  slopes["iterations_vs_gamma"] = optional_json(result.iteration_slope);
  slopes["config"] = config_json(config.base.solver);
  slopes["notes"] = result.notes;
  write_file_atomic(config.base.out_dir / "sweep.csv", csv);
  write_file_atomic(config.base.out_dir / "slopes.json", slopes.dump(2) + "\n");
  std::cout << fmt::format("penalty slope {}, iteration slope {}\n",
                           result.penalty_slope ? format_double(*result.penalty_slope) : "n/a",
                           result.iteration_slope ? format_double(*result.iteration_slope) : "n/a");
  for (const SweepRow& r : result.rows)
    if (r.diverged > 0) return kDiverged;
  return kOk;
}

std::vector<CheckReport> run_checks(const CheckCommand& command) {
  if (command.selector == "all") {
    if (!command.params.empty())
      throw InvalidConfiguration("--param applies to a single problem, not 'all'");
    return run_catalog_checks(command.options);
  }
  return run_entry_checks(make_catalog_entry(command.selector, command.params), command.options);
}

int cmd_check(const CheckCommand& command) {
  const std::vector<CheckReport> reports = run_checks(command);
  json j;
  j["version"] = std::string(kVersion);
  j["seed"] = command.options.seed;
  j["selector"] = command.selector;
  j["checks"] = json::array();
  int failed = 0;
  for (const CheckReport& r : reports) {
    j["checks"].push_back(report_json(r));
    if (!r.passed()) ++failed;
    std::cout << fmt::format("{:<7} {}  worst={} tol={}\n", to_string(r.status), r.name,
                             format_double(r.worst_residual), format_double(r.tolerance));
  }
  j["failed"] = failed;
  j["total"] = reports.size();
  write_file_atomic(command.out_dir / "checks.json", j.dump(2) + "\n");
  std::cout << fmt::format("{} of {} checks failed\n", failed, reports.size());
  return failed ? kChecksFailed : kOk;
}

HypercleanResult run_hyperclean(const HypercleanConfig& config) {
  if (config.algorithm != "v-pbgd" && config.algorithm != "v-pbsgd")
    throw InvalidConfiguration("hyperclean runs v-pbgd or v-pbsgd, not '" + config.algorithm + "'");
  const HypercleanInstance inst = make_hyperclean_synthetic(config.data);
  SolverConfig c;
  c.gamma = config.gamma;
  c.alpha = config.alpha;
  c.K = config.K;
  c.inner.mode = InnerSchedule::Mode::Fixed;
  c.inner.T = config.T;
  c.batch_size = config.batch_size;
  c.seed = config.data.seed;
  c.step_rule = StepRule::Smooth;

  HypercleanResult out;
  out.report = run_algorithm(inst.spec, config.algorithm, c);
  const auto weights = [](const Vector& logits) {
    return Vector(logits.unaryExpr([](double t) { return 1.0 / (1.0 + std::exp(-t)); }));
  };
  out.sample_weights = weights(out.report.x);
  out.corrupted = inst.data->corrupted;

  double clean = 0.0, bad = 0.0;
  int n_clean = 0, n_bad = 0;
  for (Eigen::Index i = 0; i < out.sample_weights.size(); ++i) {
    if (out.corrupted[static_cast<std::size_t>(i)]) {
      bad += out.sample_weights[i];
      ++n_bad;
    } else {
      clean += out.sample_weights[i];
      ++n_clean;
    }
  }
  if (n_clean > 0) out.clean_mean = clean / n_clean;
  if (n_bad > 0) out.corrupted_mean = bad / n_bad;
  if (out.clean_mean && out.corrupted_mean) out.separation = *out.clean_mean - *out.corrupted_mean;

  const Vector start = weights(default_start(inst.spec.upper_set, Vector()));
  out.accuracy_uniform =
      hyperclean_validation_accuracy(*inst.data, hyperclean_fit(*inst.data, start));
  out.accuracy_learned =
      hyperclean_validation_accuracy(*inst.data, hyperclean_fit(*inst.data, out.sample_weights));
  return out;
}

int cmd_hyperclean(const HypercleanConfig& config) {
  const HypercleanResult r = run_hyperclean(config);
  std::string csv = csv_row({"index", "corrupted", "weight"});
  for (Eigen::Index i = 0; i < r.sample_weights.size(); ++i)
    csv += csv_row({std::to_string(i), r.corrupted[static_cast<std::size_t>(i)] ? "1" : "0",
                    format_double(r.sample_weights[i])});
  json j;
  j["version"] = std::string(kVersion);
  j["seed"] = config.data.seed;
  j["algorithm"] = config.algorithm;
  j["n_train"] = config.data.n_train;
  j["n_val"] = config.data.n_val;
  j["dim"] = config.data.dim;
  j["noise_rate"] = config.data.noise_rate;
  j["lambda"] = config.data.lambda_reg;
  j["config"] = config_json(r.report.config);
  j["termination"] = std::string(to_string(r.report.termination));
  j["clean_mean_weight"] = optional_json(r.clean_mean);
  j["corrupted_mean_weight"] = optional_json(r.corrupted_mean);
  j["separation"] = optional_json(r.separation);
  j["val_acc_uniform"] = r.accuracy_uniform;
  j["val_acc_learned"] = r.accuracy_learned;
  j["notes"] = r.report.notes;
  write_file_atomic(config.out_dir / "weights.csv", csv);
  write_file_atomic(config.out_dir / "hyperclean.json", j.dump(2) + "\n");
  write_file_atomic(config.out_dir / "trace.csv", trace_csv(r.report.trace));
  std::cout << fmt::format("separation {}, accuracy {} -> {}\n",
                           r.separation ? format_double(*r.separation) : "n/a",
                           format_double(r.accuracy_uniform), format_double(r.accuracy_learned));
  return exit_code_for(r.report);
}

}  // namespace bilevel::cli
