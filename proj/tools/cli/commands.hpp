#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <bilevel/problems.hpp>
#include <bilevel/verify.hpp>

namespace bilevel::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kChecksFailed = 1,
  kConfigError = 2,
  kDiverged = 3,
  kBudgetExceeded = 4,
};

inline const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names = {"pbgd",   "v-pbgd",  "v-pbgd-con",
                                                 "g-pbgd", "v-pbsgd", "pbpl"};
  return names;
}

struct RunConfig {
  std::string problem = "quadratic";
  ProblemParams params;
  std::string algorithm = "v-pbgd";
  SolverConfig solver;
  std::filesystem::path out_dir = ".";
  bool emit_trace = true;
  bool emit_summary = true;
};

/// Throws InvalidConfiguration when the algorithm cannot run on the problem.
void validate_compatibility(const ProblemCatalogEntry& entry, const RunConfig& config);

/// Dispatches to the solver named by config.algorithm.
SolveReport run_algorithm(const ProblemSpec& p, const std::string& algorithm,
                          const SolverConfig& config);

int cmd_solve(const RunConfig& config);

struct SweepConfig {
  RunConfig base;
  std::vector<double> gammas;
  int starts = 20;
  double tol_sq = 1e-4;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct SweepRow {
  double gamma = 0.0;
  double mean_iterations = 0.0;
  double mean_penalty = 0.0;
  int runs = 0;
  int converged = 0;
  int diverged = 0;
  std::vector<std::string> failures;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> penalty_slope;
  std::optional<double> iteration_slope;
  std::vector<std::string> notes;
};

/// Runs every (gamma, start) member, concurrently, and fits the slopes.
SweepResult run_sweep(const SweepConfig& config);

int cmd_sweep(const SweepConfig& config);

struct CheckCommand {
  std::string selector = "all";
  ProblemParams params;
  CatalogCheckOptions options;
  std::filesystem::path out_dir = ".";
};

std::vector<CheckReport> run_checks(const CheckCommand& command);

int cmd_check(const CheckCommand& command);

struct HypercleanConfig {
  HypercleanOptions data;
  std::string algorithm = "v-pbsgd";
  double gamma = 3.0;
  double alpha = 0.5;
  int K = 3000;
  int T = 10;
  int batch_size = 1;  // outer minibatch M
  std::filesystem::path out_dir = ".";
};

struct HypercleanResult {
  Vector sample_weights;  // sigmoid of the learned logits
  std::vector<bool> corrupted;
  std::optional<double> clean_mean;
  std::optional<double> corrupted_mean;
  std::optional<double> separation;  // clean_mean - corrupted_mean
  double accuracy_uniform = 0.0;
  double accuracy_learned = 0.0;
  SolveReport report;
};

HypercleanResult run_hyperclean(const HypercleanConfig& config);

int cmd_hyperclean(const HypercleanConfig& config);

}  // namespace bilevel::cli
