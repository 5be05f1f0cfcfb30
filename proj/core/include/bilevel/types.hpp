#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace bilevel {

inline constexpr std::string_view kVersion = "0.1.0";

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

/// Concatenate (x, y) into z.
Vector join(const Vector& x, const Vector& y);

/// True when every coefficient is finite.
bool all_finite(const Vector& v);

enum class PenaltyKind {
  ValueGap,    // g(x,y) - v(x)
  GradNormSq,  // |grad_y g(x,y)|^2
  GradNorm,    // |grad_y g(x,y)|, prox-linear pathway only
};

std::string_view to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(std::string_view text);

/// Problem constants. Unknown values stay empty; schedules and bound
/// checks that need a missing constant refuse to run.
struct SmoothnessConstants {
  std::optional<double> L;       // Lipschitz constant of f(x, .)
  std::optional<double> L_f;     // smoothness of f
  std::optional<double> L_g;     // smoothness of g
  std::optional<double> L_g2;    // smoothness of grad_y g
  std::optional<double> mu;      // PL / quadratic-growth modulus
  std::optional<double> mu_bar;  // proximal-error-bound modulus
  std::optional<double> rho;     // squared-distance-bound modulus
  std::optional<double> sigma;   // lower bound on singular values of grad_yy g
  std::optional<double> L_v;     // smoothness of the value function

  /// Throws InvalidArgument unless every supplied value is finite and
  /// positive. L_f and L_g2 may be zero (affine f or affine grad_y g).
  void validate() const;
};

/// Look up a constant or throw InvalidConfiguration naming it.
double require(const std::optional<double>& value, std::string_view name);

enum class Termination { BudgetExhausted, StationarityReached, Diverged };

std::string_view to_string(Termination t);

struct InnerSchedule {
  enum class Mode { Fixed, Logarithmic };
  Mode mode = Mode::Fixed;
  int T = 10;  // used in Fixed mode
};

/// How solvers derive alpha when it is not set explicitly.
enum class StepRule {
  Theory,  // the step size the convergence bound assumes for the algorithm
  Smooth,  // 1 / (L_f + 2 gamma L_g), the smoothness of f + gamma g alone
};

std::string_view to_string(StepRule rule);

struct SolverConfig {
  double gamma = 10.0;
  std::optional<double> alpha;  // outer step; empty means derive from constants
  std::optional<double> beta;   // inner step; empty means 1 / L_g
  std::optional<double> t;      // prox-linear step; empty means 1 / (L_f + gamma L_g2)
  int K = 1000;
  InnerSchedule inner;
  bool warm_start = true;
  double tol_proj_grad = 0.0;  // stop once |G| <= tol
  PenaltyKind penalty = PenaltyKind::ValueGap;
  int batch_size = 1;
  std::uint64_t seed = 0;
  double delta0 = 1e-2;
  double q = 2.0;
  StepRule step_rule = StepRule::Theory;
  Vector x0;  // empty means the projection of 0 onto the upper set
  Vector y0;
  bool record_timing = false;
  int subproblem_max_iters = 200000;

  /// Checks the basic invariants. PBPL additionally requires q > 1.
  void validate(bool prox_linear = false) const;
};

struct IterateRecord {
  int k = 0;
  double f_value = 0.0;
  double penalty_value = 0.0;
  double F_gamma = 0.0;
  double proj_grad_norm_sq = 0.0;
  int inner_iters = 0;
  std::int64_t elapsed_ns = 0;
  bool v_estimated = false;      // value-gap used g(x, y_hat) in place of v(x)
  bool penalty_clamped = false;  // tiny negative value-gap clamped to 0
  bool penalty_negative = false; // value-gap below -1e-10, left as is
  double subproblem_gap = 0.0;   // certified delta_k (prox-linear only)
};

struct SolveReport {
  std::string algorithm;
  Vector x;
  Vector y;
  std::vector<IterateRecord> trace;
  Termination termination = Termination::BudgetExhausted;
  SolverConfig config;
  double alpha_used = 0.0;
  double beta_used = 0.0;
  double t_used = 0.0;
  std::vector<std::string> notes;

  /// Mean of |G|^2 over the trace (0 for an empty trace).
  double mean_proj_grad_norm_sq() const;
  double final_proj_grad_norm_sq() const;
};

/// Named random sub-streams derived from one 64-bit seed.
enum class Stream : std::uint64_t { Outer = 1, Inner = 2, Data = 3, Starts = 4, Checks = 5 };

/// Deterministic generator for (seed, stream, index).
Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

}  // namespace bilevel
