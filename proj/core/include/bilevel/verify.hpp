#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bilevel/problems.hpp"

namespace bilevel {

enum class CheckStatus { Passed, Failed, Skipped };

std::string_view to_string(CheckStatus s);

struct CheckReport {
  std::string name;
  CheckStatus status = CheckStatus::Passed;
  double worst_residual = 0.0;
  double tolerance = 0.0;
  int samples = 0;
  std::vector<std::string> details;  // first few failures, or the skip reason
  bool estimated = false;            // relies on an estimated constant

  bool passed() const { return status != CheckStatus::Failed; }
};

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-5;
inline constexpr double kDanskinTolerance = 1e-4;

/// Central differences of fn at z, coordinate by coordinate.
Vector finite_difference_grad(const std::function<double(const Vector&)>& fn, const Vector& z,
                              double h = kFiniteDifferenceStep);

/// Analytic gradients of f and g, and every supplied Hessian-vector
/// product, against central differences at n_points sampled points.
/// Residual: |analytic - fd| / (1 + |analytic|).
CheckReport check_gradients(const ProblemCatalogEntry& entry, int n_points, Rng& rng);

/// |grad_y g(x, y*)| (or the projected lower gradient) at the supplied solution.
CheckReport check_lower_solution(const ProblemCatalogEntry& entry, int n_points, Rng& rng);

/// Penalty growth by sampling: p >= 0, rho p >= d^2, p vanishes on the
/// solution set, and p <= 1e-10 forces d <= 1e-5. Each random sample is
/// paired with an on-set sample at the same x.
CheckReport check_squared_distance_bound(const ProblemCatalogEntry& entry, PenaltyKind kind,
                                         double rho, int n_samples, Rng& rng);

/// Finite differences of v at x against grad_x g(x, y*).
CheckReport check_danskin(const ProblemCatalogEntry& entry, const Vector& x,
                          double h = kFiniteDifferenceStep);

/// Idempotence, fixed points, membership and non-expansiveness on random pairs.
CheckReport check_projection_properties(const ConstraintSet& set, int n_pairs, Rng& rng,
                                        double scale = 5.0, const std::string& label = "");

/// Pointwise d^2(w_{T+1}) <= mu (1 - beta/(2 mu))^T (g(x, w_1) - v(x)) for
/// T = 1..T_max with beta = 1/L_g, plus monotone descent of g along the path.
CheckReport check_inner_rate(const ProblemCatalogEntry& entry, int n_samples, int T_max, Rng& rng);

/// Projected inner GD on a bounded lower set: the lower gap after T steps
/// is at most (1 - beta/(2 mu))^T times the initial gap.
CheckReport check_projected_inner_decay(const ProblemCatalogEntry& entry, int n_samples, int T_max,
                                        Rng& rng);

/// Least-squares slope of log(b) against log(a). Needs >= 3 positive pairs.
double fit_loglog_slope(const std::vector<std::pair<double, double>>& pairs);

enum class Bound { Unconstrained, Constrained, ProxLinear };

std::string_view to_string(Bound t);

struct BoundInputs {
  double alpha = 0.0;  // Unconstrained, Constrained
  double t = 0.0;      // ProxLinear
  double C_f = 0.0;
  double L = 0.0;      // Unconstrained
  double L_g = 0.0;    // Unconstrained, Constrained
  double mu = 0.0;     // Constrained
  double C_g = 0.0;    // Constrained
  bool C_g_estimated = false;
  bool conforming = true;
  std::string nonconforming_reason;
  std::vector<int> prefixes;  // empty: every prefix
};

/// Evaluates the bound's right-hand side at each prefix K of the trace
/// and compares with the running mean (value-gap bounds) or running
/// minimum (prox-linear) of proj_grad_norm_sq. Skipped when the run does not meet the bound's
/// preconditions. Throws InvalidArgument on an empty trace.
CheckReport convergence_bound_check(const std::vector<IterateRecord>& trace, Bound bound,
                                    const BoundInputs& inputs);

/// Whether a V-PBGD (constrained = false) or constrained V-PBGD report used
/// step sizes and inner counts that satisfy the bound. Empty when it does,
/// otherwise the reason.
std::optional<std::string> bound_nonconformance(const ProblemSpec& p, const SolveReport& report,
                                                bool constrained);

/// max of g - v over a grid x grid sampling of C x U. Both sets must be
/// one-dimensional intervals or boxes.
double estimate_Cg(const ProblemSpec& p, int grid = 64);

/// Per-iteration descent with slack for a prox-linear trace:
/// F~(z^k) >= F~(z^{k+1}) - delta_k + (t/2) |G_t(z^k)|^2.
CheckReport check_prox_descent(const std::vector<IterateRecord>& trace, double t);

/// l(z; z^k) >= F~(z) and the sandwich bound of the surrogate on sampled pairs.
CheckReport check_surrogate_bounds(const ProblemCatalogEntry& entry, double gamma, int n_pairs,
                                   Rng& rng);

/// The grad-norm-sq pathology of the introductory example: y = 2 pi / 3 is
/// stationary for f + gamma |grad_y g|^2 at every listed gamma although it
/// violates lower-level optimality and F_gamma there exceeds F_gamma at y = 0.
CheckReport check_intro_pathology(const std::vector<double>& gammas = {1.0, 10.0, 100.0});

struct CatalogCheckOptions {
  std::uint64_t seed = 0;
  std::optional<PenaltyKind> kind;  // restrict squared-distance checks to this kind
  std::optional<double> rho;        // override the declared rho
  int gradient_points = 100;
  int growth_samples = 1000;
  int rate_samples = 100;
};

/// Full battery for one entry.
std::vector<CheckReport> run_entry_checks(const ProblemCatalogEntry& entry,
                                          const CatalogCheckOptions& options);

/// Full battery over the whole catalog plus the standalone projection battery.
std::vector<CheckReport> run_catalog_checks(const CatalogCheckOptions& options);

}  // namespace bilevel
