#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bilevel/problem.hpp"

namespace bilevel {

/// f = sin^2(y - 2 pi / 3), g = y^2 + 2 sin^2 y, x a dummy scalar.
ProblemSpec make_example_intro();

/// f = y, g = y^2. Stochastic oracles add N(0, noise^2) to every gradient
/// coordinate. with_hvp = false drops the Hessian-vector products.
ProblemSpec make_quadratic(double noise = 0.0, bool with_hvp = true);

/// f = cos(4y + 2) / (1 + e^{2 - 4x}) + ln((4x - 2)^2 + 1) / 2,
/// g = (y + x)^2 + x sin^2(y + x), x in [0, 3].
ProblemSpec make_toy_nc();

/// f = (x - 1)^2 + (y - 1)^2, g = (y - x)^2, x in [0, 2], y in [0, 1].
ProblemSpec make_constrained_toy();

struct HypercleanData {
  Matrix A_train;  // n_train x dim
  Vector b_train;  // labels in {-1, +1}, after corruption
  Matrix A_val;
  Vector b_val;
  std::vector<bool> corrupted;
  Vector teacher;
  double lambda = 0.01;
  int batch = 20;
};

struct HypercleanOptions {
  int n_train = 200;
  int n_val = 200;
  int dim = 5;
  double noise_rate = 0.3;
  double lambda_reg = 0.01;
  std::uint64_t seed = 0;
  int batch = 20;  // minibatch size of the stochastic oracles
};

struct HypercleanInstance {
  ProblemSpec spec;
  std::shared_ptr<const HypercleanData> data;
};

/// Sample-reweighting instance: lower level
/// g(x, w) = (1/n) sum sigmoid(x_i) log(1 + exp(-b_i a_i^T w)) + (lambda/2)|w|^2,
/// upper level f(x, w) = mean validation logistic loss. Labels come from a
/// unit-norm Gaussian teacher; a noise_rate fraction of training labels is flipped.
HypercleanInstance make_hyperclean_synthetic(const HypercleanOptions& options);

/// Minimizer of the weighted regularized logistic loss (Newton's method).
Vector hyperclean_fit(const HypercleanData& data, const Vector& sample_weights);

/// Fraction of validation samples whose sign matches the prediction.
double hyperclean_validation_accuracy(const HypercleanData& data, const Vector& w);

struct DeclaredPenalty {
  PenaltyKind kind;
  double rho;
};

/// A named problem with the metadata the checks and the CLI need.
struct ProblemCatalogEntry {
  std::string name;
  ProblemSpec spec;
  std::string growth_class;  // "PL" or "QG"
  std::vector<DeclaredPenalty> declared;
  bool has_analytic_solution_set = false;
  bool solution_numeric = false;  // lower solution from a high-accuracy solve
  bool grad_norm_convex = false;
  std::function<std::pair<Vector, Vector>(Rng&)> sample_point;
  /// inf over Z of the penalized objective, when known in closed form.
  std::function<std::optional<double>(PenaltyKind, double gamma)> penalized_infimum;
  std::vector<std::string> constant_notes;
  std::shared_ptr<const HypercleanData> hyperclean;
};

using ProblemParams = std::map<std::string, std::string>;

std::vector<std::string> catalog_names();

/// Builds a catalog entry. Unknown names or parameters throw InvalidArgument.
ProblemCatalogEntry make_catalog_entry(const std::string& name, const ProblemParams& params = {});

std::vector<ProblemCatalogEntry> catalog();

}  // namespace bilevel
