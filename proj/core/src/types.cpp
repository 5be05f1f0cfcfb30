#include "bilevel/types.hpp"

#include <cmath>
#include <numeric>

#include "bilevel/errors.hpp"

namespace bilevel {

Vector join(const Vector& x, const Vector& y) {
  Vector z(x.size() + y.size());
  z << x, y;
  return z;
}

bool all_finite(const Vector& v) { return v.allFinite(); }

std::string_view to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::ValueGap:
      return "value-gap";
    case PenaltyKind::GradNormSq:
      return "grad-norm-sq";
    case PenaltyKind::GradNorm:
      return "grad-norm";
  }
  return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view text) {
  if (text == "value-gap") return PenaltyKind::ValueGap;
  if (text == "grad-norm-sq") return PenaltyKind::GradNormSq;
  if (text == "grad-norm") return PenaltyKind::GradNorm;
  throw InvalidArgument("unknown penalty kind: " + std::string(text));
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::BudgetExhausted:
      return "BudgetExhausted";
    case Termination::StationarityReached:
      return "StationarityReached";
    case Termination::Diverged:
      return "Diverged";
  }
  return "unknown";
}

std::string_view to_string(StepRule rule) {
  return rule == StepRule::Theory ? "theory" : "smooth";
}

void SmoothnessConstants::validate() const {
  auto check = [](const std::optional<double>& v, const char* name, bool allow_zero) {
    if (!v) return;
    if (!std::isfinite(*v) || *v < 0.0 || (!allow_zero && *v == 0.0)) {
      throw InvalidArgument(std::string("smoothness constant ") + name + " must be " +
                            (allow_zero ? "nonnegative" : "positive"));
    }
  };
  check(L, "L", false);
  check(L_f, "L_f", true);
  check(L_g, "L_g", false);
  check(L_g2, "L_g2", true);
  check(mu, "mu", false);
  check(mu_bar, "mu_bar", false);
  check(rho, "rho", false);
  check(sigma, "sigma", false);
  check(L_v, "L_v", true);
}

double require(const std::optional<double>& value, std::string_view name) {
  if (!value) {
    throw InvalidConfiguration("constant " + std::string(name) +
                               " is required but the problem does not supply it");
  }
  return *value;
}

void SolverConfig::validate(bool prox_linear) const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw InvalidArgument("gamma must be >= 0");
  if (alpha && !(*alpha > 0.0)) throw InvalidArgument("alpha must be > 0");
  if (beta && !(*beta > 0.0)) throw InvalidArgument("beta must be > 0");
  if (t && !(*t > 0.0)) throw InvalidArgument("t must be > 0");
  if (K < 0) throw InvalidArgument("K must be >= 0");
  if (batch_size < 1) throw InvalidArgument("batch size M must be >= 1");
  if (inner.mode == InnerSchedule::Mode::Fixed && inner.T < 0) {
    throw InvalidArgument("inner T must be >= 0");
  }
  if (tol_proj_grad < 0.0) throw InvalidArgument("tolerance must be >= 0");
  if (prox_linear) {
    if (!(q > 1.0)) throw InvalidArgument("delta schedule exponent q must exceed 1");
    if (!(delta0 > 0.0)) throw InvalidArgument("delta0 must be > 0");
  }
}

double SolveReport::mean_proj_grad_norm_sq() const {
  if (trace.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : trace) sum += r.proj_grad_norm_sq;
  return sum / static_cast<double>(trace.size());
}

double SolveReport::final_proj_grad_norm_sq() const {
  return trace.empty() ? 0.0 : trace.back().proj_grad_norm_sq;
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng make_stream(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::uint64_t state = seed;
  std::uint64_t a = splitmix64(state);
  state ^= static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL;
  std::uint64_t b = splitmix64(state);
  state ^= index * 0x8CB92BA72F3D8DD7ULL;
  std::uint64_t c = splitmix64(state);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
                    static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
  return Rng(seq);
}

}  // namespace bilevel
