#include "bilevel/solvers.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "bilevel/errors.hpp"

namespace bilevel {

namespace {

enum class Variant { Generic, Value, ValueConstrained, GradNorm, Stochastic };

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::Generic:
      return "pbgd";
    case Variant::Value:
      return "v-pbgd";
    case Variant::ValueConstrained:
      return "v-pbgd-con";
    case Variant::GradNorm:
      return "g-pbgd";
    case Variant::Stochastic:
      return "v-pbsgd";
  }
  return "pbgd";
}

PenaltyKind variant_penalty(Variant v, const SolverConfig& c) {
  switch (v) {
    case Variant::Generic:
      if (c.penalty == PenaltyKind::GradNorm) {
        throw InvalidConfiguration("grad-norm penalty is nonsmooth; use pbpl");
      }
      return c.penalty;
    case Variant::GradNorm:
      return PenaltyKind::GradNormSq;
    default:
      return PenaltyKind::ValueGap;
  }
}

Variant variant_from_name(std::string_view name) {
  if (name == "pbgd") return Variant::Generic;
  if (name == "v-pbgd") return Variant::Value;
  if (name == "v-pbgd-con") return Variant::ValueConstrained;
  if (name == "g-pbgd") return Variant::GradNorm;
  if (name == "v-pbsgd") return Variant::Stochastic;
  throw InvalidArgument("unknown algorithm: " + std::string(name));
}

double auto_alpha(const ProblemSpec& p, const SolverConfig& c, Variant v, PenaltyKind kind) {
  if (c.alpha) return *c.alpha;
  if (kind == PenaltyKind::GradNormSq) {
    throw InvalidConfiguration("grad-norm-sq penalty has no automatic step size; set alpha");
  }
  const auto& k = p.constants;
  const double L_f = require(k.L_f, "L_f");
  const double L_g = require(k.L_g, "L_g");
  if (c.step_rule == StepRule::Smooth) return 1.0 / (L_f + 2.0 * c.gamma * L_g);
  const bool constrained =
      v == Variant::ValueConstrained || (v == Variant::Generic && !p.lower_unconstrained());
  if (constrained) return 1.0 / (L_f + c.gamma * (L_g + require(k.L_v, "L_v")));
  return 1.0 / (L_f + c.gamma * (2.0 * L_g + L_g * L_g * require(k.mu, "mu")));
}

class Loop {
 public:
  Loop(const ProblemSpec& p, const SolverConfig& c, Variant v) : p_(p), c_(c), v_(v) {}

  SolveReport run() {
    c_.validate();
    p_.validate();
    if (!(c_.gamma > 0.0)) throw InvalidArgument("solvers need gamma > 0");
    kind_ = variant_penalty(v_, c_);
    check_preconditions();

    report_.algorithm = std::string(variant_name(v_));
    report_.config = c_;
    alpha_ = auto_alpha(p_, c_, v_, kind_);
    report_.alpha_used = alpha_;
    if (kind_ == PenaltyKind::ValueGap) {
      beta_ = c_.beta ? *c_.beta : 1.0 / require(p_.constants.L_g, "L_g");
      report_.beta_used = beta_;
      setup_schedule();
    }
    if (v_ == Variant::Stochastic) stochastic_notes();

    Vector x = default_start(p_.upper_set, c_.x0);
    Vector y = default_start(p_.lower_set, c_.y0);
    const Vector y_initial = y;
    const double tol_sq = c_.tol_proj_grad * c_.tol_proj_grad;

    for (int k = 0; k < c_.K; ++k) {
      const auto t0 = std::chrono::steady_clock::now();
      IterateRecord rec;
      rec.k = k;
      rec.f_value = p_.f_eval(x, y);

      Vector grad;       // deterministic penalized gradient, used for G
      Vector step_grad;  // what the update uses
      try {
        if (kind_ == PenaltyKind::ValueGap) {
          const Vector w0 = c_.warm_start ? y : y_initial;
          const int T = inner_count(k + 1);
          InnerResult inner;
          if (v_ == Variant::Stochastic) {
            Rng rng = make_stream(c_.seed, Stream::Inner, static_cast<std::uint64_t>(k));
            inner = lower_sgd_weighted(p_, x, w0, T, require(p_.constants.L_g, "L_g"), rng);
          } else if (p_.lower_unconstrained()) {
            inner = lower_gd(p_, x, w0, beta_, T);
          } else {
            inner = lower_projected_gd(p_, x, w0, beta_, T);
          }
          rec.inner_iters = inner.iters;
          grad = penalized_gradient_value_gap(p_, c_.gamma, x, y, inner.y_hat);
          step_grad = v_ == Variant::Stochastic ? minibatch_gradient(x, y, inner.y_hat, k) : grad;
          const TracedPenalty pen = traced_value_gap(p_, x, y, inner.y_hat);
          rec.penalty_value = pen.value;
          rec.v_estimated = pen.v_estimated;
          rec.penalty_clamped = pen.clamped;
          rec.penalty_negative = pen.negative;
        } else {
          grad = penalized_gradient_grad_norm_sq(p_, c_.gamma, x, y);
          step_grad = grad;
          rec.penalty_value = grad_y_g(p_, x, y).squaredNorm();
        }
      } catch (const Diverged& e) {
        report_.termination = Termination::Diverged;
        report_.notes.push_back(std::string("inner solve diverged: ") + e.what());
        break;
      }
      rec.F_gamma = rec.f_value + c_.gamma * rec.penalty_value;

      const Vector z = join(x, y);
      const Vector z_next = project_product(p_.upper_set, p_.lower_set, z - alpha_ * step_grad);
      if (v_ == Variant::Stochastic) {
        rec.proj_grad_norm_sq = projected_gradient_metric(p_, alpha_, x, y, grad).norm_sq;
      } else {
        rec.proj_grad_norm_sq = ((z - z_next) / alpha_).squaredNorm();
      }
      if (c_.record_timing) {
        rec.elapsed_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
      }
      report_.trace.push_back(rec);

      if (!std::isfinite(rec.proj_grad_norm_sq)) {
        report_.termination = Termination::Diverged;
        break;
      }
      if (rec.proj_grad_norm_sq <= tol_sq) {
        report_.termination = Termination::StationarityReached;
        break;
      }
      if (!z_next.allFinite() || z_next.norm() > kDivergenceThreshold) {
        report_.termination = Termination::Diverged;
        report_.notes.push_back("outer iterate exceeded the divergence threshold at k=" +
                                std::to_string(k));
        break;
      }
      x = z_next.head(p_.dx);
      y = z_next.tail(p_.dy);
    }
    report_.x = x;
    report_.y = y;
    return report_;
  }

 private:
  void check_preconditions() {
    switch (v_) {
      case Variant::Value:
      case Variant::Stochastic:
        if (!p_.lower_unconstrained()) {
          throw InvalidConfiguration(std::string(variant_name(v_)) +
                                     " needs an unconstrained lower level; use v-pbgd-con");
        }
        break;
      case Variant::ValueConstrained:
        if (p_.lower_unconstrained()) {
          throw InvalidConfiguration("v-pbgd-con needs a bounded lower-level set");
        }
        break;
      default:
        break;
    }
    if (kind_ == PenaltyKind::GradNormSq) {
      if (!p_.lower_unconstrained()) {
        throw InvalidConfiguration("grad-norm-sq penalty needs an unconstrained lower level");
      }
      if (!p_.has_hvp()) {
        throw MissingOracle("problem '" + p_.name + "' has no Hessian-vector products");
      }
    }
    if (v_ == Variant::Stochastic && !p_.g_grad_sample) {
      throw MissingOracle("problem '" + p_.name + "' has no stochastic gradient oracle");
    }
  }

  void setup_schedule() {
    if (c_.inner.mode == InnerSchedule::Mode::Fixed) return;
    if (v_ == Variant::Stochastic) {
      throw InvalidConfiguration("v-pbsgd uses a fixed inner iteration count");
    }
    mu_ = require(p_.constants.mu, "mu");
    L_g_ = require(p_.constants.L_g, "L_g");
    const double c = 1.0 - beta_ / (2.0 * mu_);
    if (c <= 0.0) {
      // beta >= 2 mu: the inner recursion bound is already exact after one step
      one_step_ = true;
      report_.notes.push_back("1 - beta/(2 mu) <= 0; logarithmic schedule reduces to T_k = 1");
    }
  }

  int inner_count(int k_one_based) const {
    if (c_.inner.mode == InnerSchedule::Mode::Fixed) return c_.inner.T;
    if (one_step_) return 1;
    const ScheduleMode mode =
        p_.lower_unconstrained() ? ScheduleMode::Unconstrained : ScheduleMode::Constrained;
    return inner_iteration_schedule(k_one_based, alpha_, beta_, c_.gamma, mu_, L_g_, mode);
  }

  void stochastic_notes() {
    if (!p_.constants.mu || !p_.constants.L_g) return;
    const double L_g = *p_.constants.L_g;
    const double need = 192.0 * *p_.constants.mu * L_g * L_g;
    const double have = sgd_step_square_sum(c_.inner.T, L_g);
    if (have < need) {
      std::ostringstream msg;
      msg << "sum of squared inner steps " << have << " is below 192 mu L_g^2 = " << need;
      report_.notes.push_back(msg.str());
    }
  }

  Vector minibatch_gradient(const Vector& x, const Vector& y, const Vector& y_hat, int k) const {
    Rng rng = make_stream(c_.seed, Stream::Outer, static_cast<std::uint64_t>(k));
    Vector sum = Vector::Zero(p_.dx + p_.dy);
    for (int i = 0; i < c_.batch_size; ++i) {
      sum += p_.f_grad_sample ? p_.f_grad_sample(x, y, rng) : p_.f_grad(x, y);
      const Rng saved = rng;
      sum += c_.gamma * p_.g_grad_sample(x, y, rng);
      Rng replay = saved;
      if (p_.dx > 0) sum.head(p_.dx) -= c_.gamma * p_.g_grad_sample(x, y_hat, replay).head(p_.dx);
    }
    return sum / static_cast<double>(c_.batch_size);
  }

  const ProblemSpec& p_;
  SolverConfig c_;
  Variant v_;
  PenaltyKind kind_ = PenaltyKind::ValueGap;
  SolveReport report_;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  double mu_ = 0.0;
  double L_g_ = 0.0;
  bool one_step_ = false;
};

}  // namespace

double resolve_alpha(const ProblemSpec& p, const SolverConfig& config, std::string_view algorithm) {
  const Variant v = variant_from_name(algorithm);
  return auto_alpha(p, config, v, variant_penalty(v, config));
}

SolveReport pbgd(const ProblemSpec& p, const SolverConfig& config) {
  return Loop(p, config, Variant::Generic).run();
}

SolveReport v_pbgd(const ProblemSpec& p, const SolverConfig& config) {
  return Loop(p, config, Variant::Value).run();
}

SolveReport v_pbgd_constrained(const ProblemSpec& p, const SolverConfig& config) {
  return Loop(p, config, Variant::ValueConstrained).run();
}

SolveReport g_pbgd(const ProblemSpec& p, const SolverConfig& config) {
  return Loop(p, config, Variant::GradNorm).run();
}

SolveReport v_pbsgd(const ProblemSpec& p, const SolverConfig& config) {
  return Loop(p, config, Variant::Stochastic).run();
}

}  // namespace bilevel
