#include "bilevel/constraint_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "bilevel/errors.hpp"

namespace bilevel {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Sort-and-threshold projection onto {v >= 0, sum v = scale}.
Vector project_simplex(const Vector& v, double scale) {
  const Eigen::Index n = v.size();
  std::vector<double> sorted(v.data(), v.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumsum = 0.0;
  double threshold = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    cumsum += sorted[static_cast<std::size_t>(i)];
    const double candidate = (cumsum - scale) / static_cast<double>(i + 1);
    if (sorted[static_cast<std::size_t>(i)] - candidate > 0.0) threshold = candidate;
  }
  return (v.array() - threshold).max(0.0).matrix();
}

}  // namespace

ConstraintSet ConstraintSet::full_space(Eigen::Index dim) {
  if (dim < 0) throw InvalidArgument("negative dimension");
  return ConstraintSet(FullSpaceData{}, dim);
}

ConstraintSet ConstraintSet::box(Vector lower, Vector upper) {
  if (lower.size() != upper.size()) throw InvalidArgument("box bounds differ in length");
  if ((lower.array() > upper.array()).any()) throw InvalidArgument("box lower bound exceeds upper");
  const Eigen::Index dim = lower.size();
  return ConstraintSet(BoxData{std::move(lower), std::move(upper)}, dim);
}

ConstraintSet ConstraintSet::ball(Vector center, double radius) {
  if (!(radius >= 0.0)) throw InvalidArgument("ball radius must be nonnegative");
  const Eigen::Index dim = center.size();
  return ConstraintSet(BallData{std::move(center), radius}, dim);
}

ConstraintSet ConstraintSet::simplex(Eigen::Index dim, double scale) {
  if (dim < 1) throw InvalidArgument("simplex needs dimension >= 1");
  if (!(scale > 0.0)) throw InvalidArgument("simplex scale must be positive");
  return ConstraintSet(SimplexData{scale}, dim);
}

ConstraintSet ConstraintSet::interval(double lo, double hi, Eigen::Index dim) {
  if (!(lo <= hi)) throw InvalidArgument("interval lo exceeds hi");
  return ConstraintSet(IntervalData{lo, hi}, dim);
}

ConstraintSet::Kind ConstraintSet::kind() const noexcept {
  return std::visit(Overloaded{[](const FullSpaceData&) { return Kind::FullSpace; },
                               [](const BoxData&) { return Kind::Box; },
                               [](const BallData&) { return Kind::Ball; },
                               [](const SimplexData&) { return Kind::Simplex; },
                               [](const IntervalData&) { return Kind::Interval; }},
                    data_);
}

bool ConstraintSet::is_box_like() const noexcept {
  const Kind k = kind();
  return k == Kind::FullSpace || k == Kind::Box || k == Kind::Interval;
}

Vector ConstraintSet::project(const Vector& v) const {
  if (v.size() != dim_) {
    std::ostringstream msg;
    msg << "projection dimension mismatch: set has " << dim_ << ", vector has " << v.size();
    throw InvalidArgument(msg.str());
  }
  return std::visit(
      Overloaded{
          [&](const FullSpaceData&) -> Vector { return v; },
          [&](const BoxData& b) -> Vector { return v.cwiseMax(b.lower).cwiseMin(b.upper); },
          [&](const BallData& b) -> Vector {
            const Vector d = v - b.center;
            const double norm = d.norm();
            if (norm <= b.radius) return v;
            return b.center + (b.radius / norm) * d;
          },
          [&](const SimplexData& s) -> Vector { return project_simplex(v, s.scale); },
          [&](const IntervalData& iv) -> Vector {
            return v.array().max(iv.lo).min(iv.hi).matrix();
          }},
      data_);
}

bool ConstraintSet::contains(const Vector& v, double tol) const {
  if (v.size() != dim_) return false;
  return std::visit(
      Overloaded{
          [&](const FullSpaceData&) { return true; },
          [&](const BoxData& b) {
            return ((v - b.lower).array() >= -tol).all() && ((b.upper - v).array() >= -tol).all();
          },
          [&](const BallData& b) { return (v - b.center).norm() <= b.radius + tol; },
          [&](const SimplexData& s) {
            return (v.array() >= -tol).all() && std::abs(v.sum() - s.scale) <= tol * (1.0 + s.scale);
          },
          [&](const IntervalData& iv) {
            return (v.array() >= iv.lo - tol).all() && (v.array() <= iv.hi + tol).all();
          }},
      data_);
}

Vector ConstraintSet::lower_bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{[&](const BoxData& b) -> Vector { return b.lower; },
                               [&](const IntervalData& iv) -> Vector {
                                 return Vector::Constant(dim_, iv.lo);
                               },
                               [&](const FullSpaceData&) -> Vector { return Vector::Constant(dim_, -inf); },
                               [&](const auto&) -> Vector {
                                 throw InvalidArgument("set is not box-like");
                               }},
                    data_);
}

Vector ConstraintSet::upper_bounds() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(Overloaded{[&](const BoxData& b) -> Vector { return b.upper; },
                               [&](const IntervalData& iv) -> Vector {
                                 return Vector::Constant(dim_, iv.hi);
                               },
                               [&](const FullSpaceData&) -> Vector { return Vector::Constant(dim_, inf); },
                               [&](const auto&) -> Vector {
                                 throw InvalidArgument("set is not box-like");
                               }},
                    data_);
}

std::string ConstraintSet::describe() const {
  std::ostringstream out;
  std::visit(Overloaded{[&](const FullSpaceData&) { out << "R^" << dim_; },
                        [&](const BoxData& b) {
                          out << "Box(" << b.lower.transpose() << " ; " << b.upper.transpose() << ")";
                        },
                        [&](const BallData& b) { out << "Ball(radius " << b.radius << ")"; },
                        [&](const SimplexData& s) { out << "Simplex(" << s.scale << ")^" << dim_; },
                        [&](const IntervalData& iv) {
                          out << "[" << iv.lo << ", " << iv.hi << "]^" << dim_;
                        }},
             data_);
  return out.str();
}

Vector project_product(const ConstraintSet& upper, const ConstraintSet& lower, const Vector& z) {
  if (z.size() != upper.dim() + lower.dim()) {
    throw InvalidArgument("joint projection dimension mismatch");
  }
  return join(upper.project(z.head(upper.dim())), lower.project(z.tail(lower.dim())));
}

}  // namespace bilevel
