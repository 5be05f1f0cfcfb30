#pragma once

#include <string>
#include <variant>

#include "bilevel/types.hpp"

namespace bilevel {

/// Closed convex set with an exact Euclidean projection.
class ConstraintSet {
 public:
  enum class Kind { FullSpace, Box, Ball, Simplex, Interval };

  struct FullSpaceData {};
  struct BoxData {
    Vector lower, upper;
  };
  struct BallData {
    Vector center;
    double radius;
  };
  struct SimplexData {
    double scale;
  };
  struct IntervalData {
    double lo, hi;
  };

  ConstraintSet() = default;

  static ConstraintSet full_space(Eigen::Index dim);
  static ConstraintSet box(Vector lower, Vector upper);
  static ConstraintSet ball(Vector center, double radius);
  /// {v >= 0, sum(v) = scale}.
  static ConstraintSet simplex(Eigen::Index dim, double scale = 1.0);
  /// Every coordinate in [lo, hi].
  static ConstraintSet interval(double lo, double hi, Eigen::Index dim = 1);

  Kind kind() const noexcept;
  Eigen::Index dim() const noexcept { return dim_; }
  bool bounded() const noexcept { return kind() != Kind::FullSpace; }
  /// Full space, box or interval: projection acts coordinatewise.
  bool is_box_like() const noexcept;

  Vector project(const Vector& v) const;
  bool contains(const Vector& v, double tol = 1e-12) const;

  /// Coordinatewise bounds for box-like sets (+-inf for FullSpace).
  Vector lower_bounds() const;
  Vector upper_bounds() const;

  std::string describe() const;

 private:
  using Data = std::variant<FullSpaceData, BoxData, BallData, SimplexData, IntervalData>;
  ConstraintSet(Data data, Eigen::Index dim) : data_(std::move(data)), dim_(dim) {}

  Data data_{FullSpaceData{}};
  Eigen::Index dim_ = 0;
};

/// Projection onto upper_set x lower_set of the concatenated z = (x, y).
Vector project_product(const ConstraintSet& upper, const ConstraintSet& lower, const Vector& z);

}  // namespace bilevel
