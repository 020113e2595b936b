#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

namespace vem {

using Vec2 = Eigen::Vector2d;

/// CCW vertex loop of a simple polygon.
using Polygon = std::vector<Vec2>;

/// Vector-valued field R^2 -> R^2 (displacements, loads, boundary data).
using VectorField = std::function<Vec2(const Vec2&)>;

/// Thrown when a computed quantity violates a numerical gate: degenerate
/// cell, singular local system, broken stiffness spectrum, failed solve.
/// Precondition violations use std::invalid_argument instead.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vem
