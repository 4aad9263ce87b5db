#pragma once

#include <functional>

#include "cmasao/rbf.hpp"

namespace cmasao {

/// Cube [x_mean - xi/2, x_mean + xi/2] within which the surrogate is
/// minimized; side length from the spread of the training set.
struct TrustBox {
    Vector lower;
    Vector upper;
    double xi = 0.0;
};

/// xi = 0.1 * min over axes of the training-point spread; box centered at
/// x_mean. Throws DegenerateBoxError when some axis has zero spread.
TrustBox trust_box(const std::vector<Vector>& training_points, const Vector& x_mean);

/// Multi-start projected gradient descent on a generic differentiable
/// objective within a box. Starts: x_mean plus 4 uniform points in the box;
/// Armijo backtracking with halving; budget counts objective evaluations.
Vector minimize_in_box(const std::function<double(const Vector&)>& f,
                       const std::function<Vector(const Vector&)>& grad,
                       const TrustBox& box, const Vector& x_mean, long budget,
                       Rng& rng);

/// Minimize the surrogate within the trust box. The result lies in the box
/// and predicts no worse than x_mean.
Vector find_surrogate_minimum(const RbfModel& model, const TrustBox& box,
                              const Vector& x_mean, long budget, Rng& rng);

} // namespace cmasao
