#pragma once

#include <Eigen/Core>
#include <functional>

#include "gpbo/box.hpp"

namespace gpbo::direct {

/// Affine map from the box to the unit cube and back. Round-trips are exact
/// to within ~1e-15.
Eigen::VectorXd normalize(const Eigen::VectorXd& x, const Box& box);
Eigen::VectorXd denormalize(const Eigen::VectorXd& u, const Box& box);

struct Result {
    Eigen::VectorXd x_min;
    double f_min = 0.0;
    int evals_used = 0;
};

/// DIRECT (dividing rectangles) global minimization over a box.
///
/// Normalized-space formulation: the search starts from the box center,
/// repeatedly screens potentially-optimal rectangles via lower-convex-hull
/// selection with balance parameter eps, and trisects them along their
/// longest sides. Deterministic: ties among equal-measure rectangles break
/// on lowest center value, then insertion order.
///
/// Non-finite objective values score as +infinity and the search continues;
/// if no finite value is ever seen the call fails.
Result minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Box& box,
                int max_evals, double eps = 1e-4);

} // namespace gpbo::direct
