#pragma once

#include <Eigen/Core>

#include "gpbo/errors.hpp"

namespace gpbo {

/// Axis-aligned search box. lower(i) < upper(i) for every dimension.
struct Box {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;

    Box() = default;
    Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
        validate();
    }

    /// [0,1]^d.
    static Box unit(int d) {
        return Box(Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d));
    }

    int dim() const { return static_cast<int>(lower.size()); }

    Eigen::VectorXd center() const { return 0.5 * (lower + upper); }
    Eigen::VectorXd widths() const { return upper - lower; }

    bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
        if (x.size() != lower.size()) return false;
        for (int i = 0; i < lower.size(); ++i) {
            if (x(i) < lower(i) - tol || x(i) > upper(i) + tol) return false;
        }
        return true;
    }

    void validate() const {
        if (lower.size() != upper.size() || lower.size() == 0) {
            throw ContractViolation("Box: bound vectors must be nonempty and equal-sized");
        }
        for (int i = 0; i < lower.size(); ++i) {
            if (!(lower(i) < upper(i))) {
                throw ContractViolation("Box: lower must be strictly below upper in every dimension");
            }
            if (!std::isfinite(lower(i)) || !std::isfinite(upper(i))) {
                throw ContractViolation("Box: bounds must be finite");
            }
        }
    }
};

} // namespace gpbo
