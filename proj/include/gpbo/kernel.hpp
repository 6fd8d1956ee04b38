#pragma once

#include <Eigen/Core>

#include "gpbo/errors.hpp"

namespace gpbo::kernel {

/// Matern 3/2 ARD kernel hyperparameters plus the constant mean of the
/// surrogate. Scale parameters are stored in log space so that positivity
/// is structural during MAP search; mean_constant is in objective units.
struct KernelHyperparams {
    Eigen::VectorXd log_lengthscales; ///< one per input dimension
    double log_signal_amplitude = 0.0;
    double log_noise_std = 0.0;
    double mean_constant = 0.0;

    int dim() const { return static_cast<int>(log_lengthscales.size()); }

    Eigen::VectorXd lengthscales() const { return log_lengthscales.array().exp(); }
    double signal_amplitude() const { return std::exp(log_signal_amplitude); }
    double signal_variance() const { return std::exp(2.0 * log_signal_amplitude); }
    double noise_std() const { return std::exp(log_noise_std); }
    double noise_variance() const { return std::exp(2.0 * log_noise_std); }

    /// d lengthscales of 1, unit amplitude, noise std 0.1, zero mean.
    static KernelHyperparams defaults(int d) {
        KernelHyperparams p;
        p.log_lengthscales = Eigen::VectorXd::Zero(d);
        p.log_signal_amplitude = 0.0;
        p.log_noise_std = std::log(0.1);
        p.mean_constant = 0.0;
        return p;
    }

    void validate() const {
        if (log_lengthscales.size() == 0) {
            throw ContractViolation("KernelHyperparams: need at least one lengthscale");
        }
        auto finite = [](double v) { return std::isfinite(v); };
        for (int i = 0; i < log_lengthscales.size(); ++i) {
            if (!finite(log_lengthscales(i))) {
                throw ContractViolation("KernelHyperparams: non-finite log lengthscale");
            }
        }
        if (!finite(log_signal_amplitude) || !finite(log_noise_std) || !finite(mean_constant)) {
            throw ContractViolation("KernelHyperparams: non-finite entry");
        }
    }
};

/// Lengthscale-weighted Euclidean distance sqrt(sum_i ((x_i - x'_i)/l_i)^2).
/// Symmetric; zero iff x == x'.
double scaled_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                       const KernelHyperparams& params);

/// Matern 3/2 on an already lengthscale-weighted distance r >= 0:
///   sigma_f^2 * (1 + sqrt(3) r) * exp(-sqrt(3) r).
/// Strictly decreasing in r, equal to sigma_f^2 at r = 0.
double matern32(double r, const KernelHyperparams& params);

/// Cross-covariance matrix, entry (i,j) = matern32(scaled_distance(X_i, X'_j)).
/// X is n x d, X_prime is m x d (rows are points).
Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_prime,
                                  const KernelHyperparams& params);

/// K(X, X) assembled by symmetric fill: upper triangle computed, mirrored,
/// diagonal set to sigma_f^2 exactly. Result equals its transpose exactly.
Eigen::MatrixXd covariance_matrix_symmetric(const Eigen::MatrixXd& X,
                                            const KernelHyperparams& params);

/// Per-dimension squared differences cache for repeated covariance assembly
/// over one fixed dataset with varying hyperparameters (the MAP search hot
/// path). sq_diff[k](i,j) = (X(i,k) - X(j,k))^2.
struct PairwiseSqDiff {
    std::vector<Eigen::MatrixXd> sq_diff;
    int n = 0;

    static PairwiseSqDiff build(const Eigen::MatrixXd& X);

    /// Symmetric K(X,X) for the cached dataset under params.
    Eigen::MatrixXd covariance(const KernelHyperparams& params) const;
};

} // namespace gpbo::kernel
