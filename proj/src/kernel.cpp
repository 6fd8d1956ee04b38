#include "gpbo/kernel.hpp"

#include <cmath>

namespace gpbo::kernel {

namespace {
constexpr double kSqrt3 = 1.7320508075688772;
}

double scaled_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& x_prime,
                       const KernelHyperparams& params) {
    if (x.size() != x_prime.size() || x.size() != params.log_lengthscales.size()) {
        throw ContractViolation("scaled_distance: dimension mismatch");
    }
    const Eigen::ArrayXd inv_l = (-params.log_lengthscales.array()).exp();
    const Eigen::ArrayXd scaled = (x.array() - x_prime.array()) * inv_l;
    return std::sqrt(scaled.square().sum());
}

double matern32(double r, const KernelHyperparams& params) {
    if (!(r >= 0.0)) {
        throw ContractViolation("matern32: r must be nonnegative");
    }
    const double a = kSqrt3 * r;
    return params.signal_variance() * (1.0 + a) * std::exp(-a);
}

Eigen::MatrixXd covariance_matrix(const Eigen::MatrixXd& X, const Eigen::MatrixXd& X_prime,
                                  const KernelHyperparams& params) {
    const int d = params.dim();
    if (X.cols() != d || X_prime.cols() != d) {
        throw ContractViolation("covariance_matrix: dimension mismatch");
    }
    const Eigen::ArrayXd inv_l = (-params.log_lengthscales.array()).exp();
    const Eigen::MatrixXd A = X * inv_l.matrix().asDiagonal();
    const Eigen::MatrixXd B = X_prime * inv_l.matrix().asDiagonal();

    const Eigen::VectorXd a2 = A.rowwise().squaredNorm();
    const Eigen::VectorXd b2 = B.rowwise().squaredNorm();
    Eigen::MatrixXd sq = a2.replicate(1, B.rows()) + b2.transpose().replicate(A.rows(), 1) -
                         2.0 * (A * B.transpose());
    // Round-off can push tiny squared distances slightly negative.
    Eigen::ArrayXXd r = sq.array().max(0.0).sqrt() * kSqrt3;
    const double sf2 = params.signal_variance();
    return (sf2 * (1.0 + r) * (-r).exp()).matrix();
}

Eigen::MatrixXd covariance_matrix_symmetric(const Eigen::MatrixXd& X,
                                            const KernelHyperparams& params) {
    const int d = params.dim();
    if (X.cols() != d) {
        throw ContractViolation("covariance_matrix_symmetric: dimension mismatch");
    }
    const long n = X.rows();
    const double sf2 = params.signal_variance();
    const Eigen::ArrayXd inv_l = (-params.log_lengthscales.array()).exp();
    Eigen::MatrixXd K(n, n);
    for (long i = 0; i < n; ++i) {
        K(i, i) = sf2;
        for (long j = i + 1; j < n; ++j) {
            const Eigen::ArrayXd diff = (X.row(i) - X.row(j)).transpose().array() * inv_l;
            const double a = kSqrt3 * std::sqrt(diff.square().sum());
            const double v = sf2 * (1.0 + a) * std::exp(-a);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

PairwiseSqDiff PairwiseSqDiff::build(const Eigen::MatrixXd& X) {
    PairwiseSqDiff cache;
    cache.n = static_cast<int>(X.rows());
    cache.sq_diff.reserve(static_cast<std::size_t>(X.cols()));
    for (long k = 0; k < X.cols(); ++k) {
        const Eigen::VectorXd col = X.col(k);
        Eigen::MatrixXd D = col.replicate(1, cache.n) - col.transpose().replicate(cache.n, 1);
        cache.sq_diff.push_back(D.array().square().matrix());
    }
    return cache;
}

Eigen::MatrixXd PairwiseSqDiff::covariance(const KernelHyperparams& params) const {
    if (static_cast<int>(sq_diff.size()) != params.dim()) {
        throw ContractViolation("PairwiseSqDiff: dimension mismatch");
    }
    Eigen::ArrayXXd sq = Eigen::ArrayXXd::Zero(n, n);
    for (int k = 0; k < params.dim(); ++k) {
        const double inv_l2 = std::exp(-2.0 * params.log_lengthscales(k));
        sq += sq_diff[static_cast<std::size_t>(k)].array() * inv_l2;
    }
    Eigen::ArrayXXd r = sq.max(0.0).sqrt() * kSqrt3;
    const double sf2 = params.signal_variance();
    return (sf2 * (1.0 + r) * (-r).exp()).matrix();
}

} // namespace gpbo::kernel
