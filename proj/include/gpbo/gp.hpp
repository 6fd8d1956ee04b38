#pragma once

#include <Eigen/Core>

#include "gpbo/errors.hpp"
#include "gpbo/kernel.hpp"
#include "gpbo/rng.hpp"

namespace gpbo::gp {

using kernel::KernelHyperparams;

/// Paired inputs and noisy scalar observations. Rows of X are points.
struct Dataset {
    Eigen::MatrixXd X; ///< n x d
    Eigen::VectorXd y; ///< n

    long n() const { return X.rows(); }
    int dim() const { return static_cast<int>(X.cols()); }

    void validate() const {
        if (X.rows() != y.size()) {
            throw ContractViolation("Dataset: row count of X must equal length of y");
        }
        if (!X.allFinite() || !y.allFinite()) {
            throw ContractViolation("Dataset: entries must be finite");
        }
    }

    /// New dataset with extra rows appended (original untouched).
    Dataset appended(const Eigen::MatrixXd& X_new, const Eigen::VectorXd& y_new) const;
};

/// Hyperprior set for MAP learning. The mean gets a Gaussian prior; every
/// scale parameter gets a uniform prior over an interval in log space.
struct Hyperpriors {
    double mean_mu = 0.0;
    double mean_sigma = 100.0;
    double lengthscale_log_lo = 0.0;              // log 1
    double lengthscale_log_hi = 1.0986122886681098; // log 3
    double amplitude_log_lo = 0.0;
    double amplitude_log_hi = 1.0986122886681098;
    double noise_log_lo = 2.995732273553991;  // log 20
    double noise_log_hi = 5.991464547107982;  // log 400

    void validate() const {
        if (!(lengthscale_log_lo < lengthscale_log_hi) || !(amplitude_log_lo < amplitude_log_hi) ||
            !(noise_log_lo < noise_log_hi)) {
            throw ContractViolation("Hyperpriors: interval lower bounds must be below upper bounds");
        }
        if (!(mean_sigma > 0.0)) {
            throw ContractViolation("Hyperpriors: mean_sigma must be positive");
        }
    }
};

/// Returned when a uniform hyperprior bound is violated (or no factorization
/// exists at any jitter level): effectively log-density zero.
inline constexpr double kLogDensityFloor = -1e300;

/// Immutable fitted posterior: dataset, hyperparameters, and the Cholesky
/// factor of K(X,X) + sigma_n^2 I (+ jitter if the ladder engaged).
struct GpModel {
    Dataset data;
    KernelHyperparams params;
    Eigen::MatrixXd chol;  ///< L (lower), n x n
    Eigen::VectorXd alpha; ///< (K + sigma_n^2 I)^-1 (y - mean)
    double jitter_used = 0.0;

    long n() const { return data.n(); }
    int dim() const { return params.dim(); }
};

struct Prediction {
    Eigen::VectorXd mu;  ///< posterior mean, includes mean_constant
    Eigen::VectorXd var; ///< latent-function variance, clamped at 0; excludes noise
};

struct CholeskyResult {
    Eigen::MatrixXd L;
    double jitter = 0.0;
};

/// Cholesky with an escalating diagonal jitter ladder
/// {0, 1e-10, 1e-8, 1e-6, 1e-4} * scale. Throws IllConditionedCovariance
/// (carrying the attempted jitters) when even the top rung fails.
CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& A, double scale);

/// Exact GP fit. n = 0 yields the prior model (predictions are the constant
/// mean with variance sigma_f^2 everywhere).
GpModel fit(const Dataset& dataset, const KernelHyperparams& params);

Prediction predict(const GpModel& model, const Eigen::MatrixXd& X_star);

/// Draws from the joint posterior at X_star (full covariance, not just the
/// marginals). Row r of the result is draw r. Deterministic given rng.
Eigen::MatrixXd sample_posterior_joint(const GpModel& model, const Eigen::MatrixXd& X_star,
                                       int n_draws, Rng& rng);

/// log N(y | mean, K + sigma_n^2 I) plus log hyperprior densities.
/// Returns kLogDensityFloor outside the uniform-prior support or when the
/// covariance cannot be factorized at any jitter level.
double log_map_objective(const KernelHyperparams& params, const Dataset& dataset,
                         const Hyperpriors& priors);

/// Same objective evaluated against a prebuilt pairwise-difference cache
/// (hot path of map_fit; cache must come from dataset.X).
double log_map_objective(const KernelHyperparams& params, const Dataset& dataset,
                         const Hyperpriors& priors, const kernel::PairwiseSqDiff& cache);

struct MapFitOptions {
    int max_evals_per_restart = 400; ///< objective-evaluation cap per local search
    double initial_step_fraction = 0.25; ///< of the search-box width
    double step_tolerance = 1e-3;        ///< stop when all steps shrink below this fraction
};

/// MAP point estimate by multi-start bounded compass search. Restart inits
/// are Latin-hypercube sampled from the prior support (the Gaussian mean
/// prior contributes a +-2 sigma init window and a +-5 sigma search box).
/// The returned params attain an objective >= every restart's initial value.
KernelHyperparams map_fit(const Dataset& dataset, const Hyperpriors& priors, int n_restarts,
                          Rng& rng, const MapFitOptions& options = {});

} // namespace gpbo::gp
