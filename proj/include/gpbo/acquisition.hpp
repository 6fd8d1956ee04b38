#pragma once

#include <optional>

#include "gpbo/box.hpp"
#include "gpbo/gp.hpp"
#include "gpbo/rng.hpp"

namespace gpbo::acq {

enum class Kind { EI, UCB, TS };

const char* kind_name(Kind k);
std::optional<Kind> kind_from_name(std::string_view name);

inline constexpr double kDefaultUcbBeta = 2.0;

/// Which acquisition to score and how to batch it. beta is meaningful for
/// UCB only; q is the batch size (MS).
struct AcquisitionSpec {
    Kind kind = Kind::EI;
    std::optional<double> beta; ///< present iff kind == UCB
    int q = 1;
    bool minimize = true;

    void validate() const {
        if (q < 1) {
            throw ContractViolation("AcquisitionSpec: q must be >= 1");
        }
        if ((kind == Kind::UCB) != beta.has_value()) {
            throw ContractViolation("AcquisitionSpec: beta must be present iff kind is UCB");
        }
        if (beta && !(*beta > 0.0)) {
            throw ContractViolation("AcquisitionSpec: beta must be positive");
        }
    }

    static AcquisitionSpec ei(int q = 1) { return {Kind::EI, std::nullopt, q, true}; }
    static AcquisitionSpec ucb(double beta = kDefaultUcbBeta, int q = 1) {
        return {Kind::UCB, beta, q, true};
    }
    static AcquisitionSpec ts(int q = 1) { return {Kind::TS, std::nullopt, q, true}; }
};

/// Best optimum estimate over the observed locations, measured on the GP
/// predicted mean (never the raw best sample; observations are noisy).
struct Incumbent {
    Eigen::VectorXd x_best; ///< empty when the model has no data
    double f_best = 0.0;
};

Incumbent incumbent_of(const gp::GpModel& model, bool minimize);

/// Expected improvement over the incumbent at a point with predicted mean mu
/// and standard deviation sigma. Zero when sigma is zero. Always >= 0.
double expected_improvement(double mu, double sigma, const Incumbent& incumbent, bool minimize);

/// mu - beta sigma for minimization (lower confidence bound), mu + beta sigma
/// otherwise.
double confidence_bound(double mu, double sigma, double beta, bool minimize);

/// Budgets for optimizing acquisition surfaces.
struct ProposeOptions {
    int direct_evals_per_dim = 500;   ///< DIRECT budget = this * d
    double direct_eps = 1e-4;
    int ts_candidates_per_dim = 2048; ///< TS grid size = this * d, refreshed per call
};

/// Single proposal: DIRECT extremum of the acquisition surface for EI/UCB,
/// extremum of one joint posterior draw over a fresh candidate grid for TS.
Eigen::VectorXd propose_single(const gp::GpModel& model, const AcquisitionSpec& spec,
                               const Box& bounds, const ProposeOptions& options, Rng& rng);

/// Sequential greedy q-EI (constant liar): maximize EI, impute the incumbent
/// value at the chosen point, refit the covariance with hyperparameters
/// frozen, repeat. q = 1 reduces exactly to propose_single under EI.
Eigen::MatrixXd propose_batch_qei(const gp::GpModel& model, const AcquisitionSpec& spec,
                                  const Box& bounds, const ProposeOptions& options, Rng& rng);

/// Batch UCB with pure exploration: first point at the confidence-bound
/// extremum, each subsequent point at the posterior-variance maximum after
/// treating the earlier picks as pending observations (noise-inflated).
Eigen::MatrixXd propose_batch_ucb_pe(const gp::GpModel& model, const AcquisitionSpec& spec,
                                     const Box& bounds, const ProposeOptions& options, Rng& rng);

/// q independent joint posterior draws over one shared candidate grid, each
/// contributing its extremum. Duplicate proposals are permitted.
Eigen::MatrixXd propose_batch_ts(const gp::GpModel& model, const AcquisitionSpec& spec,
                                 const Box& bounds, const ProposeOptions& options, Rng& rng);

/// Dispatch on spec.kind; returns spec.q rows.
Eigen::MatrixXd propose(const gp::GpModel& model, const AcquisitionSpec& spec, const Box& bounds,
                        const ProposeOptions& options, Rng& rng);

} // namespace gpbo::acq
