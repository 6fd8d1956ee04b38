#pragma once

#include <functional>
#include <string>

#include "gpbo/box.hpp"
#include "gpbo/gp.hpp"
#include "gpbo/rng.hpp"

namespace gpbo::objectives {

/// Pluggable stochastic objective: the seam where a real simulation backend
/// would attach. Evaluation must be total on the box and deterministic given
/// the rng stream.
struct StochasticObjective {
    std::string id;
    int dims = 0;
    Box box;
    std::function<double(const Eigen::VectorXd&, Rng&)> evaluate;
    /// Analytic mean of the observable, when known; empty otherwise.
    std::function<double(const Eigen::VectorXd&)> true_mean;
    double eval_latency_seconds = 0.0;
    bool parallel_eval_safe = true;
};

/// (6x - 2)^2 sin(12x - 4) on [0, 1]. Global minimum near x = 0.757249,
/// f = -6.020740.
double forrester(double x);

/// Forrester plus N(0, noise_std^2) observation noise.
double forrester_noisy(double x, double noise_std, Rng& rng);

StochasticObjective make_forrester(double noise_std);

/// Engagement-time observable in [0, 600] seconds:
///   value < 300   blue victory (time to eliminate red)
///   value == 300  both sides survive the full engagement
///   value > 300   blue eliminated (600 minus the time blue survived)
struct TtkOutcome {
    double value = 300.0;

    bool blue_won() const { return value < 300.0; }
    bool both_survived() const { return value == 300.0; }
    bool blue_eliminated() const { return value > 300.0; }
};

/// Constants of the synthetic engagement surface. The shipped values are
/// versioned: every run against "synthetic_ttk" shares this ground truth.
/// The win-propensity field has two favorable basins at low intercept speed
/// and a failure ridge at high intercept speed; outcome durations are drawn
/// from truncated normals, which makes the observable heteroskedastic,
/// multi-modal, and censored at the 300 s engagement cap.
struct TtkConfig {
    int version = 1;

    // Win-propensity score s(x); win probability is sigmoid(s).
    double score_base = -2.5;
    double basin1_x0 = 0.22, basin1_x1 = 0.30, basin1_radius = 0.17, basin1_gain = 13.0;
    double basin2_x0 = 0.30, basin2_x1 = 0.72, basin2_radius = 0.15, basin2_gain = 10.0;
    double ridge_at = 0.70, ridge_width = 0.055, ridge_gain = 7.0;

    // Mutual-survival share of the non-win mass.
    double survival_weight = 0.25;

    // Blue-victory duration: truncated normal on (0, 300).
    double win_time_base = 70.0;
    double win_time_launch_gain = 150.0; // scaled by the launch coordinate
    double win_time_sd = 55.0;

    // Time blue survives when eliminated: truncated normal on (0, 300).
    double elim_time_mean = 140.0;
    double elim_time_sd = 70.0;

    static TtkConfig shipped() { return {}; }
};

/// Synthetic stand-in for the combat simulation, on the unit square
/// (intercept-speed coordinate, launch-delay coordinate).
class SyntheticTtk {
public:
    explicit SyntheticTtk(TtkConfig config = TtkConfig::shipped());

    const TtkConfig& config() const { return config_; }

    double win_probability(const Eigen::VectorXd& x) const;
    double survival_probability(const Eigen::VectorXd& x) const;

    TtkOutcome sample(const Eigen::VectorXd& x, Rng& rng) const;

    /// Branch-weighted closed-form expectation of the observable.
    double true_mean(const Eigen::VectorXd& x) const;

private:
    TtkConfig config_;
    void check_point(const Eigen::VectorXd& x) const;
};

StochasticObjective make_synthetic_ttk(TtkConfig config = TtkConfig::shipped());

/// Fidelity reference per the dense-sampling protocol: LH-sample n_dense
/// locations, evaluate each once, MAP-fit. n_dense must be >= 100 d.
gp::GpModel ground_truth_model(const StochasticObjective& objective, int n_dense,
                               const gp::Hyperpriors& priors, Rng& rng, int map_restarts = 8,
                               const gp::MapFitOptions& map_options = {});

/// Root-mean-square of (model mean - reference) over the grid rows.
double surrogate_rmse(const gp::GpModel& model,
                      const std::function<double(const Eigen::VectorXd&)>& reference,
                      const Eigen::MatrixXd& grid);

/// Regular grid over the box, per_dim points per dimension (row-major).
Eigen::MatrixXd evaluation_grid(const Box& box, int per_dim);

} // namespace gpbo::objectives
