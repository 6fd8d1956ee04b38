#include "gpbo/objectives.hpp"

#include <cmath>
#include <memory>

#include "gpbo/lhs.hpp"
#include "gpbo/math.hpp"

namespace gpbo::objectives {

double forrester(double x) {
    const double a = 6.0 * x - 2.0;
    return a * a * std::sin(12.0 * x - 4.0);
}

double forrester_noisy(double x, double noise_std, Rng& rng) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ContractViolation("forrester_noisy: x must lie in [0, 1]");
    }
    if (!(noise_std >= 0.0)) {
        throw ContractViolation("forrester_noisy: noise_std must be nonnegative");
    }
    return forrester(x) + noise_std * rng.normal();
}

StochasticObjective make_forrester(double noise_std) {
    StochasticObjective obj;
    obj.id = "forrester";
    obj.dims = 1;
    obj.box = Box::unit(1);
    obj.evaluate = [noise_std](const Eigen::VectorXd& x, Rng& rng) {
        return forrester_noisy(x(0), noise_std, rng);
    };
    obj.true_mean = [](const Eigen::VectorXd& x) { return forrester(x(0)); };
    return obj;
}

namespace {

// Outcome-branch truncation window, shrunk a hair from [0, 300] so a win
// draw can never collide with the exact mutual-survival value.
constexpr double kBranchLo = 1e-6;
constexpr double kBranchHi = 300.0 - 1e-6;
constexpr double kSurvivalValue = 300.0;

double gaussian_bump(double x0, double x1, double c0, double c1, double radius) {
    const double d0 = x0 - c0;
    const double d1 = x1 - c1;
    return std::exp(-(d0 * d0 + d1 * d1) / (2.0 * radius * radius));
}

} // namespace

SyntheticTtk::SyntheticTtk(TtkConfig config) : config_(config) {}

void SyntheticTtk::check_point(const Eigen::VectorXd& x) const {
    if (x.size() != 2) {
        throw ContractViolation("SyntheticTtk: expected a 2-d point");
    }
    if (!(x(0) >= 0.0 && x(0) <= 1.0 && x(1) >= 0.0 && x(1) <= 1.0)) {
        throw ContractViolation("SyntheticTtk: point must lie in the unit square");
    }
}

double SyntheticTtk::win_probability(const Eigen::VectorXd& x) const {
    check_point(x);
    const TtkConfig& c = config_;
    double s = c.score_base;
    s += c.basin1_gain * gaussian_bump(x(0), x(1), c.basin1_x0, c.basin1_x1, c.basin1_radius);
    s += c.basin2_gain * gaussian_bump(x(0), x(1), c.basin2_x0, c.basin2_x1, c.basin2_radius);
    s -= c.ridge_gain * math::sigmoid((x(0) - c.ridge_at) / c.ridge_width);
    return math::sigmoid(s);
}

double SyntheticTtk::survival_probability(const Eigen::VectorXd& x) const {
    return config_.survival_weight * (1.0 - win_probability(x));
}

TtkOutcome SyntheticTtk::sample(const Eigen::VectorXd& x, Rng& rng) const {
    const double p_win = win_probability(x);
    const double p_surv = config_.survival_weight * (1.0 - p_win);
    // Two uniforms per draw, branch choice first, regardless of branch.
    const double u_branch = rng.uniform();
    const double u_value = rng.uniform();
    if (u_branch < p_win) {
        const double mu = config_.win_time_base + config_.win_time_launch_gain * x(1);
        return {math::truncated_normal_sample(mu, config_.win_time_sd, kBranchLo, kBranchHi,
                                              u_value)};
    }
    if (u_branch < p_win + p_surv) {
        return {kSurvivalValue};
    }
    const double t_elim = math::truncated_normal_sample(config_.elim_time_mean,
                                                        config_.elim_time_sd, kBranchLo,
                                                        kBranchHi, u_value);
    return {600.0 - t_elim};
}

double SyntheticTtk::true_mean(const Eigen::VectorXd& x) const {
    const double p_win = win_probability(x);
    const double p_surv = config_.survival_weight * (1.0 - p_win);
    const double p_loss = 1.0 - p_win - p_surv;
    const double mu_win = config_.win_time_base + config_.win_time_launch_gain * x(1);
    const double e_win =
        math::truncated_normal_mean(mu_win, config_.win_time_sd, kBranchLo, kBranchHi);
    const double e_elim = math::truncated_normal_mean(config_.elim_time_mean,
                                                      config_.elim_time_sd, kBranchLo, kBranchHi);
    return p_win * e_win + p_surv * kSurvivalValue + p_loss * (600.0 - e_elim);
}

StochasticObjective make_synthetic_ttk(TtkConfig config) {
    auto ttk = std::make_shared<SyntheticTtk>(config);
    StochasticObjective obj;
    obj.id = "synthetic_ttk";
    obj.dims = 2;
    obj.box = Box::unit(2);
    obj.evaluate = [ttk](const Eigen::VectorXd& x, Rng& rng) {
        return ttk->sample(x, rng).value;
    };
    obj.true_mean = [ttk](const Eigen::VectorXd& x) { return ttk->true_mean(x); };
    return obj;
}

gp::GpModel ground_truth_model(const StochasticObjective& objective, int n_dense,
                               const gp::Hyperpriors& priors, Rng& rng, int map_restarts,
                               const gp::MapFitOptions& map_options) {
    if (n_dense < 100 * objective.dims) {
        throw ContractViolation("ground_truth_model: n_dense must be at least 100 d");
    }
    Rng lh_rng = rng.split("truth_lh");
    const Eigen::MatrixXd X = sampling::latin_hypercube(n_dense, objective.box, lh_rng);
    Eigen::VectorXd y(n_dense);
    for (int i = 0; i < n_dense; ++i) {
        Rng er = rng.split("truth_eval", static_cast<std::uint64_t>(i));
        y(i) = objective.evaluate(X.row(i).transpose(), er);
    }
    const gp::Dataset dataset{X, y};
    Rng fit_rng = rng.split("truth_fit");
    const gp::KernelHyperparams params =
        gp::map_fit(dataset, priors, map_restarts, fit_rng, map_options);
    return gp::fit(dataset, params);
}

double surrogate_rmse(const gp::GpModel& model,
                      const std::function<double(const Eigen::VectorXd&)>& reference,
                      const Eigen::MatrixXd& grid) {
    if (grid.rows() == 0) {
        throw ContractViolation("surrogate_rmse: grid must be nonempty");
    }
    const gp::Prediction pred = gp::predict(model, grid);
    double sum_sq = 0.0;
    for (long i = 0; i < grid.rows(); ++i) {
        const double err = pred.mu(i) - reference(grid.row(i).transpose());
        sum_sq += err * err;
    }
    return std::sqrt(sum_sq / static_cast<double>(grid.rows()));
}

Eigen::MatrixXd evaluation_grid(const Box& box, int per_dim) {
    if (per_dim < 1) {
        throw ContractViolation("evaluation_grid: per_dim must be positive");
    }
    const int d = box.dim();
    long total = 1;
    for (int k = 0; k < d; ++k) total *= per_dim;
    Eigen::MatrixXd grid(total, d);
    for (long idx = 0; idx < total; ++idx) {
        long rem = idx;
        for (int k = d - 1; k >= 0; --k) {
            const long cell = rem % per_dim;
            rem /= per_dim;
            const double frac = per_dim == 1 ? 0.5
                                             : static_cast<double>(cell) /
                                                   static_cast<double>(per_dim - 1);
            grid(idx, k) = box.lower(k) + frac * (box.upper(k) - box.lower(k));
        }
    }
    return grid;
}

} // namespace gpbo::objectives
