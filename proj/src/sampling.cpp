#include "gpbo/sampling.hpp"

#include "gpbo/direct.hpp"

#include <cmath>

namespace gpbo::sampling {

const char* termination_name(Termination t) {
    switch (t) {
        case Termination::budget_exhausted: return "budget_exhausted";
        case Termination::wall_clock: return "wall_clock";
        case Termination::covariance_failure: return "covariance_failure";
    }
    return "?";
}

std::optional<Termination> termination_from_name(std::string_view name) {
    if (name == "budget_exhausted") return Termination::budget_exhausted;
    if (name == "wall_clock") return Termination::wall_clock;
    if (name == "covariance_failure") return Termination::covariance_failure;
    return std::nullopt;
}

Eigen::MatrixXd expand_plan(const Eigen::MatrixXd& proposals, const SamplingPlan& plan) {
    plan.validate();
    if (proposals.rows() != plan.ms) {
        throw ContractViolation("expand_plan: proposal count must equal ms");
    }
    Eigen::MatrixXd requests(plan.ms * plan.rs, proposals.cols());
    long row = 0;
    for (int m = 0; m < plan.ms; ++m) {
        for (int r = 0; r < plan.rs; ++r) {
            requests.row(row++) = proposals.row(m);
        }
    }
    return requests;
}

std::pair<Eigen::VectorXd, double> estimate_optimum(const gp::GpModel& model, const Box& box,
                                                    int direct_evals, double direct_eps) {
    auto mean_surface = [&](const Eigen::VectorXd& x) {
        return gp::predict(model, x.transpose()).mu(0);
    };
    const direct::Result res = direct::minimize(mean_surface, box, direct_evals, direct_eps);
    return {res.x_min, res.f_min};
}

namespace {

struct VirtualClock {
    double seconds = 0.0;

    void charge_batch(int batch_size, const RunOptions& options) {
        if (options.eval_latency_seconds <= 0.0) return;
        const double units = options.evaluator_parallel_safe ? 1.0 : batch_size;
        seconds += units * options.eval_latency_seconds;
    }
};

} // namespace

RunRecord run_gpbo(const Evaluator& objective, const Box& box, const acq::AcquisitionSpec& spec,
                   const SamplingPlan& plan, const gp::Hyperpriors& priors, const StopRule& stop,
                   const Rng& rng, const RunOptions& options) {
    box.validate();
    spec.validate();
    plan.validate();
    priors.validate();
    stop.validate();
    if (stop.max_wall_seconds && options.eval_latency_seconds <= 0.0 &&
        !stop.max_function_evals) {
        throw ContractViolation(
            "run_gpbo: a pure wall-clock stop rule needs a positive eval latency");
    }

    const int d = box.dim();
    const int n_seeds = options.seed_count > 0 ? options.seed_count : seed_count(d);
    const int block = plan.rs * plan.ms;

    RunRecord record;
    record.run_seed = rng.construction_seed();

    // All streams derive from the run seed: seeds from "lh_seeds", the k-th
    // objective evaluation (seeds included) from ("eval", k), the refit after
    // iteration t from ("map_fit", t) with t = 0 for the post-seed fit, and
    // the t-th iteration's proposal from ("propose", t).
    auto eval_rng = [&](long k) { return rng.split("eval", static_cast<std::uint64_t>(k)); };

    Rng lh_rng = rng.split("lh_seeds");
    record.seed_X = latin_hypercube(n_seeds, box, lh_rng);
    record.seed_y = Eigen::VectorXd::Zero(n_seeds);
    VirtualClock clock;

    long evals_used = 0;
    auto evaluate_at = [&](const Eigen::VectorXd& x, long k) {
        double y = 0.0;
        bool ok = false;
        std::string cause;
        try {
            Rng er = eval_rng(k);
            y = objective(x, er);
            ok = std::isfinite(y);
            if (!ok) cause = "objective returned a non-finite value";
        } catch (const std::exception& e) {
            cause = e.what();
        }
        if (!ok) {
            record.total_evaluations = evals_used;
            throw EvaluatorFailure("run_gpbo: objective evaluation failed: " + cause, record);
        }
        return y;
    };

    for (int i = 0; i < n_seeds; ++i) {
        record.seed_y(i) = evaluate_at(record.seed_X.row(i).transpose(), evals_used);
        ++evals_used;
    }
    clock.charge_batch(n_seeds, options);

    gp::Dataset dataset{record.seed_X, record.seed_y};
    record.total_evaluations = evals_used;

    bool have_model = false;
    gp::GpModel model;
    auto refit = [&](int t) {
        Rng fit_rng = rng.split("map_fit", static_cast<std::uint64_t>(t));
        const gp::KernelHyperparams params =
            gp::map_fit(dataset, priors, options.map_restarts, fit_rng, options.map_options);
        model = gp::fit(dataset, params);
        record.max_jitter_used = std::max(record.max_jitter_used, model.jitter_used);
        have_model = true;
    };

    record.termination = Termination::budget_exhausted;
    bool failed_covariance = false;
    try {
        refit(0);
    } catch (const IllConditionedCovariance&) {
        failed_covariance = true;
    }

    double best_inc_f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_inc_x;
    const bool minimize = spec.minimize;
    if (!minimize) best_inc_f = -best_inc_f;

    auto update_incumbent = [&]() {
        const acq::Incumbent inc = acq::incumbent_of(model, minimize);
        const bool better = minimize ? inc.f_best < best_inc_f : inc.f_best > best_inc_f;
        if (better) {
            best_inc_f = inc.f_best;
            best_inc_x = inc.x_best;
        }
    };
    if (have_model) update_incumbent();

    acq::AcquisitionSpec batch_spec = spec;
    batch_spec.q = plan.ms;

    int t = 0;
    while (!failed_covariance) {
        if (stop.max_function_evals && evals_used + block > *stop.max_function_evals) {
            record.termination = Termination::budget_exhausted;
            break;
        }
        if (stop.max_wall_seconds && clock.seconds >= *stop.max_wall_seconds) {
            record.termination = Termination::wall_clock;
            break;
        }
        ++t;

        IterationRecord iter;
        iter.index = t;
        Rng propose_rng = rng.split("propose", static_cast<std::uint64_t>(t));
        iter.proposals = acq::propose(model, batch_spec, box, options.propose, propose_rng);
        iter.eval_X = expand_plan(iter.proposals, plan);
        iter.eval_y.resize(block);
        for (int j = 0; j < block; ++j) {
            // Results are committed in request order; stream index is the
            // global evaluation counter.
            iter.eval_y(j) = evaluate_at(iter.eval_X.row(j).transpose(), evals_used + j);
        }
        evals_used += block;
        record.total_evaluations = evals_used;
        clock.charge_batch(block, options);

        dataset = dataset.appended(iter.eval_X, iter.eval_y);
        try {
            refit(t);
            iter.hyperparams_after_refit = model.params;
            update_incumbent();
        } catch (const IllConditionedCovariance&) {
            // Keep the iteration (its evaluations happened) under the last
            // good hyperparameters, then terminate gracefully.
            iter.hyperparams_after_refit = have_model ? model.params
                                                      : gp::KernelHyperparams::defaults(d);
            failed_covariance = true;
        }
        iter.incumbent_x = best_inc_x;
        iter.incumbent_f = best_inc_f;
        record.iterations.push_back(std::move(iter));
    }

    if (failed_covariance) {
        record.termination = Termination::covariance_failure;
    }
    record.total_iterations = static_cast<int>(record.iterations.size());
    record.virtual_time_seconds = clock.seconds;

    if (have_model) {
        const int budget = std::max(1, options.propose.direct_evals_per_dim * d);
        auto [x_hat, y_hat] = estimate_optimum(model, box, budget, options.propose.direct_eps);
        record.x_hat = x_hat;
        record.y_hat = y_hat;
        record.final_params = model.params;
        record.has_estimate = true;
    }
    return record;
}

} // namespace gpbo::sampling
