#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gpbo/acquisition.hpp"
#include "gpbo/box.hpp"
#include "gpbo/gp.hpp"
#include "gpbo/lhs.hpp"
#include "gpbo/rng.hpp"

namespace gpbo::sampling {

/// Repeats per proposed location (RS) and proposed locations per iteration
/// (MS). (1, 1) is the plain single-sampling loop.
struct SamplingPlan {
    int rs = 1;
    int ms = 1;

    bool is_single() const { return rs == 1 && ms == 1; }

    void validate() const {
        if (rs < 1 || ms < 1) {
            throw ContractViolation("SamplingPlan: rs and ms must be >= 1");
        }
    }
};

enum class Termination { budget_exhausted, wall_clock, covariance_failure };

const char* termination_name(Termination t);
std::optional<Termination> termination_from_name(std::string_view name);

/// Stochastic objective evaluator; the rng stream is owned by the caller and
/// is unique per evaluation.
using Evaluator = std::function<double(const Eigen::VectorXd&, Rng&)>;

/// Each proposal replicated rs times, location-major: all replicates of
/// proposal 0 first, then proposal 1, ...
Eigen::MatrixXd expand_plan(const Eigen::MatrixXd& proposals, const SamplingPlan& plan);

struct IterationRecord {
    int index = 0; ///< 1-based
    Eigen::MatrixXd proposals;  ///< ms x d
    Eigen::MatrixXd eval_X;     ///< (ms*rs) x d, request order
    Eigen::VectorXd eval_y;     ///< ms*rs
    gp::KernelHyperparams hyperparams_after_refit;
    Eigen::VectorXd incumbent_x;
    double incumbent_f = 0.0; ///< running best of the GP-mean-at-observed optimum
};

/// Full trace of one optimization run.
struct RunRecord {
    Eigen::MatrixXd seed_X;
    Eigen::VectorXd seed_y;
    std::vector<IterationRecord> iterations;
    Termination termination = Termination::budget_exhausted;
    long total_evaluations = 0;
    int total_iterations = 0;
    double max_jitter_used = 0.0;

    bool has_estimate = false;
    Eigen::VectorXd x_hat;
    double y_hat = 0.0;
    gp::KernelHyperparams final_params;

    std::uint64_t run_seed = 0;
    double virtual_time_seconds = 0.0;
};

/// Objective evaluator failed mid-run; carries the partial trace.
class EvaluatorFailure : public std::runtime_error {
public:
    EvaluatorFailure(const std::string& what, RunRecord partial)
        : std::runtime_error(what), partial_record(std::move(partial)) {}

    RunRecord partial_record;
};

struct StopRule {
    std::optional<long> max_function_evals;
    std::optional<double> max_wall_seconds; ///< simulated clock, see RunOptions

    void validate() const {
        if (!max_function_evals && !max_wall_seconds) {
            throw ContractViolation("StopRule: need a function-evaluation or wall-clock budget");
        }
        if (max_function_evals && *max_function_evals < 0) {
            throw ContractViolation("StopRule: negative evaluation budget");
        }
        if (max_wall_seconds && !(*max_wall_seconds > 0.0)) {
            throw ContractViolation("StopRule: wall-clock budget must be positive");
        }
    }
};

struct RunOptions {
    int seed_count = 0;    ///< 0 means the 10 d heuristic
    int map_restarts = 8;
    gp::MapFitOptions map_options;
    acq::ProposeOptions propose;
    /// Simulated per-evaluation latency driving the wall-clock stop rule.
    /// Batches cost one latency unit when the evaluator is parallel-safe,
    /// rs*ms units otherwise.
    double eval_latency_seconds = 0.0;
    bool evaluator_parallel_safe = true;
};

/// The GPBO loop with repeat/multi-point sampling: LH-seed, then iterate
/// propose (ms locations) -> replicate (rs each) -> evaluate -> MAP-refit.
/// Wall-clock checks happen at iteration boundaries only, and an iteration
/// only starts if its full rs*ms evaluation block fits in the remaining
/// evaluation budget, so the accounting identity
///   total_evaluations = seeds + sum(rs*ms per iteration)
/// is exact. A covariance failure at the top of the jitter ladder ends the
/// run gracefully with termination = covariance_failure.
RunRecord run_gpbo(const Evaluator& objective, const Box& box, const acq::AcquisitionSpec& spec,
                   const SamplingPlan& plan, const gp::Hyperpriors& priors, const StopRule& stop,
                   const Rng& rng, const RunOptions& options = {});

/// DIRECT minimum of the GP predicted mean over the box: the reported
/// optimum for stochastic objectives. y_hat equals predict(x_hat).mu.
std::pair<Eigen::VectorXd, double> estimate_optimum(const gp::GpModel& model, const Box& box,
                                                    int direct_evals, double direct_eps = 1e-4);

} // namespace gpbo::sampling
