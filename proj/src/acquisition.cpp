#include "gpbo/acquisition.hpp"

#include <algorithm>
#include <cmath>

#include "gpbo/direct.hpp"
#include "gpbo/lhs.hpp"
#include "gpbo/math.hpp"

namespace gpbo::acq {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::EI: return "EI";
        case Kind::UCB: return "UCB";
        case Kind::TS: return "TS";
    }
    return "?";
}

std::optional<Kind> kind_from_name(std::string_view name) {
    if (name == "EI" || name == "ei") return Kind::EI;
    if (name == "UCB" || name == "ucb") return Kind::UCB;
    if (name == "TS" || name == "ts") return Kind::TS;
    return std::nullopt;
}

Incumbent incumbent_of(const gp::GpModel& model, bool minimize) {
    Incumbent inc;
    if (model.n() == 0) {
        inc.f_best = model.params.mean_constant;
        return inc;
    }
    const gp::Prediction pred = gp::predict(model, model.data.X);
    Eigen::Index idx = 0;
    if (minimize) {
        inc.f_best = pred.mu.minCoeff(&idx);
    } else {
        inc.f_best = pred.mu.maxCoeff(&idx);
    }
    inc.x_best = model.data.X.row(idx).transpose();
    return inc;
}

double expected_improvement(double mu, double sigma, const Incumbent& incumbent, bool minimize) {
    if (!(sigma >= 0.0)) {
        throw ContractViolation("expected_improvement: sigma must be nonnegative");
    }
    if (sigma == 0.0) {
        return 0.0;
    }
    const double delta = minimize ? (incumbent.f_best - mu) : (mu - incumbent.f_best);
    const double z = delta / sigma;
    const double value = delta * math::normal_cdf(z) + sigma * math::normal_pdf(z);
    return std::max(0.0, value);
}

double confidence_bound(double mu, double sigma, double beta, bool minimize) {
    if (!(sigma >= 0.0)) {
        throw ContractViolation("confidence_bound: sigma must be nonnegative");
    }
    return minimize ? mu - beta * sigma : mu + beta * sigma;
}

namespace {

int direct_budget(const ProposeOptions& options, int d) {
    return std::max(1, options.direct_evals_per_dim * d);
}

Eigen::VectorXd argmax_ei(const gp::GpModel& model, const Box& bounds, bool minimize,
                          const ProposeOptions& options) {
    const Incumbent inc = incumbent_of(model, minimize);
    auto neg_ei = [&](const Eigen::VectorXd& x) {
        const gp::Prediction p = gp::predict(model, x.transpose());
        return -expected_improvement(p.mu(0), std::sqrt(p.var(0)), inc, minimize);
    };
    return direct::minimize(neg_ei, bounds, direct_budget(options, bounds.dim()),
                            options.direct_eps)
        .x_min;
}

Eigen::VectorXd argbest_cb(const gp::GpModel& model, const Box& bounds, double beta,
                           bool minimize, const ProposeOptions& options) {
    // Minimize the LCB, or maximize the UCB via sign flip.
    auto surface = [&](const Eigen::VectorXd& x) {
        const gp::Prediction p = gp::predict(model, x.transpose());
        const double cb = confidence_bound(p.mu(0), std::sqrt(p.var(0)), beta, minimize);
        return minimize ? cb : -cb;
    };
    return direct::minimize(surface, bounds, direct_budget(options, bounds.dim()),
                            options.direct_eps)
        .x_min;
}

Eigen::VectorXd argmax_variance(const gp::GpModel& model, const Box& bounds,
                                const ProposeOptions& options) {
    auto neg_var = [&](const Eigen::VectorXd& x) {
        return -gp::predict(model, x.transpose()).var(0);
    };
    return direct::minimize(neg_var, bounds, direct_budget(options, bounds.dim()),
                            options.direct_eps)
        .x_min;
}

} // namespace

Eigen::MatrixXd propose_batch_ts(const gp::GpModel& model, const AcquisitionSpec& spec,
                                 const Box& bounds, const ProposeOptions& options, Rng& rng) {
    spec.validate();
    const int d = bounds.dim();
    const int n_grid = std::max(2, options.ts_candidates_per_dim * d);
    Rng grid_rng = rng.split("ts_grid");
    Rng draw_rng = rng.split("ts_draws");
    const Eigen::MatrixXd grid = sampling::latin_hypercube(n_grid, bounds, grid_rng);
    const Eigen::MatrixXd draws = gp::sample_posterior_joint(model, grid, spec.q, draw_rng);
    Eigen::MatrixXd picks(spec.q, d);
    for (int r = 0; r < spec.q; ++r) {
        Eigen::Index idx = 0;
        if (spec.minimize) {
            draws.row(r).minCoeff(&idx);
        } else {
            draws.row(r).maxCoeff(&idx);
        }
        picks.row(r) = grid.row(idx);
    }
    return picks;
}

Eigen::VectorXd propose_single(const gp::GpModel& model, const AcquisitionSpec& spec,
                               const Box& bounds, const ProposeOptions& options, Rng& rng) {
    spec.validate();
    switch (spec.kind) {
        case Kind::EI:
            return argmax_ei(model, bounds, spec.minimize, options);
        case Kind::UCB:
            return argbest_cb(model, bounds, *spec.beta, spec.minimize, options);
        case Kind::TS: {
            AcquisitionSpec one = spec;
            one.q = 1;
            return propose_batch_ts(model, one, bounds, options, rng).row(0).transpose();
        }
    }
    throw ContractViolation("propose_single: unknown acquisition kind");
}

Eigen::MatrixXd propose_batch_qei(const gp::GpModel& model, const AcquisitionSpec& spec,
                                  const Box& bounds, const ProposeOptions& options, Rng& rng) {
    spec.validate();
    (void)rng; // EI proposals are deterministic given the model
    const int d = bounds.dim();
    Eigen::MatrixXd picks(spec.q, d);
    const double lie = incumbent_of(model, spec.minimize).f_best;
    gp::GpModel working = model;
    for (int k = 0; k < spec.q; ++k) {
        const Eigen::VectorXd x = argmax_ei(working, bounds, spec.minimize, options);
        picks.row(k) = x.transpose();
        if (k + 1 < spec.q) {
            Eigen::VectorXd y(1);
            y(0) = lie;
            working = gp::fit(working.data.appended(x.transpose(), y), model.params);
        }
    }
    return picks;
}

Eigen::MatrixXd propose_batch_ucb_pe(const gp::GpModel& model, const AcquisitionSpec& spec,
                                     const Box& bounds, const ProposeOptions& options, Rng& rng) {
    spec.validate();
    (void)rng;
    const int d = bounds.dim();
    Eigen::MatrixXd picks(spec.q, d);
    picks.row(0) =
        argbest_cb(model, bounds, *spec.beta, spec.minimize, options).transpose();
    gp::GpModel working = model;
    for (int k = 1; k < spec.q; ++k) {
        // Pending observation: its value is unknown, but the posterior
        // variance update does not depend on it. Impute the predicted mean
        // and let sigma_n enter the diagonal as for a real observation.
        const Eigen::MatrixXd x_prev = picks.row(k - 1);
        Eigen::VectorXd y_pending(1);
        y_pending(0) = gp::predict(working, x_prev).mu(0);
        working = gp::fit(working.data.appended(x_prev, y_pending), model.params);
        picks.row(k) = argmax_variance(working, bounds, options).transpose();
    }
    return picks;
}

Eigen::MatrixXd propose(const gp::GpModel& model, const AcquisitionSpec& spec, const Box& bounds,
                        const ProposeOptions& options, Rng& rng) {
    spec.validate();
    if (spec.q == 1) {
        return propose_single(model, spec, bounds, options, rng).transpose();
    }
    switch (spec.kind) {
        case Kind::EI: return propose_batch_qei(model, spec, bounds, options, rng);
        case Kind::UCB: return propose_batch_ucb_pe(model, spec, bounds, options, rng);
        case Kind::TS: return propose_batch_ts(model, spec, bounds, options, rng);
    }
    throw ContractViolation("propose: unknown acquisition kind");
}

} // namespace gpbo::acq
