#include "gpbo/gp.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

#include "gpbo/math.hpp"

namespace gpbo::gp {

Dataset Dataset::appended(const Eigen::MatrixXd& X_new, const Eigen::VectorXd& y_new) const {
    if (X_new.rows() != y_new.size() || (X.cols() > 0 && X_new.cols() != X.cols())) {
        throw ContractViolation("Dataset::appended: shape mismatch");
    }
    Dataset out;
    out.X.resize(X.rows() + X_new.rows(), X_new.cols());
    out.y.resize(y.size() + y_new.size());
    if (X.rows() > 0) {
        out.X.topRows(X.rows()) = X;
        out.y.head(y.size()) = y;
    }
    out.X.bottomRows(X_new.rows()) = X_new;
    out.y.tail(y_new.size()) = y_new;
    return out;
}

CholeskyResult cholesky_with_jitter(const Eigen::MatrixXd& A, double scale) {
    static constexpr double kLadder[] = {0.0, 1e-10, 1e-8, 1e-6, 1e-4};
    std::vector<double> attempted;
    const long n = A.rows();
    for (double mult : kLadder) {
        const double jitter = mult * scale;
        Eigen::MatrixXd M = A;
        if (jitter > 0.0) {
            M.diagonal().array() += jitter;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(M);
        if (llt.info() == Eigen::Success) {
            // LLT can report success on a semidefinite matrix whose factor
            // contains non-finite entries; reject those too.
            Eigen::MatrixXd L = llt.matrixL();
            if (L.allFinite()) {
                return {std::move(L), jitter};
            }
        }
        attempted.push_back(jitter);
        (void)n;
    }
    throw IllConditionedCovariance("covariance factorization failed at every jitter level",
                                   std::move(attempted));
}

namespace {

GpModel assemble_model(const Dataset& dataset, const KernelHyperparams& params,
                       Eigen::MatrixXd K) {
    const long n = dataset.n();
    const double noise_var = params.noise_variance();
    K.diagonal().array() += noise_var;
    // Ladder scale: mean kernel diagonal, i.e. trace(K)/n of the noise-free matrix.
    CholeskyResult ch = cholesky_with_jitter(K, params.signal_variance());
    Eigen::VectorXd resid = dataset.y.array() - params.mean_constant;
    Eigen::VectorXd alpha = ch.L.triangularView<Eigen::Lower>().solve(resid);
    ch.L.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha);
    GpModel model;
    model.data = dataset;
    model.params = params;
    model.chol = std::move(ch.L);
    model.alpha = std::move(alpha);
    model.jitter_used = ch.jitter;
    (void)n;
    return model;
}

} // namespace

GpModel fit(const Dataset& dataset, const KernelHyperparams& params) {
    dataset.validate();
    params.validate();
    if (dataset.n() > 0 && dataset.dim() != params.dim()) {
        throw ContractViolation("fit: dataset and hyperparameter dimensions differ");
    }
    if (dataset.n() == 0) {
        GpModel model;
        model.data = dataset;
        model.data.X.resize(0, params.dim());
        model.params = params;
        model.chol.resize(0, 0);
        model.alpha.resize(0);
        return model;
    }
    return assemble_model(dataset, params, kernel::covariance_matrix_symmetric(dataset.X, params));
}

Prediction predict(const GpModel& model, const Eigen::MatrixXd& X_star) {
    if (X_star.cols() != model.dim()) {
        throw ContractViolation("predict: dimension mismatch");
    }
    const long p = X_star.rows();
    const double sf2 = model.params.signal_variance();
    Prediction out;
    if (model.n() == 0) {
        out.mu = Eigen::VectorXd::Constant(p, model.params.mean_constant);
        out.var = Eigen::VectorXd::Constant(p, sf2);
        return out;
    }
    const Eigen::MatrixXd Ks = kernel::covariance_matrix(X_star, model.data.X, model.params);
    out.mu = (Ks * model.alpha).array() + model.params.mean_constant;
    Eigen::MatrixXd V = model.chol.triangularView<Eigen::Lower>().solve(Ks.transpose());
    out.var = (sf2 - V.colwise().squaredNorm().array()).max(0.0);
    return out;
}

Eigen::MatrixXd sample_posterior_joint(const GpModel& model, const Eigen::MatrixXd& X_star,
                                       int n_draws, Rng& rng) {
    if (n_draws < 1) {
        throw ContractViolation("sample_posterior_joint: n_draws must be positive");
    }
    if (X_star.rows() < 1) {
        throw ContractViolation("sample_posterior_joint: need at least one location");
    }
    const long p = X_star.rows();
    Eigen::MatrixXd S = kernel::covariance_matrix(X_star, X_star, model.params);
    Eigen::VectorXd mu;
    if (model.n() == 0) {
        mu = Eigen::VectorXd::Constant(p, model.params.mean_constant);
    } else {
        const Eigen::MatrixXd Ks =
            kernel::covariance_matrix(X_star, model.data.X, model.params);
        mu = (Ks * model.alpha).array() + model.params.mean_constant;
        Eigen::MatrixXd V = model.chol.triangularView<Eigen::Lower>().solve(Ks.transpose());
        S.noalias() -= V.transpose() * V;
    }
    CholeskyResult ch = cholesky_with_jitter(S, model.params.signal_variance());
    Eigen::MatrixXd draws(n_draws, p);
    Eigen::VectorXd z(p);
    for (int r = 0; r < n_draws; ++r) {
        for (long i = 0; i < p; ++i) {
            z(i) = rng.normal();
        }
        draws.row(r) = (mu + ch.L.triangularView<Eigen::Lower>() * z).transpose();
    }
    return draws;
}

namespace {

bool inside_uniform_support(const KernelHyperparams& params, const Hyperpriors& priors) {
    for (int i = 0; i < params.dim(); ++i) {
        const double v = params.log_lengthscales(i);
        if (v < priors.lengthscale_log_lo || v > priors.lengthscale_log_hi) return false;
    }
    if (params.log_signal_amplitude < priors.amplitude_log_lo ||
        params.log_signal_amplitude > priors.amplitude_log_hi) {
        return false;
    }
    if (params.log_noise_std < priors.noise_log_lo || params.log_noise_std > priors.noise_log_hi) {
        return false;
    }
    return true;
}

double log_prior_density(const KernelHyperparams& params, const Hyperpriors& priors) {
    double lp = 0.0;
    const double ls_width = priors.lengthscale_log_hi - priors.lengthscale_log_lo;
    lp -= params.dim() * std::log(ls_width);
    lp -= std::log(priors.amplitude_log_hi - priors.amplitude_log_lo);
    lp -= std::log(priors.noise_log_hi - priors.noise_log_lo);
    const double zm = (params.mean_constant - priors.mean_mu) / priors.mean_sigma;
    lp += -0.5 * math::kLog2Pi - std::log(priors.mean_sigma) - 0.5 * zm * zm;
    return lp;
}

double log_map_objective_impl(const KernelHyperparams& params, const Dataset& dataset,
                              const Hyperpriors& priors, const Eigen::MatrixXd& K_kernel) {
    const long n = dataset.n();
    Eigen::MatrixXd K = K_kernel;
    K.diagonal().array() += params.noise_variance();
    CholeskyResult ch;
    try {
        ch = cholesky_with_jitter(K, params.signal_variance());
    } catch (const IllConditionedCovariance&) {
        return kLogDensityFloor;
    }
    const Eigen::VectorXd resid = dataset.y.array() - params.mean_constant;
    const Eigen::VectorXd v = ch.L.triangularView<Eigen::Lower>().solve(resid);
    const double quad = v.squaredNorm();
    const double logdet_half = ch.L.diagonal().array().log().sum();
    const double lml =
        -0.5 * quad - logdet_half - 0.5 * static_cast<double>(n) * math::kLog2Pi;
    return lml + log_prior_density(params, priors);
}

} // namespace

double log_map_objective(const KernelHyperparams& params, const Dataset& dataset,
                         const Hyperpriors& priors) {
    priors.validate();
    params.validate();
    dataset.validate();
    if (!inside_uniform_support(params, priors)) {
        return kLogDensityFloor;
    }
    if (dataset.n() == 0) {
        return log_prior_density(params, priors);
    }
    return log_map_objective_impl(params, dataset, priors,
                                  kernel::covariance_matrix_symmetric(dataset.X, params));
}

double log_map_objective(const KernelHyperparams& params, const Dataset& dataset,
                         const Hyperpriors& priors, const kernel::PairwiseSqDiff& cache) {
    if (!inside_uniform_support(params, priors)) {
        return kLogDensityFloor;
    }
    if (dataset.n() == 0) {
        return log_prior_density(params, priors);
    }
    return log_map_objective_impl(params, dataset, priors, cache.covariance(params));
}

namespace {

struct SearchSpace {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;
    Eigen::VectorXd init_lo;
    Eigen::VectorXd init_hi;
    int d = 0;

    static SearchSpace build(int d, const Hyperpriors& priors) {
        SearchSpace s;
        s.d = d;
        const int m = d + 3;
        s.lo.resize(m);
        s.hi.resize(m);
        for (int i = 0; i < d; ++i) {
            s.lo(i) = priors.lengthscale_log_lo;
            s.hi(i) = priors.lengthscale_log_hi;
        }
        s.lo(d) = priors.amplitude_log_lo;
        s.hi(d) = priors.amplitude_log_hi;
        s.lo(d + 1) = priors.noise_log_lo;
        s.hi(d + 1) = priors.noise_log_hi;
        s.lo(d + 2) = priors.mean_mu - 5.0 * priors.mean_sigma;
        s.hi(d + 2) = priors.mean_mu + 5.0 * priors.mean_sigma;
        s.init_lo = s.lo;
        s.init_hi = s.hi;
        s.init_lo(d + 2) = priors.mean_mu - 2.0 * priors.mean_sigma;
        s.init_hi(d + 2) = priors.mean_mu + 2.0 * priors.mean_sigma;
        return s;
    }

    KernelHyperparams unpack(const Eigen::VectorXd& theta) const {
        KernelHyperparams p;
        p.log_lengthscales = theta.head(d);
        p.log_signal_amplitude = theta(d);
        p.log_noise_std = theta(d + 1);
        p.mean_constant = theta(d + 2);
        return p;
    }
};

/// Accept-first-improvement compass search, monotone in the objective.
/// Probes are clamped into [lo, hi].
template <typename Objective>
std::pair<Eigen::VectorXd, double> compass_maximize(Objective&& objective,
                                                    const Eigen::VectorXd& init,
                                                    const Eigen::VectorXd& lo,
                                                    const Eigen::VectorXd& hi,
                                                    const MapFitOptions& options, int* evals_out) {
    const int m = static_cast<int>(init.size());
    const Eigen::VectorXd width = hi - lo;
    Eigen::VectorXd steps = options.initial_step_fraction * width;
    Eigen::VectorXd theta = init;
    double f = objective(theta);
    int evals = 1;
    while (evals < options.max_evals_per_restart) {
        bool improved = false;
        for (int i = 0; i < m && evals < options.max_evals_per_restart; ++i) {
            for (double sgn : {1.0, -1.0}) {
                Eigen::VectorXd cand = theta;
                cand(i) = std::clamp(theta(i) + sgn * steps(i), lo(i), hi(i));
                if (cand(i) == theta(i)) continue;
                const double fc = objective(cand);
                ++evals;
                if (fc > f) {
                    theta = std::move(cand);
                    f = fc;
                    improved = true;
                    break;
                }
                if (evals >= options.max_evals_per_restart) break;
            }
        }
        if (!improved) {
            steps *= 0.5;
            if ((steps.array() / width.array()).maxCoeff() < options.step_tolerance) {
                break;
            }
        }
    }
    if (evals_out) *evals_out = evals;
    return {theta, f};
}

/// Latin-hypercube restart inits over the init window (local to map_fit so
/// the sampling module can stay independent of this one).
Eigen::MatrixXd lh_inits(int n, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, Rng& rng) {
    const int m = static_cast<int>(lo.size());
    Eigen::MatrixXd pts(n, m);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < n; ++i) {
            const double u = (perm[static_cast<std::size_t>(i)] + rng.uniform()) / n;
            pts(i, k) = lo(k) + u * (hi(k) - lo(k));
        }
    }
    return pts;
}

} // namespace

KernelHyperparams map_fit(const Dataset& dataset, const Hyperpriors& priors, int n_restarts,
                          Rng& rng, const MapFitOptions& options) {
    dataset.validate();
    priors.validate();
    if (dataset.n() < 2) {
        throw ContractViolation("map_fit: need at least two observations");
    }
    if (n_restarts < 1) {
        throw ContractViolation("map_fit: n_restarts must be positive");
    }
    const int d = dataset.dim();
    const SearchSpace space = SearchSpace::build(d, priors);
    const kernel::PairwiseSqDiff cache = kernel::PairwiseSqDiff::build(dataset.X);

    auto objective = [&](const Eigen::VectorXd& theta) {
        return log_map_objective(space.unpack(theta), dataset, priors, cache);
    };

    const Eigen::MatrixXd inits = lh_inits(n_restarts, space.init_lo, space.init_hi, rng);
    Eigen::VectorXd best_theta;
    double best_f = kLogDensityFloor;
    bool any = false;
    for (int r = 0; r < n_restarts; ++r) {
        auto [theta, f] = compass_maximize(objective, inits.row(r).transpose(), space.lo,
                                           space.hi, options, nullptr);
        if (f > kLogDensityFloor && (!any || f > best_f)) {
            best_theta = theta;
            best_f = f;
            any = true;
        }
    }
    if (!any) {
        throw IllConditionedCovariance("map_fit: no restart produced a fittable model", {});
    }
    return space.unpack(best_theta);
}

} // namespace gpbo::gp
