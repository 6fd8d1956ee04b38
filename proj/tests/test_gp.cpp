#include <doctest.h>

#include <cmath>

#include "gpbo/gp.hpp"
#include "gpbo/lhs.hpp"
#include "gpbo/math.hpp"

using namespace gpbo;
using gp::Dataset;
using gp::Hyperpriors;
using gp::KernelHyperparams;

namespace {

KernelHyperparams simple_params(int d, double lengthscale, double amplitude, double noise_std,
                                double mean = 0.0) {
    KernelHyperparams p = KernelHyperparams::defaults(d);
    p.log_lengthscales.setConstant(std::log(lengthscale));
    p.log_signal_amplitude = std::log(amplitude);
    p.log_noise_std = std::log(noise_std);
    p.mean_constant = mean;
    return p;
}

Dataset random_dataset(int n, int d, Rng& rng, double y_scale = 1.0) {
    Dataset ds;
    ds.X.resize(n, d);
    ds.y.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) ds.X(i, k) = rng.uniform();
        ds.y(i) = y_scale * rng.normal();
    }
    return ds;
}

/// Wide hyperpriors for tests whose data lives on the unit box.
Hyperpriors unit_box_priors() {
    Hyperpriors pr;
    pr.mean_mu = 0.0;
    pr.mean_sigma = 1.0;
    pr.lengthscale_log_lo = std::log(0.05);
    pr.lengthscale_log_hi = std::log(2.0);
    pr.amplitude_log_lo = std::log(0.3);
    pr.amplitude_log_hi = std::log(5.0);
    pr.noise_log_lo = std::log(0.01);
    pr.noise_log_hi = std::log(1.0);
    return pr;
}

} // namespace

TEST_CASE("fit with a single observation has factor sqrt(sf^2 + sn^2)") {
    Dataset ds;
    ds.X.resize(1, 1);
    ds.X << 0.3;
    ds.y.resize(1);
    ds.y << 2.0;
    const KernelHyperparams p = simple_params(1, 0.7, 1.3, 0.2);
    const gp::GpModel m = gp::fit(ds, p);
    REQUIRE(m.chol.rows() == 1);
    CHECK(m.chol(0, 0) ==
          doctest::Approx(std::sqrt(1.3 * 1.3 + 0.2 * 0.2)).epsilon(1e-14));
    CHECK(m.jitter_used == 0.0);
}

TEST_CASE("fit on distinct points uses no jitter; factor reconstructs K") {
    Rng rng(2024);
    Dataset ds = random_dataset(10, 2, rng);
    const KernelHyperparams p = simple_params(2, 0.5, 1.0, 0.1);
    const gp::GpModel m = gp::fit(ds, p);
    CHECK(m.jitter_used == 0.0);

    Eigen::MatrixXd K = kernel::covariance_matrix_symmetric(ds.X, p);
    K.diagonal().array() += p.noise_variance();
    const Eigen::MatrixXd rebuilt = m.chol * m.chol.transpose();
    const double rel = (rebuilt - K).norm() / K.norm();
    CHECK(rel < 1e-8);
}

TEST_CASE("fit survives ten copies of one point with tiny noise via the jitter ladder") {
    Dataset ds;
    ds.X = Eigen::MatrixXd::Constant(10, 2, 0.42);
    ds.y = Eigen::VectorXd::Constant(10, 1.5);
    const KernelHyperparams p = simple_params(2, 0.5, 1.0, 1e-9);
    gp::GpModel m;
    CHECK_NOTHROW(m = gp::fit(ds, p));
    CHECK(m.jitter_used > 0.0);
}

TEST_CASE("cholesky_with_jitter reports the attempted ladder on failure") {
    Eigen::MatrixXd A(2, 2);
    A << 1.0, 2.0, 2.0, 1.0; // eigenvalues 3 and -1: no rung can fix this
    try {
        gp::cholesky_with_jitter(A, 1.0);
        FAIL("expected IllConditionedCovariance");
    } catch (const IllConditionedCovariance& e) {
        REQUIRE(e.attempted_jitter.size() == 5);
        CHECK(e.attempted_jitter.front() == 0.0);
        CHECK(e.attempted_jitter.back() == doctest::Approx(1e-4));
    }
}

TEST_CASE("predict on the prior model returns the constant mean and sf^2") {
    Dataset empty;
    empty.X.resize(0, 2);
    empty.y.resize(0);
    KernelHyperparams p = simple_params(2, 1.0, 1.4, 0.1, 7.5);
    const gp::GpModel m = gp::fit(empty, p);
    Eigen::MatrixXd Xs(3, 2);
    Xs << 0.1, 0.2, 0.5, 0.5, 0.9, 0.1;
    const gp::Prediction pred = gp::predict(m, Xs);
    for (int i = 0; i < 3; ++i) {
        CHECK(pred.mu(i) == 7.5);
        CHECK(pred.var(i) == doctest::Approx(1.4 * 1.4).epsilon(1e-14));
    }
}

TEST_CASE("near-noise-free GP interpolates its training data") {
    Rng rng(7);
    Dataset ds = random_dataset(12, 2, rng);
    const KernelHyperparams p = simple_params(2, 0.8, 1.0, 1e-8);
    const gp::GpModel m = gp::fit(ds, p);
    const gp::Prediction pred = gp::predict(m, ds.X);
    for (int i = 0; i < 12; ++i) {
        CHECK(std::fabs(pred.mu(i) - ds.y(i)) < 1e-6);
        CHECK(pred.var(i) < 1e-6);
    }
}

TEST_CASE("single-point posterior matches the hand computation") {
    // One observation at x=0 with y=1, unit amplitude, near-zero noise,
    // lengthscale 1, zero mean. At x=1: mu = k(1), var = 1 - k(1)^2 with
    // k(1) = (1+sqrt(3)) exp(-sqrt(3)) = 0.4833577245965077.
    Dataset ds;
    ds.X.resize(1, 1);
    ds.X << 0.0;
    ds.y.resize(1);
    ds.y << 1.0;
    const KernelHyperparams p = simple_params(1, 1.0, 1.0, 1e-12);
    const gp::GpModel m = gp::fit(ds, p);
    Eigen::MatrixXd Xs(1, 1);
    Xs << 1.0;
    const gp::Prediction pred = gp::predict(m, Xs);
    CHECK(pred.mu(0) == doctest::Approx(0.4833577245965077).epsilon(1e-9));
    CHECK(pred.var(0) == doctest::Approx(0.7663653101095711).epsilon(1e-9));
}

TEST_CASE("joint posterior sampling: scalar case is N(mu, var)") {
    Rng rng(11);
    Dataset ds = random_dataset(6, 1, rng);
    const KernelHyperparams p = simple_params(1, 0.5, 1.0, 0.3);
    const gp::GpModel m = gp::fit(ds, p);
    Eigen::MatrixXd Xs(1, 1);
    Xs << 0.77;
    const gp::Prediction pred = gp::predict(m, Xs);

    Rng draw_rng(555);
    const int n_draws = 40000;
    const Eigen::MatrixXd draws = gp::sample_posterior_joint(m, Xs, n_draws, draw_rng);
    const double mean = draws.col(0).mean();
    const double sd = std::sqrt(pred.var(0));
    CHECK(std::fabs(mean - pred.mu(0)) < 4.0 * sd / std::sqrt(static_cast<double>(n_draws)));
}

TEST_CASE("joint posterior sampling: empirical means match analytic means") {
    Rng rng(21);
    Dataset ds = random_dataset(8, 2, rng);
    const KernelHyperparams p = simple_params(2, 0.6, 1.2, 0.2);
    const gp::GpModel m = gp::fit(ds, p);
    Eigen::MatrixXd Xs(5, 2);
    for (long i = 0; i < Xs.size(); ++i) Xs(i / 2, i % 2) = rng.uniform();
    const gp::Prediction pred = gp::predict(m, Xs);

    Rng draw_rng(556);
    const int n_draws = 10000;
    const Eigen::MatrixXd draws = gp::sample_posterior_joint(m, Xs, n_draws, draw_rng);
    for (int j = 0; j < 5; ++j) {
        const double mean = draws.col(j).mean();
        const double sd = std::sqrt(pred.var(j));
        CHECK(std::fabs(mean - pred.mu(j)) <=
              4.0 * sd / std::sqrt(static_cast<double>(n_draws)) + 1e-12);
    }
}

TEST_CASE("joint posterior sampling: duplicated rows stay equal within jitter") {
    Rng rng(33);
    Dataset ds = random_dataset(10, 1, rng);
    const KernelHyperparams p = simple_params(1, 0.4, 1.0, 0.15);
    const gp::GpModel m = gp::fit(ds, p);
    Eigen::MatrixXd Xs(3, 1);
    Xs << 0.5, 0.5, 0.9; // first two rows identical
    Rng draw_rng(557);
    const Eigen::MatrixXd draws = gp::sample_posterior_joint(m, Xs, 50, draw_rng);
    for (int r = 0; r < draws.rows(); ++r) {
        CHECK(std::fabs(draws(r, 0) - draws(r, 1)) < 1e-3);
    }
}

TEST_CASE("sampling is deterministic given the rng seed") {
    Rng rng(64);
    Dataset ds = random_dataset(5, 1, rng);
    const gp::GpModel m = gp::fit(ds, simple_params(1, 0.5, 1.0, 0.2));
    Eigen::MatrixXd Xs(4, 1);
    Xs << 0.1, 0.3, 0.6, 0.9;
    Rng r1(888), r2(888);
    const Eigen::MatrixXd a = gp::sample_posterior_joint(m, Xs, 7, r1);
    const Eigen::MatrixXd b = gp::sample_posterior_joint(m, Xs, 7, r2);
    CHECK(a == b);
}

TEST_CASE("log_map_objective: sentinel outside the uniform support") {
    Hyperpriors pr; // paper defaults: lengthscales in [log 1, log 3]
    Rng rng(5);
    Dataset ds = random_dataset(4, 1, rng);
    KernelHyperparams p = simple_params(1, 0.5, 1.5, 30.0); // lengthscale below support
    CHECK(gp::log_map_objective(p, ds, pr) == gp::kLogDensityFloor);
    p = simple_params(1, 1.5, 1.5, 500.0); // noise above support
    CHECK(gp::log_map_objective(p, ds, pr) == gp::kLogDensityFloor);
}

TEST_CASE("log_map_objective matches the closed-form scalar Gaussian at n=1") {
    Hyperpriors pr = unit_box_priors();
    Dataset ds;
    ds.X.resize(1, 1);
    ds.X << 0.4;
    ds.y.resize(1);
    ds.y << 0.0;
    const KernelHyperparams p = simple_params(1, 0.5, 1.2, 0.3, 0.0);

    // log N(0 | 0, sf^2 + sn^2) = -1/2 log(2 pi (sf^2 + sn^2)); the prior
    // terms are exactly the n=0 objective.
    const double v = 1.2 * 1.2 + 0.3 * 0.3;
    const double lml_closed = -0.5 * std::log(2.0 * math::kPi * v);
    Dataset empty;
    empty.X.resize(0, 1);
    empty.y.resize(0);
    const double prior_only = gp::log_map_objective(p, empty, pr);
    const double expected = lml_closed + prior_only;
    CHECK(gp::log_map_objective(p, ds, pr) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("log_map_objective closed form with nonzero observation and mean") {
    Hyperpriors pr = unit_box_priors();
    Dataset ds;
    ds.X.resize(1, 1);
    ds.X << 0.4;
    ds.y.resize(1);
    ds.y << 0.8;
    const KernelHyperparams p = simple_params(1, 0.5, 1.2, 0.3, 0.25);
    const double v = 1.2 * 1.2 + 0.3 * 0.3;
    const double r = 0.8 - 0.25;
    const double lml_closed = -0.5 * std::log(2.0 * math::kPi * v) - 0.5 * r * r / v;
    Dataset empty;
    empty.X.resize(0, 1);
    empty.y.resize(0);
    const double expected = lml_closed + gp::log_map_objective(p, empty, pr);
    CHECK(gp::log_map_objective(p, ds, pr) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("noisier hyperparameters explain a noisy constant-signal dataset better") {
    // y has sd ~0.5 around zero; raising sigma_n from 0.02 toward 0.5
    // must increase the objective.
    Rng rng(40);
    Dataset ds = random_dataset(30, 1, rng, 0.5);
    Hyperpriors pr = unit_box_priors();
    double prev = -1e301;
    for (double sn : {0.02, 0.1, 0.3, 0.5}) {
        const double v =
            gp::log_map_objective(simple_params(1, 0.5, 1.0, sn), ds, pr);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("log_map_objective is symmetric under +-h probes (derivative-free check)") {
    Rng rng(50);
    Hyperpriors pr = unit_box_priors();
    const double h = 1e-5;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 5 + static_cast<int>(rng.below(20));
        const int d = 1 + static_cast<int>(rng.below(3));
        Dataset ds = random_dataset(n, d, rng);
        KernelHyperparams p = simple_params(d, 0.4, 1.0, 0.2);
        const double f0 = gp::log_map_objective(p, ds, pr);
        for (int k = 0; k < d; ++k) {
            KernelHyperparams plus = p, minus = p;
            plus.log_lengthscales(k) += h;
            minus.log_lengthscales(k) -= h;
            const double fp = gp::log_map_objective(plus, ds, pr);
            const double fm = gp::log_map_objective(minus, ds, pr);
            CHECK(std::fabs(fp + fm - 2.0 * f0) < 1e-6);
        }
    }
}

TEST_CASE("posterior contraction: a noise-free observation never raises variance there") {
    Rng rng(60);
    for (int trial = 0; trial < 10; ++trial) {
        Dataset ds = random_dataset(8, 2, rng);
        const KernelHyperparams p = simple_params(2, 0.5, 1.0, 1e-6);
        const gp::GpModel before = gp::fit(ds, p);
        Eigen::MatrixXd x_new(1, 2);
        x_new << rng.uniform(), rng.uniform();
        const double var_before = gp::predict(before, x_new).var(0);
        Eigen::VectorXd y_new(1);
        y_new << rng.normal();
        const gp::GpModel after = gp::fit(ds.appended(x_new, y_new), p);
        const double var_after = gp::predict(after, x_new).var(0);
        CHECK(var_after <= var_before + 1e-10);
    }
}

TEST_CASE("map_fit is deterministic and beats its restart inits") {
    Rng data_rng(70);
    Dataset ds = random_dataset(25, 1, data_rng, 0.8);
    Hyperpriors pr = unit_box_priors();
    Rng r1(1001), r2(1001);
    const KernelHyperparams a = gp::map_fit(ds, pr, 4, r1);
    const KernelHyperparams b = gp::map_fit(ds, pr, 4, r2);
    CHECK(a.log_lengthscales == b.log_lengthscales);
    CHECK(a.log_signal_amplitude == b.log_signal_amplitude);
    CHECK(a.log_noise_std == b.log_noise_std);
    CHECK(a.mean_constant == b.mean_constant);
}

TEST_CASE("map_fit recovers a known lengthscale within 0.5 nats") {
    // Draw y from a GP with known hyperparameters, then re-estimate them.
    const double true_log_l = std::log(0.3);
    const int n = 60;
    Rng rng(80);
    Box box = Box::unit(1);
    Rng lh = rng.split("x");
    Eigen::MatrixXd X = sampling::latin_hypercube(n, box, lh);
    KernelHyperparams truth = simple_params(1, 0.3, 2.0, 0.1);
    Dataset prior_ds;
    prior_ds.X.resize(0, 1);
    prior_ds.y.resize(0);
    const gp::GpModel prior_model = gp::fit(prior_ds, truth);
    Rng draw = rng.split("f");
    Eigen::MatrixXd f = gp::sample_posterior_joint(prior_model, X, 1, draw);
    Dataset ds;
    ds.X = X;
    ds.y = f.row(0).transpose();
    Rng noise = rng.split("noise");
    for (int i = 0; i < n; ++i) ds.y(i) += 0.1 * noise.normal();

    Hyperpriors pr = unit_box_priors();
    Rng fit_rng(90);
    const KernelHyperparams est = gp::map_fit(ds, pr, 8, fit_rng);
    CHECK(std::fabs(est.log_lengthscales(0) - true_log_l) < 0.5);
}

TEST_CASE("map_fit pushes noise toward the lower bound on constant data") {
    Dataset ds;
    ds.X.resize(12, 1);
    for (int i = 0; i < 12; ++i) ds.X(i, 0) = i / 11.0;
    ds.y = Eigen::VectorXd::Constant(12, 0.4);
    Hyperpriors pr = unit_box_priors();
    Rng rng(95);
    const KernelHyperparams est = gp::map_fit(ds, pr, 6, rng);
    CHECK(est.log_noise_std < pr.noise_log_lo + 0.5);
}

TEST_CASE("map_fit requires at least two observations") {
    Dataset ds;
    ds.X.resize(1, 1);
    ds.X << 0.5;
    ds.y.resize(1);
    ds.y << 1.0;
    Rng rng(1);
    CHECK_THROWS_AS(gp::map_fit(ds, unit_box_priors(), 2, rng), ContractViolation);
}
