#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gsm/estimators.hpp"
#include "oracles.hpp"

using namespace gsm;

TEST_CASE("soft thresholding piecewise definition and properties") {
    CHECK(sth(2.0, 1.0) == doctest::Approx(1.0));
    CHECK(sth(0.5, 1.0) == doctest::Approx(0.0));
    CHECK(sth(-2.0, 1.0) == doctest::Approx(-1.0));
    CHECK(sth(3.0, 0.0) == doctest::Approx(3.0));

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> xs(-5.0, 5.0), ls(0.0, 3.0);
    for (int rep = 0; rep < 500; ++rep) {
        const double x = xs(rng), y = xs(rng), l = ls(rng);
        CHECK(std::abs(sth(x, l)) <= std::abs(x));
        CHECK(sth(-x, l) == doctest::Approx(-sth(x, l)));
        CHECK(std::abs(sth(x, l) - sth(y, l)) <= std::abs(x - y) + 1e-12);  // 1-Lipschitz
    }
}

TEST_CASE("lambda schedule") {
    CHECK(lambda_schedule(4, 2, 1.0) == doctest::Approx(0.0));
    CHECK(lambda_schedule(2, 4, 1.0) == doctest::Approx(std::sqrt(std::log(4.0))));  // 1.17741
    CHECK(lambda_schedule(1, 1, std::sqrt(2.0)) == doctest::Approx(0.0));
    // non-increasing in n while the log is active, exactly 0 once 2D <= n eps^2
    double prev = lambda_schedule(1, 64, 0.5);
    for (std::int64_t n = 2; n <= 128; ++n) {
        const double cur = lambda_schedule(n, 64, 0.5);
        CHECK(cur <= prev + 1e-15);
        prev = cur;
    }
    CHECK(lambda_schedule(2000, 64, 0.5) == doctest::Approx(0.0));
}

TEST_CASE("estimate variants") {
    Dataset single{std::vector<double>{0.3, -1.2, 4.0}, 1, 3};
    const auto em = estimate(EmpiricalMeanEstimator{}, single);
    CHECK(em.at(0) == doctest::Approx(0.3));
    CHECK(em.at(1) == doctest::Approx(-1.2));
    CHECK(em.at(2) == doctest::Approx(4.0));

    const auto p0 = estimate(ProjectionEstimator{0}, single);
    CHECK(p0.support_dim() == 0);
    CHECK(p0.norm2_sq() == doctest::Approx(0.0));

    const auto st = estimate(SoftThresholdEstimator{0.0, 3}, single);
    const auto p3 = estimate(ProjectionEstimator{3}, single);
    for (int i = 0; i < 3; ++i) CHECK(st.at(i) == doctest::Approx(p3.at(i)));
}

TEST_CASE("per-coordinate risk bound values and MC domination") {
    CHECK(per_coord_risk_bound(0.0, 1, 0.0) == doctest::Approx(1.0));
    CHECK(per_coord_risk_bound(0.0, 2, 2.0) == doctest::Approx(0.5 * std::exp(-4.0)));

    // MC risk of sth at a single coordinate is below the bound
    const double theta = 0.1, lambda = 0.2;
    const std::int64_t n = 50;
    const auto risk = mc_risk(SoftThresholdEstimator{lambda, 1}, ThetaVector({theta}), n, 100000,
                              RngStreamSpec{8, 0});
    CHECK(risk.value <= per_coord_risk_bound(theta, n, lambda) + 3.0 * risk.ci_radius);
}

TEST_CASE("projection risk closed form") {
    ThetaVector theta({0.1, 0.2, 0.3, 0.4});  // tail energy beyond d=2: 0.25
    CHECK(projection_risk_exact(theta, 2, 4) == doctest::Approx(0.75));
    CHECK(projection_risk_exact(ThetaVector{}, 0, 7) == doctest::Approx(0.0));

    const auto risk = mc_risk(ProjectionEstimator{2}, theta, 4, 60000, RngStreamSpec{9, 0}, 4);
    CHECK(std::abs(risk.value - 0.75) <= 3.0 * risk.ci_radius);
}

TEST_CASE("empirical mean risk is dim/n") {
    const int dim = 6;
    const std::int64_t n = 10;
    const auto risk = mc_risk(EmpiricalMeanEstimator{}, ThetaVector({0.5, -0.3}), n, 60000,
                              RngStreamSpec{10, 0}, dim);
    CHECK(std::abs(risk.value - static_cast<double>(dim) / n) <= 3.0 * risk.ci_radius);
}

TEST_CASE("sufficiency shortcut agrees with full-sample estimation") {
    // same law: estimator applied to means drawn directly vs dataset column means
    const ThetaVector theta({0.4, 0.1});
    const std::int64_t n = 25, trials = 4000;
    const SoftThresholdEstimator spec{0.15, 2};
    const auto fast = mc_risk(spec, theta, n, trials, RngStreamSpec{11, 0});

    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        const auto ds = sample_dataset(theta, n, 2, substream(RngStreamSpec{12, 0}, t));
        const auto est = estimate(spec, ds);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const double d = est.at(i) - theta.at(i);
            err += d * d;
        }
        sum += err;
        sumsq += err * err;
    }
    const double slow = sum / trials;
    const double slow_ci = 1.96 * std::sqrt(std::max(0.0, sumsq / trials - slow * slow) / trials);
    CHECK(std::abs(fast.value - slow) <= 3.0 * (fast.ci_radius + slow_ci));
}

TEST_CASE("soft threshold risk obeys the Johnstone two-sided envelope") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ts(-0.6, 0.6), ls(0.05, 0.5);
    std::uniform_int_distribution<std::int64_t> ns(5, 200);
    for (int rep = 0; rep < 12; ++rep) {
        const int dim = 4;
        std::vector<double> tv(static_cast<std::size_t>(dim));
        for (auto& v : tv) v = ts(rng);
        const double lambda = ls(rng);
        const std::int64_t n = ns(rng);
        const ThetaVector theta(tv);
        const auto risk = mc_risk(SoftThresholdEstimator{lambda, dim}, theta, n, 30000,
                                  RngStreamSpec{13, static_cast<std::uint64_t>(rep)});
        double upper = 0.0, lower = 0.0;
        for (int i = 0; i < dim; ++i) {
            upper += per_coord_risk_bound(theta.at(i), n, lambda);
            lower += 0.5 * std::min(theta.at(i) * theta.at(i), 1.0 / n + lambda * lambda);
        }
        CHECK(risk.value <= upper + 3.0 * risk.ci_radius);
        CHECK(risk.value >= lower - 3.0 * risk.ci_radius);
    }
}

TEST_CASE("worst-case risk search finds the projection blind spot") {
    const auto body = counterexample_body(8);
    const int d = 3;
    const std::int64_t n = 40;
    const auto worst = worst_case_risk_search(body, ProjectionEstimator{d}, n, 4000, RngStreamSpec{14, 0});
    // the spike at coordinate d+1 with scale a_{d+1} has risk d/n + a_{d+1}^2
    const double expected = static_cast<double>(d) / n + body.radius(d) * body.radius(d);
    CHECK(worst.risk.value >= expected - 3.0 * worst.risk.ci_radius);
    // the reported worst candidate is at least the explicit spike's exact risk
    const double spike_exact = projection_risk_exact(worst.argmax, d, n);
    CHECK(worst.risk.value <= spike_exact + 3.0 * worst.risk.ci_radius);
}
