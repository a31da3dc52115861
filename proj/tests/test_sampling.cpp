#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gsm/sampling.hpp"
#include "oracles.hpp"

using namespace gsm;

TEST_CASE("sample_dataset CLT sanity and determinism") {
    const RngStreamSpec stream{42, 0};
    const std::int64_t n = 100000;
    const auto ds = sample_dataset(ThetaVector{}, n, 1, stream);
    const auto mean = ds.col_means();
    CHECK(std::abs(mean[0]) <= 4.0 / std::sqrt(static_cast<double>(n)));

    const auto ds2 = sample_dataset(ThetaVector({1.0}), n, 2, RngStreamSpec{42, 1});
    const auto mean2 = ds2.col_means();
    CHECK(std::abs(mean2[0] - 1.0) <= 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mean2[1]) <= 4.0 / std::sqrt(static_cast<double>(n)));

    const auto again = sample_dataset(ThetaVector{}, 50, 3, stream);
    const auto once = sample_dataset(ThetaVector{}, 50, 3, stream);
    CHECK(again.samples == once.samples);  // bit-identical

    const auto other = sample_dataset(ThetaVector{}, 50, 3, RngStreamSpec{42, 9});
    CHECK(again.samples != other.samples);
}

TEST_CASE("sample_theta respects prior support") {
    const RngStreamSpec stream{7, 0};
    const ProductPrior two_point = TwoPointSymPrior{ThetaVector({0.3, 0.4})};
    bool saw_plus = false, saw_minus = false;
    for (int t = 0; t < 200; ++t) {
        const auto theta = sample_theta(two_point, 2, substream(stream, t));
        CHECK(std::abs(std::abs(theta.at(0)) - 0.3) < 1e-15);
        CHECK(std::abs(std::abs(theta.at(1)) - 0.4) < 1e-15);
        (theta.at(0) > 0 ? saw_plus : saw_minus) = true;
    }
    CHECK(saw_plus);
    CHECK(saw_minus);

    const auto zero = sample_theta(ProductPrior(TernaryPrior{3, 0.0, 1.0}), 5, stream);
    for (int i = 0; i < 5; ++i) CHECK(zero.at(i) == 0.0);

    // binomial concentration of the nonzero fraction
    const int d = 10000;
    const auto theta = sample_theta(ProductPrior(TernaryPrior{d, 0.5, 1.0}), d, substream(stream, 999));
    int nonzero = 0;
    for (int i = 0; i < d; ++i) nonzero += theta.at(i) != 0.0;
    const double frac = static_cast<double>(nonzero) / d;
    CHECK(frac >= 0.48);
    CHECK(frac <= 0.52);
}

TEST_CASE("two-point prior draws stay in the body (orthosymmetry)") {
    const auto body = counterexample_body(6);
    const ThetaVector star({0.4, 0.2, 0.05});
    REQUIRE(membership(body, star));
    const ProductPrior prior = TwoPointSymPrior{star};
    for (int t = 0; t < 100; ++t)
        CHECK(membership(body, sample_theta(prior, 6, RngStreamSpec{5, static_cast<std::uint64_t>(t)})));
}

TEST_CASE("chi2_two_point_exact closed form vs quadrature oracle") {
    CHECK(chi2_two_point_exact(ThetaVector({0.0}), 3) == doctest::Approx(0.0));
    const double val = chi2_two_point_exact(ThetaVector({0.5}), 2);
    CHECK(val == doctest::Approx(std::cosh(0.5) - 1.0));           // 0.12763
    CHECK(val == doctest::Approx(0.1276259652063807).epsilon(1e-12));
    CHECK(val == doctest::Approx(oracles::chi2_two_point_quadrature_1d(0.5, 2)).epsilon(1e-7));
    CHECK(chi2_two_point_exact(ThetaVector({0.3}), 5) ==
          doctest::Approx(oracles::chi2_two_point_quadrature_1d(0.3, 5)).epsilon(1e-7));
}

TEST_CASE("Ingster bound dominates the exact two-point chi-square") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> td(0.05, 0.8);
    std::uniform_int_distribution<int> dd(1, 12);
    std::uniform_int_distribution<std::int64_t> nd(1, 50);
    for (int rep = 0; rep < 500; ++rep) {
        const int dim = dd(rng);
        std::vector<double> th(static_cast<std::size_t>(dim));
        double sum4 = 0.0;
        for (auto& v : th) {
            v = td(rng);
            sum4 += v * v * v * v;
        }
        const std::int64_t n = nd(rng);
        const double lhs = chi2_two_point_log1p(ThetaVector(th), n);
        const double rhs = 0.5 * static_cast<double>(n) * static_cast<double>(n) * sum4;
        CHECK(lhs < rhs);  // strict away from zero
    }
}

TEST_CASE("chi2_ternary_exact matches enumeration of the 9 support pairs") {
    CHECK(chi2_ternary_exact(3, 0.0, 1.0, 5) == doctest::Approx(0.0));
    // d = 1, h = 0.5, r = 1, m = 1: 0.75 + 0.25 cosh(1) - 1
    const double v1 = chi2_ternary_exact(1, 0.5, 1.0, 1);
    CHECK(v1 == doctest::Approx(0.75 + 0.25 * std::cosh(1.0) - 1.0).epsilon(1e-14));
    CHECK(v1 == doctest::Approx(0.13577015870381094).epsilon(1e-10));
    // product structure
    const double v2 = chi2_ternary_exact(2, 0.5, 1.0, 1);
    CHECK(v2 == doctest::Approx((v1 + 1.0) * (v1 + 1.0) - 1.0).epsilon(1e-13));
}

TEST_CASE("brute-force enumeration agrees with both closed forms") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> td(0.3, 0.8);
    for (int rep = 0; rep < 8; ++rep) {
        std::uniform_int_distribution<int> dd(1, 10);
        const int dim = dd(rng);
        std::vector<double> th(static_cast<std::size_t>(dim));
        for (auto& v : th) v = td(rng);
        const std::int64_t n = 5 + rep;
        const double exact = chi2_two_point_exact(ThetaVector(th), n);
        const double brute = chi2_bruteforce_enum(ProductPrior(TwoPointSymPrior{ThetaVector(th)}), n);
        CHECK(exact == doctest::Approx(brute).epsilon(1e-12));
    }
    for (int rep = 0; rep < 8; ++rep) {
        std::uniform_int_distribution<int> dd(1, 6);
        std::uniform_real_distribution<double> hd(0.3, 1.0), rd(0.4, 0.9);
        const int d = dd(rng);
        const double h = hd(rng), r = rd(rng);
        const std::int64_t m = 5 + rep;
        CHECK(chi2_ternary_exact(d, h, r, m) ==
              doctest::Approx(chi2_bruteforce_enum(ProductPrior(TernaryPrior{d, h, r}), m)).epsilon(1e-12));
    }
    // point mass: exp(m ||theta||^2) - 1
    const ThetaVector pm({0.5, 0.2});
    CHECK(chi2_bruteforce_enum(ProductPrior(PointMassPrior{pm}), 3) ==
          doctest::Approx(std::expm1(3.0 * pm.norm2_sq())).epsilon(1e-13));
    // support cap
    CHECK_THROWS_AS(
        chi2_bruteforce_enum(ProductPrior(TernaryPrior{20, 0.5, 0.5}), 1), std::invalid_argument);
}

TEST_CASE("tv_upper_bound_gof cancels to exactly 1/16 at the reference parameters") {
    for (double eps : {0.5, 0.25, 0.1}) {
        const double d = std::pow(eps, -4.0 / 5.0);
        const double h = std::pow(eps, 2.0 / 5.0) / 16.0;
        const double r = 8.0 * std::pow(eps, 6.0 / 5.0);
        const double n = std::pow(eps, -12.0 / 5.0) / 64.0;
        const auto tv = tv_upper_bound_gof(d, h, r, n);
        CHECK(tv.valid);
        CHECK(tv.value == doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    }
    CHECK(tv_upper_bound_gof(4.0, 0.0, 0.1, 2.0).value == doctest::Approx(0.0));
    const auto a = tv_upper_bound_gof(2.0, 0.01, 0.1, 3.0);
    const auto b = tv_upper_bound_gof(2.0, 0.01, 0.1, 6.0);
    CHECK(b.value == doctest::Approx(2.0 * a.value));
    CHECK_FALSE(tv_upper_bound_gof(100.0, 1.0, 1.0, 100.0).valid);
}

TEST_CASE("lfht conditional chi-square Monte Carlo") {
    const RngStreamSpec stream{101, 0};
    // h = 0: posterior is a point mass, bracket is identically 1
    const auto null_est = lfht_conditional_chi2_mc(ProductPrior(TernaryPrior{2, 0.0, 0.5}), 4, 2, 200, stream);
    CHECK(null_est.value == doctest::Approx(1.0));
    // m = 0: empty product over Z
    const auto m0 = lfht_conditional_chi2_mc(ProductPrior(TernaryPrior{2, 0.5, 0.5}), 4, 0, 200, stream);
    CHECK(m0.value == doctest::Approx(1.0));

    // d = 1 grid point vs quadrature over the sufficient statistic
    const auto est = lfht_conditional_chi2_mc(ProductPrior(TernaryPrior{1, 0.5, 0.5}), 4, 2, 60000, stream);
    const double oracle = oracles::lfht_ternary_bracket_quadrature_1d(0.5, 0.5, 4, 2);
    CHECK(std::abs(est.value - oracle) <= 3.0 * est.ci_radius);
    CHECK(est.rejected == 0);
}

TEST_CASE("two-point conditional chi-square obeys the analytic product bound") {
    // smallness regime m theta_j^2 <= 1: chi2+1 <= prod (1 + 4m^2 t^4 + 4mn t^4)
    const ThetaVector star({0.25, 0.2, 0.15});
    const std::int64_t n = 12, m = 8;
    const auto est = lfht_conditional_chi2_mc(ProductPrior(TwoPointSymPrior{star}), n, m, 40000,
                                              RngStreamSpec{202, 0});
    double bound = 1.0;
    for (int j = 0; j < star.support_dim(); ++j) {
        const double t4 = std::pow(star.at(j), 4.0);
        bound *= 1.0 + 4.0 * m * m * t4 + 4.0 * m * n * t4;
    }
    CHECK(est.value <= bound + 3.0 * est.ci_radius);
}

TEST_CASE("theta_star_construct matches grid search") {
    // p = 2 cube face
    const auto sq = theta_star_construct(LpBody(2.0, {1.0, 1.0}), 0.25);
    CHECK(sq.at(0) == doctest::Approx(0.5));
    CHECK(sq.at(1) == doctest::Approx(0.5));
    double obj = 0.0;
    for (int i = 0; i < sq.support_dim(); ++i) obj += std::min(sq.at(i) * sq.at(i), 0.25);
    CHECK(obj == doctest::Approx(0.5));
    CHECK(obj == doctest::Approx(oracles::grid_max_capped_energy(LpBody(2.0, {1.0, 1.0}), 0.25)).epsilon(1e-4));

    // cap >= a_1^2: single spike at the first radius
    const auto spike = theta_star_construct(counterexample_body(4), 1.5);
    CHECK(spike.at(0) == doctest::Approx(1.0));
    for (int i = 1; i < 4; ++i) CHECK(spike.at(i) == doctest::Approx(0.0));

    // l1 prefix vs 3-coordinate grid oracle
    const auto body3 = counterexample_body(3);
    const double cap = 0.01;
    const auto ts = theta_star_construct(body3, cap);
    CHECK(membership(body3, ts));
    double got = 0.0;
    for (int i = 0; i < ts.support_dim(); ++i) got += std::min(ts.at(i) * ts.at(i), cap);
    const double oracle = oracles::grid_max_capped_energy(body3, cap);
    CHECK(got >= oracle * (1.0 - 1e-6));
    // caps respected
    for (int i = 0; i < ts.support_dim(); ++i) CHECK(std::abs(ts.at(i)) <= std::sqrt(cap) + 1e-15);
}

TEST_CASE("theta_star_construct membership on random bodies (p <= 2)") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> cap_dist(0.001, 2.0);
    for (int rep = 0; rep < 100; ++rep) {
        const auto body = oracles::random_body(rng, 10, /*allow_p_above_2=*/false);
        const auto ts = theta_star_construct(body, cap_dist(rng));
        CHECK(membership(body, ts));
    }
}
