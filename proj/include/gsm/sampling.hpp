#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "gsm/bodies.hpp"
#include "gsm/rng.hpp"

namespace gsm {

// n i.i.d. draws from N(theta, I_dim), stored row-major.
struct Dataset {
    std::vector<double> samples;  // n * dim
    std::int64_t n = 0;
    int dim = 0;

    double at(std::int64_t row, int col) const { return samples[static_cast<std::size_t>(row) * dim + col]; }
    // Column means with compensated summation.
    std::vector<double> col_means() const;
};

// (X, Y, Z) triple for likelihood-free hypothesis testing.
struct LfhtDataset {
    Dataset x;  // n samples from P_X
    Dataset y;  // n samples from P_Y
    Dataset z;  // m samples from P_Z
};

// Product priors used by the lower-bound machinery.
struct TwoPointSymPrior {
    ThetaVector theta_star;  // coordinate i is +-theta_star_i equiprobable
};
struct TernaryPrior {
    int d = 1;       // coordinates 1..d get the ternary marginal, rest are 0
    double h = 0.0;  // P(nonzero)
    double r = 0.0;  // spike magnitude
};
struct PointMassPrior {
    ThetaVector theta;
};
using ProductPrior = std::variant<TwoPointSymPrior, TernaryPrior, PointMassPrior>;

void validate(const ProductPrior& prior);

Dataset sample_dataset(const ThetaVector& theta, std::int64_t n, int dim, const RngStreamSpec& stream);

ThetaVector sample_theta(const ProductPrior& prior, int dim, const RngStreamSpec& stream);

// Draws the law of the empirical mean of `count` i.i.d. N(theta, I_dim)
// samples, i.e. N(theta, I_dim/count). The estimators and test statistics in
// this library are functions of sample means only, so Monte Carlo loops can
// draw means directly instead of materializing count*dim sample matrices.
std::vector<double> sample_mean_vector(const ThetaVector& theta, std::int64_t count, int dim,
                                       std::mt19937_64& rng);

// --- chi-square divergences via Ingster's trick --------------------------
//
// For a product prior mu and the Gaussian location model,
//   chi2( E_theta[P_theta^{(x)n}] || P_0^{(x)n} ) = E_{theta,theta'}[exp(n <theta,theta'>)] - 1.
// The exact evaluators compute log(1 + chi2) coordinate-wise and
// exponentiate on demand, so products over thousands of coordinates stay
// finite.

// log(1+chi2) = sum_i log cosh(n theta*_i^2).
double chi2_two_point_log1p(const ThetaVector& theta_star, std::int64_t n);
double chi2_two_point_exact(const ThetaVector& theta_star, std::int64_t n);

// log(1+chi2) = d * log(1 - h^2 + h^2 cosh(m r^2)).
double chi2_ternary_log1p(int d, double h, double r, std::int64_t m);
double chi2_ternary_exact(int d, double h, double r, std::int64_t m);

// Oracle: exhaustive enumeration over all pairs of prior support points with
// exact probabilities. Errors out beyond ~1.2e6 pairs.
double chi2_bruteforce_enum(const ProductPrior& prior, std::int64_t m);

// --- GoF lower-bound TV budget --------------------------------------------
struct TvBound {
    double value = 0.0;  // sqrt(d h^2 n^2 r^4), clipped to [0,1]
    bool valid = false;  // the proof needs d h^2 n^2 r^4 <= 1 and n r^2 <= 1
};
// d and n enter the formula as reals: the interesting parameterizations
// (d = eps^{-4/5}, n = eps^{-12/5}/64) are non-integer and the cancellation
// to 1/16 only happens unrounded.
TvBound tv_upper_bound_gof(double d, double h, double r, double n);

// --- conditional chi-square for the LFHT lower bound ----------------------
struct McEstimate {
    double value = 0.0;
    double ci_radius = 0.0;   // 95% normal-approximation
    std::int64_t trials = 0;
    std::int64_t rejected = 0;
};

// Monte Carlo estimate of chi2(P_{0,Z|X} || P_{1,Z|X} | P_{0,X}) + 1 for a
// ternary or two-point product prior: per trial, sample X under the mixture,
// form the per-coordinate posterior masses in log space, and average the
// per-coordinate bracket; the result is the product of per-coordinate means.
McEstimate lfht_conditional_chi2_mc(const ProductPrior& prior, std::int64_t n, std::int64_t m,
                                    std::int64_t trials, const RngStreamSpec& stream);

// Maximizer of sum_i min(theta_i^2, cap) over the body: fill coordinates to
// level sqrt(cap) in order of decreasing radius until the lp constraint
// binds, then spend the leftover budget on the next coordinate.
ThetaVector theta_star_construct(const LpBody& body, double cap);

}  // namespace gsm
