#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "gsm/bodies.hpp"
#include "gsm/rng.hpp"
#include "gsm/sampling.hpp"

namespace gsm {

// Mean estimators for the Gaussian sequence model.
struct EmpiricalMeanEstimator {};
struct ProjectionEstimator {
    int d = 0;  // keep the first d coordinates of the empirical mean
};
struct SoftThresholdEstimator {
    double lambda = 0.0;
    int d_trunc = 0;  // zero out coordinates beyond d_trunc
};
using EstimatorSpec = std::variant<EmpiricalMeanEstimator, ProjectionEstimator, SoftThresholdEstimator>;

// Soft-thresholding map: x-l for x >= l, 0 on [-l, l), x+l for x < -l.
double sth(double x, double lambda);

// lambda(n) = sqrt((2 log(2D/(n eps^2)) v 0) / n).
double lambda_schedule(std::int64_t n, int big_d, double eps);

ThetaVector estimate(const EstimatorSpec& spec, const Dataset& data);

// Same estimators applied directly to a vector of column means (the
// estimators depend on the data only through it).
ThetaVector estimate_from_means(const EstimatorSpec& spec, const std::vector<double>& means);

// Johnstone-style per-coordinate soft-threshold risk bound:
// (1/n) exp(-n lambda^2 / 2) + min(theta_i^2, 1/n + lambda^2).
double per_coord_risk_bound(double theta_i, std::int64_t n, double lambda);

// Exact risk of the projection estimator: d/n + tail energy of theta.
double projection_risk_exact(const ThetaVector& theta, int d, std::int64_t n);

struct RiskEstimate {
    double value = 0.0;
    double ci_radius = 0.0;  // 95% normal approximation
    std::int64_t trials = 0;
};

// Monte Carlo mean squared l2 error. Draws the empirical-mean law
// N(theta, I/n) directly per trial (exact by sufficiency).
RiskEstimate mc_risk(const EstimatorSpec& spec, const ThetaVector& theta, std::int64_t n,
                     std::int64_t trials, const RngStreamSpec& stream, int dim = 0);

struct WorstCaseRisk {
    ThetaVector argmax;
    RiskEstimate risk;
    std::vector<std::pair<std::string, RiskEstimate>> candidates;
};

// Evaluates mc_risk over a structured candidate family (boundary spikes,
// theta_star_construct outputs over a cap grid, uniform-fill prefixes) and
// returns the worst. A lower bound on the true sup over the body.
WorstCaseRisk worst_case_risk_search(const LpBody& body, const EstimatorSpec& spec, std::int64_t n,
                                     std::int64_t trials, const RngStreamSpec& stream);

}  // namespace gsm
