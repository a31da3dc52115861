#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "gsm/bodies.hpp"
#include "gsm/hypothesis_tests.hpp"
#include "gsm/rng.hpp"
#include "gsm/sampling.hpp"

namespace gsm {

// Monte Carlo type-I/type-II error rates. Rates are exact ratios of integer
// rejection counters, so reruns with one seed are identical for any worker
// count.
struct ErrorEstimate {
    double type1 = 0.0;
    double type2 = 0.0;
    std::int64_t trials = 0;
    double ci_radius = 0.0;  // 1.96 sqrt(p(1-p)/trials) at the larger rate
    RngStreamSpec seed;

    double max_rate() const { return type1 > type2 ? type1 : type2; }
};

// GoF problems: the two-part counter-example test or a calibrated
// projection test, against one alternative mean.
struct TwoPartGofConfig {
    double eps = 0.0;
};
struct ProjectionGofConfig {
    int d = 1;
    double threshold = 0.0;
};
using GofTestConfig = std::variant<TwoPartGofConfig, ProjectionGofConfig>;

ErrorEstimate estimate_gof_error_rates(const GofTestConfig& config, const ThetaVector& theta_alt,
                                       std::int64_t n, std::int64_t trials, const RngStreamSpec& stream,
                                       int workers = 1);

// LFHT problems: the split-sample lp scheme or the plain projection test,
// against a (theta_x, theta_y) pair. H0 draws Z at theta_x, H1 at theta_y.
struct FullLpLfhtConfig {
    LpBody body;
    double eps = 0.0;
    double delta = 1.0 / 32.0;
};
struct ProjectionLfhtConfig {
    int d = 1;
};
using LfhtTestConfig = std::variant<FullLpLfhtConfig, ProjectionLfhtConfig>;

ErrorEstimate estimate_lfht_error_rates(const LfhtTestConfig& config, const ThetaVector& theta_x,
                                        const ThetaVector& theta_y, std::int64_t n, std::int64_t m,
                                        std::int64_t trials, const RngStreamSpec& stream, int workers = 1);

// --- sample complexity search ---------------------------------------------

struct SearchResult {
    std::int64_t n = 0;
    bool resolved = false;
    std::int64_t probes = 0;
};

// error_fn(n, probe_stream) must be statistically non-increasing in n.
// Doubling then bisection on the smoothed criterion max(type1, type2) + ci
// <= target; each probe gets a fresh stream and the final candidate is
// re-validated with an independent one.
using ErrorFn = std::function<ErrorEstimate(std::int64_t, const RngStreamSpec&)>;
SearchResult sample_complexity_search(const ErrorFn& error_fn, double target, std::int64_t n_max,
                                      const RngStreamSpec& stream, std::int64_t n_min = 1);

// --- rate exponent fit ------------------------------------------------------

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double stderr_slope = 0.0;
    std::vector<std::pair<double, double>> points;  // (log(1/eps), log n*)
};

// OLS of log n* against log(1/eps); needs >= 3 points with distinct eps.
FitResult rate_exponent_fit(const std::vector<std::pair<double, double>>& eps_nstar);

// --- worst-case alternatives -----------------------------------------------

// Uniform vector on the longest prefix (within the two-part head) whose
// boundary-scaled norm still reaches eps, rescaled to ||theta|| = eps.
ThetaVector gof_energy_alternative(const LpBody& body, double eps);

// Spike at coordinate floor(eps^{-4/5}) + 1 of height eps^{6/5} (1 + margin),
// capped so it stays inside the body. Errors when the body cannot hold a
// spike above the detection threshold there.
ThetaVector gof_spike_alternative(const LpBody& body, double eps, double margin = 0.25);

// (theta_x, theta_y) with ||theta_x - theta_y|| = eps, both in the body.
std::pair<ThetaVector, ThetaVector> lfht_pair_alternative(const LpBody& body, double eps);

// --- region map --------------------------------------------------------------

struct RegionCell {
    std::int64_t m = 0;
    std::int64_t n = 0;
    double error_hat = 0.0;
    double ci_radius = 0.0;
    bool feasible_mc = false;
    bool sufficient_quad = false;
    bool sufficient_lp = false;
    bool necessary_lp = false;
};
struct RegionMap {
    double eps = 0.0;
    std::vector<RegionCell> grid;
};

RegionMap lfht_region_map(const LpBody& body, double eps, const std::vector<std::int64_t>& m_grid,
                          const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                          const RngStreamSpec& stream, double delta = 1.0 / 32.0, int workers = 1);

// Smallest m on [1, m_max] with max error + ci <= target for the full lp
// test at (n, eps); used by the m n^{3/2} tradeoff experiment.
SearchResult minimal_feasible_m(const LpBody& body, double eps, std::int64_t n, std::int64_t m_max,
                                double target, std::int64_t trials, const RngStreamSpec& stream,
                                double delta = 1.0 / 32.0, int workers = 1);

}  // namespace gsm
