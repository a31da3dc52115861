#include "gsm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gsm {

double sth(double x, double lambda) {
    if (lambda < 0.0) throw std::invalid_argument("sth: lambda must be >= 0");
    if (x >= lambda) return x - lambda;
    if (x < -lambda) return x + lambda;
    return 0.0;
}

double lambda_schedule(std::int64_t n, int big_d, double eps) {
    if (n < 1 || big_d < 1 || !(eps > 0.0)) throw std::invalid_argument("lambda_schedule: bad arguments");
    const double arg = 2.0 * big_d / (static_cast<double>(n) * eps * eps);
    const double num = std::max(0.0, 2.0 * std::log(arg));
    return std::sqrt(num / static_cast<double>(n));
}

ThetaVector estimate_from_means(const EstimatorSpec& spec, const std::vector<double>& means) {
    const int dim = static_cast<int>(means.size());
    if (std::holds_alternative<EmpiricalMeanEstimator>(spec)) return ThetaVector(means);
    if (const auto* proj = std::get_if<ProjectionEstimator>(&spec)) {
        if (proj->d < 0) throw std::invalid_argument("ProjectionEstimator: d must be >= 0");
        std::vector<double> out(means.begin(), means.begin() + std::min(proj->d, dim));
        return ThetaVector(std::move(out));
    }
    const auto& st = std::get<SoftThresholdEstimator>(spec);
    if (st.lambda < 0.0 || st.d_trunc < 0)
        throw std::invalid_argument("SoftThresholdEstimator: lambda and d_trunc must be >= 0");
    std::vector<double> out(static_cast<std::size_t>(std::min(st.d_trunc, dim)));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = sth(means[i], st.lambda);
    return ThetaVector(std::move(out));
}

ThetaVector estimate(const EstimatorSpec& spec, const Dataset& data) {
    if (data.n < 1) throw std::invalid_argument("estimate: empty dataset");
    return estimate_from_means(spec, data.col_means());
}

double per_coord_risk_bound(double theta_i, std::int64_t n, double lambda) {
    if (n < 1 || lambda < 0.0) throw std::invalid_argument("per_coord_risk_bound: bad arguments");
    const double nn = static_cast<double>(n);
    return std::exp(-nn * lambda * lambda / 2.0) / nn +
           std::min(theta_i * theta_i, 1.0 / nn + lambda * lambda);
}

double projection_risk_exact(const ThetaVector& theta, int d, std::int64_t n) {
    if (n < 1 || d < 0) throw std::invalid_argument("projection_risk_exact: bad arguments");
    double tail = 0.0;
    for (int i = d; i < theta.support_dim(); ++i) tail += theta.at(i) * theta.at(i);
    return static_cast<double>(d) / static_cast<double>(n) + tail;
}

RiskEstimate mc_risk(const EstimatorSpec& spec, const ThetaVector& theta, std::int64_t n,
                     std::int64_t trials, const RngStreamSpec& stream, int dim) {
    if (trials < 100) throw std::invalid_argument("mc_risk: need trials >= 100");
    if (n < 1) throw std::invalid_argument("mc_risk: n must be >= 1");
    if (dim <= 0) {
        dim = theta.support_dim();
        if (const auto* proj = std::get_if<ProjectionEstimator>(&spec)) dim = std::max(dim, proj->d);
        if (const auto* st = std::get_if<SoftThresholdEstimator>(&spec)) dim = std::max(dim, st->d_trunc);
        dim = std::max(dim, 1);
    }
    double sum = 0.0, sumsq = 0.0;
    for (std::int64_t t = 0; t < trials; ++t) {
        auto rng = make_rng(substream(stream, static_cast<std::uint64_t>(t)));
        const auto means = sample_mean_vector(theta, n, dim, rng);
        const auto est = estimate_from_means(spec, means);
        double err = 0.0;
        const int top = std::max(est.support_dim(), theta.support_dim());
        for (int i = 0; i < top; ++i) {
            const double diff = est.at(i) - theta.at(i);
            err += diff * diff;
        }
        sum += err;
        sumsq += err * err;
    }
    RiskEstimate out;
    out.trials = trials;
    out.value = sum / trials;
    const double var = std::max(0.0, sumsq / trials - out.value * out.value);
    out.ci_radius = 1.96 * std::sqrt(var / trials);
    return out;
}

WorstCaseRisk worst_case_risk_search(const LpBody& body, const EstimatorSpec& spec, std::int64_t n,
                                     std::int64_t trials, const RngStreamSpec& stream) {
    const int dim = body.ambient_dim();
    std::vector<std::pair<std::string, ThetaVector>> candidates;

    // boundary spikes a_i e_i
    for (int i = 0; i < dim; ++i) {
        std::vector<double> v(static_cast<std::size_t>(i) + 1, 0.0);
        v.back() = body.radius(i);
        candidates.emplace_back("spike_" + std::to_string(i + 1), ThetaVector(std::move(v)));
        if (i + 1 >= 24) break;  // deep spikes carry vanishing energy
    }
    // theta_star_construct over a geometric cap grid
    double cap = body.radius(0) * body.radius(0);
    for (int j = 0; j < 14; ++j) {
        candidates.emplace_back("theta_star_cap_" + std::to_string(j), theta_star_construct(body, cap));
        cap /= 4.0;
    }
    if (const auto* st = std::get_if<SoftThresholdEstimator>(&spec)) {
        const double c = st->lambda * st->lambda + 1.0 / static_cast<double>(n);
        candidates.emplace_back("theta_star_cap_sth", theta_star_construct(body, c));
    }
    // uniform-fill boundary vectors on dyadic prefixes
    for (int k = 1; k <= dim; k *= 2) {
        ThetaVector dir(std::vector<double>(static_cast<std::size_t>(k), 1.0));
        const double s = boundary_scale(body, dir);
        std::vector<double> v(static_cast<std::size_t>(k), s);
        candidates.emplace_back("uniform_" + std::to_string(k), ThetaVector(std::move(v)));
    }

    WorstCaseRisk out;
    bool first = true;
    std::uint64_t tag = 0;
    for (auto& [name, theta] : candidates) {
        const auto risk = mc_risk(spec, theta, n, trials, substream(stream, tag++), dim);
        out.candidates.emplace_back(name, risk);
        if (first || risk.value > out.risk.value) {
            out.risk = risk;
            out.argmax = theta;
            first = false;
        }
    }
    return out;
}

}  // namespace gsm
