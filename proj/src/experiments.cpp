#include "gsm/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gsm/parallel.hpp"

namespace gsm {

namespace {

constexpr std::uint64_t kNullArm = 0x10;
constexpr std::uint64_t kAltArm = 0x11;
constexpr std::uint64_t kValidationArm = 0x7F;

double binom_ci(double p, std::int64_t trials) {
    return 1.96 * std::sqrt(std::max(p * (1.0 - p), 1e-12) / static_cast<double>(trials));
}

ErrorEstimate finish(std::int64_t rejects_null, std::int64_t accepts_alt, std::int64_t trials,
                     const RngStreamSpec& seed) {
    ErrorEstimate est;
    est.trials = trials;
    est.seed = seed;
    est.type1 = static_cast<double>(rejects_null) / static_cast<double>(trials);
    est.type2 = static_cast<double>(accepts_alt) / static_cast<double>(trials);
    est.ci_radius = binom_ci(est.max_rate(), trials);
    return est;
}

}  // namespace

ErrorEstimate estimate_gof_error_rates(const GofTestConfig& config, const ThetaVector& theta_alt,
                                       std::int64_t n, std::int64_t trials, const RngStreamSpec& stream,
                                       int workers) {
    if (trials < 100) throw std::invalid_argument("estimate_gof_error_rates: need trials >= 100");
    int dim;
    if (const auto* tp = std::get_if<TwoPartGofConfig>(&config))
        dim = two_part_params(tp->eps).big_d;
    else
        dim = std::get<ProjectionGofConfig>(config).d;
    dim = std::max(dim, theta_alt.support_dim());

    auto decide = [&](const std::vector<double>& mean) {
        if (const auto* tp = std::get_if<TwoPartGofConfig>(&config))
            return gof_two_part_from_mean(mean, n, tp->eps).reject;
        const auto& pj = std::get<ProjectionGofConfig>(config);
        return gof_projection_from_mean(mean, pj.d, pj.threshold).reject;
    };

    const auto null_stream = substream(stream, kNullArm);
    const auto alt_stream = substream(stream, kAltArm);
    const ThetaVector zero;
    std::vector<std::uint8_t> rej_null(static_cast<std::size_t>(trials));
    std::vector<std::uint8_t> acc_alt(static_cast<std::size_t>(trials));
    parallel_for_index(trials, workers, [&](std::int64_t t) {
        {
            auto rng = make_rng(substream(null_stream, static_cast<std::uint64_t>(t)));
            rej_null[static_cast<std::size_t>(t)] = decide(sample_mean_vector(zero, n, dim, rng)) ? 1 : 0;
        }
        {
            auto rng = make_rng(substream(alt_stream, static_cast<std::uint64_t>(t)));
            acc_alt[static_cast<std::size_t>(t)] = decide(sample_mean_vector(theta_alt, n, dim, rng)) ? 0 : 1;
        }
    });
    std::int64_t r = 0, a = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        r += rej_null[static_cast<std::size_t>(t)];
        a += acc_alt[static_cast<std::size_t>(t)];
    }
    return finish(r, a, trials, stream);
}

ErrorEstimate estimate_lfht_error_rates(const LfhtTestConfig& config, const ThetaVector& theta_x,
                                        const ThetaVector& theta_y, std::int64_t n, std::int64_t m,
                                        std::int64_t trials, const RngStreamSpec& stream, int workers) {
    if (trials < 100) throw std::invalid_argument("estimate_lfht_error_rates: need trials >= 100");
    if (m < 1) throw std::invalid_argument("estimate_lfht_error_rates: need m >= 1");

    int dim;
    if (const auto* full = std::get_if<FullLpLfhtConfig>(&config)) {
        dim = lfht_split(full->body, n, full->body.ambient_dim(), full->eps).dim;
    } else {
        dim = std::get<ProjectionLfhtConfig>(config).d;
    }
    dim = std::max({dim, theta_x.support_dim(), theta_y.support_dim(), 1});

    // one trial: draw the mean summaries of every block and run the scheme
    auto run_trial = [&](std::mt19937_64& rng, const ThetaVector& theta_z) {
        if (const auto* full = std::get_if<FullLpLfhtConfig>(&config)) {
            const auto sp = lfht_split(full->body, n, full->body.ambient_dim(), full->eps);
            const auto mx1 = sample_mean_vector(theta_x, sp.n0, dim, rng);
            const auto mx2 = sample_mean_vector(theta_x, sp.n2, dim, rng);
            const auto my1 = sample_mean_vector(theta_y, sp.n0, dim, rng);
            const auto my2 = sample_mean_vector(theta_y, sp.n2, dim, rng);
            const auto mz = sample_mean_vector(theta_z, m, dim, rng);
            return lfht_full_from_means(mx1, mx2, my1, my2, mz, full->body, n, full->eps, full->delta).reject;
        }
        const auto& pj = std::get<ProjectionLfhtConfig>(config);
        const auto mx = sample_mean_vector(theta_x, n, dim, rng);
        const auto my = sample_mean_vector(theta_y, n, dim, rng);
        const auto mz = sample_mean_vector(theta_z, m, dim, rng);
        return lfht_projection_from_means(mx, my, mz, pj.d).reject;
    };

    const auto null_stream = substream(stream, kNullArm);
    const auto alt_stream = substream(stream, kAltArm);
    std::vector<std::uint8_t> rej_null(static_cast<std::size_t>(trials));
    std::vector<std::uint8_t> acc_alt(static_cast<std::size_t>(trials));
    parallel_for_index(trials, workers, [&](std::int64_t t) {
        {
            auto rng = make_rng(substream(null_stream, static_cast<std::uint64_t>(t)));
            rej_null[static_cast<std::size_t>(t)] = run_trial(rng, theta_x) ? 1 : 0;  // H0: Z ~ X
        }
        {
            auto rng = make_rng(substream(alt_stream, static_cast<std::uint64_t>(t)));
            acc_alt[static_cast<std::size_t>(t)] = run_trial(rng, theta_y) ? 0 : 1;  // H1: Z ~ Y
        }
    });
    std::int64_t r = 0, a = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        r += rej_null[static_cast<std::size_t>(t)];
        a += acc_alt[static_cast<std::size_t>(t)];
    }
    return finish(r, a, trials, stream);
}

SearchResult sample_complexity_search(const ErrorFn& error_fn, double target, std::int64_t n_max,
                                      const RngStreamSpec& stream, std::int64_t n_min) {
    if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("sample_complexity_search: bad target");
    if (n_min < 1 || n_max < n_min) throw std::invalid_argument("sample_complexity_search: bad bounds");
    SearchResult out;
    std::uint64_t probe = 0;
    auto passes = [&](std::int64_t n) {
        const auto est = error_fn(n, substream(stream, probe++));
        ++out.probes;
        return est.max_rate() + est.ci_radius <= target;
    };
    std::int64_t lo = n_min - 1;  // last known failure (or floor)
    while (true) {
        // doubling phase
        std::int64_t hi = std::max<std::int64_t>(lo + 1, n_min);
        while (!passes(hi)) {
            lo = hi;
            if (hi >= n_max) return out;  // unresolved
            hi = std::min(n_max, hi * 2);
        }
        // bisection on (lo, hi]
        while (hi - lo > 1) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (passes(mid))
                hi = mid;
            else
                lo = mid;
        }
        // independent re-validation
        const auto check = error_fn(hi, substream(substream(stream, kValidationArm), probe++));
        ++out.probes;
        if (check.max_rate() + check.ci_radius <= target) {
            out.n = hi;
            out.resolved = true;
            return out;
        }
        lo = hi;  // validation failed; resume above this point
        if (lo >= n_max) return out;
    }
}

FitResult rate_exponent_fit(const std::vector<std::pair<double, double>>& eps_nstar) {
    if (eps_nstar.size() < 3) throw std::invalid_argument("rate_exponent_fit: need >= 3 points");
    FitResult fit;
    double sx = 0.0, sy = 0.0;
    for (const auto& [eps, nstar] : eps_nstar) {
        if (!(eps > 0.0) || !(nstar > 0.0)) throw std::invalid_argument("rate_exponent_fit: bad point");
        fit.points.emplace_back(std::log(1.0 / eps), std::log(nstar));
        sx += fit.points.back().first;
        sy += fit.points.back().second;
    }
    const double k = static_cast<double>(fit.points.size());
    const double mx = sx / k, my = sy / k;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : fit.points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx <= 0.0) throw std::invalid_argument("rate_exponent_fit: degenerate (all eps equal)");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double rss = 0.0;
    for (const auto& [x, y] : fit.points) {
        const double r = y - (fit.intercept + fit.slope * x);
        rss += r * r;
    }
    fit.stderr_slope = (fit.points.size() > 2) ? std::sqrt(rss / (k - 2.0) / sxx) : 0.0;
    return fit;
}

ThetaVector gof_energy_alternative(const LpBody& body, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("gof_energy_alternative: eps must be > 0");
    const int head = std::min(body.ambient_dim(), two_part_params(eps).d);
    int best_k = 0;
    for (int k = 1; k <= head; ++k) {
        ThetaVector dir(std::vector<double>(static_cast<std::size_t>(k), 1.0));
        const double norm = boundary_scale(body, dir) * std::sqrt(static_cast<double>(k));
        if (norm >= eps) best_k = k;
    }
    if (best_k == 0) throw std::invalid_argument("gof_energy_alternative: eps too large for the body");
    std::vector<double> v(static_cast<std::size_t>(best_k), eps / std::sqrt(static_cast<double>(best_k)));
    ThetaVector theta(std::move(v));
    if (!membership(body, theta)) throw std::logic_error("gof_energy_alternative: constructed point escaped the body");
    return theta;
}

ThetaVector gof_spike_alternative(const LpBody& body, double eps, double margin) {
    const auto prm = two_part_params(eps);
    const int coord = prm.d;  // 0-based index of coordinate d+1
    if (coord >= body.ambient_dim())
        throw std::invalid_argument("gof_spike_alternative: body prefix too short");
    const double need = prm.max_threshold;
    const double cap = body.radius(coord) * (1.0 - 1e-9);
    if (cap <= need) throw std::invalid_argument("gof_spike_alternative: eps too large for the body");
    const double h = std::min(need * (1.0 + margin), cap);
    std::vector<double> v(static_cast<std::size_t>(coord) + 1, 0.0);
    v.back() = h;
    ThetaVector theta(std::move(v));
    if (!membership(body, theta)) throw std::logic_error("gof_spike_alternative: constructed point escaped the body");
    return theta;
}

std::pair<ThetaVector, ThetaVector> lfht_pair_alternative(const LpBody& body, double eps) {
    return {gof_energy_alternative(body, eps), ThetaVector{}};
}

RegionMap lfht_region_map(const LpBody& body, double eps, const std::vector<std::int64_t>& m_grid,
                          const std::vector<std::int64_t>& n_grid, std::int64_t trials,
                          const RngStreamSpec& stream, double delta, int workers) {
    if (m_grid.empty() || n_grid.empty()) throw std::invalid_argument("lfht_region_map: empty grid");
    RegionMap map;
    map.eps = eps;
    const auto [tx, ty] = lfht_pair_alternative(body, eps);
    const FullLpLfhtConfig cfg{body, eps, delta};
    std::uint64_t cell = 0;
    for (std::int64_t n : n_grid) {
        for (std::int64_t m : m_grid) {
            RegionCell c;
            c.m = m;
            c.n = n;
            const auto est =
                estimate_lfht_error_rates(cfg, tx, ty, n, m, trials, substream(stream, cell++), workers);
            c.error_hat = est.max_rate();
            c.ci_radius = est.ci_radius;
            c.feasible_mc = est.max_rate() + est.ci_radius <= 0.25;
            c.sufficient_quad = lfht_region_predicate(RegionKind::SufficientQuad, body, m, n, eps, delta);
            c.sufficient_lp = lfht_region_predicate(RegionKind::SufficientLp, body, m, n, eps, delta);
            c.necessary_lp = lfht_region_predicate(RegionKind::NecessaryLp, body, m, n, eps, delta);
            map.grid.push_back(c);
        }
    }
    return map;
}

SearchResult minimal_feasible_m(const LpBody& body, double eps, std::int64_t n, std::int64_t m_max,
                                double target, std::int64_t trials, const RngStreamSpec& stream,
                                double delta, int workers) {
    const auto [tx, ty] = lfht_pair_alternative(body, eps);
    const FullLpLfhtConfig cfg{body, eps, delta};
    ErrorFn fn = [&](std::int64_t m, const RngStreamSpec& probe) {
        return estimate_lfht_error_rates(cfg, tx, ty, n, m, trials, probe, workers);
    };
    return sample_complexity_search(fn, target, m_max, stream);
}

}  // namespace gsm
