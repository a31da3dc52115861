#include "gsm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gsm {

namespace {

// log cosh(x) without overflow.
double log_cosh(double x) {
    const double ax = std::abs(x);
    return ax + std::log1p(std::exp(-2.0 * ax)) - std::log(2.0);
}

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Per-coordinate support of a product prior.
struct CoordSupport {
    std::vector<double> value;
    std::vector<double> prob;
};

std::vector<CoordSupport> coord_supports(const ProductPrior& prior) {
    std::vector<CoordSupport> out;
    if (const auto* tp = std::get_if<TwoPointSymPrior>(&prior)) {
        for (double v : tp->theta_star.coords) out.push_back({{v, -v}, {0.5, 0.5}});
    } else if (const auto* tern = std::get_if<TernaryPrior>(&prior)) {
        for (int i = 0; i < tern->d; ++i)
            out.push_back({{0.0, tern->r, -tern->r}, {1.0 - tern->h, tern->h / 2.0, tern->h / 2.0}});
    } else {
        const auto& pm = std::get<PointMassPrior>(prior);
        for (double v : pm.theta.coords) out.push_back({{v}, {1.0}});
    }
    return out;
}

}  // namespace

void validate(const ProductPrior& prior) {
    if (const auto* tern = std::get_if<TernaryPrior>(&prior)) {
        if (tern->d < 1 || tern->h < 0.0 || tern->h > 1.0 || !(tern->r > 0.0))
            throw std::invalid_argument("TernaryPrior: need d >= 1, 0 <= h <= 1, r > 0");
    }
}

std::vector<double> Dataset::col_means() const {
    std::vector<KahanSum> acc(static_cast<std::size_t>(dim));
    for (std::int64_t i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j) acc[static_cast<std::size_t>(j)].add(at(i, j));
    std::vector<double> out(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) out[static_cast<std::size_t>(j)] = acc[static_cast<std::size_t>(j)].sum / n;
    return out;
}

Dataset sample_dataset(const ThetaVector& theta, std::int64_t n, int dim, const RngStreamSpec& stream) {
    if (n < 1 || dim < 1) throw std::invalid_argument("sample_dataset: n and dim must be >= 1");
    if (theta.support_dim() > dim) throw std::invalid_argument("sample_dataset: theta support exceeds dim");
    Dataset ds;
    ds.n = n;
    ds.dim = dim;
    ds.samples.resize(static_cast<std::size_t>(n) * dim);
    auto rng = make_rng(stream);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::int64_t i = 0; i < n; ++i)
        for (int j = 0; j < dim; ++j)
            ds.samples[static_cast<std::size_t>(i) * dim + j] = theta.at(j) + nd(rng);
    return ds;
}

ThetaVector sample_theta(const ProductPrior& prior, int dim, const RngStreamSpec& stream) {
    validate(prior);
    auto rng = make_rng(stream);
    std::vector<double> out(static_cast<std::size_t>(dim), 0.0);
    if (const auto* tp = std::get_if<TwoPointSymPrior>(&prior)) {
        if (tp->theta_star.support_dim() > dim)
            throw std::invalid_argument("sample_theta: prior support exceeds dim");
        std::bernoulli_distribution flip(0.5);
        for (int i = 0; i < tp->theta_star.support_dim(); ++i)
            out[static_cast<std::size_t>(i)] = flip(rng) ? tp->theta_star.at(i) : -tp->theta_star.at(i);
    } else if (const auto* tern = std::get_if<TernaryPrior>(&prior)) {
        if (tern->d > dim) throw std::invalid_argument("sample_theta: ternary d exceeds dim");
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int i = 0; i < tern->d; ++i) {
            const double v = u(rng);
            if (v < tern->h / 2.0)
                out[static_cast<std::size_t>(i)] = tern->r;
            else if (v < tern->h)
                out[static_cast<std::size_t>(i)] = -tern->r;
        }
    } else {
        const auto& pm = std::get<PointMassPrior>(prior);
        if (pm.theta.support_dim() > dim) throw std::invalid_argument("sample_theta: prior support exceeds dim");
        for (int i = 0; i < pm.theta.support_dim(); ++i) out[static_cast<std::size_t>(i)] = pm.theta.at(i);
    }
    return ThetaVector(std::move(out));
}

std::vector<double> sample_mean_vector(const ThetaVector& theta, std::int64_t count, int dim,
                                       std::mt19937_64& rng) {
    if (count < 1 || dim < 1) throw std::invalid_argument("sample_mean_vector: count and dim must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(dim));
    std::normal_distribution<double> nd(0.0, 1.0);
    const double sd = 1.0 / std::sqrt(static_cast<double>(count));
    for (int j = 0; j < dim; ++j) out[static_cast<std::size_t>(j)] = theta.at(j) + sd * nd(rng);
    return out;
}

double chi2_two_point_log1p(const ThetaVector& theta_star, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("chi2_two_point: n must be >= 1");
    KahanSum s;
    for (double v : theta_star.coords) s.add(log_cosh(static_cast<double>(n) * v * v));
    return s.sum;
}

double chi2_two_point_exact(const ThetaVector& theta_star, std::int64_t n) {
    return std::expm1(chi2_two_point_log1p(theta_star, n));
}

double chi2_ternary_log1p(int d, double h, double r, std::int64_t m) {
    validate(ProductPrior(TernaryPrior{d, h, r}));
    if (m < 0) throw std::invalid_argument("chi2_ternary: m must be >= 0");
    if (h == 0.0 || m == 0) return 0.0;
    // per-coordinate factor 1 - h^2 + h^2 cosh(m r^2), assembled in log space
    const double lc = log_cosh(static_cast<double>(m) * r * r);
    const double lb = 2.0 * std::log(h) + lc;
    double lf;
    if (h < 1.0) {
        const double la = std::log1p(-h * h);
        const double mx = std::max(la, lb);
        lf = mx + std::log(std::exp(la - mx) + std::exp(lb - mx));
    } else {
        lf = lb;
    }
    return d * lf;
}

double chi2_ternary_exact(int d, double h, double r, std::int64_t m) {
    return std::expm1(chi2_ternary_log1p(d, h, r, m));
}

double chi2_bruteforce_enum(const ProductPrior& prior, std::int64_t m) {
    validate(prior);
    const auto supports = coord_supports(prior);
    // materialize the full product support
    std::size_t total = 1;
    for (const auto& s : supports) {
        total *= s.value.size();
        if (total > 1200) throw std::invalid_argument("chi2_bruteforce_enum: prior support too large");
    }
    const int dim = static_cast<int>(supports.size());
    std::vector<std::vector<double>> points;
    std::vector<double> probs;
    points.reserve(total);
    probs.reserve(total);
    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    for (std::size_t k = 0; k < total; ++k) {
        std::vector<double> pt(static_cast<std::size_t>(dim));
        double pr = 1.0;
        for (int j = 0; j < dim; ++j) {
            pt[static_cast<std::size_t>(j)] = supports[static_cast<std::size_t>(j)].value[idx[static_cast<std::size_t>(j)]];
            pr *= supports[static_cast<std::size_t>(j)].prob[idx[static_cast<std::size_t>(j)]];
        }
        points.push_back(std::move(pt));
        probs.push_back(pr);
        for (int j = dim - 1; j >= 0; --j) {
            if (++idx[static_cast<std::size_t>(j)] < supports[static_cast<std::size_t>(j)].value.size()) break;
            idx[static_cast<std::size_t>(j)] = 0;
        }
    }
    KahanSum acc;
    for (std::size_t a = 0; a < total; ++a) {
        for (std::size_t b = 0; b < total; ++b) {
            double dot = 0.0;
            for (int j = 0; j < dim; ++j)
                dot += points[a][static_cast<std::size_t>(j)] * points[b][static_cast<std::size_t>(j)];
            acc.add(probs[a] * probs[b] * std::exp(static_cast<double>(m) * dot));
        }
    }
    return acc.sum - 1.0;
}

TvBound tv_upper_bound_gof(double d, double h, double r, double n) {
    if (!(d > 0.0) || h < 0.0 || r < 0.0 || !(n > 0.0))
        throw std::invalid_argument("tv_upper_bound_gof: bad arguments");
    TvBound out;
    const double q = d * h * h * n * n * r * r * r * r;
    out.valid = (q <= 1.0 + 1e-12) && (n * r * r <= 1.0 + 1e-12);
    out.value = std::min(1.0, std::sqrt(q));
    return out;
}

namespace {

// Per-coordinate bracket of eq-style conditional chi-square:
//   1 + (p^2 + q^2)(e^{mr^2} - 1) + 2 p q (e^{-mr^2} - 1)
// with posterior masses p, q of the +-r atoms given the coordinate's sample sum.
double ternary_bracket(double h, double r, std::int64_t n, std::int64_t m, double sum_x) {
    // log-weights of the three atoms given S = sum_x; shared max subtraction
    const double n_half_r2 = 0.5 * static_cast<double>(n) * r * r;
    const double l0 = (h < 1.0) ? std::log1p(-h) : -std::numeric_limits<double>::infinity();
    const double lp = std::log(h / 2.0) + r * sum_x - n_half_r2;
    const double lq = std::log(h / 2.0) - r * sum_x - n_half_r2;
    const double mx = std::max(l0, std::max(lp, lq));
    const double w0 = std::exp(l0 - mx), wp = std::exp(lp - mx), wq = std::exp(lq - mx);
    const double tot = w0 + wp + wq;
    const double p = wp / tot, q = wq / tot;
    const double mr2 = static_cast<double>(m) * r * r;
    return 1.0 + (p * p + q * q) * std::expm1(mr2) + 2.0 * p * q * std::expm1(-mr2);
}

double two_point_bracket(double theta, std::int64_t /*n*/, std::int64_t m, double sum_x) {
    // posterior of the + atom: sigmoid(2 theta S)
    const double p = 1.0 / (1.0 + std::exp(-2.0 * theta * sum_x));
    const double q = 1.0 - p;
    const double mt2 = static_cast<double>(m) * theta * theta;
    return 1.0 + (p * p + q * q) * std::expm1(mt2) + 2.0 * p * q * std::expm1(-mt2);
}

}  // namespace

McEstimate lfht_conditional_chi2_mc(const ProductPrior& prior, std::int64_t n, std::int64_t m,
                                    std::int64_t trials, const RngStreamSpec& stream) {
    validate(prior);
    if (n < 1 || m < 0) throw std::invalid_argument("lfht_conditional_chi2_mc: need n >= 1, m >= 0");
    if (trials < 100) throw std::invalid_argument("lfht_conditional_chi2_mc: need trials >= 100");
    if (std::holds_alternative<PointMassPrior>(prior))
        throw std::invalid_argument("lfht_conditional_chi2_mc: point-mass prior is degenerate");

    int dim;
    if (const auto* tern = std::get_if<TernaryPrior>(&prior))
        dim = tern->d;
    else
        dim = std::get<TwoPointSymPrior>(prior).theta_star.support_dim();
    if (m == 0) return McEstimate{1.0, 0.0, trials, 0};

    // Coordinates are independent under P_{0,X}, so chi2+1 factorizes into a
    // product of per-coordinate expectations; estimate each mean from the
    // same trial budget and combine with a delta-method CI.
    std::vector<KahanSum> mean_acc(static_cast<std::size_t>(dim)), sq_acc(static_cast<std::size_t>(dim));
    std::int64_t rejected = 0;
    const double sqn = std::sqrt(static_cast<double>(n));
    for (std::int64_t t = 0; t < trials; ++t) {
        auto rng = make_rng(substream(stream, static_cast<std::uint64_t>(t)));
        std::normal_distribution<double> nd(0.0, 1.0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        bool ok = true;
        std::vector<double> brackets(static_cast<std::size_t>(dim));
        for (int j = 0; j < dim; ++j) {
            double theta_j, b;
            if (const auto* tern = std::get_if<TernaryPrior>(&prior)) {
                const double v = u(rng);
                theta_j = (v < tern->h / 2.0) ? tern->r : (v < tern->h ? -tern->r : 0.0);
                const double s = static_cast<double>(n) * theta_j + sqn * nd(rng);
                b = ternary_bracket(tern->h, tern->r, n, m, s);
            } else {
                const auto& tp = std::get<TwoPointSymPrior>(prior);
                const double th = tp.theta_star.at(j);
                theta_j = (u(rng) < 0.5) ? th : -th;
                const double s = static_cast<double>(n) * theta_j + sqn * nd(rng);
                b = two_point_bracket(th, n, m, s);
            }
            if (!std::isfinite(b)) {
                ok = false;
                break;
            }
            brackets[static_cast<std::size_t>(j)] = b;
        }
        if (!ok) {
            ++rejected;
            continue;
        }
        for (int j = 0; j < dim; ++j) {
            mean_acc[static_cast<std::size_t>(j)].add(brackets[static_cast<std::size_t>(j)]);
            sq_acc[static_cast<std::size_t>(j)].add(brackets[static_cast<std::size_t>(j)] * brackets[static_cast<std::size_t>(j)]);
        }
    }
    const std::int64_t used = trials - rejected;
    if (rejected * 100 > trials)
        throw std::runtime_error("lfht_conditional_chi2_mc: more than 1% of trials rejected");

    double prod = 1.0;
    double rel_var = 0.0;  // sum_j Var(mean_j) / mean_j^2 (coordinates independent)
    for (int j = 0; j < dim; ++j) {
        const double mj = mean_acc[static_cast<std::size_t>(j)].sum / used;
        const double vj = std::max(0.0, sq_acc[static_cast<std::size_t>(j)].sum / used - mj * mj) / used;
        prod *= mj;
        rel_var += vj / (mj * mj);
    }
    McEstimate out;
    out.value = prod;
    out.ci_radius = 1.96 * std::abs(prod) * std::sqrt(rel_var);
    out.trials = used;
    out.rejected = rejected;
    return out;
}

ThetaVector theta_star_construct(const LpBody& body, double cap) {
    if (!(cap > 0.0)) throw std::invalid_argument("theta_star_construct: cap must be > 0");
    const double level = std::sqrt(cap);
    const double p = body.p();
    std::vector<double> out(static_cast<std::size_t>(body.ambient_dim()), 0.0);
    double budget = 1.0;
    for (int i = 0; i < body.ambient_dim(); ++i) {
        const double cost = std::pow(level / body.radius(i), p);
        if (cost <= budget) {
            out[static_cast<std::size_t>(i)] = level;
            budget -= cost;
        } else {
            // leftover budget on the first coordinate that does not fit fully
            out[static_cast<std::size_t>(i)] = std::min(level, body.radius(i) * std::pow(budget, 1.0 / p));
            budget = 0.0;
            break;
        }
    }
    return ThetaVector(std::move(out));
}

}  // namespace gsm
