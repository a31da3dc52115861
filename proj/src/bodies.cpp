#include "gsm/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gsm {

namespace {
constexpr double kMembershipSlack = 1e-12;
}

double ThetaVector::norm2_sq() const {
    double s = 0.0;
    for (double v : coords) s += v * v;
    return s;
}

LpBody::LpBody(double p, std::vector<double> radii) : p_(p), radii_(std::move(radii)) {
    if (p_ < 1.0) throw std::invalid_argument("LpBody: exponent p must be >= 1");
    if (radii_.empty()) throw std::invalid_argument("LpBody: radii must be nonempty");
    for (std::size_t i = 0; i < radii_.size(); ++i) {
        if (!(radii_[i] > 0.0)) throw std::invalid_argument("LpBody: radii must be strictly positive");
        if (i > 0 && radii_[i] > radii_[i - 1] * (1.0 + 1e-15))
            throw std::invalid_argument("LpBody: radii must be non-increasing");
    }
}

bool membership(const LpBody& body, const ThetaVector& theta) {
    if (theta.support_dim() > body.ambient_dim())
        throw std::invalid_argument("membership: theta support exceeds body ambient dimension");
    double s = 0.0;
    for (int i = 0; i < theta.support_dim(); ++i)
        s += std::pow(std::abs(theta.at(i)) / body.radius(i), body.p());
    return s <= 1.0 + kMembershipSlack;
}

double boundary_scale(const LpBody& body, const ThetaVector& direction) {
    if (direction.support_dim() > body.ambient_dim())
        throw std::invalid_argument("boundary_scale: direction support exceeds ambient dimension");
    double s = 0.0;
    for (int i = 0; i < direction.support_dim(); ++i)
        s += std::pow(std::abs(direction.at(i)) / body.radius(i), body.p());
    if (s == 0.0) throw std::invalid_argument("boundary_scale: zero direction");
    return std::pow(s, -1.0 / body.p());
}

double tail_sup_energy(const LpBody& body, int d) {
    if (d < 0 || d > body.ambient_dim())
        throw std::invalid_argument("tail_sup_energy: d out of range");
    if (d == body.ambient_dim()) return 0.0;
    const double p = body.p();
    if (p <= 2.0) {
        const double a = body.radius(d);
        return a * a;
    }
    // maximize sum a_t^2 u_t^{2/p} over the simplex; optimum u_t ~ a_t^{2p/(p-2)}
    const double q = 2.0 * p / (p - 2.0);
    double s = 0.0;
    for (int t = d; t < body.ambient_dim(); ++t) s += std::pow(body.radius(t), q);
    return std::pow(s, (p - 2.0) / p);
}

int coordinate_kolmogorov_dim(const LpBody& body, double eps, bool* saturated) {
    if (!(eps > 0.0)) throw std::invalid_argument("coordinate_kolmogorov_dim: eps must be > 0");
    if (saturated) *saturated = false;
    const double target = eps * (1.0 + 1e-12);  // absorbs rounding of derived scales like eps/3
    for (int k = 1; k <= body.ambient_dim(); ++k) {
        if (body.radius(k - 1) <= target) return k;
    }
    if (saturated) *saturated = true;
    return body.ambient_dim();
}

int truncation_dim(const LpBody& body, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("truncation_dim: eps must be > 0");
    const double target = eps * eps * (1.0 + 1e-12);
    for (int d = 0; d <= body.ambient_dim(); ++d) {
        if (tail_sup_energy(body, d) <= target) return d;
    }
    return body.ambient_dim();
}

int effective_dim(const LpBody& body, std::int64_t n, double threshold, int limit) {
    if (n < 1) throw std::invalid_argument("effective_dim: n must be >= 1");
    limit = std::min(limit, body.ambient_dim());
    const double nfac = std::pow(static_cast<double>(n), (body.p() - 2.0) / 2.0);
    int best = 0;
    for (int d = 1; d <= limit; ++d) {
        if (std::pow(body.radius(d - 1), body.p()) * nfac >= threshold)
            best = d;
        else
            break;  // a_d non-increasing, so the criterion is monotone in d
    }
    return best;
}

int d_u(const LpBody& body, std::int64_t n, double eps, double delta, int big_d) {
    if (!(eps > 0.0) || !(delta > 0.0 && delta < 1.0) || big_d < 1)
        throw std::invalid_argument("d_u: bad arguments");
    const double tau = eps * eps / (576.0 * std::log(4.0 * big_d / delta));
    return effective_dim(body, n, tau, big_d);
}

int d_l(const LpBody& body, std::int64_t n, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("d_l: eps must be > 0");
    return effective_dim(body, n, 192.0 * eps * eps, body.ambient_dim());
}

LpBody counterexample_body(int d_max) {
    if (d_max < 1) throw std::invalid_argument("counterexample_body: d_max must be >= 1");
    std::vector<double> radii(static_cast<std::size_t>(d_max));
    for (int i = 0; i < d_max; ++i) radii[static_cast<std::size_t>(i)] = 1.0 / (i + 1);
    return LpBody(1.0, std::move(radii));
}

bool kol_inequality_check(const LpBody& body, double eps) {
    const int dc = coordinate_kolmogorov_dim(body, eps);
    const int lhs = truncation_dim(body, eps / dc);
    return static_cast<double>(lhs) >= dc / 2.0 - 2.0;
}

DimProfile dim_profile(const LpBody& body, double eps, std::int64_t n, double delta) {
    DimProfile out;
    out.at_eps = eps;
    out.at_n = n;
    out.d_coordinate_kolmogorov = coordinate_kolmogorov_dim(body, eps, &out.kolmogorov_saturated);
    out.d_truncation = truncation_dim(body, eps);
    out.d_u = d_u(body, n, eps, delta, body.ambient_dim());
    out.d_l = d_l(body, n, eps);
    return out;
}

}  // namespace gsm
