#pragma once

#include <cstdint>
#include <vector>

namespace gsm {

// Mean vector with finite support; coordinates beyond support_dim() are zero.
struct ThetaVector {
    std::vector<double> coords;

    ThetaVector() = default;
    explicit ThetaVector(std::vector<double> c) : coords(std::move(c)) {}

    int support_dim() const { return static_cast<int>(coords.size()); }
    double at(int i) const {  // 0-based, implicit zero tail
        return (i >= 0 && i < support_dim()) ? coords[static_cast<std::size_t>(i)] : 0.0;
    }
    double norm2_sq() const;
};

// lp body {theta : sum_t |theta_t|^p / a_t^p <= 1} with non-increasing
// positive radii a_1 >= ... >= a_D > 0. Infinite bodies are represented by
// a finite prefix; choose ambient_dim() >= coordinate_kolmogorov_dim(eps/3)
// so the discarded tail carries no signal at working scale eps.
class LpBody {
  public:
    LpBody(double p, std::vector<double> radii);

    double p() const { return p_; }
    int ambient_dim() const { return static_cast<int>(radii_.size()); }
    double radius(int i) const { return radii_[static_cast<std::size_t>(i)]; }  // 0-based
    const std::vector<double>& radii() const { return radii_; }

  private:
    double p_;
    std::vector<double> radii_;
};

// All dimension quantities for one (body, eps, n) configuration.
struct DimProfile {
    int d_coordinate_kolmogorov = 0;
    bool kolmogorov_saturated = false;  // eps below the last prefix radius
    int d_truncation = 0;
    int d_u = 0;
    int d_l = 0;
    double at_eps = 0.0;
    std::int64_t at_n = 0;
};

// sum_t (|theta_t|/a_t)^p <= 1, with 1e-12 relative slack so boundary
// points built by exact scaling test inside.
bool membership(const LpBody& body, const ThetaVector& theta);

// Largest s >= 0 with s*direction in the body: s = (sum |dir_t/a_t|^p)^(-1/p).
double boundary_scale(const LpBody& body, const ThetaVector& direction);

// sup over the body of sum_{t>d} theta_t^2. Single spike a_{d+1}^2 for
// p <= 2; Hoelder/Lagrange closed form for p > 2.
double tail_sup_energy(const LpBody& body, int d);

// min{ k >= 1 : a_k <= eps }, clamped to ambient_dim; *saturated is set when
// no prefix radius is <= eps (the prefix is too short for this scale).
int coordinate_kolmogorov_dim(const LpBody& body, double eps, bool* saturated = nullptr);

// Smallest d with tail_sup_energy(body, d) <= eps^2.
int truncation_dim(const LpBody& body, double eps);

// max{ d <= limit : a_d^p n^{(p-2)/2} >= threshold }, 0 when empty.
int effective_dim(const LpBody& body, std::int64_t n, double threshold, int limit);

// Effective dimension governing the lp LFHT upper bound:
// threshold eps^2 / (576 log(4 D / delta)).
int d_u(const LpBody& body, std::int64_t n, double eps, double delta, int big_d);

// Effective dimension governing the LFHT lower bound: threshold 192 eps^2.
int d_l(const LpBody& body, std::int64_t n, double eps);

// The l1 body with a_i = 1/i, the testing-vs-estimation counter-example.
LpBody counterexample_body(int d_max);

// Consistency self-test: truncation dim at scale eps/Dc is >= Dc/2 - 2,
// where Dc = coordinate_kolmogorov_dim(body, eps).
bool kol_inequality_check(const LpBody& body, double eps);

DimProfile dim_profile(const LpBody& body, double eps, std::int64_t n, double delta);

}  // namespace gsm
