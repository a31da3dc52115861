// gsmlab: experiment driver for the Gaussian sequence model lab.
//
//   gsmlab <command> --config cfg.json [--seed N] [--trials N] [--workers N] [--out dir]
//
// Commands: dims, est-risk, gof, lfht, region, rate-fit. Each run writes
// results.csv (one row per measurement) and summary.json into the output
// directory. Reruns with the same seed produce byte-identical CSV output
// for any worker count.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <clocale>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gsm/bodies.hpp"
#include "gsm/estimators.hpp"
#include "gsm/experiments.hpp"
#include "gsm/hypothesis_tests.hpp"
#include "gsm/sampling.hpp"

using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitUnresolved = 3;
constexpr int kExitNumeric = 4;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
        out << "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
            out << "\n";
        }
    }
};

gsm::LpBody body_from_config(const json& j) {
    if (!j.contains("body")) throw std::invalid_argument("config: missing body");
    const json& b = j.at("body");
    const double p = b.value("p", 2.0);
    const int d_max = b.value("D_max", 0);
    const double scale = b.value("scale", 1.0);
    if (!b.contains("radii")) throw std::invalid_argument("config: body.radii required");
    std::vector<double> radii;
    if (b.at("radii").is_string()) {
        const std::string rule = b.at("radii").get<std::string>();
        if (d_max < 1) throw std::invalid_argument("config: body.D_max required for radii rule");
        radii.resize(static_cast<std::size_t>(d_max));
        if (rule == "one_over_t") {
            for (int i = 0; i < d_max; ++i) radii[static_cast<std::size_t>(i)] = scale / (i + 1);
        } else if (rule == "constant") {
            for (int i = 0; i < d_max; ++i) radii[static_cast<std::size_t>(i)] = scale;
        } else {
            throw std::invalid_argument("config: unknown radii rule '" + rule + "'");
        }
    } else {
        radii = b.at("radii").get<std::vector<double>>();
    }
    return gsm::LpBody(p, std::move(radii));
}

std::vector<double> eps_list(const json& j) {
    if (j.contains("eps_grid")) {
        auto g = j.at("eps_grid").get<std::vector<double>>();
        if (g.empty()) throw std::invalid_argument("config: eps_grid empty");
        return g;
    }
    if (j.contains("eps")) return {j.at("eps").get<double>()};
    throw std::invalid_argument("config: eps or eps_grid required");
}

std::vector<std::int64_t> int_grid(const json& j, const std::string& key) {
    auto g = j.at(key).get<std::vector<std::int64_t>>();
    if (g.empty()) throw std::invalid_argument("config: " + key + " empty");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (g[i] <= g[i - 1]) throw std::invalid_argument("config: " + key + " must be sorted ascending");
    return g;
}

struct RunContext {
    json config;
    gsm::RngStreamSpec seed;
    std::int64_t trials = 0;
    int workers = 1;
    double delta = 1.0 / 32.0;
    std::filesystem::path out_dir;
};

json error_estimate_json(const gsm::ErrorEstimate& e) {
    return json{{"type1", e.type1}, {"type2", e.type2}, {"trials", e.trials}, {"ci_radius", e.ci_radius}};
}

int run_dims(const RunContext& ctx, CsvWriter& csv, json& results) {
    const auto body = body_from_config(ctx.config);
    const std::int64_t n = ctx.config.value("n", std::int64_t{100});
    csv.header = {"eps", "d_coordinate_kolmogorov", "kolmogorov_saturated", "d_truncation",
                  "d_u",  "d_l",                    "kol_inequality_check"};
    for (double eps : eps_list(ctx.config)) {
        const auto prof = gsm::dim_profile(body, eps, n, ctx.delta);
        const bool ok = gsm::kol_inequality_check(body, eps);
        csv.rows.push_back({fmt17(eps), std::to_string(prof.d_coordinate_kolmogorov),
                            prof.kolmogorov_saturated ? "1" : "0", std::to_string(prof.d_truncation),
                            std::to_string(prof.d_u), std::to_string(prof.d_l), ok ? "1" : "0"});
        results.push_back(json{{"eps", eps},
                               {"d_coordinate_kolmogorov", prof.d_coordinate_kolmogorov},
                               {"kolmogorov_saturated", prof.kolmogorov_saturated},
                               {"d_truncation", prof.d_truncation},
                               {"d_u", prof.d_u},
                               {"d_l", prof.d_l},
                               {"kol_inequality_check", ok},
                               {"n", n}});
    }
    return kExitOk;
}

gsm::EstimatorSpec estimator_from_config(const json& j, double eps, std::int64_t n) {
    if (!j.contains("estimator")) {
        // default: the counter-example soft-threshold estimator at scale eps
        gsm::SoftThresholdEstimator st;
        st.lambda = std::pow(eps / 8.0, 4.0 / 3.0);
        st.d_trunc = static_cast<int>(std::ceil(2.0 / eps));
        return st;
    }
    const json& e = j.at("estimator");
    const std::string kind = e.value("kind", "soft_threshold");
    if (kind == "empirical_mean") return gsm::EmpiricalMeanEstimator{};
    if (kind == "projection") return gsm::ProjectionEstimator{e.value("d", 1)};
    if (kind == "soft_threshold") {
        gsm::SoftThresholdEstimator st;
        st.d_trunc = e.value("d_trunc", static_cast<int>(std::ceil(2.0 / eps)));
        if (e.contains("lambda"))
            st.lambda = e.at("lambda").get<double>();
        else if (e.value("lambda_rule", "fixed") == "schedule")
            st.lambda = gsm::lambda_schedule(n, st.d_trunc, eps);
        else
            st.lambda = std::pow(eps / 8.0, 4.0 / 3.0);
        return st;
    }
    throw std::invalid_argument("config: unknown estimator kind '" + kind + "'");
}

int run_est_risk(const RunContext& ctx, CsvWriter& csv, json& results) {
    const auto body = body_from_config(ctx.config);
    const double eps = eps_list(ctx.config).front();
    std::int64_t n;
    if (ctx.config.contains("n"))
        n = ctx.config.at("n").get<std::int64_t>();
    else
        n = static_cast<std::int64_t>(std::ceil(std::pow(eps / 8.0, -8.0 / 3.0) * 4.0 * std::log(1.0 / eps)));
    const auto spec = estimator_from_config(ctx.config, eps, n);
    const auto worst = gsm::worst_case_risk_search(body, spec, n, ctx.trials, ctx.seed);
    csv.header = {"candidate", "risk", "ci_radius"};
    for (const auto& [name, risk] : worst.candidates)
        csv.rows.push_back({name, fmt17(risk.value), fmt17(risk.ci_radius)});
    results = json{{"eps", eps},
                   {"n", n},
                   {"eps_sq", eps * eps},
                   {"worst_risk", worst.risk.value},
                   {"worst_ci_radius", worst.risk.ci_radius},
                   {"risk_within_eps_sq", worst.risk.value <= eps * eps + 3.0 * worst.risk.ci_radius}};
    return kExitOk;
}

int run_gof(const RunContext& ctx, CsvWriter& csv, json& results) {
    const auto body = body_from_config(ctx.config);
    const double eps = eps_list(ctx.config).front();
    std::int64_t n;
    if (ctx.config.contains("n"))
        n = ctx.config.at("n").get<std::int64_t>();
    else
        n = static_cast<std::int64_t>(std::ceil(std::pow(eps, -12.0 / 5.0) * std::log(16.0 / eps)));
    const gsm::GofTestConfig cfg = gsm::TwoPartGofConfig{eps};
    csv.header = {"alternative", "type1", "type2", "ci_radius"};
    std::vector<std::pair<std::string, gsm::ThetaVector>> alts;
    alts.emplace_back("energy", gsm::gof_energy_alternative(body, eps));
    try {
        alts.emplace_back("spike", gsm::gof_spike_alternative(body, eps));
    } catch (const std::invalid_argument&) {
        // spike witness not constructible at this scale; skip it
    }
    double worst = 0.0;
    std::uint64_t tag = 0;
    for (const auto& [name, theta] : alts) {
        const auto est = gsm::estimate_gof_error_rates(cfg, theta, n, ctx.trials,
                                                       gsm::substream(ctx.seed, tag++), ctx.workers);
        csv.rows.push_back({name, fmt17(est.type1), fmt17(est.type2), fmt17(est.ci_radius)});
        results.push_back(json{{"alternative", name},
                               {"n", n},
                               {"eps", eps},
                               {"type1", est.type1},
                               {"type2", est.type2},
                               {"ci_radius", est.ci_radius}});
        worst = std::max({worst, est.type1, est.type2});
    }
    results.push_back(json{{"max_error", worst}});
    return kExitOk;
}

int run_lfht(const RunContext& ctx, CsvWriter& csv, json& results) {
    const auto body = body_from_config(ctx.config);
    const double eps = eps_list(ctx.config).front();
    const auto n = ctx.config.at("n").get<std::int64_t>();
    const auto m = ctx.config.at("m").get<std::int64_t>();
    const auto [tx, ty] = gsm::lfht_pair_alternative(body, eps);
    const gsm::FullLpLfhtConfig cfg{body, eps, ctx.delta};
    const auto est = gsm::estimate_lfht_error_rates(cfg, tx, ty, n, m, ctx.trials, ctx.seed, ctx.workers);
    csv.header = {"m", "n", "type1", "type2", "ci_radius", "sufficient_quad", "sufficient_lp", "necessary_lp"};
    const bool sq = gsm::lfht_region_predicate(gsm::RegionKind::SufficientQuad, body, m, n, eps, ctx.delta);
    const bool sl = gsm::lfht_region_predicate(gsm::RegionKind::SufficientLp, body, m, n, eps, ctx.delta);
    const bool nl = gsm::lfht_region_predicate(gsm::RegionKind::NecessaryLp, body, m, n, eps, ctx.delta);
    csv.rows.push_back({std::to_string(m), std::to_string(n), fmt17(est.type1), fmt17(est.type2),
                        fmt17(est.ci_radius), sq ? "1" : "0", sl ? "1" : "0", nl ? "1" : "0"});
    results = error_estimate_json(est);
    results["m"] = m;
    results["n"] = n;
    results["eps"] = eps;
    results["sufficient_quad"] = sq;
    results["sufficient_lp"] = sl;
    results["necessary_lp"] = nl;
    return kExitOk;
}

int run_region(const RunContext& ctx, CsvWriter& csv, json& results) {
    const auto body = body_from_config(ctx.config);
    const double eps = eps_list(ctx.config).front();
    const auto m_grid = int_grid(ctx.config, "m_grid");
    const auto n_grid = int_grid(ctx.config, "n_grid");
    const auto map = gsm::lfht_region_map(body, eps, m_grid, n_grid, ctx.trials, ctx.seed, ctx.delta,
                                          ctx.workers);
    csv.header = {"m",           "n",           "error_hat",    "ci_radius",
                  "feasible_mc", "sufficient_quad", "sufficient_lp", "necessary_lp"};
    for (const auto& c : map.grid) {
        csv.rows.push_back({std::to_string(c.m), std::to_string(c.n), fmt17(c.error_hat),
                            fmt17(c.ci_radius), c.feasible_mc ? "1" : "0", c.sufficient_quad ? "1" : "0",
                            c.sufficient_lp ? "1" : "0", c.necessary_lp ? "1" : "0"});
        results.push_back(json{{"m", c.m},
                               {"n", c.n},
                               {"error_hat", c.error_hat},
                               {"ci_radius", c.ci_radius},
                               {"feasible_mc", c.feasible_mc},
                               {"sufficient_quad", c.sufficient_quad},
                               {"sufficient_lp", c.sufficient_lp},
                               {"necessary_lp", c.necessary_lp}});
    }
    return kExitOk;
}

int run_rate_fit(const RunContext& ctx, CsvWriter& csv, json& results) {
    const auto body = body_from_config(ctx.config);
    const auto grid = eps_list(ctx.config);
    const std::string problem = ctx.config.value("problem", "gof");
    const double target = ctx.config.value("target", 0.25);
    const std::int64_t n_max = ctx.config.value("n_max", std::int64_t{4000000});

    csv.header = {"eps", "n_star", "resolved", "probes"};
    std::vector<std::pair<double, double>> points;
    bool all_resolved = true;
    std::uint64_t tag = 0;
    for (double eps : grid) {
        gsm::SearchResult res;
        if (problem == "gof") {
            const auto alt = gsm::gof_energy_alternative(body, eps);
            const gsm::GofTestConfig cfg = gsm::TwoPartGofConfig{eps};
            gsm::ErrorFn fn = [&](std::int64_t n, const gsm::RngStreamSpec& probe) {
                return gsm::estimate_gof_error_rates(cfg, alt, n, ctx.trials, probe, ctx.workers);
            };
            res = gsm::sample_complexity_search(fn, target, n_max, gsm::substream(ctx.seed, tag++));
        } else if (problem == "est") {
            gsm::ErrorFn fn = [&](std::int64_t n, const gsm::RngStreamSpec& probe) {
                const auto spec = estimator_from_config(ctx.config, eps, n);
                const auto worst = gsm::worst_case_risk_search(body, spec, n, ctx.trials, probe);
                gsm::ErrorEstimate est;
                est.type1 = worst.risk.value;
                est.ci_radius = worst.risk.ci_radius;
                est.trials = worst.risk.trials;
                return est;
            };
            res = gsm::sample_complexity_search(fn, eps * eps, n_max, gsm::substream(ctx.seed, tag++));
        } else {
            throw std::invalid_argument("config: rate-fit problem must be 'gof' or 'est'");
        }
        csv.rows.push_back({fmt17(eps), std::to_string(res.n), res.resolved ? "1" : "0",
                            std::to_string(res.probes)});
        results.push_back(
            json{{"eps", eps}, {"n_star", res.n}, {"resolved", res.resolved}, {"probes", res.probes}});
        if (!res.resolved) all_resolved = false;
        if (res.resolved) points.emplace_back(eps, static_cast<double>(res.n));
    }
    if (points.size() >= 3) {
        const auto fit = gsm::rate_exponent_fit(points);
        results.push_back(json{{"slope", fit.slope},
                               {"intercept", fit.intercept},
                               {"stderr_slope", fit.stderr_slope},
                               {"problem", problem}});
    }
    return all_resolved ? kExitOk : kExitUnresolved;
}

}  // namespace

int main(int argc, char** argv) {
    std::setlocale(LC_ALL, "C");
    CLI::App app{"Gaussian sequence model lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::int64_t> seed_flag;
    std::optional<std::int64_t> trials_flag;
    int workers = 1;
    std::string out_dir;

    const std::vector<std::string> commands = {"dims", "est-risk", "gof", "lfht", "region", "rate-fit"};
    for (const auto& name : commands) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed_flag, "override config seed");
        sub->add_option("--trials", trials_flag, "override config trials");
        sub->add_option("--workers", workers, "worker thread cap (does not affect results)");
        sub->add_option("--out", out_dir, "output directory");
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    RunContext ctx;
    try {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << "gsmlab: cannot open config " << config_path << "\n";
            return kExitConfig;
        }
        ctx.config = json::parse(in);

        std::int64_t seed = ctx.config.value("seed", std::int64_t{1});
        if (const char* env = std::getenv("GSMLAB_SEED")) seed = std::strtoll(env, nullptr, 10);
        if (seed_flag) seed = *seed_flag;
        ctx.seed = gsm::RngStreamSpec{static_cast<std::uint64_t>(seed), 0};
        ctx.trials = trials_flag ? *trials_flag : ctx.config.value("trials", std::int64_t{1000});
        ctx.workers = std::max(1, workers);
        ctx.delta = ctx.config.value("delta", 1.0 / 32.0);
        if (ctx.trials < 100) throw std::invalid_argument("config: trials must be >= 100");

        std::string out = out_dir.empty() ? ctx.config.value("output_path", std::string(".")) : out_dir;
        ctx.out_dir = out;
        std::filesystem::create_directories(ctx.out_dir);

        // resolved config for reproducibility audits
        ctx.config["seed"] = seed;
        ctx.config["trials"] = ctx.trials;
        ctx.config["delta"] = ctx.delta;
        ctx.config["command"] = command;
    } catch (const std::exception& e) {
        std::cerr << "gsmlab: config error: " << e.what() << "\n";
        return kExitConfig;
    }

    CsvWriter csv;
    json results = json::array();
    int code = kExitOk;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (command == "dims")
            code = run_dims(ctx, csv, results);
        else if (command == "est-risk")
            code = run_est_risk(ctx, csv, results);
        else if (command == "gof")
            code = run_gof(ctx, csv, results);
        else if (command == "lfht")
            code = run_lfht(ctx, csv, results);
        else if (command == "region")
            code = run_region(ctx, csv, results);
        else if (command == "rate-fit")
            code = run_rate_fit(ctx, csv, results);
    } catch (const std::invalid_argument& e) {
        std::cerr << "gsmlab: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "gsmlab: numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        csv.write(ctx.out_dir / "results.csv");
        json summary{{"command", command},
                     {"seed", ctx.config["seed"]},
                     {"trials", ctx.trials},
                     {"wall_time", wall},
                     {"results", results},
                     {"config", ctx.config}};
        std::ofstream js(ctx.out_dir / "summary.json", std::ios::binary);
        js << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
        std::cerr << "gsmlab: output error: " << e.what() << "\n";
        return kExitConfig;
    }
    return code;
}
