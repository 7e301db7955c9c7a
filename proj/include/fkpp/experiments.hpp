#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "fkpp/bounds.hpp"
#include "fkpp/csv.hpp"
#include "fkpp/discretization.hpp"
#include "fkpp/domain.hpp"
#include "fkpp/eigensolver.hpp"
#include "fkpp/errors.hpp"
#include "fkpp/steady.hpp"
#include "fkpp/svg.hpp"

namespace fkpp {

/// Scenario description: a named domain (two-patch family or explicit
/// interval list), parameter grids, mesh width, march settings, output dir.
struct SweepConfig {
    std::string scenario = "scenario";
    std::optional<TwoPatch> two_patch_spec;
    std::optional<Domain1D> explicit_domain;
    std::vector<double> alphas;
    std::vector<double> mus;
    double h = 1.0 / 128.0;
    MarchConfig march;
    std::string out_dir = "out";
    double joint_mu_max = 50.0;
    double joint_xi_tol = 1e-3;
    int joint_max_depth = 40;

    void validate() const {
        if (alphas.empty()) throw ConfigError("alpha list must be nonempty");
        for (double a : alphas)
            if (!(a > 0 && a < 1)) throw ConfigError("every alpha must lie in (0,1)");
        if (!(h > 0)) throw ConfigError("h must be positive");
        if (!two_patch_spec && !explicit_domain)
            throw ConfigError("config needs a two_patch or an intervals domain");
        march.validate();
    }

    Domain1D domain() const {
        if (explicit_domain) return *explicit_domain;
        return two_patch(*two_patch_spec);
    }

    const TwoPatch& require_two_patch() const {
        if (!two_patch_spec) throw ConfigError("this operation needs a two_patch scenario");
        return *two_patch_spec;
    }
};

inline SweepConfig parse_config(const nlohmann::json& j) {
    SweepConfig c;
    try {
        if (j.contains("scenario")) c.scenario = j.at("scenario").get<std::string>();
        if (j.contains("domain")) {
            const auto& d = j.at("domain");
            if (d.contains("two_patch")) {
                const auto& tp = d.at("two_patch");
                c.two_patch_spec.emplace(tp.at("A1").get<double>(), tp.at("A2").get<double>(),
                                         tp.value("mu", 0.0));
            } else {
                c.explicit_domain.emplace(d.get<Domain1D>());
            }
        }
        if (j.contains("alphas")) c.alphas = j.at("alphas").get<std::vector<double>>();
        if (j.contains("alpha")) c.alphas = {j.at("alpha").get<double>()};
        if (j.contains("mus")) c.mus = j.at("mus").get<std::vector<double>>();
        if (j.contains("mu")) c.mus = {j.at("mu").get<double>()};
        if (j.contains("h")) c.h = j.at("h").get<double>();
        if (j.contains("march")) {
            const auto& m = j.at("march");
            c.march.dt = m.value("dt", c.march.dt);
            c.march.t_end = m.value("t_end", c.march.t_end);
            c.march.snapshot_every = m.value("snapshot_every", c.march.snapshot_every);
            c.march.steady_tol = m.value("steady_tol", c.march.steady_tol);
            c.march.extinction_threshold =
                m.value("extinction_threshold", c.march.extinction_threshold);
        }
        if (j.contains("out")) c.out_dir = j.at("out").get<std::string>();
        if (j.contains("joint_mu_max")) c.joint_mu_max = j.at("joint_mu_max").get<double>();
        if (j.contains("joint_xi_tol")) c.joint_xi_tol = j.at("joint_xi_tol").get<double>();
        if (j.contains("joint_max_depth")) c.joint_max_depth = j.at("joint_max_depth").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("invalid config value: ") + e.what());
    }
    c.validate();
    return c;
}

inline SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(j);
}

/// One sweep point.
struct SweepRecord {
    double mu = 0.0;
    double alpha = 0.0;
    double h = 0.0;
    double xi = 0.0;
    double lambda = 0.0;
    std::string outcome;
    double sup_n = 0.0;
    double runtime_s = 0.0;
};

namespace detail {

/// Sign-of-lambda classification with the +-0.02 dichotomy margin.
inline std::string predicted_outcome(double lambda) {
    if (lambda < -0.02) return "persistence";
    if (lambda > 0.02) return "extinction";
    return "undetermined";
}

/// Runs f(i) for i in [0,n) on a small worker pool; rethrows the first error.
template <typename F>
void parallel_points(std::size_t n, F&& f) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex mx;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mx);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline void write_sweep_csv(const std::string& path, const std::vector<SweepRecord>& recs) {
    CsvWriter csv(path, "mu,alpha,h,xi,lambda,outcome,sup_n,runtime_s");
    for (const auto& r : recs)
        csv.row({fmt17(r.mu), fmt17(r.alpha), fmt17(r.h), fmt17(r.xi), fmt17(r.lambda), r.outcome,
                 fmt17(r.sup_n), fmt17(r.runtime_s)});
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

struct MuSweepReport {
    std::vector<SweepRecord> records;
    double xi_merged = 0.0;        // merged-interval value on the same grid
    double min_single_patch = 0.0; // min of the two single-patch eigenvalues
};

/// xi(mu) over the configured mu grid at fixed alpha(s); asserts the
/// nondecreasing property and the mu=0 merged-interval identity.
inline MuSweepReport sweep_mu(const SweepConfig& cfg) {
    cfg.validate();
    const TwoPatch& tp = cfg.require_two_patch();
    if (cfg.mus.empty()) throw ConfigError("sweep-mu needs a mu list");
    std::vector<double> mus = cfg.mus;
    std::sort(mus.begin(), mus.end());

    MuSweepReport rep;
    rep.records.resize(mus.size() * cfg.alphas.size());
    std::vector<std::pair<double, double>> points;  // (alpha, mu), alpha-major
    for (double a : cfg.alphas)
        for (double mu : mus) points.emplace_back(a, mu);

    detail::parallel_points(points.size(), [&](std::size_t i) {
        const auto [a, mu] = points[i];
        const auto t0 = std::chrono::steady_clock::now();
        const EigenResult e = xi_alpha(two_patch({tp.A1, tp.A2, mu}), Alpha(a), cfg.h);
        SweepRecord r;
        r.mu = mu;
        r.alpha = a;
        r.h = cfg.h;
        r.xi = e.xi;
        r.lambda = e.lambda;
        r.outcome = detail::predicted_outcome(e.lambda);
        r.runtime_s = detail::seconds_since(t0);
        rep.records[i] = r;
    });

    for (std::size_t ai = 0; ai < cfg.alphas.size(); ++ai)
        for (std::size_t k = 0; k + 1 < mus.size(); ++k) {
            const auto& lo = rep.records[ai * mus.size() + k];
            const auto& hi = rep.records[ai * mus.size() + k + 1];
            if (hi.xi < lo.xi - 1e-8 * (1.0 + std::abs(lo.xi)))
                throw MonotonicityViolation("xi(mu) decreased between mu=" + fmt17(lo.mu) +
                                            " and mu=" + fmt17(hi.mu));
        }

    const Alpha a0(cfg.alphas.front());
    rep.xi_merged = xi_alpha(make_domain({{-tp.A1, tp.A2}}), a0, cfg.h).xi;
    if (mus.front() == 0.0) {
        const double xi0 = rep.records.front().xi;
        if (std::abs(xi0 - rep.xi_merged) > 1e-12)
            throw MonotonicityViolation("mu=0 row does not match the merged interval");
    }
    rep.min_single_patch = std::min(xi_alpha(make_domain({{0.0, tp.A1}}), a0, cfg.h).xi,
                                    xi_alpha(make_domain({{0.0, tp.A2}}), a0, cfg.h).xi);

    std::filesystem::create_directories(cfg.out_dir);
    detail::write_sweep_csv(cfg.out_dir + "/sweep_mu_" + cfg.scenario + ".csv", rep.records);
    return rep;
}

struct AlphaSweepReport {
    std::vector<SweepRecord> records;  // xi column holds the mesh-extrapolated value
    double classical_target = 0.0;    // min(pi^2/A1^2, pi^2/A2^2)
    double value_at_max_alpha = 0.0;
    double relative_deviation = 0.0;
};

/// xi(alpha) at fixed mu > 0, mesh-extrapolated per point; asserts that
/// diam^{2 alpha} xi increases and reports the distance of the top-alpha
/// value from the classical interval eigenvalue.
inline AlphaSweepReport sweep_alpha(const SweepConfig& cfg) {
    cfg.validate();
    const TwoPatch& tp = cfg.require_two_patch();
    if (cfg.mus.empty()) throw ConfigError("sweep-alpha needs a mu value");
    const double mu = cfg.mus.front();
    require(mu > 0, "sweep-alpha needs mu > 0");
    std::vector<double> alphas = cfg.alphas;
    std::sort(alphas.begin(), alphas.end());

    const Domain1D dom = two_patch({tp.A1, tp.A2, mu});
    AlphaSweepReport rep;
    rep.records.resize(alphas.size());
    detail::parallel_points(alphas.size(), [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const Alpha a(alphas[i]);
        const double xi = xi_alpha_refined(dom, a, cfg.h);
        SweepRecord r;
        r.mu = mu;
        r.alpha = alphas[i];
        r.h = cfg.h;
        r.xi = xi;
        r.lambda = xi - 1.0;
        r.outcome = detail::predicted_outcome(r.lambda);
        r.runtime_s = detail::seconds_since(t0);
        rep.records[i] = r;
    });

    const double diam = dom.diameter();
    for (std::size_t k = 0; k + 1 < alphas.size(); ++k) {
        const double lo = std::pow(diam, 2 * alphas[k]) * rep.records[k].xi;
        const double hi = std::pow(diam, 2 * alphas[k + 1]) * rep.records[k + 1].xi;
        if (!(hi > lo))
            throw MonotonicityViolation("diam^{2a} xi failed to increase at alpha=" +
                                        fmt17(alphas[k + 1]));
    }

    rep.classical_target = std::min(M_PI * M_PI / (tp.A1 * tp.A1), M_PI * M_PI / (tp.A2 * tp.A2));
    rep.value_at_max_alpha = rep.records.back().xi;
    rep.relative_deviation =
        std::abs(rep.value_at_max_alpha - rep.classical_target) / rep.classical_target;

    std::filesystem::create_directories(cfg.out_dir);
    detail::write_sweep_csv(cfg.out_dir + "/sweep_alpha_" + cfg.scenario + ".csv", rep.records);
    return rep;
}

struct JointStep {
    int k = 0;
    double mu = 0.0;
    double alpha = 0.0;
    double xi = 0.0;
    double err = 0.0;
};

struct JointSweepReport {
    double xi_star = 0.0;
    double range_lo = 0.0;
    double range_hi = 0.0;
    /// improving staircase (monotone error)
    std::vector<JointStep> steps;
    /// every per-alpha bisection result, including non-improving ones
    std::vector<JointStep> attempts;
};

/// Admissible target range of the joint staircase: from the merged-interval
/// eigenvalue minimized over the alpha grid up to the classical single-patch
/// limit min(pi^2/A1^2, pi^2/A2^2).
inline std::pair<double, double> joint_range(const SweepConfig& cfg) {
    const TwoPatch& tp = cfg.require_two_patch();
    const Domain1D merged = make_domain({{-tp.A1, tp.A2}});
    double lo = std::numeric_limits<double>::infinity();
    for (double a : cfg.alphas) lo = std::min(lo, xi_alpha(merged, Alpha(a), cfg.h).xi);
    const double hi = std::min(M_PI * M_PI / (tp.A1 * tp.A1), M_PI * M_PI / (tp.A2 * tp.A2));
    return {lo, hi};
}

/// Staircase toward (mu,alpha) -> (0,1) hitting xi_star: at each alpha of the
/// ascending grid, bisect in mu (xi is increasing and continuous in mu).
inline JointSweepReport sweep_joint(const SweepConfig& cfg, double xi_star) {
    cfg.validate();
    const TwoPatch& tp = cfg.require_two_patch();
    std::vector<double> alphas = cfg.alphas;
    std::sort(alphas.begin(), alphas.end());

    JointSweepReport rep;
    rep.xi_star = xi_star;
    std::tie(rep.range_lo, rep.range_hi) = joint_range(cfg);
    if (!(xi_star >= rep.range_lo && xi_star <= rep.range_hi))
        throw TargetOutOfRange("xi_star=" + fmt17(xi_star) + " outside [" + fmt17(rep.range_lo) +
                               ", " + fmt17(rep.range_hi) + "]");

    auto xi_at = [&](double a, double mu) {
        return xi_alpha(two_patch({tp.A1, tp.A2, mu}), Alpha(a), cfg.h).xi;
    };

    // Per alpha the reachable xi values are {xi(mu=0)} plus the continuous
    // branch above the mesh-limited mu->0+ value; a target inside that jump
    // band cannot be improved at this alpha, so only improving bisection
    // results enter the staircase (all attempts are kept in the report).
    int k = 0;
    for (double a : alphas) {
        double lo = 0.0, hi = cfg.joint_mu_max;
        double xi_lo = xi_at(a, lo), xi_hi = xi_at(a, hi);
        JointStep step;
        step.alpha = a;
        if (xi_star <= xi_lo) {
            step.mu = lo;
            step.xi = xi_lo;
        } else if (xi_star >= xi_hi) {
            step.mu = hi;
            step.xi = xi_hi;
        } else {
            double mu_mid = 0.5 * (lo + hi), xi_mid = 0.0;
            for (int depth = 0; depth < cfg.joint_max_depth; ++depth) {
                mu_mid = 0.5 * (lo + hi);
                xi_mid = xi_at(a, mu_mid);
                if (std::abs(xi_mid - xi_star) <= cfg.joint_xi_tol) break;
                (xi_mid < xi_star ? lo : hi) = mu_mid;
            }
            step.mu = mu_mid;
            step.xi = xi_mid;
        }
        step.err = std::abs(step.xi - xi_star);
        rep.attempts.push_back(step);
        if (rep.steps.empty() || step.err < rep.steps.back().err) {
            step.k = k++;
            rep.steps.push_back(step);
        }
    }

    for (std::size_t i = 0; i + 1 < rep.steps.size(); ++i)
        if (rep.steps[i + 1].err > rep.steps[i].err)
            throw MonotonicityViolation("joint staircase error increased at step " +
                                        std::to_string(i + 1));

    std::filesystem::create_directories(cfg.out_dir);
    CsvWriter csv(cfg.out_dir + "/sweep_joint_" + cfg.scenario + ".csv", "k,mu,alpha,xi,err");
    for (const auto& s : rep.steps)
        csv.row({std::to_string(s.k), fmt17(s.mu), fmt17(s.alpha), fmt17(s.xi), fmt17(s.err)});
    return rep;
}

struct GapExponentReport {
    double lambda_single_min = 0.0;
    std::vector<double> mus;
    std::vector<double> lambdas;
    std::vector<double> gaps;  // min single-patch lambda - lambda(mu)
    double C_fit = 0.0;
    double exponent_fit = 0.0;
    double r2 = 0.0;
    std::optional<double> mu_zero;  // zero crossing of lambda(mu), when it exists
    /// lambda just above the reported crossing; far from 0 when the crossing
    /// hides below the mesh resolution (the mu -> 0+ jump)
    double lambda_at_mu_zero = 0.0;
    bool sign_change = false;
};

/// Far-separation gap min(lambda_1,lambda_2) - lambda(mu) ~ C mu^{-(1+2a)}:
/// log-log fit over the configured mu grid plus the lambda zero crossing.
inline GapExponentReport gap_exponent(const SweepConfig& cfg) {
    cfg.validate();
    const TwoPatch& tp = cfg.require_two_patch();
    if (cfg.mus.size() < 3) throw ConfigError("gap-exponent needs at least 3 mu values");
    const Alpha a(cfg.alphas.front());
    std::vector<double> mus = cfg.mus;
    std::sort(mus.begin(), mus.end());
    if (!(mus.front() > 0)) throw ConfigError("gap-exponent needs strictly positive mu values");

    const double l1 = xi_alpha(make_domain({{0.0, tp.A1}}), a, cfg.h).lambda;
    const double l2 = xi_alpha(make_domain({{0.0, tp.A2}}), a, cfg.h).lambda;
    require(l1 > 0 && l2 > 0,
            "gap-exponent needs both single-patch lambdas positive (lambda1=" + fmt17(l1) +
                ", lambda2=" + fmt17(l2) + ")");

    GapExponentReport rep;
    rep.lambda_single_min = std::min(l1, l2);
    rep.mus = mus;
    rep.lambdas.resize(mus.size());
    detail::parallel_points(mus.size(), [&](std::size_t i) {
        rep.lambdas[i] = xi_alpha(two_patch({tp.A1, tp.A2, mus[i]}), a, cfg.h).lambda;
    });
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const double gap = rep.lambda_single_min - rep.lambdas[i];
        rep.gaps.push_back(gap);
        require(gap > 0, "gap(mu) must stay positive over the scanned range");
        if (i > 0) require(gap < rep.gaps[i - 1], "gap(mu) must decrease over the scanned range");
        lx.push_back(std::log(mus[i]));
        ly.push_back(std::log(gap));
    }
    const auto fit = detail::least_squares(lx, ly);
    rep.C_fit = std::exp(fit.intercept);
    rep.exponent_fit = std::abs(fit.slope);
    rep.r2 = fit.r2;

    // zero crossing of lambda(mu): lambda(0) is the merged interval
    const double lambda0 = xi_alpha(make_domain({{-tp.A1, tp.A2}}), a, cfg.h).lambda;
    double lo = 0.0, lam_lo = lambda0;
    double hi = mus.front(), lam_hi = rep.lambdas.front();
    rep.sign_change = lam_lo < 0.0 && lam_hi > 0.0;
    if (rep.sign_change) {
        double lam_mid = lam_hi;
        for (int depth = 0; depth < 60 && hi - lo > 1e-10 * (1.0 + hi); ++depth) {
            const double mid = 0.5 * (lo + hi);
            lam_mid = xi_alpha(two_patch({tp.A1, tp.A2, mid}), a, cfg.h).lambda;
            (lam_mid < 0 ? lo : hi) = mid;
        }
        rep.mu_zero = 0.5 * (lo + hi);
        rep.lambda_at_mu_zero =
            xi_alpha(two_patch({tp.A1, tp.A2, std::max(*rep.mu_zero, 1e-14)}), a, cfg.h).lambda;
    }

    std::filesystem::create_directories(cfg.out_dir);
    CsvWriter csv(cfg.out_dir + "/gap_exponent_" + cfg.scenario + ".csv", "mu,lambda,gap");
    for (std::size_t i = 0; i < mus.size(); ++i)
        csv.row({fmt17(mus[i]), fmt17(rep.lambdas[i]), fmt17(rep.gaps[i])});
    return rep;
}

}  // namespace fkpp
