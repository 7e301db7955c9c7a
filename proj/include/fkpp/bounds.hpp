#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "fkpp/discretization.hpp"
#include "fkpp/domain.hpp"
#include "fkpp/kernel.hpp"
#include "fkpp/steady.hpp"

namespace fkpp {

/// Empirical envelope band and far-field decay of a steady state.
struct EnvelopeReport {
    double ratio_min = 0.0;
    double ratio_max = 0.0;
    double fitted_c1 = 0.0;
    double fitted_C1 = 0.0;
    double decay_exponent = 0.0;
    double decay_r2 = 0.0;
    int samples = 0;
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit = f.slope * x[i] + f.intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace detail

/// Ratio statistics of r(x) = n(x) / (min(delta^a, eps^a) G(x)) over nodes
/// with delta(x) > h (the under-resolved one-cell boundary layer is
/// excluded). eps defaults to the interior-ball radius of the domain.
inline EnvelopeReport envelope_check(const SteadyState& n, const Grid& grid,
                                     const Domain1D& minus, const Domain1D& plus, Alpha alpha,
                                     double eps = 0.0) {
    require(n.outcome == Outcome::Persistence, "envelope check needs a persistent steady state");
    const Domain1D& dom = grid.domain();
    if (eps <= 0.0) eps = diagnostics(dom).interior_ball_radius;
    const double a = alpha.value();
    const double eps_a = std::pow(eps, a);

    EnvelopeReport rep;
    rep.ratio_min = std::numeric_limits<double>::infinity();
    rep.ratio_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.nodes()[i];
        const double d = delta(dom, x);
        if (!(d > grid.h())) continue;
        const double env = std::min(std::pow(d, a), eps_a) * big_g(x, minus, plus, alpha);
        const double r = n.n[static_cast<Eigen::Index>(i)] / env;
        rep.ratio_min = std::min(rep.ratio_min, r);
        rep.ratio_max = std::max(rep.ratio_max, r);
        ++rep.samples;
    }
    if (rep.samples == 0) throw NoInteriorSamples("no node clears the boundary-layer exclusion");
    rep.fitted_c1 = std::clamp(rep.ratio_min, 1e-12, 1.0 - 1e-12);
    rep.fitted_C1 = rep.ratio_max;
    return rep;
}

/// Least-squares fit of log n(center) against log dist(center, Minus) over
/// the given Plus patch centers. Returns (|slope|, r^2).
inline std::pair<double, double> decay_fit(const SteadyState& n, const Grid& grid,
                                           const Domain1D& minus,
                                           const std::vector<double>& plus_samples, Alpha) {
    if (plus_samples.size() < 3)
        throw InsufficientSamples("decay fit needs at least 3 Plus patch centers");
    std::vector<double> lx, ly;
    for (double c : plus_samples) {
        double dist = std::numeric_limits<double>::infinity();
        for (const auto& iv : minus.intervals())
            dist = std::min(dist, std::max({iv.a - c, c - iv.b, 0.0}));
        require(dist > 0, "plus sample lies inside the Minus set");
        const double v = grid.interpolate(n.n, c);
        require(v > 0, "steady state vanishes at a Plus center; nothing to fit");
        lx.push_back(std::log(dist));
        ly.push_back(std::log(v));
    }
    const auto f = detail::least_squares(lx, ly);
    return {std::abs(f.slope), f.r2};
}

struct HarnackRatio {
    Interval interval{0.0, 1.0};
    double ratio = 1.0;
    bool flagged = false;
};

/// Per-interval max/min ratio of sampled values; flags ratios above `bound`.
inline std::vector<HarnackRatio> cluster_harnack(
    const std::vector<std::pair<Interval, std::vector<double>>>& g_values,
    double bound = std::numeric_limits<double>::infinity()) {
    std::vector<HarnackRatio> out;
    for (const auto& [iv, vals] : g_values) {
        require(vals.size() >= 3, "each Plus interval needs at least 3 interior samples");
        const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
        require(*lo > 0, "Harnack ratio needs positive samples");
        HarnackRatio r;
        r.interval = iv;
        r.ratio = *hi / *lo;
        r.flagged = r.ratio > bound;
        out.push_back(r);
    }
    return out;
}

}  // namespace fkpp
