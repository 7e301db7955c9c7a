#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fkpp/discretization.hpp"
#include "fkpp/kernel.hpp"
#include "oracles.hpp"

using namespace fkpp;

TEST_CASE("c_alpha closed form", "[kernel]") {
    CHECK(c_alpha(Alpha(0.5)) == Catch::Approx(1.0 / M_PI).epsilon(1e-14));
    // frozen from an independent arbitrary-precision evaluation
    CHECK(c_alpha(Alpha(0.25)) == Catch::Approx(0.19947114020071634).epsilon(1e-13));
    CHECK_THROWS_AS(c_alpha(Alpha(0.5), 2), UnsupportedDimension);
    CHECK_THROWS_AS(Alpha(0.0), PreconditionError);
    CHECK_THROWS_AS(Alpha(1.0), PreconditionError);
}

TEST_CASE("c_alpha matches an independent Gamma oracle", "[kernel]") {
    for (double a : {0.1, 0.25, 0.4, 0.5, 0.6, 0.75, 0.9}) {
        const double expected = std::pow(4.0, a) * oracles::lanczos_gamma(0.5 + a) /
                                (std::sqrt(M_PI) *
                                 std::abs(M_PI / (std::sin(M_PI * -a) *
                                                  oracles::lanczos_gamma(1.0 + a))));
        CHECK(c_alpha(Alpha(a)) == Catch::Approx(expected).epsilon(1e-11));
    }
}

TEST_CASE("c_alpha vanishes linearly toward alpha=1", "[kernel]") {
    // 4^a Gamma(1/2+a) a (1-a) / (sqrt(pi) Gamma(2-a)) -> 2 as a -> 1
    double prev = 0.0;
    for (double a : {0.99, 0.999, 0.9999}) {
        const double scaled = c_alpha(Alpha(a)) / (1.0 - a);
        CHECK(std::isfinite(scaled));
        CHECK(scaled > prev);  // increasing toward the limit
        prev = scaled;
    }
    CHECK(prev == Catch::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("interval_kernel_integral elementary values", "[kernel]") {
    CHECK(interval_kernel_integral(0, 1, 2, Alpha(0.5)) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(interval_kernel_integral(0, 1, -1, Alpha(0.5)) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(interval_kernel_integral(0, 1, 0.5, Alpha(0.5)), PointInsideInterval);
    CHECK_THROWS_AS(interval_kernel_integral(0, 1, 1.0, Alpha(0.5)), PointInsideInterval);
}

TEST_CASE("interval_kernel_integral agrees with adaptive quadrature", "[kernel]") {
    const Alpha a(0.25);
    const double expo = a.kernel_exponent();
    const double quad = oracles::adaptive_simpson(
        [&](double y) { return std::pow(std::abs(5.0 - y), -expo); }, 0.0, 2.0, 1e-14);
    CHECK(interval_kernel_integral(0, 2, 5, a) == Catch::Approx(quad).epsilon(1e-12));
}

TEST_CASE("interval_kernel_integral symmetry and monotonicity", "[kernel]") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> len(0.1, 3.0), off(0.01, 10.0), al(0.05, 0.95);
    for (int k = 0; k < 300; ++k) {
        const double a0 = -1.0, b0 = a0 + len(rng);
        const double d = off(rng);
        const Alpha a(al(rng));
        const double right = interval_kernel_integral(a0, b0, b0 + d, a);
        const double left = interval_kernel_integral(a0, b0, a0 - d, a);  // reflection
        CHECK(right == Catch::Approx(left).epsilon(1e-12));
        CHECK(interval_kernel_integral(a0, b0, b0 + d + 0.1, a) < right);
    }
}

TEST_CASE("big_g branches", "[kernel]") {
    const Domain1D minus = make_domain({{0.0, 1.0}});
    const Domain1D plus = make_domain({{4.0, 5.0}});
    const Alpha a(0.5);
    CHECK(big_g(0.5, minus, plus, a) == 1.0);
    CHECK(big_g(4.5, minus, plus, a) ==
          Catch::Approx(1.0 / 3.5 - 1.0 / 4.5).epsilon(1e-14));
    CHECK(big_g(2.0, minus, plus, a) == 0.0);   // exterior
    CHECK(big_g(-3.0, minus, plus, a) == 0.0);  // exterior
}

TEST_CASE("big_g cluster ratio respects the kernel-monotonicity bound", "[kernel]") {
    const Domain1D minus = make_domain({{0.0, 1.0}});
    const Domain1D plus = make_domain({{10.0, 12.0}});
    const Alpha a(0.5);
    double lo = 1e300, hi = 0.0;
    for (double x = 10.05; x < 12.0; x += 0.05) {
        const double g = big_g(x, minus, plus, a);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    CHECK(hi / lo <= std::pow(11.0 / 9.0, 1.0 + 2.0 * 0.5));

    const Domain1D far_plus = make_domain({{100.0, 102.0}});
    lo = 1e300, hi = 0.0;
    for (double x = 100.05; x < 102.0; x += 0.05) {
        const double g = big_g(x, minus, far_plus, a);
        lo = std::min(lo, g);
        hi = std::max(hi, g);
    }
    CHECK(hi / lo <= 1.05);  // far-field flattening
}

TEST_CASE("big_g sampled modulus of continuity shrinks with the step", "[kernel]") {
    const Domain1D minus = make_domain({{0.0, 1.0}});
    const Domain1D plus = make_domain({{5.0, 7.0}, {20.0, 22.0}});
    const Alpha a(0.4);
    auto modulus = [&](double step) {
        double m = 0.0;
        for (const auto& iv : plus.intervals())
            for (double x = iv.a + step; x < iv.b - step; x += step)
                m = std::max(m, std::abs(big_g(x + step, minus, plus, a) -
                                         big_g(x, minus, plus, a)));
        return m;
    };
    CHECK(modulus(0.01) < modulus(0.1));
    CHECK(modulus(0.001) < modulus(0.01));
}

TEST_CASE("script_g caps and boundary vanishing", "[kernel]") {
    const Domain1D dom = make_domain({{0.0, 2.0}}, std::vector<Tag>{Tag::Minus});
    const auto [minus, plus] = split(dom);
    const Alpha a(0.5);
    const EnvelopeParams p(5.0, 0.25);
    // deep interior: C1 delta^a >= eps^a, G = 1 -> min(eps^a, 1)
    CHECK(script_g(1.0, dom, minus, plus, a, p) == Catch::Approx(std::pow(0.25, 0.5)));
    // boundary: delta = 0
    CHECK(script_g(0.0, dom, minus, plus, a, p) == 0.0);
    // the envelope never exceeds 1
    const EnvelopeParams big(100.0, 100.0);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> pick(-1.0, 3.0);
    for (int k = 0; k < 500; ++k) {
        const double v = script_g(pick(rng), dom, minus, plus, a, big);
        CHECK(v <= 1.0);
        CHECK(v >= 0.0);
    }
}

TEST_CASE("script_g matches the bounded-Minus closed form up to constants", "[kernel]") {
    // Minus bounded, far Plus patches: script_g ~ min(delta^a,1)/(1+|x|^{1+2a})
    const Domain1D dom = make_domain(
        {{-1.0, 1.0}, {5.0, 6.0}, {10.0, 11.0}, {20.0, 21.0}, {40.0, 41.0}},
        std::vector<Tag>{Tag::Minus, Tag::Plus, Tag::Plus, Tag::Plus, Tag::Plus});
    const auto [minus, plus] = split(dom);
    const Alpha a(0.5);
    const EnvelopeParams p(1.0, 0.5);
    double lo = 1e300, hi = 0.0;
    for (const auto& iv : dom.intervals())
        for (double x = iv.a + 0.05; x < iv.b; x += 0.1) {
            const double d = delta(dom, x);
            if (d <= 0.0) continue;
            const double sg = script_g(x, dom, minus, plus, a, p);
            const double model = std::min(std::pow(d, 0.5), 1.0) /
                                 (1.0 + std::pow(std::abs(x), 1.0 + 2.0 * 0.5));
            const double r = sg / model;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    CHECK(lo > 0.0);
    CHECK(hi / lo < 60.0);  // uniform band over the sample grid
}

TEST_CASE("poisson kernel support and boundary behavior", "[kernel]") {
    const Alpha a(0.5);
    CHECK_THROWS_AS(poisson_kernel(1.5, 2.0, 0.0, 1.0, a), ArgumentsOutsideSupport);
    CHECK_THROWS_AS(poisson_kernel(0.5, 0.9, 0.0, 1.0, a), ArgumentsOutsideSupport);
    // kernel -> 0 as x approaches the boundary of the ball
    const double far = poisson_kernel(0.0, 2.0, 0.0, 1.0, a);
    const double near = poisson_kernel(0.999999, 2.0, 0.0, 1.0, a);
    CHECK(near < 1e-2 * far);
}

TEST_CASE("poisson kernel mass normalization", "[kernel]") {
    for (double av : {0.25, 0.5, 0.75}) {
        const Alpha a(av);
        for (double x : {0.0, 0.3, -0.6}) {
            // near part y in (1,2]: substitute y = 1 + s^{1/(1-a)} so that
            // (y^2-1)^{-a} dy becomes bounded; far part via u = 1/y
            auto side = [&](double xx) {
                const double p = 1.0 / (1.0 - av);
                auto near_f = [&](double s) {
                    const double y = 1.0 + std::pow(s, p);
                    return std::sin(M_PI * av) / M_PI * std::pow(1.0 - xx * xx, av) *
                           std::pow(y + 1.0, -av) * p / std::abs(xx - y);
                };
                auto far_f = [&](double u) {
                    if (u < 1e-8)  // same integrand written in u, overflow-free
                        return std::sin(M_PI * av) / M_PI * std::pow(1.0 - xx * xx, av) *
                               std::pow(u, 2.0 * av - 1.0) * std::pow(1.0 - u * u, -av) /
                               std::abs(1.0 - xx * u);
                    const double y = 1.0 / u;
                    return poisson_kernel(xx, y, 0.0, 1.0, a) * y * y;
                };
                const double s_end = std::pow(1.0, 1.0 - av);  // y = 2 at s = 1
                return oracles::tanh_sinh(near_f, 0.0, s_end, 14) +
                       oracles::tanh_sinh(far_f, 0.0, 0.5, 14);
            };
            const double mass = side(x) + side(-x);
            CHECK(mass == Catch::Approx(1.0).epsilon(1e-6));
        }
    }
}

TEST_CASE("bubble closed form at alpha=1/2 and support", "[kernel]") {
    const Alpha a(0.5);
    CHECK(bubble_constant(a) == Catch::Approx(1.0).epsilon(1e-14));
    for (double x : {0.0, 0.3, 0.9})
        CHECK(bubble(x, 0.0, 1.0, a) == Catch::Approx(std::sqrt(1.0 - x * x)).epsilon(1e-14));
    CHECK(bubble(1.5, 0.0, 1.0, a) == 0.0);
    CHECK(bubble(-7.0, 0.0, 1.0, a) == 0.0);
    CHECK(bubble(1.0, 0.0, 1.0, a) == 0.0);  // boundary
}

TEST_CASE("harmonic reproduction: Poisson extension is discretely harmonic", "[kernel]") {
    // u(x) = int P(x,y) v(y) dy with v the bubble of B(0,2) satisfies
    // (-Lap)^a u = 0 in B(0,1); check the discrete residual at interior nodes
    // (operator applied to nodal u, minus the exterior-data contribution).
    const Alpha a(0.5);
    const Domain1D ball = make_domain({{-1.0, 1.0}});
    auto v = [&](double y) { return bubble(y, 0.0, 2.0, a); };

    auto residual_at = [&](double h) {
        const Grid g = build_grid(ball, h);
        const OperatorMatrix op = assemble(g, a);
        Vector u(static_cast<Eigen::Index>(g.size()));
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.nodes()[i];
            auto f = [&](double y) { return poisson_kernel(x, y, 0.0, 1.0, a) * v(y); };
            u[static_cast<Eigen::Index>(i)] =
                oracles::tanh_sinh(f, 1.0, 2.0, 12) + oracles::tanh_sinh(f, -2.0, -1.0, 12);
        }
        const Vector mu_ = apply(op, u);
        const double ca = c_alpha(a);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = g.nodes()[i];
            if (delta(ball, x) < 0.25) continue;
            auto f = [&](double y) {
                return v(y) * std::pow(std::abs(x - y), -a.kernel_exponent());
            };
            const double exterior = oracles::tanh_sinh(f, 1.0, 2.0, 12) +
                                    oracles::tanh_sinh(f, -2.0, -1.0, 12);
            worst = std::max(worst,
                             std::abs(mu_[static_cast<Eigen::Index>(i)] - ca * exterior));
        }
        return worst;
    };

    // the extension meets nonzero exterior data continuously at the boundary,
    // so the zero-at-endpoint interpolant carries an O(1) defect in the two
    // boundary cells; the interior residual is first order with that constant
    const double r1 = residual_at(1.0 / 32.0);
    const double r2 = residual_at(1.0 / 64.0);
    CHECK(r1 < 0.2);
    CHECK(r2 < 0.8 * r1);
}
