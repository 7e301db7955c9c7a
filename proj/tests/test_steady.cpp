#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fkpp/eigensolver.hpp"
#include "fkpp/steady.hpp"

using namespace fkpp;

namespace {

const double kH = 1.0 / 64.0;

OperatorMatrix op_on(const Domain1D& d, double alpha, double h = kH) {
    return assemble(d, h, Alpha(alpha));
}

}  // namespace

TEST_CASE("super start decays to extinction when lambda > 0", "[steady]") {
    // single patch (0,2) at alpha=0.5: xi ~ 1.158 -> lambda > 0
    const SteadyState s = monotone_solve(op_on(make_domain({{0.0, 2.0}}), 0.5), StartKind::Super,
                                         1e-10);
    CHECK(s.outcome == Outcome::Extinction);
    CHECK(s.n.cwiseAbs().maxCoeff() < 1e-4);
    CHECK(s.source == SteadySource::MonotoneFromSuper);
}

TEST_CASE("sub start requires a negative lambda", "[steady]") {
    CHECK_THROWS_AS(
        monotone_solve(op_on(make_domain({{0.0, 2.0}}), 0.5), StartKind::Sub, 1e-10),
        PreconditionError);
}

TEST_CASE("two-sided iteration brackets the unique steady state", "[steady]") {
    const OperatorMatrix m = op_on(make_domain({{0.0, 4.0}}), 0.5);
    const SteadyState from_super = monotone_solve(m, StartKind::Super, 1e-12);
    const SteadyState from_sub = monotone_solve(m, StartKind::Sub, 1e-12);
    REQUIRE(from_super.outcome == Outcome::Persistence);
    REQUIRE(from_sub.outcome == Outcome::Persistence);
    CHECK((from_sub.n - from_super.n).cwiseAbs().maxCoeff() <= 10.0 * 1e-12);
    CHECK(from_super.residual <= 10.0 * 1e-12);
    CHECK((from_super.n.array() >= 0.0).all());
    CHECK((from_super.n.array() <= 1.0).all());
}

TEST_CASE("sub iterates stay below super iterates at every step", "[steady]") {
    const OperatorMatrix m = op_on(make_domain({{0.0, 4.0}}), 0.5);
    Matrix shifted = m.entries;
    shifted.diagonal().array() += 1.0;
    const Eigen::LDLT<Matrix> factor(shifted);
    const EigenResult e = principal_eigen(m);
    Vector lo = std::min(1.0, std::abs(e.lambda)) / e.phi.maxCoeff() * e.phi;
    Vector hi = Vector::Ones(m.dim());
    for (int k = 0; k < 60; ++k) {
        const Vector lo_next = factor.solve((2.0 * lo - lo.cwiseProduct(lo)).eval());
        const Vector hi_next = factor.solve((2.0 * hi - hi.cwiseProduct(hi)).eval());
        REQUIRE((lo_next - lo).minCoeff() >= -1e-12);  // sub nondecreasing
        REQUIRE((hi - hi_next).minCoeff() >= -1e-12);  // super nonincreasing
        REQUIRE((hi_next - lo_next).minCoeff() >= -1e-12);
        lo = lo_next;
        hi = hi_next;
    }
}

TEST_CASE("one resolvent step from the supersolution stays in [0,1]", "[steady]") {
    const OperatorMatrix m = op_on(make_domain({{0.0, 4.0}}), 0.5);
    Matrix shifted = m.entries;
    shifted.diagonal().array() += 1.0;
    const Vector one = Vector::Ones(m.dim());
    const Vector step = shifted.ldlt().solve((2.0 * one - one.cwiseProduct(one)).eval());
    CHECK((step.array() >= 0.0).all());
    CHECK((step.array() <= 1.0).all());
}

TEST_CASE("corrupted operator trips the comparison-principle guard", "[steady]") {
    OperatorMatrix m = op_on(make_domain({{0.0, 4.0}}), 0.5);
    // overload one coupling until M + I stops being an M-matrix: the
    // resolvent loses positivity and the very first step goes unordered
    m.entries(0, 1) -= 100.0;
    m.entries(1, 0) -= 100.0;
    CHECK_THROWS_AS(monotone_solve(m, StartKind::Super, 1e-12), NonMonotoneStep);
}

TEST_CASE("march from the left-patch indicator settles and classifies", "[steady]") {
    const Grid g = build_grid(make_domain({{-2.0, 2.0}}), kH);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    MarchConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 400.0;
    cfg.snapshot_every = 100.0;
    const Trajectory tr = time_march(m, left_patch_indicator(g), cfg);
    CHECK(tr.final_state.outcome == Outcome::Persistence);
    CHECK(tr.settled_at > 0.0);
    CHECK(tr.dt_used == 0.1);
    REQUIRE(tr.snapshots.size() == 5);  // t = 0, 100, 200, 300, 400
    // close to the monotone steady state
    const SteadyState s = monotone_solve(m, StartKind::Super, 1e-12);
    CHECK((tr.final_state.n - s.n).cwiseAbs().maxCoeff() <= 1e-5);
}

TEST_CASE("march reports extinction with rate close to lambda", "[steady]") {
    const Grid g = build_grid(make_domain({{0.0, 2.0}}), 1.0 / 128.0);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    const double lambda = principal_eigen(m).lambda;
    REQUIRE(lambda > 0.0);
    MarchConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 150.0;
    cfg.snapshot_every = 10.0;
    const Trajectory tr = time_march(m, left_patch_indicator(g), cfg);
    CHECK(tr.final_state.outcome == Outcome::Extinction);
    // slope of log sup n over the late snapshots
    std::vector<double> ts, ls;
    for (const auto& [t, n] : tr.snapshots)
        if (t >= 50.0 && n.cwiseAbs().maxCoeff() > 0.0) {
            ts.push_back(t);
            ls.push_back(std::log(n.cwiseAbs().maxCoeff()));
        }
    REQUIRE(ts.size() >= 4);
    const double slope =
        (ls.back() - ls.front()) / (ts.back() - ts.front());
    CHECK(std::abs(-slope - lambda) <= 0.1 * lambda);
}

TEST_CASE("marches from distinct initial data reach the same state", "[steady]") {
    const Grid g = build_grid(make_domain({{0.0, 4.0}}), kH);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    MarchConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 500.0;
    cfg.snapshot_every = 250.0;
    Vector n1 = left_patch_indicator(g, 0.5);
    Vector n2 = Vector::Constant(m.dim(), 0.9);
    Vector n3 = Vector::Zero(m.dim());
    for (Eigen::Index i = m.dim() / 3; i < m.dim() / 2; ++i) n3[i] = 0.05;
    const Vector f1 = time_march(m, n1, cfg).final_state.n;
    const Vector f2 = time_march(m, n2, cfg).final_state.n;
    const Vector f3 = time_march(m, n3, cfg).final_state.n;
    CHECK((f1 - f2).cwiseAbs().maxCoeff() <= 10.0 * cfg.steady_tol);
    CHECK((f1 - f3).cwiseAbs().maxCoeff() <= 10.0 * cfg.steady_tol);
}

TEST_CASE("ordered pair march preserves ordering", "[steady]") {
    const Grid g = build_grid(make_domain({{0.0, 4.0}}), kH);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    MarchConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 200.0;
    cfg.snapshot_every = 20.0;

    SECTION("zero stays zero below anything") {
        const auto rep =
            ordered_pair_march(m, Vector::Zero(m.dim()), left_patch_indicator(g), cfg);
        CHECK(rep.max_violation <= 0.0);
        for (const auto& [t, n] : rep.low.snapshots) CHECK(n.cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("sub and super sandwich") {
        const EigenResult e = principal_eigen(m);
        const Vector sub = std::min(1.0, std::abs(e.lambda)) / e.phi.maxCoeff() * e.phi;
        const auto rep = ordered_pair_march(m, sub, Vector::Ones(m.dim()), cfg);
        CHECK(rep.max_violation <= 1e-12);
        CHECK((rep.low.final_state.n - rep.high.final_state.n).cwiseAbs().maxCoeff() <= 1e-5);
    }

    SECTION("identical data produce bitwise identical trajectories") {
        const Vector n0 = left_patch_indicator(g);
        const Trajectory t1 = time_march(m, n0, cfg);
        const Trajectory t2 = time_march(m, n0, cfg);
        REQUIRE(t1.snapshots.size() == t2.snapshots.size());
        for (std::size_t k = 0; k < t1.snapshots.size(); ++k)
            CHECK((t1.snapshots[k].second - t2.snapshots[k].second).cwiseAbs().maxCoeff() == 0.0);
    }

    SECTION("unordered initial data are rejected") {
        CHECK_THROWS_AS(
            ordered_pair_march(m, Vector::Ones(m.dim()), Vector::Zero(m.dim()), cfg),
            PreconditionError);
    }
}

TEST_CASE("very large dt still marches stably (implicit diffusion)", "[steady]") {
    const Grid g = build_grid(make_domain({{0.0, 4.0}}), kH);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    MarchConfig cfg;
    cfg.dt = 64.0;
    cfg.t_end = 64.0 * 4096.0;
    cfg.snapshot_every = 64.0 * 1024.0;
    const Trajectory tr = time_march(m, left_patch_indicator(g), cfg);
    CHECK(tr.dt_used == cfg.dt);
    CHECK(tr.final_state.outcome == Outcome::Persistence);
    CHECK((tr.final_state.n.array() >= 0.0).all());
    CHECK((tr.final_state.n.array() <= 1.0).all());
}

TEST_CASE("an unstable stepping matrix exhausts dt halving with Blowup", "[steady]") {
    OperatorMatrix m = op_on(make_domain({{0.0, 4.0}}), 0.5);
    m.entries(0, 1) -= 100.0;  // breaks resolvent positivity at every dt
    m.entries(1, 0) -= 100.0;
    MarchConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 50.0;
    cfg.snapshot_every = 25.0;
    const Grid g = build_grid(make_domain({{0.0, 4.0}}), kH);
    CHECK_THROWS_AS(time_march(m, left_patch_indicator(g), cfg), Blowup);
}

TEST_CASE("dichotomy matches the eigenvalue sign across scenarios", "[steady]") {
    struct Case {
        Domain1D d;
        double alpha;
    };
    const std::vector<Case> cases = {{make_domain({{0.0, 2.0}}), 0.5},
                                     {make_domain({{0.0, 4.0}}), 0.5},
                                     {two_patch({2.0, 2.0, 0.5}), 0.5},
                                     {two_patch({2.0, 2.0, 0.05}), 0.5},
                                     {make_domain({{0.0, 3.0}}), 0.25}};
    for (const auto& c : cases) {
        const OperatorMatrix m = op_on(c.d, c.alpha);
        const double lambda = principal_eigen(m).lambda;
        if (std::abs(lambda) <= 0.02) continue;  // margin excludes ambiguity
        const SteadyState s = monotone_solve(m, StartKind::Super, 1e-11);
        if (lambda < 0.0)
            CHECK(s.outcome == Outcome::Persistence);
        else
            CHECK(s.outcome == Outcome::Extinction);
    }
}

TEST_CASE("march rejects out-of-range initial data", "[steady]") {
    const Grid g = build_grid(make_domain({{0.0, 4.0}}), kH);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    MarchConfig cfg;
    CHECK_THROWS_AS(time_march(m, Vector::Constant(m.dim(), 1.2), cfg), PreconditionError);
    CHECK_THROWS_AS(time_march(m, Vector::Constant(m.dim(), -0.1), cfg), PreconditionError);
    CHECK_THROWS_AS(time_march(m, Vector::Zero(m.dim() + 2), cfg), DimensionMismatch);
}

TEST_CASE("march that cannot settle raises NotSettled", "[steady]") {
    const Grid g = build_grid(make_domain({{0.0, 4.0}}), kH);
    const OperatorMatrix m = assemble(g, Alpha(0.5));
    MarchConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.0;  // far too short to settle
    cfg.snapshot_every = 0.5;
    cfg.steady_tol = 1e-14;
    CHECK_THROWS_AS(time_march(m, left_patch_indicator(g), cfg), NotSettled);
}
