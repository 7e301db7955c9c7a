#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>

#include "fkpp/discretization.hpp"
#include "fkpp/eigensolver.hpp"
#include "fkpp/errors.hpp"

namespace fkpp {

enum class Outcome { Persistence, Extinction };
enum class SteadySource { MonotoneFromSub, MonotoneFromSuper, TimeMarch };
enum class StartKind { Sub, Super };

/// Nonnegative steady state with its equation residual and classification.
struct SteadyState {
    Vector n;
    double residual = 0.0;  // ||M n - n + n^2||_inf
    Outcome outcome = Outcome::Extinction;
    int iterations = 0;
    SteadySource source = SteadySource::TimeMarch;
};

inline double steady_residual(const OperatorMatrix& m, const Vector& n) {
    return (m.entries * n - n + n.cwiseProduct(n)).cwiseAbs().maxCoeff();
}

namespace detail {

inline void check_range01(const Vector& n, double slack, const char* what) {
    if ((n.array() < -slack).any() || (n.array() > 1.0 + slack).any())
        throw Blowup(std::string(what) + ": iterate left [0,1]");
}

}  // namespace detail

/// Monotone resolvent iteration n <- (M+I)^{-1} (2n - n^2). The shift 1
/// dominates sup|f'| of f(n) = n - n^2 on [0,1], so the map preserves order:
/// the sequence decreases from the supersolution n = 1 and increases from
/// the subsolution min(1,|lambda|) phi / ||phi||_inf. Stops when the sup
/// change falls below tol.
inline SteadyState monotone_solve(const OperatorMatrix& m, StartKind start, double tol = 1e-10,
                                  int max_iter = 200000, double extinction_threshold = 1e-4) {
    require(tol > 0, "tolerance must be positive");
    const auto N = m.dim();
    Matrix shifted = m.entries;
    shifted.diagonal().array() += 1.0;
    Eigen::LDLT<Matrix> factor(shifted);
    if (factor.info() != Eigen::Success) throw NoConvergence("factorization of M + I failed");

    Vector n;
    if (start == StartKind::Super) {
        n = Vector::Ones(N);
    } else {
        const EigenResult e = principal_eigen(m);
        require(e.lambda < 0,
                "monotone iteration from a subsolution requires lambda < 0 "
                "(the only limit otherwise is 0)");
        n = std::min(1.0, std::abs(e.lambda)) / e.phi.maxCoeff() * e.phi;
    }

    const double mono_slack = 1e-12;
    const double dir = start == StartKind::Super ? -1.0 : 1.0;
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        const Vector rhs = 2.0 * n - n.cwiseProduct(n);
        const Vector next = factor.solve(rhs);
        const double step = (next - n).cwiseAbs().maxCoeff();
        if ((dir * (next - n)).minCoeff() < -mono_slack * (1.0 + n.cwiseAbs().maxCoeff()))
            throw NonMonotoneStep(
                "monotone iteration produced an unordered step (discretization violates the "
                "comparison principle?)");
        n = next;
        if (step <= tol) break;
    }
    if (it > max_iter) throw NoConvergence("monotone iteration: change above tolerance");
    detail::check_range01(n, 1e-9, "monotone iteration");

    SteadyState s;
    s.n = std::move(n);
    s.residual = steady_residual(m, s.n);
    s.outcome = s.n.cwiseAbs().maxCoeff() < extinction_threshold ? Outcome::Extinction
                                                                 : Outcome::Persistence;
    s.iterations = it;
    s.source =
        start == StartKind::Super ? SteadySource::MonotoneFromSuper : SteadySource::MonotoneFromSub;
    return s;
}

/// Time stepping configuration for the evolution problem.
struct MarchConfig {
    double dt = 0.1;
    double t_end = 4000.0;
    double snapshot_every = 100.0;
    double steady_tol = 1e-8;
    double extinction_threshold = 1e-4;

    void validate() const {
        require(dt > 0 && t_end > 0 && snapshot_every > 0, "march times must be positive");
        require(steady_tol > 0 && extinction_threshold > 0, "march thresholds must be positive");
    }
};

struct Trajectory {
    std::vector<std::pair<double, Vector>> snapshots;
    SteadyState final_state;
    /// dt actually used (halved from cfg.dt on instability).
    double dt_used = 0.0;
    double settled_at = -1.0;  // first time the classification fired
};

namespace detail {

/// One full semi-implicit march at a fixed dt. Returns false on blowup.
inline bool march_once(const OperatorMatrix& m, const Vector& n0, const MarchConfig& cfg,
                       double dt, Trajectory& out) {
    Matrix stepmat = dt * m.entries;
    stepmat.diagonal().array() += 1.0;
    Eigen::LDLT<Matrix> factor(stepmat);
    if (factor.info() != Eigen::Success) return false;

    out.snapshots.clear();
    out.settled_at = -1.0;
    bool extinct = false;
    bool settled = false;

    Vector n = n0;
    out.snapshots.emplace_back(0.0, n);
    const long steps = std::llround(cfg.t_end / dt);
    const long snap_stride = std::max<long>(1, std::llround(cfg.snapshot_every / dt));
    for (long k = 1; k <= steps; ++k) {
        const Vector rhs = n + dt * (n - n.cwiseProduct(n));
        const Vector next = factor.solve(rhs);
        if ((next.array() < -1e-9).any() || (next.array() > 1.0 + 1e-9).any()) return false;
        const double rate = (next - n).cwiseAbs().maxCoeff() / dt;
        n = next;
        const double t = dt * static_cast<double>(k);
        const double sup = n.cwiseAbs().maxCoeff();
        if (!settled) {
            if (sup < cfg.extinction_threshold) {
                extinct = true;
                settled = true;
                out.settled_at = t;
            } else if (rate <= cfg.steady_tol) {
                extinct = false;
                settled = true;
                out.settled_at = t;
            }
        }
        if (k % snap_stride == 0) out.snapshots.emplace_back(t, n);
    }
    if (!settled) throw NotSettled("march reached t_end without settling");

    out.final_state.n = std::move(n);
    out.final_state.residual = steady_residual(m, out.final_state.n);
    out.final_state.outcome = extinct ? Outcome::Extinction : Outcome::Persistence;
    out.final_state.iterations = static_cast<int>(steps);
    out.final_state.source = SteadySource::TimeMarch;
    out.dt_used = dt;
    return true;
}

}  // namespace detail

/// Semi-implicit march (I + dt M) n^{k+1} = n^k + dt (n^k - (n^k)^2) from a
/// nodal initial state in [0,1]. Runs to t_end recording snapshots and the
/// first time the persistence/extinction classification fires; dt is halved
/// (a few times) if an iterate ever leaves [0,1].
inline Trajectory time_march(const OperatorMatrix& m, const Vector& n0, const MarchConfig& cfg) {
    cfg.validate();
    if (n0.size() != m.dim()) throw DimensionMismatch("initial state does not match operator");
    require((n0.array() >= 0.0).all() && (n0.array() <= 1.0).all(),
            "initial state must take values in [0,1]");

    Trajectory out;
    double dt = cfg.dt;
    for (int attempt = 0; attempt < 12; ++attempt) {
        if (detail::march_once(m, n0, cfg, dt, out)) return out;
        dt /= 2.0;
    }
    throw Blowup("march unstable even after repeated dt halving");
}

struct OrderingReport {
    Trajectory low;
    Trajectory high;
    /// max over snapshots of max(n_low - n_high), before the tolerance test.
    double max_violation = 0.0;
};

/// Marches an ordered pair of initial states and checks that ordering is
/// preserved at every snapshot (comparison principle).
inline OrderingReport ordered_pair_march(const OperatorMatrix& m, const Vector& n0_low,
                                         const Vector& n0_high, const MarchConfig& cfg) {
    require(n0_low.size() == n0_high.size() && (n0_low.array() <= n0_high.array()).all(),
            "initial states must be componentwise ordered");
    OrderingReport rep;
    rep.low = time_march(m, n0_low, cfg);
    rep.high = time_march(m, n0_high, cfg);
    require(rep.low.snapshots.size() == rep.high.snapshots.size(), "snapshot counts differ");
    for (std::size_t k = 0; k < rep.low.snapshots.size(); ++k) {
        const double v =
            (rep.low.snapshots[k].second - rep.high.snapshots[k].second).maxCoeff();
        rep.max_violation = std::max(rep.max_violation, v);
    }
    if (rep.max_violation > 1e-12)
        throw OrderViolation("ordering lost along the march (comparison principle violated)");
    return rep;
}

/// Default initial datum of the figure scenarios: value 0.5 on the nodes of
/// the leftmost interval, 0 elsewhere.
inline Vector left_patch_indicator(const Grid& g, double value = 0.5) {
    Vector n0 = Vector::Zero(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.interval_of(i) == 0) n0[static_cast<Eigen::Index>(i)] = value;
    return n0;
}

}  // namespace fkpp
