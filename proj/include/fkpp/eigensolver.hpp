#pragma once

#include <cmath>

#include <Eigen/Cholesky>

#include "fkpp/discretization.hpp"
#include "fkpp/errors.hpp"

namespace fkpp {

/// Principal Dirichlet eigenpair: xi with its positive eigenfunction
/// (unit l2(h) norm), plus lambda = xi - 1 and convergence metadata.
struct EigenResult {
    double xi = 0.0;
    double lambda = 0.0;
    Vector phi;
    int iterations = 0;
    double residual = 0.0;
    double h = 0.0;
};

/// Smallest eigenpair of a symmetric positive definite operator matrix via
/// inverse power iteration on a single LDLT factorization. The iterate
/// starts from the constant vector (full overlap with the positive
/// principal eigenfunction); the eigenvector is sign-normalized positive
/// and scaled to unit l2(h) norm. The residual test is relative to the
/// matrix scale: an absolute 1e-10 would sit below the attainable floor
/// ||M|| * eps for sharp meshes at alpha near 1.
inline EigenResult principal_eigen(const OperatorMatrix& m, double tol = 1e-10,
                                   int max_iter = 500) {
    require(tol > 0 && max_iter > 0, "tolerance and iteration budget must be positive");
    const auto& g = *m.grid;
    const auto N = m.dim();
    require(N > 0, "empty operator");

    Eigen::LDLT<Matrix> factor(m.entries);
    if (factor.info() != Eigen::Success)
        throw NoConvergence("factorization of the operator matrix failed");

    const double scale = std::max(1.0, m.entries.diagonal().maxCoeff());
    Vector x = Vector::Ones(N);
    x /= x.norm();
    double xi = 0.0;
    double res = 0.0;
    int it = 0;
    for (it = 1; it <= max_iter; ++it) {
        Vector y = factor.solve(x);
        y /= y.norm();
        const Vector my = m.entries * y;
        xi = y.dot(my);
        res = (my - xi * y).norm();
        x = y;
        if (res <= tol * scale) break;
    }
    if (res > tol * scale)
        throw NoConvergence("inverse power iteration: residual above tolerance");

    if (x.sum() < 0) x = -x;
    if ((x.array() <= 0.0).any())
        throw NonPositiveEigenvector(
            "principal eigenvector has a non-positive node value (assembly violates the "
            "Z-matrix structure?)");
    x /= g.weighted_norm(x);

    EigenResult r;
    r.xi = xi;
    r.lambda = xi - 1.0;
    r.phi = std::move(x);
    r.iterations = it;
    // residual in the l2(h) norm of the reported (weighted-normalized) eigenvector
    r.residual = g.weighted_norm(m.entries * r.phi - xi * r.phi);
    r.h = g.h();
    return r;
}

/// build_grid + assemble + principal_eigen.
inline EigenResult xi_alpha(const Domain1D& d, Alpha alpha, double h, double tol = 1e-10,
                            int max_iter = 500) {
    return principal_eigen(assemble(d, h, alpha), tol, max_iter);
}

/// Rayleigh quotient <Mu,u>/<u,u> in the grid-weighted inner product.
inline double rayleigh(const OperatorMatrix& m, const Vector& u) {
    if (u.size() != m.dim()) throw DimensionMismatch("vector length does not match operator");
    const auto& g = *m.grid;
    const double denom = g.weighted_dot(u, u);
    if (denom == 0.0) throw ZeroVector("Rayleigh quotient of the zero vector");
    return g.weighted_dot(m.entries * u, u) / denom;
}

/// Richardson extrapolation: fine + (fine - coarse) / (2^order - 1).
/// Requires fine.h = coarse.h / 2 (same domain and alpha, caller's duty).
inline double extrapolate(const EigenResult& coarse, const EigenResult& fine, double order) {
    require(order > 0, "extrapolation order must be positive");
    if (std::abs(fine.h - coarse.h / 2.0) > 1e-12 * coarse.h)
        throw GridMismatch("extrapolation requires fine.h = coarse.h / 2");
    return fine.xi + (fine.xi - coarse.xi) / (std::pow(2.0, order) - 1.0);
}

/// Default extrapolation order min(1, 2-2a): the delta^alpha boundary layer
/// limits the scheme order near the boundary.
inline double default_order(Alpha alpha) { return std::min(1.0, 2.0 - 2.0 * alpha.value()); }

/// Mesh-refined eigenvalue: solves at h and h/2 and extrapolates with the
/// default order.
inline double xi_alpha_refined(const Domain1D& d, Alpha alpha, double h) {
    const EigenResult coarse = xi_alpha(d, alpha, h);
    const EigenResult fine = xi_alpha(d, alpha, h / 2.0);
    return extrapolate(coarse, fine, default_order(alpha));
}

}  // namespace fkpp
