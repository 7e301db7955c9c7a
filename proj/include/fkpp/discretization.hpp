#pragma once

#include <cstdint>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fkpp/domain.hpp"
#include "fkpp/errors.hpp"
#include "fkpp/kernel.hpp"

namespace fkpp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform mesh per interval: interval lengths are snapped to an integer
/// number of cells of width ~h; endpoints carry the Dirichlet condition and
/// are not nodes. Node weights (cell widths) back the l2(h) inner product.
class Grid {
  public:
    Grid() = default;

    Grid(Domain1D domain, double h, std::vector<double> nodes,
         std::vector<int> node_interval, std::vector<double> spacing)
        : domain_(std::move(domain)),
          h_(h),
          nodes_(std::move(nodes)),
          node_interval_(std::move(node_interval)),
          spacing_(std::move(spacing)) {}

    const Domain1D& domain() const { return domain_; }
    double h() const { return h_; }
    const std::vector<double>& nodes() const { return nodes_; }
    int interval_of(std::size_t i) const { return node_interval_[i]; }
    /// Snapped cell width of interval k.
    double spacing(int k) const { return spacing_[k]; }
    double weight(std::size_t i) const { return spacing_[node_interval_[i]]; }
    std::size_t size() const { return nodes_.size(); }

    /// Computational window (A,B): the hull of the domain.
    std::pair<double, double> window() const { return {domain_.left(), domain_.right()}; }

    double weighted_dot(const Vector& u, const Vector& v) const {
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += weight(i) * u[i] * v[i];
        return s;
    }
    double weighted_norm(const Vector& u) const { return std::sqrt(weighted_dot(u, u)); }

    /// Piecewise-linear evaluation of a nodal function, zero on the
    /// exterior and at interval endpoints.
    double interpolate(const Vector& u, double x) const {
        if (u.size() != static_cast<Eigen::Index>(size()))
            throw DimensionMismatch("nodal vector does not match grid");
        std::size_t base = 0;
        for (std::size_t k = 0; k < domain_.size(); ++k) {
            const auto& iv = domain_.intervals()[k];
            const double hk = spacing_[static_cast<int>(k)];
            const std::size_t n = static_cast<std::size_t>(std::llround(iv.length() / hk)) - 1;
            if (iv.a <= x && x <= iv.b) {
                auto val = [&](long j) -> double {  // j in [0, n+1] incl. endpoints
                    if (j <= 0 || j > static_cast<long>(n)) return 0.0;
                    return u[static_cast<Eigen::Index>(base + j - 1)];
                };
                const double t = (x - iv.a) / hk;
                const long cell = std::min<long>(static_cast<long>(t), static_cast<long>(n));
                const double frac = t - static_cast<double>(cell);
                return val(cell) * (1.0 - frac) + val(cell + 1) * frac;
            }
            base += n;
        }
        return 0.0;
    }

  private:
    Domain1D domain_;
    double h_ = 0.0;
    std::vector<double> nodes_;
    std::vector<int> node_interval_;
    std::vector<double> spacing_;
};

/// Meshes every interval of `d` with cells of width ~h (exact per-interval
/// snapping); requires h <= (shortest interval)/4.
inline Grid build_grid(const Domain1D& d, double h) {
    require(h > 0, "mesh width must be positive");
    require(!d.empty(), "domain must be nonempty");
    for (const auto& iv : d.intervals())
        if (h > iv.length() / 4.0)
            throw MeshTooCoarse("h must not exceed the shortest interval length / 4");

    std::vector<double> nodes;
    std::vector<int> owner;
    std::vector<double> spacing;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto& iv = d.intervals()[k];
        const long n = std::llround(iv.length() / h);
        const double hk = iv.length() / static_cast<double>(n);
        spacing.push_back(hk);
        for (long j = 1; j < n; ++j) {
            nodes.push_back(iv.a + hk * static_cast<double>(j));
            owner.push_back(static_cast<int>(k));
        }
    }
    return Grid(d, h, std::move(nodes), std::move(owner), std::move(spacing));
}

/// Dense symmetric discrete (-Lap)^alpha with the exterior Dirichlet
/// condition baked in.
struct OperatorMatrix {
    Matrix entries;
    Alpha alpha{0.5};
    std::shared_ptr<const Grid> grid;
    /// max |M - M^T| recorded before symmetrization.
    double symmetrization_defect = 0.0;

    Eigen::Index dim() const { return entries.rows(); }
};

namespace detail {

struct CellMoments {
    double mass;   // int_cell K
    double left;   // int_cell (c1-y)/hc K
    double right;  // int_cell (y-c0)/hc K
    double parab;  // int_cell (y-c0)(c1-y) K
};

/// Closed-form kernel moments of the cell [c0,c1] seen from x strictly
/// outside the cell. K(t) = t^{-1-2a} in the distance t = |x-y|.
inline CellMoments cell_moments(double c0, double c1, double x, double a) {
    const double hc = c1 - c0;
    double t0, t1;
    bool cell_right_of_x;
    if (x <= c0) {
        t0 = c0 - x;
        t1 = c1 - x;
        cell_right_of_x = true;
    } else {
        t0 = x - c1;
        t1 = x - c0;
        cell_right_of_x = false;
    }
    const double m0 = power_integral(t0, t1, -2.0 * a);
    const double i2 = power_integral(t0, t1, 1.0 - 2.0 * a);
    const double i3 = power_integral(t0, t1, 2.0 - 2.0 * a);
    // weight (t-t0)/hc corresponds to the far endpoint of the cell
    const double far = (i2 - t0 * m0) / hc;
    const double near = m0 - far;
    const double parab = -i3 + (t0 + t1) * i2 - t0 * t1 * m0;
    if (cell_right_of_x) return {m0, near, far, parab};
    return {m0, far, near, parab};
}

}  // namespace detail

/// Assembles the collocation matrix of C_a PV int (u(x_i)-u(y)) |x_i-y|^{-1-2a} dy
/// for the piecewise-linear interpolant of nodal values (u = 0 outside the
/// domain). Per row: a second-difference stencil for the singular cell pair,
/// exact hat moments for all other cells, exact gap and window-tail kernel
/// masses on the diagonal, and a capped second-difference defect correction
/// (face-averaged so the matrix is symmetric up to rounding). Symmetrized at
/// the end; the pre-symmetrization defect is recorded.
inline OperatorMatrix assemble(const Grid& g, Alpha alpha) {
    const double a = alpha.value();
    const double two_a = 2.0 * a;
    const auto& dom = g.domain();
    const auto N = static_cast<Eigen::Index>(g.size());
    const auto [A_win, B_win] = g.window();

    // per-interval node index ranges
    std::vector<std::pair<Eigen::Index, Eigen::Index>> range(dom.size());  // [first, last)
    {
        Eigen::Index pos = 0;
        for (std::size_t k = 0; k < dom.size(); ++k) {
            const long n = std::llround(dom.intervals()[k].length() / g.spacing(static_cast<int>(k)));
            range[k] = {pos, pos + n - 1};
            pos += n - 1;
        }
    }

    Matrix M = Matrix::Zero(N, N);
    std::vector<double> kappa(static_cast<std::size_t>(N), 0.0);

    for (Eigen::Index i = 0; i < N; ++i) {
        const double x = g.nodes()[static_cast<std::size_t>(i)];
        const int I = g.interval_of(static_cast<std::size_t>(i));
        const double hI = g.spacing(I);
        const long local = static_cast<long>(i - range[static_cast<std::size_t>(I)].first);
        const double Ws = std::pow(hI, -two_a) / (2.0 - two_a);

        double parab_sum = 0.0;
        for (std::size_t J = 0; J < dom.size(); ++J) {
            const auto& iv = dom.intervals()[J];
            const double hJ = g.spacing(static_cast<int>(J));
            const long ncells = std::llround(iv.length() / hJ);
            const Eigen::Index first = range[J].first;
            for (long c = 0; c < ncells; ++c) {
                if (static_cast<int>(J) == I && (c == local || c == local + 1))
                    continue;  // singular pair: the two cells flanking x_i
                const double c0 = iv.a + hJ * static_cast<double>(c);
                const double c1 = c0 + hJ;
                const auto m = detail::cell_moments(c0, c1, x, a);
                M(i, i) += m.mass;
                if (static_cast<int>(J) == I) parab_sum += m.parab;
                if (c >= 1) M(i, first + c - 1) -= m.left;
                if (c < ncells - 1) M(i, first + c) -= m.right;
            }
        }
        // gaps between intervals: u = 0 there, pure diagonal kernel mass
        for (std::size_t J = 0; J + 1 < dom.size(); ++J) {
            const double g0 = dom.intervals()[J].b;
            const double g1 = dom.intervals()[J + 1].a;
            M(i, i) += interval_kernel_integral(g0, g1, x, alpha);
        }
        // closed-form exterior tails beyond the window
        M(i, i) += (std::pow(x - A_win, -two_a) + std::pow(B_win - x, -two_a)) / two_a;
        // interpolation-defect estimate from own-interval parabola moments
        kappa[static_cast<std::size_t>(i)] = std::min(parab_sum / (2.0 * hI * hI), Ws / 2.0);
    }

    // second-difference stencil: singular-pair weight minus defect
    // correction, face-averaged to keep the matrix symmetric
    for (std::size_t k = 0; k < dom.size(); ++k) {
        const auto [first, last] = range[k];
        const double hI = g.spacing(static_cast<int>(k));
        const double Ws = std::pow(hI, -two_a) / (2.0 - two_a);
        for (Eigen::Index i = first; i < last; ++i) {
            const double ki = kappa[static_cast<std::size_t>(i)];
            const double wl =
                Ws - (i == first ? ki : 0.5 * (ki + kappa[static_cast<std::size_t>(i - 1)]));
            const double wr =
                Ws - (i == last - 1 ? ki : 0.5 * (ki + kappa[static_cast<std::size_t>(i + 1)]));
            M(i, i) += wl + wr;
            if (i > first) M(i, i - 1) -= wl;
            if (i < last - 1) M(i, i + 1) -= wr;
        }
    }

    M *= c_alpha(alpha);
    const double defect = (M - M.transpose()).cwiseAbs().maxCoeff();
    M = 0.5 * (M + M.transpose()).eval();

    OperatorMatrix op;
    op.entries = std::move(M);
    op.alpha = alpha;
    op.grid = std::make_shared<Grid>(g);
    op.symmetrization_defect = defect;
    return op;
}

inline OperatorMatrix assemble(const Domain1D& d, double h, Alpha alpha) {
    return assemble(build_grid(d, h), alpha);
}

inline Vector apply(const OperatorMatrix& m, const Vector& u) {
    if (u.size() != m.dim()) throw DimensionMismatch("vector length does not match operator");
    return m.entries * u;
}

/// Debug dump: little JSON header (length-prefixed), then the dense matrix
/// row-major and the node coordinates as raw 64-bit floats.
inline void dump_operator(const OperatorMatrix& m, const std::string& path) {
    nlohmann::json header{{"dim", m.dim()},
                          {"h", m.grid->h()},
                          {"alpha", m.alpha.value()},
                          {"window", {m.grid->window().first, m.grid->window().second}}};
    const std::string hs = header.dump();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path + " for writing");
    const std::uint64_t len = hs.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
    for (Eigen::Index i = 0; i < m.dim(); ++i)
        for (Eigen::Index j = 0; j < m.dim(); ++j) {
            const double v = m.entries(i, j);
            out.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    for (double x : m.grid->nodes()) out.write(reinterpret_cast<const char*>(&x), sizeof(x));
}

struct OperatorDump {
    nlohmann::json header;
    Matrix entries;
    std::vector<double> nodes;
};

inline OperatorDump load_operator_dump(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path);
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string hs(len, '\0');
    in.read(hs.data(), static_cast<std::streamsize>(len));
    OperatorDump d;
    d.header = nlohmann::json::parse(hs);
    const auto n = d.header.at("dim").get<Eigen::Index>();
    d.entries.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            double v;
            in.read(reinterpret_cast<char*>(&v), sizeof(v));
            d.entries(i, j) = v;
        }
    d.nodes.resize(static_cast<std::size_t>(n));
    for (auto& x : d.nodes) in.read(reinterpret_cast<char*>(&x), sizeof(x));
    if (!in) throw Error("truncated operator dump: " + path);
    return d;
}

}  // namespace fkpp
