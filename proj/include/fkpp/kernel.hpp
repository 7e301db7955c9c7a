#pragma once

#include <cmath>

#include "fkpp/domain.hpp"
#include "fkpp/errors.hpp"

namespace fkpp {

/// Fractional exponent, constrained to the open interval (0,1).
class Alpha {
  public:
    explicit Alpha(double value) : value_(value) {
        require(value > 0.0 && value < 1.0, "alpha must lie in (0,1)");
    }
    double value() const { return value_; }
    /// Kernel decay exponent 1 + 2*alpha (d = 1).
    double kernel_exponent() const { return 1.0 + 2.0 * value_; }

  private:
    double value_;
};

/// Normalization constant of the fractional Laplacian,
/// 4^a Gamma(d/2+a) / (pi^{d/2} |Gamma(-a)|), restricted to d = 1.
/// |Gamma(-a)| = Gamma(1-a)/a for a in (0,1), so the value is computed
/// pole-free as 4^a Gamma(1/2+a) a / (sqrt(pi) Gamma(1-a)).
inline double c_alpha(Alpha alpha, int d = 1) {
    if (d != 1) throw UnsupportedDimension("only d = 1 is supported");
    const double a = alpha.value();
    return std::pow(4.0, a) * std::tgamma(0.5 + a) * a /
           (std::sqrt(M_PI) * std::tgamma(1.0 - a));
}

namespace detail {

/// Integral of t^(p-1) over [t0,t1], i.e. (t1^p - t0^p)/p, evaluated in a
/// form that stays accurate when p is close to 0 (log branch).
inline double power_integral(double t0, double t1, double p) {
    if (std::abs(p) < 1e-12) return std::log(t1 / t0);
    return std::pow(t0, p) * std::expm1(p * std::log(t1 / t0)) / p;
}

}  // namespace detail

/// Exact value of int_a^b |x-y|^{-(1+2*alpha)} dy for x outside [a,b]:
/// (dn^{-2a} - df^{-2a}) / (2a) with dn/df the near/far endpoint distances.
inline double interval_kernel_integral(double a, double b, double x, Alpha alpha) {
    require(a < b, "interval endpoints must satisfy a < b");
    if (a <= x && x <= b) throw PointInsideInterval("x must lie outside [a,b]");
    const double dn = std::min(std::abs(x - a), std::abs(x - b));
    const double df = std::max(std::abs(x - a), std::abs(x - b));
    const double ta = 2.0 * alpha.value();
    return (std::pow(dn, -ta) - std::pow(df, -ta)) / ta;
}

/// G(x): 1 on the Minus set, the kernel integral over the Minus set on the
/// Plus set, 0 outside Minus u Plus.
inline double big_g(double x, const Domain1D& minus, const Domain1D& plus, Alpha alpha) {
    require(!minus.empty(), "Minus set must be nonempty");
    if (minus.contains(x)) return 1.0;
    if (!plus.contains(x)) return 0.0;
    double g = 0.0;
    for (const auto& iv : minus.intervals())
        g += interval_kernel_integral(iv.a, iv.b, x, alpha);
    return g;
}

/// Envelope constants: C1 scales the boundary factor, eps caps it.
struct EnvelopeParams {
    double C1 = 1.0;
    double eps = 1.0;

    EnvelopeParams(double C1_, double eps_) : C1(C1_), eps(eps_) {
        require(C1 > 0 && eps > 0, "envelope constants must be positive");
    }
};

/// Script-G envelope: min( min(C1 delta^a, eps^a) * G, 1 ). Lives in [0,1].
inline double script_g(double x, const Domain1D& dom, const Domain1D& minus,
                       const Domain1D& plus, Alpha alpha, const EnvelopeParams& p) {
    const double a = alpha.value();
    const double boundary = std::min(p.C1 * std::pow(delta(dom, x), a), std::pow(p.eps, a));
    return std::min(boundary * big_g(x, minus, plus, alpha), 1.0);
}

/// Fractional Poisson kernel of the ball B(z,r) in d = 1, with the constant
/// c = sin(pi a)/pi pinned by the mass normalization int P(x,.) = 1.
inline double poisson_kernel(double x, double y, double z, double r, Alpha alpha) {
    require(r > 0, "radius must be positive");
    if (!(std::abs(x - z) < r) || !(std::abs(y - z) > r))
        throw ArgumentsOutsideSupport("need |x-z| < r and |y-z| > r");
    const double a = alpha.value();
    const double dx2 = (x - z) * (x - z);
    const double dy2 = (y - z) * (y - z);
    return std::sin(M_PI * a) / M_PI * std::pow((r * r - dx2) / (dy2 - r * r), a) /
           std::abs(x - y);
}

/// Constant of the bubble function, Gamma(d/2) / (4^a Gamma(1+a) Gamma(d/2+a)), d = 1.
inline double bubble_constant(Alpha alpha) {
    const double a = alpha.value();
    return std::tgamma(0.5) / (std::pow(4.0, a) * std::tgamma(1.0 + a) * std::tgamma(0.5 + a));
}

/// Bubble function on B(z,r): C (r^2 - |x-z|^2)^a inside, 0 outside.
/// Solves (-Lap)^a beta = 1 in B(z,r) with zero exterior values.
inline double bubble(double x, double z, double r, Alpha alpha) {
    require(r > 0, "radius must be positive");
    const double v = r * r - (x - z) * (x - z);
    if (v <= 0.0) return 0.0;
    return bubble_constant(alpha) * std::pow(v, alpha.value());
}

}  // namespace fkpp
