#pragma once

// Closed-form left prox of f(x) = (1/p)|x|^p, 0 < p < 1, relative to the
// power kernel phi(x) = (1/q)|x|^q with q = alpha + (1 - alpha) p.

#include "bregman/catalog.hpp"
#include "bregman/divergence.hpp"
#include "bregman/prox_core.hpp"

#include <algorithm>
#include <cmath>

namespace bregman {

struct PowerProxSpec {
    double p = 0.5;
    int alpha = 2;
    double q = 1.5;
    double lambda = 1.0;
};

inline PowerProxSpec make_power_spec(double p, int alpha, double lambda) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("power prox needs p in ]0, 1[");
    if (alpha < 2 || alpha > 4) throw InvalidArgument("power prox supports alpha in {2, 3, 4}");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    return PowerProxSpec{p, alpha, alpha + (1.0 - alpha) * p, lambda};
}

inline void validate(const PowerProxSpec& s) {
    if (!(s.p > 0.0 && s.p < 1.0)) throw InvalidArgument("power prox needs p in ]0, 1[");
    if (s.alpha < 2 || s.alpha > 4) throw InvalidArgument("power prox supports alpha in {2, 3, 4}");
    if (!(s.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (std::abs((s.q - s.p) / (1.0 - s.p) - s.alpha) > 1e-12) throw InvalidArgument("q does not match p and alpha");
}

namespace detail {

inline double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (double a : c) v = v * x + a;
    return v;
}

inline double horner_deriv(const std::vector<double>& c, double x) {
    double v = 0.0;
    const std::size_t n = c.size() - 1;
    for (std::size_t i = 0; i < n; ++i) v = v * x + c[i] * static_cast<double>(n - i);
    return v;
}

// Real roots of x^2 + b x + c with multiplicity.
inline void monic_quadratic(double b, double c, std::vector<double>& out) {
    const double disc = b * b - 4.0 * c;
    const double scale = b * b + 4.0 * std::abs(c);
    if (std::abs(disc) <= 1e-14 * scale) {
        out.push_back(-0.5 * b);
        out.push_back(-0.5 * b);
        return;
    }
    if (disc < 0.0) return;
    const double s = std::sqrt(disc);
    const double t = -0.5 * (b + (b >= 0.0 ? s : -s));
    if (t == 0.0) {
        out.push_back(0.0);
        out.push_back(0.0);
        return;
    }
    out.push_back(t);
    out.push_back(c / t);
}

// Real roots of x^3 + a x^2 + b x + c with multiplicity.
inline void monic_cubic(double a, double b, double c, std::vector<double>& out) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double shift = -a / 3.0;
    const double disc = -(4.0 * p * p * p + 27.0 * q * q);
    const double scale = 4.0 * std::abs(p * p * p) + 27.0 * q * q;
    if (scale == 0.0) {
        for (int i = 0; i < 3; ++i) out.push_back(shift);
        return;
    }
    if (std::abs(disc) <= 1e-12 * scale) {
        if (std::abs(p) <= 1e-14 * (1.0 + a * a)) {
            for (int i = 0; i < 3; ++i) out.push_back(shift);
        } else {
            out.push_back(3.0 * q / p + shift);
            out.push_back(-1.5 * q / p + shift);
            out.push_back(-1.5 * q / p + shift);
        }
        return;
    }
    if (disc > 0.0) {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        double arg = 3.0 * q / (p * m);
        arg = std::clamp(arg, -1.0, 1.0);
        const double th = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) out.push_back(m * std::cos(th - 2.0 * M_PI * k / 3.0) + shift);
        return;
    }
    const double s = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
    out.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s) + shift);
}

// Real roots of x^4 + a x^3 + b x^2 + c x + d (Ferrari).
inline void monic_quartic(double a, double b, double c, double d, std::vector<double>& out) {
    const double a2 = a * a;
    const double p = b - 3.0 * a2 / 8.0;
    const double q = c - a * b / 2.0 + a2 * a / 8.0;
    const double r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    const double shift = -a / 4.0;
    std::vector<double> t;
    const double qscale = std::abs(p) * std::sqrt(std::abs(p)) + std::abs(r) * std::pow(std::abs(r), 0.25) + 1e-300;
    if (std::abs(q) <= 1e-14 * qscale || q == 0.0) {
        std::vector<double> z;
        monic_quadratic(p, r, z);
        for (double zi : z) {
            if (std::abs(zi) <= 1e-14 * (std::abs(p) + 1.0)) {
                t.push_back(0.0);
                t.push_back(0.0);
            } else if (zi > 0.0) {
                t.push_back(std::sqrt(zi));
                t.push_back(-std::sqrt(zi));
            }
        }
    } else {
        // 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0 has a positive root
        std::vector<double> ms;
        monic_cubic(p, (2.0 * p * p - 8.0 * r) / 8.0, -q * q / 8.0, ms);
        double m = *std::max_element(ms.begin(), ms.end());
        auto res = [&](double x) { return ((8.0 * x + 8.0 * p) * x + (2.0 * p * p - 8.0 * r)) * x - q * q; };
        for (int i = 0; i < 5 && m > 0.0; ++i) {
            const double der = (24.0 * m + 16.0 * p) * m + (2.0 * p * p - 8.0 * r);
            if (der == 0.0) break;
            const double nm = m - res(m) / der;
            if (!(std::abs(res(nm)) < std::abs(res(m)))) break;
            m = nm;
        }
        const double s = std::sqrt(2.0 * m);
        monic_quadratic(-s, p / 2.0 + m + q / (2.0 * s), t);
        monic_quadratic(s, p / 2.0 + m - q / (2.0 * s), t);
    }
    for (double ti : t) out.push_back(ti + shift);
}

}  // namespace detail

/// Real roots, with multiplicity and sorted ascending, of the polynomial with
/// coefficients in descending order (leading coefficient first).
inline std::vector<double> poly_real_roots(const std::vector<double>& coeffs, int degree) {
    if (degree < 2 || degree > 4) throw InvalidArgument("poly_real_roots supports degree 2, 3 or 4");
    if (static_cast<int>(coeffs.size()) != degree + 1) throw InvalidArgument("expected degree + 1 coefficients");
    if (coeffs[0] == 0.0) throw InvalidArgument("leading coefficient must be nonzero");
    std::vector<double> c(coeffs.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = coeffs[i] / coeffs[0];
    std::vector<double> roots;
    if (degree == 2) detail::monic_quadratic(c[1], c[2], roots);
    else if (degree == 3) detail::monic_cubic(c[1], c[2], c[3], roots);
    else detail::monic_quartic(c[1], c[2], c[3], c[4], roots);
    for (double& x : roots) {
        for (int i = 0; i < 5; ++i) {
            const double fx = detail::horner(c, x);
            const double dx = detail::horner_deriv(c, x);
            if (fx == 0.0 || dx == 0.0) break;
            const double nx = x - fx / dx;
            if (!(std::abs(detail::horner(c, nx)) < std::abs(fx))) break;
            x = nx;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// (1/p)|x|^p + (1/lambda) D_phi(x, y) for the power spec.
inline double power_prox_objective(const PowerProxSpec& s, double x, double y) {
    const double ay = std::abs(y), ax = std::abs(x);
    const double d = std::pow(ax, s.q) / s.q - std::pow(ay, s.q) / s.q - sign(y) * std::pow(ay, s.q - 1.0) * (x - y);
    return std::pow(ax, s.p) / s.p + std::max(d, 0.0) / s.lambda;
}

inline ObjectiveFn power_objective_for(const PowerProxSpec& s) { return catalog::power(s.p, 1); }

inline Kernel power_kernel_for(const PowerProxSpec& s) { return make_kernel("power", {s.q}); }

/// Left prox of (1/p)|x|^p relative to (1/q)|x|^q at y, from the roots of
/// 1 + (1/lambda) u^alpha - |c| u = 0, u = |x|^(1-p), plus the candidate 0.
inline ProxResult power_prox(const PowerProxSpec& s, double y, double value_tol = 1e-9, double point_tol = 1e-6) {
    validate(s);
    if (!std::isfinite(y)) throw DomainError("power prox needs a finite y");
    struct Cand {
        double x, v;
    };
    std::vector<Cand> cands{{0.0, power_prox_objective(s, 0.0, y)}};
    if (y != 0.0) {
        const double c = std::pow(std::abs(y), s.q - 1.0) / s.lambda;
        std::vector<double> coeffs(static_cast<std::size_t>(s.alpha) + 1, 0.0);
        coeffs[0] = 1.0 / s.lambda;
        coeffs[static_cast<std::size_t>(s.alpha) - 1] = -c;
        coeffs[static_cast<std::size_t>(s.alpha)] = 1.0;
        const auto roots = poly_real_roots(coeffs, s.alpha);
        const double sg = sign(y);
        auto g = [&](double ax) { return std::pow(ax, s.p - 1.0) + std::pow(ax, s.q - 1.0) / s.lambda - c; };
        auto dg = [&](double ax) {
            return (s.p - 1.0) * std::pow(ax, s.p - 2.0) + (s.q - 1.0) * std::pow(ax, s.q - 2.0) / s.lambda;
        };
        for (std::size_t i = 0; i < roots.size(); ++i) {
            const double u = roots[i];
            if (!(u > 0.0)) continue;
            double ax = std::pow(u, 1.0 / (1.0 - s.p));
            for (int it = 0; it < 5; ++it) {
                const double d = dg(ax);
                if (d == 0.0) break;
                const double nx = ax - g(ax) / d;
                if (!(nx > 0.0) || !(std::abs(g(nx)) < std::abs(g(ax)))) break;
                ax = nx;
            }
            cands.push_back({sg * ax, power_prox_objective(s, sg * ax, y)});
            const bool repeated = (i + 1 < roots.size() && roots[i + 1] == u) || (i > 0 && roots[i - 1] == u);
            if (repeated) {
                for (double e : {-point_tol, point_tol}) {
                    const double xe = sg * std::max(ax + e, 0.0);
                    cands.push_back({xe, power_prox_objective(s, xe, y)});
                }
            }
        }
    }
    std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.v < b.v; });
    ProxResult r;
    r.env_value = cands.front().v;
    for (const auto& c : cands) {
        if (c.v > r.env_value + value_tol) break;
        bool dup = false;
        for (const auto& m : r.minimizers)
            if (std::abs(m[0] - c.x) <= point_tol) dup = true;
        if (!dup) r.minimizers.push_back(scalar_point(c.x));
    }
    r.multivalued = r.minimizers.size() > 1;
    r.diagnostics.method = "analytic";
    r.diagnostics.candidates = static_cast<int>(cands.size());
    return r;
}

inline std::vector<ProxResult> power_prox_vector(const PowerProxSpec& s, const Vector& y, double value_tol = 1e-9,
                                                 double point_tol = 1e-6) {
    std::vector<ProxResult> out;
    out.reserve(static_cast<std::size_t>(y.size()));
    for (Eigen::Index i = 0; i < y.size(); ++i) out.push_back(power_prox(s, y[i], value_tol, point_tol));
    return out;
}

/// Smallest r with f + r phi convex on the ball |x - xbar| < eps, which makes
/// f relatively prox-regular at xbar with modulus r. The ball must avoid 0.
inline double power_proxreg_modulus(const PowerProxSpec& s, double xbar, double eps) {
    validate(s);
    if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
    if (std::abs(xbar) <= eps) throw InvalidArgument("the eps-ball around xbar contains 0");
    // f'' + r phi'' >= 0  <=>  r >= (1-p)/(q-1) |x|^(p-q), largest at the
    // point of the ball closest to 0.
    return (1.0 - s.p) / (s.q - 1.0) * std::pow(std::abs(xbar) - eps, s.p - s.q);
}

/// Threshold y_th > 0 at which 0 stops being a minimizer, by bisection.
inline double power_prox_threshold(const PowerProxSpec& s, double tol = 1e-10) {
    auto zero_wins = [&](double y) {
        for (const auto& m : power_prox(s, y, 0.0).minimizers)
            if (m[0] == 0.0) return true;
        return false;
    };
    double lo = 0.0, hi = 1.0;
    while (zero_wins(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > tol * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (zero_wins(mid)) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace bregman
