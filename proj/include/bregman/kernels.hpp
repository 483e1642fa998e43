#pragma once

// Legendre kernel catalog. Every catalog kernel is separable: a Kernel on R^m
// is a list of scalar Legendre functions, one per coordinate.

#include "bregman/core.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bregman {

/// Margin kept from finite domain endpoints when testing interior membership.
inline constexpr double kDomainMargin = 1e-12;

struct ScalarKernel {
    std::string name;
    std::function<double(double)> value;       ///< +inf outside dom
    std::function<double(double)> grad;        ///< interior only
    std::function<double(double)> conj_value;  ///< +inf outside dom of the conjugate
    std::function<double(double)> conj_grad;   ///< interior of the conjugate domain only
    /// nullopt where the kernel is not twice differentiable.
    std::function<std::optional<double>(double)> hessian;
    std::function<std::optional<double>(double)> conj_hessian;
    double dom_lo = -kInf;
    double dom_hi = kInf;
    double conj_dom_lo = -kInf;
    double conj_dom_hi = kInf;
    bool supercoercive = false;
    bool very_strictly_convex = false;

    bool dom_interior(double x) const {
        if (!std::isfinite(x)) return false;
        return x > dom_lo + kDomainMargin && x < dom_hi - kDomainMargin;
    }
    bool conj_dom_interior(double y) const {
        if (!std::isfinite(y)) return false;
        return y > conj_dom_lo + kDomainMargin && y < conj_dom_hi - kDomainMargin;
    }
    /// Closest point of the margin-shrunk interior.
    double clamp_interior(double x) const {
        double lo = std::isfinite(dom_lo) ? dom_lo + 2 * kDomainMargin * (1 + std::abs(dom_lo)) : -kInf;
        double hi = std::isfinite(dom_hi) ? dom_hi - 2 * kDomainMargin * (1 + std::abs(dom_hi)) : kInf;
        return std::min(std::max(x, lo), hi);
    }
};

namespace detail {

// Solves g(x) = y for a continuous strictly increasing g on (lo, hi) with
// g -> -inf / +inf at the ends (or at the unbounded ends). Bisection on a
// bracket grown geometrically from zero.
inline double invert_increasing(const std::function<double(double)>& g, double y) {
    double lo = -1.0, hi = 1.0;
    while (g(lo) > y) lo *= 2.0;
    while (g(hi) < y) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (g(mid) < y)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double xlogx(double x) { return x == 0.0 ? 0.0 : x * std::log(x); }

}  // namespace detail

namespace kernels {

inline ScalarKernel half_squared_norm() {
    ScalarKernel k;
    k.name = "half_squared_norm";
    k.value = [](double x) { return 0.5 * x * x; };
    k.grad = [](double x) { return x; };
    k.conj_value = [](double y) { return 0.5 * y * y; };
    k.conj_grad = [](double y) { return y; };
    k.hessian = [](double) -> std::optional<double> { return 1.0; };
    k.conj_hessian = [](double) -> std::optional<double> { return 1.0; };
    k.supercoercive = true;
    k.very_strictly_convex = true;
    return k;
}

/// phi(x) = |x|^q / q, q > 1.
inline ScalarKernel power(double q) {
    if (!(q > 1.0) || !std::isfinite(q)) throw InvalidArgument("power kernel needs q > 1");
    const double qc = q / (q - 1.0);
    ScalarKernel k;
    k.name = "power";
    k.value = [q](double x) { return std::pow(std::abs(x), q) / q; };
    k.grad = [q](double x) { return sign(x) * std::pow(std::abs(x), q - 1.0); };
    k.conj_value = [qc](double y) { return std::pow(std::abs(y), qc) / qc; };
    k.conj_grad = [qc](double y) { return sign(y) * std::pow(std::abs(y), qc - 1.0); };
    k.hessian = [q](double x) -> std::optional<double> {
        if (x == 0.0 && q < 2.0) return std::nullopt;
        return (q - 1.0) * std::pow(std::abs(x), q - 2.0);
    };
    k.conj_hessian = [qc](double y) -> std::optional<double> {
        if (y == 0.0 && qc < 2.0) return std::nullopt;
        return (qc - 1.0) * std::pow(std::abs(y), qc - 2.0);
    };
    k.supercoercive = true;
    k.very_strictly_convex = (q == 2.0);
    return k;
}

/// phi(x) = x log x - x on [0, inf).
inline ScalarKernel boltzmann_shannon() {
    ScalarKernel k;
    k.name = "boltzmann_shannon";
    k.value = [](double x) { return x < 0.0 ? kInf : detail::xlogx(x) - x; };
    k.grad = [](double x) { return std::log(x); };
    k.conj_value = [](double y) { return std::exp(y); };
    k.conj_grad = [](double y) { return std::exp(y); };
    k.hessian = [](double x) -> std::optional<double> { return 1.0 / x; };
    k.conj_hessian = [](double y) -> std::optional<double> { return std::exp(y); };
    k.dom_lo = 0.0;
    k.supercoercive = true;
    k.very_strictly_convex = true;
    return k;
}

/// phi(x) = -log x on (0, inf).
inline ScalarKernel burg() {
    ScalarKernel k;
    k.name = "burg";
    k.value = [](double x) { return x > 0.0 ? -std::log(x) : kInf; };
    k.grad = [](double x) { return -1.0 / x; };
    k.conj_value = [](double y) { return y < 0.0 ? -1.0 - std::log(-y) : kInf; };
    k.conj_grad = [](double y) { return -1.0 / y; };
    k.hessian = [](double x) -> std::optional<double> { return 1.0 / (x * x); };
    k.conj_hessian = [](double y) -> std::optional<double> { return 1.0 / (y * y); };
    k.dom_lo = 0.0;
    k.conj_dom_hi = 0.0;
    k.supercoercive = false;
    k.very_strictly_convex = true;
    return k;
}

/// phi(x) = x log x + (1 - x) log(1 - x) on [0, 1].
inline ScalarKernel fermi_dirac() {
    ScalarKernel k;
    k.name = "fermi_dirac";
    k.value = [](double x) {
        if (x < 0.0 || x > 1.0) return kInf;
        return detail::xlogx(x) + detail::xlogx(1.0 - x);
    };
    k.grad = [](double x) { return std::log(x) - std::log1p(-x); };
    k.conj_value = [](double y) {
        return y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y));
    };
    k.conj_grad = [](double y) {
        return y >= 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
    };
    k.hessian = [](double x) -> std::optional<double> { return 1.0 / (x * (1.0 - x)); };
    k.conj_hessian = [](double y) -> std::optional<double> {
        const double s = y >= 0.0 ? 1.0 / (1.0 + std::exp(-y)) : std::exp(y) / (1.0 + std::exp(y));
        return s * (1.0 - s);
    };
    k.dom_lo = 0.0;
    k.dom_hi = 1.0;
    k.supercoercive = true;
    k.very_strictly_convex = true;
    return k;
}

/// phi(x) = -sqrt(1 - x^2) on [-1, 1].
inline ScalarKernel hellinger() {
    ScalarKernel k;
    k.name = "hellinger";
    k.value = [](double x) { return std::abs(x) > 1.0 ? kInf : -std::sqrt((1.0 - x) * (1.0 + x)); };
    k.grad = [](double x) { return x / std::sqrt((1.0 - x) * (1.0 + x)); };
    k.conj_value = [](double y) { return std::hypot(1.0, y); };
    k.conj_grad = [](double y) { return y / std::hypot(1.0, y); };
    k.hessian = [](double x) -> std::optional<double> {
        return std::pow((1.0 - x) * (1.0 + x), -1.5);
    };
    k.conj_hessian = [](double y) -> std::optional<double> { return std::pow(1.0 + y * y, -1.5); };
    k.dom_lo = -1.0;
    k.dom_hi = 1.0;
    k.supercoercive = true;
    k.very_strictly_convex = true;
    return k;
}

/// phi(x) = exp(x); conjugate y log y - y on [0, inf).
inline ScalarKernel exponential() {
    ScalarKernel k;
    k.name = "exponential";
    k.value = [](double x) { return std::exp(x); };
    k.grad = [](double x) { return std::exp(x); };
    k.conj_value = [](double y) { return y < 0.0 ? kInf : detail::xlogx(y) - y; };
    k.conj_grad = [](double y) { return std::log(y); };
    k.hessian = [](double x) -> std::optional<double> { return std::exp(x); };
    k.conj_hessian = [](double y) -> std::optional<double> { return 1.0 / y; };
    k.conj_dom_lo = 0.0;
    k.supercoercive = false;
    k.very_strictly_convex = true;
    return k;
}

/// phi(x) = a x^2 + b |x|^q with a, b >= 0, a + b > 0, q > 1. The conjugate
/// has no closed form for b > 0 and is evaluated by monotone inversion of the
/// gradient.
inline ScalarKernel square_plus_power(double a, double b, double q) {
    if (a < 0.0 || b < 0.0 || a + b <= 0.0 || !(q > 1.0))
        throw InvalidArgument("square_plus_power needs a, b >= 0, a + b > 0, q > 1");
    ScalarKernel k;
    k.name = "square_plus_power";
    k.value = [a, b, q](double x) { return a * x * x + b * std::pow(std::abs(x), q); };
    auto grad = [a, b, q](double x) {
        return 2.0 * a * x + b * q * sign(x) * std::pow(std::abs(x), q - 1.0);
    };
    k.grad = grad;
    auto hess = [a, b, q](double x) -> std::optional<double> {
        if (b > 0.0 && q < 2.0 && x == 0.0) return std::nullopt;
        return 2.0 * a + b * q * (q - 1.0) * std::pow(std::abs(x), q - 2.0);
    };
    k.hessian = hess;
    auto conj_grad = [grad, a, b](double y) {
        if (y == 0.0) return 0.0;
        if (b == 0.0) return y / (2.0 * a);
        return detail::invert_increasing(grad, y);
    };
    k.conj_grad = conj_grad;
    k.conj_value = [conj_grad, a, b, q](double y) {
        const double x = conj_grad(y);
        return x * y - (a * x * x + b * std::pow(std::abs(x), q));
    };
    k.conj_hessian = [conj_grad, hess](double y) -> std::optional<double> {
        const double x = conj_grad(y);
        if (x == 0.0) return std::nullopt;
        auto h = hess(x);
        if (!h || *h <= 0.0) return std::nullopt;
        return 1.0 / *h;
    };
    k.supercoercive = true;
    k.very_strictly_convex = a > 0.0 && (b == 0.0 || q >= 2.0);
    return k;
}

/// s * phi for s > 0.
inline ScalarKernel scaled(const ScalarKernel& base, double s) {
    if (!(s > 0.0)) throw InvalidArgument("kernel scale must be positive");
    ScalarKernel k = base;
    k.name = base.name + "*" + std::to_string(s);
    k.value = [v = base.value, s](double x) { return s * v(x); };
    k.grad = [g = base.grad, s](double x) { return s * g(x); };
    k.conj_value = [c = base.conj_value, s](double y) { return s * c(y / s); };
    k.conj_grad = [c = base.conj_grad, s](double y) { return c(y / s); };
    k.hessian = [h = base.hessian, s](double x) -> std::optional<double> {
        auto v = h(x);
        if (!v) return std::nullopt;
        return s * *v;
    };
    k.conj_hessian = [h = base.conj_hessian, s](double y) -> std::optional<double> {
        auto v = h(y / s);
        if (!v) return std::nullopt;
        return *v / s;
    };
    k.conj_dom_lo = base.conj_dom_lo * s;
    k.conj_dom_hi = base.conj_dom_hi * s;
    return k;
}

}  // namespace kernels

/// A separable Legendre kernel on R^m.
class Kernel {
public:
    Kernel() = default;
    Kernel(ScalarKernel component, Eigen::Index dim)
        : components_(static_cast<std::size_t>(dim), std::move(component)) {
        if (dim < 1) throw InvalidArgument("kernel dimension must be >= 1");
    }
    explicit Kernel(std::vector<ScalarKernel> components) : components_(std::move(components)) {
        if (components_.empty()) throw InvalidArgument("kernel needs at least one component");
    }

    Eigen::Index dim() const { return static_cast<Eigen::Index>(components_.size()); }
    const ScalarKernel& component(Eigen::Index i) const { return components_[static_cast<std::size_t>(i)]; }
    const std::vector<ScalarKernel>& components() const { return components_; }

    std::string name() const {
        std::string n = components_.front().name;
        for (const auto& c : components_)
            if (c.name != n) return "separable";
        return n;
    }

    double value(const Vector& x) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < dim(); ++i) {
            const double v = component(i).value(x[i]);
            if (!(v < kInf)) return kInf;
            s += v;
        }
        return s;
    }
    Vector grad(const Vector& x) const {
        Vector g(dim());
        for (Eigen::Index i = 0; i < dim(); ++i) g[i] = component(i).grad(x[i]);
        return g;
    }
    double conj_value(const Vector& y) const {
        double s = 0.0;
        for (Eigen::Index i = 0; i < dim(); ++i) {
            const double v = component(i).conj_value(y[i]);
            if (!(v < kInf)) return kInf;
            s += v;
        }
        return s;
    }
    Vector conj_grad(const Vector& y) const {
        Vector g(dim());
        for (Eigen::Index i = 0; i < dim(); ++i) g[i] = component(i).conj_grad(y[i]);
        return g;
    }
    std::optional<Matrix> hessian(const Vector& x) const {
        Matrix h = Matrix::Zero(dim(), dim());
        for (Eigen::Index i = 0; i < dim(); ++i) {
            auto v = component(i).hessian(x[i]);
            if (!v) return std::nullopt;
            h(i, i) = *v;
        }
        return h;
    }
    std::optional<Matrix> conj_hessian(const Vector& y) const {
        Matrix h = Matrix::Zero(dim(), dim());
        for (Eigen::Index i = 0; i < dim(); ++i) {
            auto v = component(i).conj_hessian(y[i]);
            if (!v) return std::nullopt;
            h(i, i) = *v;
        }
        return h;
    }
    bool dom_interior(const Vector& x) const {
        if (x.size() != dim()) return false;
        for (Eigen::Index i = 0; i < dim(); ++i)
            if (!component(i).dom_interior(x[i])) return false;
        return true;
    }
    bool conj_dom_interior(const Vector& y) const {
        if (y.size() != dim()) return false;
        for (Eigen::Index i = 0; i < dim(); ++i)
            if (!component(i).conj_dom_interior(y[i])) return false;
        return true;
    }
    /// True when dom phi = R^m (equivalently, phi* is super-coercive).
    bool full_domain() const {
        for (const auto& c : components_)
            if (std::isfinite(c.dom_lo) || std::isfinite(c.dom_hi)) return false;
        return true;
    }
    bool supercoercive() const {
        for (const auto& c : components_)
            if (!c.supercoercive) return false;
        return true;
    }
    bool very_strictly_convex() const {
        for (const auto& c : components_)
            if (!c.very_strictly_convex) return false;
        return true;
    }
    Vector clamp_interior(const Vector& x) const {
        Vector out(dim());
        for (Eigen::Index i = 0; i < dim(); ++i) out[i] = component(i).clamp_interior(x[i]);
        return out;
    }
    /// Domain closure as a box (entries may be infinite).
    Box domain_box() const {
        Box b{Vector(dim()), Vector(dim())};
        for (Eigen::Index i = 0; i < dim(); ++i) {
            b.lower[i] = component(i).dom_lo;
            b.upper[i] = component(i).dom_hi;
        }
        return b;
    }
    Box conj_domain_box() const {
        Box b{Vector(dim()), Vector(dim())};
        for (Eigen::Index i = 0; i < dim(); ++i) {
            b.lower[i] = component(i).conj_dom_lo;
            b.upper[i] = component(i).conj_dom_hi;
        }
        return b;
    }

    /// The conjugate kernel phi*, itself Legendre.
    Kernel conjugate() const {
        std::vector<ScalarKernel> cs;
        cs.reserve(components_.size());
        for (const auto& c : components_) {
            ScalarKernel k;
            k.name = c.name + "_conj";
            k.value = c.conj_value;
            k.grad = c.conj_grad;
            k.conj_value = c.value;
            k.conj_grad = c.grad;
            k.hessian = c.conj_hessian;
            k.conj_hessian = c.hessian;
            k.dom_lo = c.conj_dom_lo;
            k.dom_hi = c.conj_dom_hi;
            k.conj_dom_lo = c.dom_lo;
            k.conj_dom_hi = c.dom_hi;
            k.supercoercive = !std::isfinite(c.dom_lo) && !std::isfinite(c.dom_hi);
            k.very_strictly_convex = c.very_strictly_convex;
            cs.push_back(std::move(k));
        }
        return Kernel(std::move(cs));
    }

private:
    std::vector<ScalarKernel> components_;
};

/// Builds a catalog kernel by name. Kinds: half_squared_norm, power (q),
/// boltzmann_shannon, burg, fermi_dirac, hellinger, exponential,
/// square_plus_power (a, b, q).
inline Kernel make_kernel(const std::string& kind, const std::vector<double>& params = {},
                          Eigen::Index dim = 1) {
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw InvalidArgument("kernel '" + kind + "' expects " + std::to_string(n) + " parameter(s)");
    };
    ScalarKernel k;
    if (kind == "half_squared_norm") {
        need(0);
        k = kernels::half_squared_norm();
    } else if (kind == "power") {
        need(1);
        k = kernels::power(params[0]);
    } else if (kind == "boltzmann_shannon") {
        need(0);
        k = kernels::boltzmann_shannon();
    } else if (kind == "burg") {
        need(0);
        k = kernels::burg();
    } else if (kind == "fermi_dirac") {
        need(0);
        k = kernels::fermi_dirac();
    } else if (kind == "hellinger") {
        need(0);
        k = kernels::hellinger();
    } else if (kind == "exponential") {
        need(0);
        k = kernels::exponential();
    } else if (kind == "square_plus_power") {
        need(3);
        k = kernels::square_plus_power(params[0], params[1], params[2]);
    } else {
        throw InvalidArgument("unknown kernel kind '" + kind + "'");
    }
    return Kernel(std::move(k), dim);
}

/// The 2-D kernel x1^2 + |x1|^1.1 + x2^2 used with the epigraph example.
inline Kernel epigraph_example_kernel() {
    return Kernel({kernels::square_plus_power(1.0, 1.0, 1.1), kernels::square_plus_power(1.0, 0.0, 2.0)});
}

struct RoundtripReport {
    double max_error = 0.0;
    bool passed = false;
};

/// max |grad phi*(grad phi(x)) - x| over the samples.
inline RoundtripReport kernel_roundtrip_check(const Kernel& k, const std::vector<Vector>& samples,
                                              double tol) {
    RoundtripReport r;
    for (const auto& x : samples) {
        if (!k.dom_interior(x)) throw DomainError("roundtrip sample outside int(dom phi)");
        r.max_error = std::max(r.max_error, (k.conj_grad(k.grad(x)) - x).norm());
    }
    r.passed = r.max_error <= tol;
    return r;
}

}  // namespace bregman
