#pragma once

#include "bregman/kernels.hpp"

#include <random>

namespace bregman {

/// D_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>; +inf unless y is
/// interior and x in dom phi.
inline double bregman_distance(const Kernel& k, const Vector& x, const Vector& y) {
    if (!k.dom_interior(y)) return kInf;
    const double px = k.value(x);
    if (!(px < kInf)) return kInf;
    // Summed per coordinate: each scalar divergence is >= 0 up to rounding,
    // which avoids cancellation between large phi(x) and phi(y).
    double sum = 0.0;
    double comp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const auto& c = k.component(i);
        const double d = x[i] - y[i];
        double term = c.value(x[i]) - c.value(y[i]) - c.grad(y[i]) * d;
        if (term < 0.0) term = 0.0;
        const double t = sum + term;
        comp += (sum >= term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + comp;
}

/// D_{phi*}(u, w) computed on the conjugate kernel.
inline double conj_bregman(const Kernel& k, const Vector& u, const Vector& w) {
    if (!k.conj_dom_interior(w)) return kInf;
    const double pu = k.conj_value(u);
    if (!(pu < kInf)) return kInf;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const auto& c = k.component(i);
        double term = c.conj_value(u[i]) - c.conj_value(w[i]) - c.conj_grad(w[i]) * (u[i] - w[i]);
        sum += term < 0.0 ? 0.0 : term;
    }
    return sum;
}

/// |D_phi(x, y) - D_phi*(grad phi(y), grad phi(x))| <= tol.
inline bool bregman_dual_identity_check(const Kernel& k, const Vector& x, const Vector& y, double tol) {
    if (!k.dom_interior(x) || !k.dom_interior(y))
        throw DomainError("dual identity check needs x, y in int(dom phi)");
    const double lhs = bregman_distance(k, x, y);
    const double rhs = conj_bregman(k, k.grad(y), k.grad(x));
    return std::abs(lhs - rhs) <= tol;
}

struct QuadraticBounds {
    double theta = 0.0;  ///< sampled min of 2 D(x,y) / |x-y|^2
    double Theta = 0.0;  ///< sampled max
};

/// Sampled extremes of 2 D_phi(x,y)/|x-y|^2 over pairs in a compact box.
/// The kernel must be very strictly convex on the box: a positive definite
/// Hessian at every sampled point.
inline QuadraticBounds quadratic_bounds_estimate(const Kernel& k, const Box& box, int samples,
                                                 std::uint64_t seed = 0x5eedULL) {
    if (!k.dom_interior(box.lower) || !k.dom_interior(box.upper))
        throw DomainError("box must lie in int(dom phi)");
    auto vsc_at = [&k](const Vector& x) {
        auto h = k.hessian(x);
        return h && h->diagonal().minCoeff() > 0.0;
    };
    if (!vsc_at(box.lower) || !vsc_at(box.upper) || !vsc_at(box.clamp(Vector::Zero(box.dim()))))
        throw InvalidArgument("kernel is not very strictly convex on the box");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&]() {
        Vector x(box.dim());
        for (Eigen::Index i = 0; i < box.dim(); ++i)
            x[i] = box.lower[i] + unit(rng) * (box.upper[i] - box.lower[i]);
        return x;
    };
    QuadraticBounds b{kInf, 0.0};
    for (int s = 0; s < samples; ++s) {
        const Vector x = draw();
        const Vector y = draw();
        if (!vsc_at(x) || !vsc_at(y)) throw InvalidArgument("kernel is not very strictly convex on the box");
        const double n2 = (x - y).squaredNorm();
        if (n2 < 1e-12) continue;
        const double ratio = 2.0 * bregman_distance(k, x, y) / n2;
        b.theta = std::min(b.theta, ratio);
        b.Theta = std::max(b.Theta, ratio);
    }
    return b;
}

}  // namespace bregman
