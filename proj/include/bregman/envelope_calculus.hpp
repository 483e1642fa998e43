#pragma once

// Gradient formulas for left and right Bregman envelopes, a finite-
// difference checker, and the convexity check of the envelope complement.

#include "bregman/analytic_prox.hpp"
#include "bregman/prox_core.hpp"
#include "bregman/regularity.hpp"

#include <random>

namespace bregman {

/// Scalar function of a point, typically an envelope.
using ScalarFn = std::function<double(const Vector&)>;

/// Left prox/envelope through the grid oracle.
inline ProxMap oracle_left_prox(const ObjectiveFn& f, const Kernel& k, double lambda, SearchConfig cfg = {}) {
    return [f, k, lambda, cfg](const Vector& y) { return lprox(f, k, lambda, y, cfg); };
}

/// Right prox/envelope through the grid oracle (with its dual cross-check).
inline ProxMap oracle_right_prox(const ObjectiveFn& f, const Kernel& k, double lambda, SearchConfig cfg = {}) {
    return [f, k, lambda, cfg](const Vector& y) { return rprox(f, k, lambda, y, cfg); };
}

/// Coordinatewise closed-form left prox of (1/p)||x||_p^p under the
/// separable power kernel. When a coordinate is multivalued the result
/// lists two minimizers that differ in the first such coordinate.
inline ProxMap analytic_power_prox(const PowerProxSpec& s) {
    validate(s);
    return [s](const Vector& y) {
        const auto parts = power_prox_vector(s, y);
        ProxResult out;
        Vector x(y.size());
        double env = 0.0;
        std::optional<Eigen::Index> split;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const ProxResult& r = parts[static_cast<std::size_t>(i)];
            x[i] = r.minimizers.front()[0];
            env += r.env_value;
            if (r.minimizers.size() > 1 && !split) split = i;
        }
        out.minimizers.push_back(x);
        if (split) {
            Vector x2 = x;
            x2[*split] = parts[static_cast<std::size_t>(*split)].minimizers.back()[0];
            out.minimizers.push_back(x2);
            out.multivalued = true;
        }
        out.env_value = env;
        out.diagnostics.method = "analytic";
        return out;
    };
}

/// Envelope value read off a prox map.
inline ScalarFn envelope_of(const ProxMap& prox) {
    return [prox](const Vector& y) { return prox(y).env_value; };
}

/// grad (lenv o grad phi*)(w) = (1/lambda)(grad phi*(w) - lprox(grad phi*(w))).
inline Vector left_env_grad_composed(const ProxMap& lprox_map, const Kernel& k, double lambda, const Vector& w) {
    if (!k.conj_dom_interior(w)) throw DomainError("w must lie in int(dom phi*)");
    const Vector y = k.conj_grad(w);
    const Vector x = lprox_map(y).unique("left prox in the composed envelope gradient");
    return (y - x) / lambda;
}

/// grad lenv(y) = (1/lambda) Hess phi(y) (y - lprox(y)).
inline Vector left_env_grad(const ProxMap& lprox_map, const Kernel& k, double lambda, const Vector& y) {
    if (!k.dom_interior(y)) throw DomainError("y must lie in int(dom phi)");
    const auto H = k.hessian(y);
    if (!H) throw InvalidArgument("Hessian of phi unavailable at y");
    const Vector x = lprox_map(y).unique("left prox in the envelope gradient");
    return (*H) * (y - x) / lambda;
}

struct RightGradient {
    Vector primal;  ///< (1/lambda)(grad phi(y) - grad phi(rprox(y)))
    Vector dual;    ///< same expression with the dual-path minimizer
    double gap = 0.0;
};

/// grad renv(y) = (1/lambda)(grad phi(y) - grad phi(rprox(y))), evaluated
/// both from the primal minimizer and from the dual-path minimizer.
inline RightGradient right_env_grad(const ProxMap& rprox_map, const Kernel& k, double lambda, const Vector& y) {
    if (!k.full_domain()) throw InvalidArgument("right envelope needs dom phi = R^m");
    const ProxResult r = rprox_map(y);
    const Vector x = r.unique("right prox in the envelope gradient");
    RightGradient g;
    g.primal = (k.grad(y) - k.grad(x)) / lambda;
    g.dual = r.dual_minimizers.empty() ? g.primal : Vector((k.grad(y) - r.dual_minimizers.front()) / lambda);
    g.gap = (g.primal - g.dual).norm();
    return g;
}

struct FdGradient {
    Vector value;       ///< central difference with step h
    Vector half_step;   ///< central difference with step h/2
    bool richardson_consistent = false;
};

/// Central differences with per-coordinate step h max(1, |y_i|) and a
/// Richardson check at h/2.
inline FdGradient fd_gradient(const ScalarFn& fn, const Vector& y, double h = 1e-5, double consistency_tol = 1e-4) {
    FdGradient out;
    out.value.resize(y.size());
    out.half_step.resize(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        auto diff = [&](double step) {
            Vector a = y, b = y;
            a[i] += step;
            b[i] -= step;
            return (fn(a) - fn(b)) / (2.0 * step);
        };
        const double hi = h * std::max(1.0, std::abs(y[i]));
        out.value[i] = diff(hi);
        out.half_step[i] = diff(0.5 * hi);
    }
    out.richardson_consistent =
        (out.value - out.half_step).norm() <= consistency_tol * (1.0 + out.value.norm());
    return out;
}

struct GradCheckRow {
    Vector y;
    Vector formula;
    Vector fd;
    double abs_err = 0.0;
    double rel_err = 0.0;  ///< |formula - fd| / (1 + |formula|)
    bool single_valued = true;
    bool passed = false;
};

/// Compares a gradient formula with central differences of the envelope at
/// each point. Points where the prox is multivalued are reported with
/// single_valued = false and no comparison.
inline std::vector<GradCheckRow> grad_check(const std::function<Vector(const Vector&)>& formula, const ScalarFn& env,
                                            const std::function<bool(const Vector&)>& single_valued,
                                            const std::vector<Vector>& points, double tol = 1e-4, double h = 1e-5) {
    std::vector<GradCheckRow> rows;
    for (const auto& y : points) {
        GradCheckRow row;
        row.y = y;
        row.single_valued = single_valued(y);
        if (row.single_valued) {
            row.formula = formula(y);
            row.fd = fd_gradient(env, y, h).value;
            row.abs_err = (row.formula - row.fd).norm();
            row.rel_err = row.abs_err / (1.0 + row.formula.norm());
            row.passed = row.rel_err <= tol;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct ConvexityReport {
    bool passed = false;
    double worst_violation = 0.0;  ///< max of g(mid) - (g(a) + g(b)) / 2
    int checked = 0;
};

/// Midpoint convexity of (1/lambda) phi* - lenv o grad phi* (left, in the
/// dual variable) or (1/lambda) phi - renv (right) at random pairs of the
/// region. lambda must not exceed the prox-boundedness threshold.
inline ConvexityReport envelope_complement_convexity_check(const ScalarFn& env, const Kernel& k, double lambda,
                                                           Side side, const Box& region, int pairs, double tol,
                                                           double lambda_threshold = kInf,
                                                           std::uint64_t seed = 0xc0417ULL) {
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (lambda > lambda_threshold) throw InvalidArgument("lambda above the prox-boundedness threshold");
    auto g = [&](const Vector& w) {
        if (side == Side::left) return k.conj_value(w) / lambda - env(k.conj_grad(w));
        return k.value(w) / lambda - env(w);
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto draw = [&]() {
        Vector x(region.dim());
        for (Eigen::Index i = 0; i < region.dim(); ++i)
            x[i] = region.lower[i] + unit(rng) * (region.upper[i] - region.lower[i]);
        return x;
    };
    ConvexityReport rep;
    rep.passed = true;
    rep.worst_violation = -kInf;
    for (int s = 0; s < pairs; ++s) {
        const Vector a = draw(), b = draw();
        const double ga = g(a), gb = g(b), gm = g(0.5 * (a + b));
        const double viol = gm - 0.5 * (ga + gb);
        rep.worst_violation = std::max(rep.worst_violation, viol);
        if (viol > tol * (1.0 + std::abs(ga) + std::abs(gb))) rep.passed = false;
        ++rep.checked;
    }
    return rep;
}

}  // namespace bregman
