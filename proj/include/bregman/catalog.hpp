#pragma once

// Objective functions used by the examples, the tests and the CLI.

#include "bregman/objective.hpp"

namespace bregman::catalog {

/// (1/p) sum_i |x_i|^p, p in ]0, 1[ (any p > 0 accepted).
inline ObjectiveFn power(double p, Eigen::Index dim = 1) {
    if (!(p > 0.0)) throw InvalidArgument("power objective needs p > 0");
    ObjectiveFn f;
    f.name = "power";
    f.dim = dim;
    f.value = [p](const Vector& x) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i]), p) / p;
        return s;
    };
    // At x_i = 0 the subdifferential is R in that coordinate (p < 1).
    f.subdiff_distance = [p](const Vector& x, const Vector& w) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] == 0.0 && p < 1.0) continue;
            const double d = w[i] - sign(x[i]) * std::pow(std::abs(x[i]), p - 1.0);
            s += d * d;
        }
        return std::sqrt(s);
    };
    if (dim == 1) {
        f.subgrad = [p](const Vector& x) {
            if (x[0] == 0.0) return SubgradientSet::segment(Vector::Zero(1), Vector::Ones(1), -kInf, kInf);
            return SubgradientSet::point(scalar_point(sign(x[0]) * std::pow(std::abs(x[0]), p - 1.0)));
        };
    }
    f.anchors.push_back(Vector::Zero(dim));
    f.prox_bounded_threshold = kInf;
    return f;
}

/// Indicator of the box [lo, hi]^dim.
inline ObjectiveFn indicator_interval(double lo, double hi, Eigen::Index dim = 1) {
    if (!(lo <= hi)) throw InvalidArgument("indicator interval needs lo <= hi");
    ObjectiveFn f;
    f.name = "indicator_interval";
    f.dim = dim;
    f.value = [lo, hi](const Vector& x) {
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (x[i] < lo || x[i] > hi) return kInf;
        return 0.0;
    };
    f.subdiff_distance = [lo, hi](const Vector& x, const Vector& w) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double d = w[i];
            if (x[i] < lo || x[i] > hi) return kInf;
            if (lo == hi) d = 0.0;
            else if (x[i] == lo) d = std::max(w[i], 0.0);
            else if (x[i] == hi) d = std::min(w[i], 0.0);
            s += d * d;
        }
        return std::sqrt(s);
    };
    if (dim == 1) {
        f.subgrad = [lo, hi](const Vector& x) {
            if (x[0] < lo || x[0] > hi) return SubgradientSet{};
            if (lo == hi) return SubgradientSet::segment(Vector::Zero(1), Vector::Ones(1), -kInf, kInf);
            if (x[0] == lo) return SubgradientSet::segment(Vector::Zero(1), Vector::Ones(1), -kInf, 0.0);
            if (x[0] == hi) return SubgradientSet::segment(Vector::Zero(1), Vector::Ones(1), 0.0, kInf);
            return SubgradientSet::point(Vector::Zero(1));
        };
    }
    f.anchors.push_back(Vector::Constant(dim, lo));
    f.anchors.push_back(Vector::Constant(dim, hi));
    if (lo == hi) f.search_box = false;
    f.prox_bounded_threshold = kInf;
    return f;
}

/// Indicator of a single point.
inline ObjectiveFn indicator_point(const Vector& c) {
    ObjectiveFn f;
    f.name = "indicator_point";
    f.dim = c.size();
    f.value = [c](const Vector& x) { return (x - c).cwiseAbs().maxCoeff() == 0.0 ? 0.0 : kInf; };
    f.subdiff_distance = [c](const Vector& x, const Vector&) { return x == c ? 0.0 : kInf; };
    f.anchors.push_back(c);
    f.search_box = false;
    f.prox_bounded_threshold = kInf;
    return f;
}

/// scale * |x - center| (1-D).
inline ObjectiveFn abs_value(double scale = 1.0, double center = 0.0) {
    ObjectiveFn f;
    f.name = "abs";
    f.value = [scale, center](const Vector& x) { return scale * std::abs(x[0] - center); };
    f.subgrad = [scale, center](const Vector& x) {
        const double d = x[0] - center;
        if (d != 0.0) return SubgradientSet::point(scalar_point(scale * sign(d)));
        if (scale >= 0.0)
            return SubgradientSet::segment(scalar_point(-scale), Vector::Ones(1), 0.0, 2.0 * scale);
        // concave kink: limiting subdifferential is the two one-sided slopes
        return SubgradientSet::point(scalar_point(scale)).add(SubgradientSet::point(scalar_point(-scale)));
    };
    f.anchors.push_back(scalar_point(center));
    if (scale >= 0.0) f.prox_bounded_threshold = kInf;
    return f;
}

/// (a/2)|x - center|^2; a may be negative.
inline ObjectiveFn quadratic(double a, double center = 0.0, Eigen::Index dim = 1) {
    ObjectiveFn f;
    f.name = "quadratic";
    f.dim = dim;
    f.value = [a, center](const Vector& x) { return 0.5 * a * (x.array() - center).square().sum(); };
    f.gradient = [a, center](const Vector& x) -> Vector { return a * (x.array() - center).matrix(); };
    f.hessian = [a, dim](const Vector&) -> Matrix { return a * Matrix::Identity(dim, dim); };
    return f;
}

/// Linear function <c, x>.
inline ObjectiveFn linear(const Vector& c) {
    ObjectiveFn f;
    f.name = "linear";
    f.dim = c.size();
    f.value = [c](const Vector& x) { return c.dot(x); };
    f.gradient = [c](const Vector&) -> Vector { return c; };
    f.hessian = [c](const Vector&) -> Matrix { return Matrix::Zero(c.size(), c.size()); };
    return f;
}

/// h(t) = 2 t^2 - 3 |t|^1.1 and its derivative.
inline double epigraph_h(double t) { return 2.0 * t * t - 3.0 * std::pow(std::abs(t), 1.1); }
inline double epigraph_dh(double t) { return 4.0 * t - 3.3 * sign(t) * std::pow(std::abs(t), 0.1); }

/// Component function F(x1, x2) = 2 x1^2 - 3|x1|^1.1 - x2 of the
/// relatively amenable representation delta_{R<=0} o F.
inline ObjectiveFn epigraph_inner_map() {
    ObjectiveFn f;
    f.name = "epigraph_inner_map";
    f.dim = 2;
    f.value = [](const Vector& x) { return epigraph_h(x[0]) - x[1]; };
    f.gradient = [](const Vector& x) -> Vector { return make_point({epigraph_dh(x[0]), -1.0}); };
    return f;
}

/// Indicator of epi h for h(t) = 2 t^2 - 3|t|^1.1. `param_half_width` bounds
/// the boundary chart t-range.
inline ObjectiveFn epigraph_indicator(double param_half_width = 2.0) {
    ObjectiveFn f;
    f.name = "epigraph_indicator";
    f.dim = 2;
    f.value = [](const Vector& x) { return x[1] >= epigraph_h(x[0]) ? 0.0 : kInf; };
    f.subgrad = [](const Vector& x) {
        const double h = epigraph_h(x[0]);
        if (x[1] < h) return SubgradientSet{};
        if (x[1] > h) return SubgradientSet::point(Vector::Zero(2));
        return SubgradientSet::segment(Vector::Zero(2), make_point({epigraph_dh(x[0]), -1.0}), 0.0, kInf);
    };
    f.charts.push_back(Chart{make_box(-param_half_width, param_half_width),
                             [](const Vector& t) { return make_point({t[0], epigraph_h(t[0])}); }, false});
    f.anchors.push_back(Vector::Zero(2));
    f.prox_bounded_threshold = kInf;
    return f;
}

/// Indicator of C = {(t, 2t) : t in [0, 1]}.
inline ObjectiveFn segment_indicator() {
    ObjectiveFn f;
    f.name = "segment_indicator";
    f.dim = 2;
    auto on_segment = [](const Vector& x) {
        return x[0] >= 0.0 && x[0] <= 1.0 && std::abs(x[1] - 2.0 * x[0]) <= 1e-12 * (1.0 + std::abs(x[1]));
    };
    f.value = [on_segment](const Vector& x) { return on_segment(x) ? 0.0 : kInf; };
    const Vector dir = make_point({1.0, 2.0});
    const Vector normal = make_point({2.0, -1.0});
    f.subgrad = [on_segment, dir, normal](const Vector& x) {
        if (!on_segment(x)) return SubgradientSet{};
        SubgradientSet s = SubgradientSet::segment(Vector::Zero(2), normal, -kInf, kInf);
        if (x[0] == 0.0) s.add(SubgradientSet::segment(Vector::Zero(2), -dir, 0.0, kInf));
        if (x[0] == 1.0) s.add(SubgradientSet::segment(Vector::Zero(2), dir, 0.0, kInf));
        return s;
    };
    // Normal cone: the normal line inside the segment, half-planes at the ends.
    f.subdiff_distance = [on_segment, dir](const Vector& x, const Vector& w) {
        if (!on_segment(x)) return kInf;
        const double along = w.dot(dir) / dir.norm();
        if (x[0] == 0.0) return std::max(along, 0.0);
        if (x[0] == 1.0) return std::max(-along, 0.0);
        return std::abs(along);
    };
    f.charts.push_back(Chart{make_box(0.0, 1.0), [](const Vector& t) { return make_point({t[0], 2.0 * t[0]}); }, false});
    f.search_box = false;
    f.anchors.push_back(make_point({0.0, 0.0}));
    f.anchors.push_back(make_point({1.0, 2.0}));
    f.prox_bounded_threshold = kInf;
    return f;
}

/// (mu/2) ||B u - b||^2.
inline ObjectiveFn least_squares(const Matrix& B, const Vector& b, double mu = 1.0) {
    if (B.rows() != b.size()) throw InvalidArgument("least squares: B and b sizes differ");
    ObjectiveFn f;
    f.name = "least_squares";
    f.dim = B.cols();
    f.value = [B, b, mu](const Vector& u) { return 0.5 * mu * (B * u - b).squaredNorm(); };
    f.gradient = [B, b, mu](const Vector& u) -> Vector { return mu * B.transpose() * (B * u - b); };
    const Matrix H = mu * B.transpose() * B;
    f.hessian = [H](const Vector&) -> Matrix { return H; };
    return f;
}

}  // namespace bregman::catalog
