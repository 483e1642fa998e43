#pragma once

#include "bregman/kernels.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace bregman {

/// {origin + t * direction : t in [t_min, t_max]}; a point when direction is
/// empty or zero, a ray or a full line when a bound is infinite.
struct SubgradientPiece {
    Vector origin;
    Vector direction;
    double t_min = 0.0;
    double t_max = 0.0;
};

/// Finite union of points, segments, rays and lines in R^m.
class SubgradientSet {
public:
    SubgradientSet() = default;
    explicit SubgradientSet(std::vector<SubgradientPiece> pieces) : pieces_(std::move(pieces)) {}

    static SubgradientSet point(const Vector& v) {
        return SubgradientSet({SubgradientPiece{v, Vector::Zero(v.size()), 0.0, 0.0}});
    }
    static SubgradientSet segment(const Vector& origin, const Vector& dir, double t_min, double t_max) {
        return SubgradientSet({SubgradientPiece{origin, dir, t_min, t_max}});
    }

    bool empty() const { return pieces_.empty(); }
    const std::vector<SubgradientPiece>& pieces() const { return pieces_; }
    SubgradientSet& add(const SubgradientSet& other) {
        pieces_.insert(pieces_.end(), other.pieces_.begin(), other.pieces_.end());
        return *this;
    }
    SubgradientSet shifted(const Vector& delta) const {
        SubgradientSet s = *this;
        for (auto& p : s.pieces_) p.origin += delta;
        return s;
    }

    double distance(const Vector& w) const {
        double best = kInf;
        for (const auto& p : pieces_) best = std::min(best, (w - project(p, w)).norm());
        return best;
    }

    /// Points of the set inside the open ball B(center, radius): every point
    /// piece that qualifies plus `per_piece` evenly spaced points of each
    /// one-dimensional piece's intersection with the ball.
    std::vector<Vector> sample_near(const Vector& center, double radius, int per_piece) const {
        std::vector<Vector> out;
        for (const auto& p : pieces_) {
            const double dd = p.direction.size() ? p.direction.squaredNorm() : 0.0;
            if (dd == 0.0) {
                if ((p.origin - center).norm() < radius) out.push_back(p.origin);
                continue;
            }
            const Vector oc = p.origin - center;
            const double b = p.direction.dot(oc);
            const double c = oc.squaredNorm() - radius * radius;
            const double disc = b * b - dd * c;
            if (disc <= 0.0) continue;
            const double sq = std::sqrt(disc);
            const double lo = std::max(p.t_min, (-b - sq) / dd);
            const double hi = std::min(p.t_max, (-b + sq) / dd);
            if (!(lo <= hi)) continue;
            if (lo == hi) {
                out.push_back(p.origin + lo * p.direction);
                continue;
            }
            for (int i = 0; i < per_piece; ++i) {
                const double t = lo + (hi - lo) * (i + 0.5) / per_piece;
                out.push_back(p.origin + t * p.direction);
            }
        }
        return out;
    }

private:
    static Vector project(const SubgradientPiece& p, const Vector& w) {
        const double dd = p.direction.size() ? p.direction.squaredNorm() : 0.0;
        if (dd == 0.0) return p.origin;
        double t = p.direction.dot(w - p.origin) / dd;
        t = std::min(std::max(t, p.t_min), p.t_max);
        return p.origin + t * p.direction;
    }

    std::vector<SubgradientPiece> pieces_;
};

/// A parameterization of (part of) dom f used by the global search oracle;
/// needed for sets of measure zero, which a grid never hits.
struct Chart {
    Box params;
    std::function<Vector(const Vector&)> map;
    bool identity = false;
};

inline Chart identity_chart(const Box& box) {
    return Chart{box, [](const Vector& t) { return t; }, true};
}

/// Extended-real-valued objective f : R^m -> R U {+inf}.
struct ObjectiveFn {
    std::string name;
    Eigen::Index dim = 1;
    std::function<double(const Vector&)> value;
    /// Subdifferential at x (limiting); unset when unavailable.
    std::function<SubgradientSet(const Vector&)> subgrad;
    /// dist(w, subdiff f(x)); overrides the subgrad-based distance when set.
    std::function<double(const Vector&, const Vector&)> subdiff_distance;
    /// Set only for smooth functions.
    std::function<Vector(const Vector&)> gradient;
    std::function<Matrix(const Vector&)> hessian;
    std::optional<double> prox_bounded_threshold;
    /// Charts over parts of dom f searched in addition to the search box. When
    /// `search_box` is false only the charts are searched.
    std::vector<Chart> charts;
    bool search_box = true;
    /// Points always offered as candidates (kinks, isolated points).
    std::vector<Vector> anchors;

    double operator()(const Vector& x) const { return value(x); }
    bool in_domain(const Vector& x) const { return value(x) < kInf; }

    bool has_subgradients() const { return static_cast<bool>(subgrad) || static_cast<bool>(gradient); }

    SubgradientSet subdifferential(const Vector& x) const {
        if (subgrad) return subgrad(x);
        if (gradient) return SubgradientSet::point(gradient(x));
        throw InvalidArgument("objective '" + name + "' has no subgradient oracle");
    }

    double dist_subdiff(const Vector& x, const Vector& w) const {
        if (subdiff_distance) return subdiff_distance(x, w);
        return subdifferential(x).distance(w);
    }
};

/// f - <., v>.
inline ObjectiveFn tilt(const ObjectiveFn& f, const Vector& v) {
    ObjectiveFn g = f;
    g.name = f.name + "_tilted";
    g.value = [fv = f.value, v](const Vector& x) {
        const double y = fv(x);
        return y < kInf ? y - v.dot(x) : kInf;
    };
    if (f.subgrad)
        g.subgrad = [s = f.subgrad, v](const Vector& x) { return s(x).shifted(-v); };
    if (f.subdiff_distance)
        g.subdiff_distance = [d = f.subdiff_distance, v](const Vector& x, const Vector& w) { return d(x, w + v); };
    if (f.gradient)
        g.gradient = [gr = f.gradient, v](const Vector& x) -> Vector { return gr(x) - v; };
    g.prox_bounded_threshold.reset();
    return g;
}

/// f + h for a smooth h given by value and gradient.
inline ObjectiveFn add_smooth(const ObjectiveFn& f, std::function<double(const Vector&)> h,
                              std::function<Vector(const Vector&)> grad_h, const std::string& suffix = "_plus") {
    ObjectiveFn g = f;
    g.name = f.name + suffix;
    g.value = [fv = f.value, h](const Vector& x) {
        const double y = fv(x);
        if (!(y < kInf)) return kInf;
        const double z = h(x);
        return z < kInf ? y + z : kInf;
    };
    if (f.subgrad)
        g.subgrad = [s = f.subgrad, grad_h](const Vector& x) { return s(x).shifted(grad_h(x)); };
    if (f.subdiff_distance)
        g.subdiff_distance = [d = f.subdiff_distance, grad_h](const Vector& x, const Vector& w) {
            return d(x, w - grad_h(x));
        };
    if (f.gradient)
        g.gradient = [gr = f.gradient, grad_h](const Vector& x) -> Vector { return gr(x) + grad_h(x); };
    g.hessian = nullptr;
    g.prox_bounded_threshold.reset();
    return g;
}

/// f o grad phi*, with charts and anchors carried through grad phi.
inline ObjectiveFn compose_with_conj_grad(const ObjectiveFn& f, const Kernel& k) {
    ObjectiveFn g;
    g.name = f.name + "_o_gradconj";
    g.dim = f.dim;
    g.value = [fv = f.value, k](const Vector& z) {
        if (!k.conj_dom_interior(z)) return kInf;
        return fv(k.conj_grad(z));
    };
    for (const auto& c : f.charts) {
        if (c.identity) continue;
        g.charts.push_back(Chart{c.params, [m = c.map, k](const Vector& t) { return Vector(k.grad(m(t))); }, false});
    }
    g.search_box = f.search_box;
    for (const auto& a : f.anchors)
        if (k.dom_interior(a)) g.anchors.push_back(k.grad(a));
    g.prox_bounded_threshold = f.prox_bounded_threshold;
    return g;
}

}  // namespace bregman
