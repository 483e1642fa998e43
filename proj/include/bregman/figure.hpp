#pragma once

// Bregman-ball tangency data: the level set of z -> D_phi(z, c) through xbar,
// c = grad phi*(grad phi(xbar) + lambda v), against the epigraph of a
// scalar function h.

#include "bregman/divergence.hpp"
#include "bregman/prox_core.hpp"

namespace bregman {

struct TangencyConfig {
    double half_width = 1.5;       ///< scan window around xbar
    int boundary_samples = 4001;
    int graded_levels = 40;        ///< boundary points t_bar +- half_width 2^-k
    int interior_grid = 201;       ///< per axis, epigraph points in the window
    int level_set_samples = 720;
    double exclusion = 1e-10;      ///< samples this close to xbar are ignored
    double tol = 1e-12;
};

struct TangencyReport {
    Vector xbar;
    Vector center;
    double level = 0.0;      ///< D_phi(xbar, center)
    double min_gap = kInf;   ///< min over epigraph samples of D_phi(z, center) - level
    Vector argmin;
    long samples = 0;
    bool passed = false;     ///< no epigraph sample strictly inside the ball
    std::vector<Vector> level_set;
    std::vector<Vector> graph;  ///< (t, h(t))
};

inline TangencyReport tangency_scan(const Kernel& k, const std::function<double(double)>& h, double tbar,
                                    const Vector& v, double lambda, const TangencyConfig& cfg = {}) {
    if (k.dim() != 2) throw InvalidArgument("tangency scan needs a 2-D kernel");
    if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    TangencyReport rep;
    rep.xbar = make_point({tbar, h(tbar)});
    rep.center = tilt_transform_point(k, rep.xbar, v, lambda);
    rep.level = bregman_distance(k, rep.xbar, rep.center);

    auto consider = [&](const Vector& z) {
        if ((z - rep.xbar).norm() <= cfg.exclusion) return;
        if (!k.dom_interior(z)) return;
        const double gap = bregman_distance(k, z, rep.center) - rep.level;
        ++rep.samples;
        if (gap < rep.min_gap) {
            rep.min_gap = gap;
            rep.argmin = z;
        }
    };
    const double T = cfg.half_width;
    for (int i = 0; i < cfg.boundary_samples; ++i) {
        const double t = tbar - T + 2.0 * T * i / (cfg.boundary_samples - 1);
        consider(make_point({t, h(t)}));
    }
    for (int e = 1; e <= cfg.graded_levels; ++e)
        for (double s : {-1.0, 1.0}) {
            const double t = tbar + s * T * std::pow(0.5, e);
            consider(make_point({t, h(t)}));
        }
    const int n = cfg.interior_grid;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const Vector z = make_point({rep.xbar[0] - T + 2.0 * T * i / (n - 1), rep.xbar[1] - T + 2.0 * T * j / (n - 1)});
            if (z[1] >= h(z[0])) consider(z);
        }
    rep.passed = rep.min_gap >= -cfg.tol * (1.0 + rep.level);

    // level set along rays from the center; D(c + rho d, c) increases in rho
    for (int a = 0; a < cfg.level_set_samples; ++a) {
        const double th = 2.0 * M_PI * a / cfg.level_set_samples;
        const Vector d = make_point({std::cos(th), std::sin(th)});
        auto D = [&](double rho) {
            const Vector z = rep.center + rho * d;
            return k.dom_interior(z) ? bregman_distance(k, z, rep.center) : kInf;
        };
        double lo = 0.0, hi = 1e-3;
        while (D(hi) < rep.level && hi < 1e6) hi *= 2.0;
        if (!(D(hi) >= rep.level)) continue;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (D(mid) < rep.level ? lo : hi) = mid;
        }
        rep.level_set.push_back(rep.center + 0.5 * (lo + hi) * d);
    }
    for (int i = 0; i < cfg.boundary_samples; i += 4) {
        const double t = tbar - T + 2.0 * T * i / (cfg.boundary_samples - 1);
        rep.graph.push_back(make_point({t, h(t)}));
    }
    return rep;
}

}  // namespace bregman
