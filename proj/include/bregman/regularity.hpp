#pragma once

// Grid-based certification of relatively proximal subgradients, relative
// prox-regularity, the prox characterization of subgradients, single-
// valuedness of the prox near a point, and the L-smad property.

#include "bregman/divergence.hpp"
#include "bregman/objective.hpp"
#include "bregman/prox_core.hpp"

#include <random>

namespace bregman {

struct ProximalSubgradientWitness {
    Vector xbar;
    Vector vbar;
    double r = 0.0;
    double eps = 0.0;
    std::string kernel;
    int grid_resolution = 0;
    bool verified = false;
    long checked = 0;
    double worst_slack = kInf;          ///< min of f(x) - rhs over samples
    std::optional<Vector> violation;    ///< a failing sample point
};

struct RegularityCertificate {
    Vector xbar;
    Vector vbar;
    double r = 0.0;            ///< smallest passing modulus of the schedule
    double eps = 0.0;
    std::string kernel;
    double attentive_band = 0.0;
    long checked_pairs = 0;
    bool verified = false;
    double required_r = 0.0;   ///< largest modulus demanded by any sampled pair
    std::string reason;
    /// Worst (x, x', v) triple when not verified.
    std::optional<Vector> bad_x, bad_xprime, bad_v;
};

struct CertifyConfig {
    int resolution = 200;          ///< grid points per axis over the eps-box
    int chart_resolution = 400;    ///< samples per chart
    int graded_levels = 45;        ///< geometric refinement toward xbar on charts
    int subgradients_per_piece = 7;
    double tol = 1e-12;
    int max_doubling = 20;
};

namespace detail {

/// Points of dom f in the closed eps-ball around xbar: box grid, chart
/// samples graded toward xbar, anchors and xbar itself.
inline std::vector<Vector> ball_samples(const ObjectiveFn& f, const Vector& xbar, double eps, const CertifyConfig& c) {
    std::vector<Vector> pts;
    const Eigen::Index m = xbar.size();
    auto keep = [&](const Vector& x) {
        if ((x - xbar).norm() <= eps && f.in_domain(x)) pts.push_back(x);
    };
    keep(xbar);
    if (f.search_box) {
        const int n = c.resolution;
        if (m == 1) {
            for (int i = 0; i < n; ++i) keep(scalar_point(xbar[0] - eps + 2.0 * eps * i / (n - 1)));
        } else if (m == 2) {
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    keep(make_point({xbar[0] - eps + 2.0 * eps * i / (n - 1), xbar[1] - eps + 2.0 * eps * j / (n - 1)}));
        } else {
            throw InvalidArgument("certification grid supports m in {1, 2}");
        }
        // graded toward xbar along the axes
        for (int k = 1; k <= c.graded_levels; ++k)
            for (Eigen::Index i = 0; i < m; ++i)
                for (double s : {-1.0, 1.0}) {
                    Vector x = xbar;
                    x[i] += s * eps * std::pow(0.5, k);
                    keep(x);
                }
    }
    for (const auto& ch : f.charts) {
        if (ch.params.dim() != 1) continue;
        const double lo = ch.params.lower[0], hi = ch.params.upper[0];
        double tbest = lo, dbest = kInf;
        for (int i = 0; i < c.chart_resolution; ++i) {
            const double t = lo + (hi - lo) * i / (c.chart_resolution - 1);
            const Vector x = ch.map(scalar_point(t));
            keep(x);
            const double d = (x - xbar).norm();
            if (d < dbest) {
                dbest = d;
                tbest = t;
            }
        }
        const double w = 4.0 * (hi - lo) / (c.chart_resolution - 1);
        tbest = detail::golden_min([&](double t) { return (ch.map(scalar_point(t)) - xbar).norm(); },
                                   std::max(lo, tbest - w), std::min(hi, tbest + w), 200)
                    .first;
        keep(ch.map(scalar_point(tbest)));
        for (int k = 0; k <= c.graded_levels; ++k)
            for (double s : {-1.0, 1.0}) {
                const double t = tbest + s * w * std::pow(0.5, k);
                if (t >= lo && t <= hi) keep(ch.map(scalar_point(t)));
            }
    }
    for (const auto& a : f.anchors) keep(a);
    return pts;
}

inline void require_ball_interior(const Kernel& k, const Vector& xbar, double eps) {
    if (!k.dom_interior(xbar)) throw DomainError("xbar must lie in int(dom phi)");
    for (Eigen::Index i = 0; i < xbar.size(); ++i)
        for (double s : {-1.0, 1.0}) {
            Vector x = xbar;
            x[i] += s * eps;
            if (!k.dom_interior(x)) throw DomainError("the eps-ball leaves int(dom phi)");
        }
}

}  // namespace detail

/// Grid check of f(x) >= f(xbar) + <vbar, x - xbar> - r D_phi(x, xbar) on
/// the eps-ball.
inline ProximalSubgradientWitness certify_prox_subgradient(const ObjectiveFn& f, const Kernel& k, const Vector& xbar,
                                                           const Vector& vbar, double r, double eps,
                                                           const CertifyConfig& cfg = {}) {
    detail::require_ball_interior(k, xbar, eps);
    const double fbar = f(xbar);
    if (!(fbar < kInf)) throw InvalidArgument("f(xbar) must be finite");
    ProximalSubgradientWitness w;
    w.xbar = xbar;
    w.vbar = vbar;
    w.r = r;
    w.eps = eps;
    w.kernel = k.name();
    w.grid_resolution = cfg.resolution;
    for (const auto& x : detail::ball_samples(f, xbar, eps, cfg)) {
        const double fx = f(x);
        const double rhs = fbar + vbar.dot(x - xbar) - r * bregman_distance(k, x, xbar);
        const double slack = fx - rhs;
        ++w.checked;
        if (slack < w.worst_slack) {
            w.worst_slack = slack;
            if (slack < -cfg.tol * (1.0 + std::abs(fx))) w.violation = x;
        }
    }
    w.verified = !w.violation.has_value();
    return w;
}

/// Searches the doubling schedule {1, 2, 4, ..., 2^max_doubling} for the
/// smallest r with f(x') >= f(x) + <v, x' - x> - r D_phi(x', x) at all
/// sampled pairs of the f-attentive band.
inline RegularityCertificate certify_prox_regularity(const ObjectiveFn& f, const Kernel& k, const Vector& xbar,
                                                     const Vector& vbar, double eps, const CertifyConfig& cfg = {}) {
    detail::require_ball_interior(k, xbar, eps);
    RegularityCertificate c;
    c.xbar = xbar;
    c.vbar = vbar;
    c.eps = eps;
    c.kernel = k.name();
    c.attentive_band = eps;
    const double fbar = f(xbar);
    if (!(fbar < kInf)) throw InvalidArgument("f(xbar) must be finite");
    if (!f.has_subgradients() && !f.subdiff_distance) throw InvalidArgument("certification needs a subgradient oracle");
    if (f.dist_subdiff(xbar, vbar) > 1e-9) {
        c.reason = "vbar is not a subgradient of f at xbar";
        return c;
    }

    const auto pts = detail::ball_samples(f, xbar, eps, cfg);
    const Eigen::Index m = xbar.size();
    const Eigen::Index N = static_cast<Eigen::Index>(pts.size());
    Matrix X(m, N);
    Eigen::ArrayXd F(N), Phi(N);
    for (Eigen::Index j = 0; j < N; ++j) {
        X.col(j) = pts[static_cast<std::size_t>(j)];
        F[j] = f(pts[static_cast<std::size_t>(j)]);
        Phi[j] = k.value(pts[static_cast<std::size_t>(j)]);
    }

    // (x, v) pairs of the attentive localization
    std::vector<std::pair<Eigen::Index, Vector>> xv;
    for (Eigen::Index j = 0; j < N; ++j) {
        if (!(std::abs(F[j] - fbar) < eps)) continue;
        const Vector& x = pts[static_cast<std::size_t>(j)];
        if (!f.has_subgradients()) {
            xv.emplace_back(j, vbar);
            continue;
        }
        for (const auto& v : f.subdifferential(x).sample_near(vbar, eps, cfg.subgradients_per_piece))
            xv.emplace_back(j, v);
    }
    // vbar at xbar itself always belongs to the localization
    xv.emplace_back(0, vbar);
    if (xv.empty()) throw InvalidArgument("no subgradients sampled in the attentive band");

    double worst = -kInf;
    for (const auto& [j, v] : xv) {
        const Vector x = X.col(j);
        const Vector g = k.grad(x);
        const Matrix Dx = X.colwise() - x;
        const Eigen::ArrayXd lin_v = (v.transpose() * Dx).transpose().array();
        const Eigen::ArrayXd lin_g = (g.transpose() * Dx).transpose().array();
        const Eigen::ArrayXd D = (Phi - Phi[j] - lin_g).max(0.0);
        const Eigen::ArrayXd num = lin_v - (F - F[j]);
        for (Eigen::Index i = 0; i < N; ++i) {
            if (i == j) continue;
            ++c.checked_pairs;
            const double tol = cfg.tol * (1.0 + std::abs(F[i]) + std::abs(F[j]));
            if (num[i] <= tol) continue;
            const double req = D[i] > 0.0 ? (num[i] - tol) / D[i] : kInf;
            if (req > worst) {
                worst = req;
                c.bad_x = x;
                c.bad_xprime = X.col(i);
                c.bad_v = v;
            }
        }
    }
    c.required_r = std::max(worst, 0.0);
    for (int e = 0; e <= cfg.max_doubling; ++e) {
        const double r = std::ldexp(1.0, e);
        if (c.required_r <= r) {
            c.r = r;
            c.verified = true;
            c.bad_x.reset();
            c.bad_xprime.reset();
            c.bad_v.reset();
            return c;
        }
    }
    c.r = std::ldexp(1.0, cfg.max_doubling);
    c.reason = "inequality violated for every modulus of the schedule";
    return c;
}

struct CharacterizationReport {
    bool inclusion = false;          ///< xbar in lprox(grad phi*(grad phi(xbar) + lambda v))
    bool global_inequality = false;  ///< subgradient inequality with r = 1/lambda on the box
    Vector tilted_point;
    ProxResult prox;
    bool passed() const { return inclusion && global_inequality; }
    bool consistent() const { return inclusion == global_inequality; }
};

/// Prox characterization of a subgradient v of f at xbar.
inline CharacterizationReport subgradient_prox_characterization_check(const ObjectiveFn& f, const Kernel& k,
                                                                      const Vector& xbar, const Vector& v,
                                                                      double lambda, double tol,
                                                                      const SearchConfig& cfg = {}) {
    CharacterizationReport rep;
    rep.tilted_point = tilt_transform_point(k, xbar, v, lambda);
    rep.prox = lprox(f, k, lambda, rep.tilted_point, cfg);
    const double ptol = std::max(tol, cfg.point_tol);
    for (const auto& x : rep.prox.minimizers)
        if ((x - xbar).norm() <= ptol) rep.inclusion = true;

    // global check on the oracle's own sample set: grid of the search box,
    // chart samples and anchors
    const double fbar = f(xbar);
    bool ok = true;
    auto test = [&](const Vector& x) {
        const double fx = f(x);
        if (!(fx < kInf)) return;
        const double rhs = fbar + v.dot(x - xbar) - bregman_distance(k, x, xbar) / lambda;
        if (fx < rhs - tol * (1.0 + std::abs(fx))) ok = false;
    };
    const Box box = detail::clip_box(cfg.box ? *cfg.box : detail::default_box(rep.tilted_point), k.domain_box());
    const int n = xbar.size() == 1 ? 4001 : 201;
    if (f.search_box) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < (xbar.size() == 2 ? n : 1); ++j) {
                Vector x(xbar.size());
                x[0] = box.lower[0] + (box.upper[0] - box.lower[0]) * i / (n - 1);
                if (xbar.size() == 2) x[1] = box.lower[1] + (box.upper[1] - box.lower[1]) * j / (n - 1);
                test(k.clamp_interior(x));
            }
    }
    for (const auto& ch : f.charts) {
        if (ch.params.dim() != 1) continue;
        for (int i = 0; i < n; ++i)
            test(ch.map(scalar_point(ch.params.lower[0] + (ch.params.upper[0] - ch.params.lower[0]) * i / (n - 1))));
    }
    for (const auto& a : f.anchors) test(a);
    for (const auto& x : rep.prox.minimizers) test(x);
    rep.global_inequality = ok;
    return rep;
}

using ProxMap = std::function<ProxResult(const Vector&)>;

struct SingleValuednessReport {
    int samples = 0;
    int single_valued = 0;
    double fraction = 0.0;
    double max_lipschitz_ratio = 0.0;
    std::optional<double> lipschitz_bound;  ///< Theta / (theta (1 - lambda r))
    std::vector<Vector> multivalued_at;
};

/// Evaluates the prox at samples around ybar (evenly spaced in 1-D, a grid
/// in 2-D) and reports single-valuedness and the empirical Lipschitz ratio.
inline SingleValuednessReport single_valuedness_scan(const ProxMap& prox, const Vector& ybar, double radius,
                                                     int samples,
                                                     std::optional<QuadraticBounds> bounds = std::nullopt,
                                                     double lambda = 0.0, double r = 0.0) {
    SingleValuednessReport rep;
    std::vector<Vector> ys;
    if (ybar.size() == 1) {
        for (int i = 0; i < samples; ++i)
            ys.push_back(scalar_point(ybar[0] - radius + 2.0 * radius * (samples == 1 ? 0.5 : double(i) / (samples - 1))));
    } else {
        const int n = std::max(2, static_cast<int>(std::lround(std::sqrt(samples))));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                ys.push_back(make_point({ybar[0] - radius + 2.0 * radius * i / (n - 1),
                                         ybar[1] - radius + 2.0 * radius * j / (n - 1)}));
    }
    std::vector<std::pair<Vector, Vector>> single;
    for (const auto& y : ys) {
        const ProxResult res = prox(y);
        ++rep.samples;
        if (res.minimizers.size() == 1) {
            ++rep.single_valued;
            single.emplace_back(y, res.minimizers.front());
        } else {
            rep.multivalued_at.push_back(y);
        }
    }
    rep.fraction = rep.samples ? double(rep.single_valued) / rep.samples : 0.0;
    for (std::size_t a = 0; a < single.size(); ++a)
        for (std::size_t b = a + 1; b < single.size(); ++b) {
            const double dy = (single[a].first - single[b].first).norm();
            if (dy > 0.0)
                rep.max_lipschitz_ratio =
                    std::max(rep.max_lipschitz_ratio, (single[a].second - single[b].second).norm() / dy);
        }
    if (bounds && lambda * r < 1.0) rep.lipschitz_bound = bounds->Theta / (bounds->theta * (1.0 - lambda * r));
    return rep;
}

struct LsmadReport {
    bool passed = false;
    double worst_ratio = 0.0;  ///< max |F(x) - F(y) - <grad F(y), x - y>| / D_phi(x, y)
    long checked = 0;
};

/// Two-sided extended descent inequality for every component at random
/// pairs of the region (plus pairs graded toward the region center).
inline LsmadReport lsmad_check(const std::vector<ObjectiveFn>& components, const Kernel& k, double L, const Box& region,
                               int samples, std::uint64_t seed = 0x15adULL, double tol = 1e-12) {
    for (const auto& F : components)
        if (!F.gradient) throw InvalidArgument("L-smad check needs a gradient for every component");
    if (!k.dom_interior(region.lower) || !k.dom_interior(region.upper))
        throw DomainError("region must lie in int(dom phi)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Eigen::Index m = region.dim();
    auto draw = [&]() {
        Vector x(m);
        for (Eigen::Index i = 0; i < m; ++i) x[i] = region.lower[i] + unit(rng) * (region.upper[i] - region.lower[i]);
        return x;
    };
    std::vector<std::pair<Vector, Vector>> pairs;
    for (int s = 0; s < samples; ++s) pairs.emplace_back(draw(), draw());
    const Vector mid = 0.5 * (region.lower + region.upper);
    for (int e = 1; e <= 40; ++e) {
        const Vector d = draw() - mid;
        pairs.emplace_back(mid + std::pow(0.5, e) * d, mid);
        pairs.emplace_back(mid, mid + std::pow(0.5, e) * d);
    }
    LsmadReport rep;
    rep.passed = true;
    for (const auto& [x, y] : pairs) {
        const double D = bregman_distance(k, x, y);
        for (const auto& F : components) {
            const double lhs = std::abs(F(x) - F(y) - F.gradient(y).dot(x - y));
            ++rep.checked;
            if (D > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, lhs / D);
            if (lhs > L * D + tol * (1.0 + std::abs(F(x)) + std::abs(F(y)))) rep.passed = false;
        }
    }
    return rep;
}

}  // namespace bregman
