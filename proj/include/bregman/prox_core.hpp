#pragma once

// Reference evaluation of left and right Bregman proximal mappings and
// envelopes by global grid search plus local polish (m in {1, 2}).

#include "bregman/divergence.hpp"
#include "bregman/objective.hpp"

#include <algorithm>
#include <numeric>
#include <optional>

namespace bregman {

enum class Side { left, right };

inline const char* side_name(Side s) { return s == Side::left ? "left" : "right"; }

struct SearchConfig {
    /// Search box for the identity chart; defaults to base +- (5 + 2|base|).
    std::optional<Box> box;
    int resolution = 20001;     ///< grid points in 1-D
    int resolution_2d = 201;    ///< grid points per axis in 2-D
    double value_tol = 1e-9;
    double point_tol = 1e-6;
    double floor = -1e12;
    int polish_iterations = 60;
    int max_candidates = 16;
};

struct ProxQuery {
    ObjectiveFn f;
    Kernel k;
    double lambda = 1.0;
    Vector base;
    Side side = Side::left;
};

struct SearchDiagnostics {
    long grid_points = 0;
    int candidates = 0;
    Box box;
    std::string method;
};

struct ProxResult {
    std::vector<Vector> minimizers;
    double env_value = kInf;
    bool multivalued = false;
    SearchDiagnostics diagnostics;
    /// Right prox only: minimizers of the translated (dual) problem.
    std::vector<Vector> dual_minimizers;

    /// The single minimizer; throws MultivaluedProx otherwise.
    const Vector& unique(const std::string& context = "prox") const {
        if (minimizers.size() != 1)
            throw MultivaluedProx(context + " is not single-valued here (" + std::to_string(minimizers.size()) +
                                      " minimizers)",
                                  minimizers);
        return minimizers.front();
    }
};

/// True when every point of a lies within tol of some point of b and vice versa.
inline bool same_point_sets(const std::vector<Vector>& a, const std::vector<Vector>& b, double tol) {
    auto covered = [tol](const std::vector<Vector>& p, const std::vector<Vector>& q) {
        for (const auto& x : p) {
            bool hit = false;
            for (const auto& y : q)
                if ((x - y).norm() <= tol) {
                    hit = true;
                    break;
                }
            if (!hit) return false;
        }
        return true;
    };
    return covered(a, b) && covered(b, a);
}

namespace detail {

struct Candidate {
    Vector x;
    double value;
};

inline double finite_or_inf(double v) { return std::isnan(v) ? kInf : v; }

/// Golden-section search on [a, b]; returns the best point ever evaluated.
inline std::pair<double, double> golden_min(const std::function<double(double)>& q, double a, double b,
                                            int iterations) {
    constexpr double r = 0.6180339887498949;
    double best_t = a, best_v = finite_or_inf(q(a));
    auto consider = [&](double t, double v) {
        if (v < best_v) {
            best_v = v;
            best_t = t;
        }
    };
    consider(b, finite_or_inf(q(b)));
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = finite_or_inf(q(c)), fd = finite_or_inf(q(d));
    consider(c, fc);
    consider(d, fd);
    for (int i = 0; i < iterations && b - a > 0.0; ++i) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = finite_or_inf(q(c));
            consider(c, fc);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = finite_or_inf(q(d));
            consider(d, fd);
        }
    }
    return {best_t, best_v};
}

/// Local polish of Q over a parameter box, starting at t with initial
/// bracket half-widths h. 1-D: golden section; 2-D: coordinate descent with
/// golden line searches.
inline Candidate polish(const std::function<double(const Vector&)>& Q, const Box& params, Vector t, Vector h,
                        int iterations) {
    double v = finite_or_inf(Q(t));
    const Eigen::Index d = t.size();
    const int sweeps = d == 1 ? 1 : 40;
    for (int s = 0; s < sweeps; ++s) {
        double max_h = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) {
            if (h[i] <= 0.0) continue;
            const double lo = std::max(params.lower[i], t[i] - h[i]);
            const double hi = std::min(params.upper[i], t[i] + h[i]);
            Vector probe = t;
            auto line = [&](double s_) {
                probe[i] = s_;
                return Q(probe);
            };
            auto [ti, vi] = golden_min(line, lo, hi, iterations);
            const double move = std::abs(ti - t[i]);
            if (vi < v) {
                v = vi;
                t[i] = ti;
            }
            if (move < 0.9 * h[i]) h[i] *= 0.5;
            max_h = std::max(max_h, h[i]);
        }
        if (max_h < 1e-12) break;
    }
    // parabolic refinement: golden section stalls at sqrt(eps) where Q is flat
    for (Eigen::Index i = 0; i < d; ++i) {
        for (double delta : {1e-3, 1e-4, 1e-5}) {
            const double dl = delta * std::max(1.0, std::abs(t[i]));
            if (t[i] - dl < params.lower[i] || t[i] + dl > params.upper[i]) continue;
            Vector a = t, b = t;
            a[i] -= dl;
            b[i] += dl;
            const double qa = finite_or_inf(Q(a)), qb = finite_or_inf(Q(b));
            if (!(qa < kInf && qb < kInf && v < kInf)) continue;
            const double curv = qa - 2.0 * v + qb;
            if (!(curv > 0.0)) continue;
            const double step = -0.5 * dl * (qb - qa) / curv;
            if (std::abs(step) > dl) continue;
            Vector n = t;
            n[i] += step;
            const double qn = finite_or_inf(Q(n));
            if (qn <= v + 4e-16 * (1.0 + std::abs(v))) {
                t = n;
                v = std::min(v, qn);
            }
        }
    }
    return {t, v};
}

inline Box default_box(const Vector& base) {
    Box b{base, base};
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        const double w = 5.0 + 2.0 * std::abs(base[i]);
        b.lower[i] = base[i] - w;
        b.upper[i] = base[i] + w;
    }
    return b;
}

/// Grid search over every chart plus anchors, then polish. Returns all
/// polished candidates; `grid_min` receives the smallest grid value.
inline std::vector<Candidate> search_candidates(const std::function<double(const Vector&)>& P,
                                                const std::vector<Chart>& charts,
                                                const std::vector<Vector>& anchors, const SearchConfig& cfg,
                                                SearchDiagnostics& diag, double& grid_min) {
    std::vector<Candidate> out;
    grid_min = kInf;
    for (const auto& chart : charts) {
        const Eigen::Index d = chart.params.dim();
        if (d < 1 || d > 2) throw InvalidArgument("grid oracle supports 1 or 2 chart parameters");
        auto Q = [&](const Vector& t) { return finite_or_inf(P(chart.map(chart.params.clamp(t)))); };
        std::vector<int> n(static_cast<std::size_t>(d));
        Vector step(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double w = chart.params.upper[i] - chart.params.lower[i];
            n[i] = w > 0.0 ? (d == 1 ? cfg.resolution : cfg.resolution_2d) : 1;
            step[i] = n[i] > 1 ? w / (n[i] - 1) : 0.0;
        }
        auto param_at = [&](int i0, int i1) {
            Vector t(d);
            t[0] = chart.params.lower[0] + i0 * step[0];
            if (d == 2) t[1] = chart.params.lower[1] + i1 * step[1];
            return t;
        };
        const int n0 = n[0], n1 = d == 2 ? n[1] : 1;
        std::vector<double> vals(static_cast<std::size_t>(n0) * n1);
        for (int i0 = 0; i0 < n0; ++i0)
            for (int i1 = 0; i1 < n1; ++i1) {
                const double v = Q(param_at(i0, i1));
                vals[static_cast<std::size_t>(i0) * n1 + i1] = v;
                grid_min = std::min(grid_min, v);
            }
        diag.grid_points += static_cast<long>(vals.size());

        std::vector<std::pair<double, std::size_t>> minima;
        for (int i0 = 0; i0 < n0; ++i0)
            for (int i1 = 0; i1 < n1; ++i1) {
                const std::size_t idx = static_cast<std::size_t>(i0) * n1 + i1;
                const double v = vals[idx];
                if (!(v < kInf)) continue;
                bool local = true;
                for (int a = -1; a <= 1 && local; ++a)
                    for (int b = -1; b <= 1; ++b) {
                        if ((a == 0 && b == 0) || (d == 1 && b != 0)) continue;
                        const int j0 = i0 + a, j1 = i1 + b;
                        if (j0 < 0 || j0 >= n0 || j1 < 0 || j1 >= n1) continue;
                        if (vals[static_cast<std::size_t>(j0) * n1 + j1] < v) {
                            local = false;
                            break;
                        }
                    }
                if (local) minima.emplace_back(v, idx);
            }
        std::sort(minima.begin(), minima.end());
        // Plateaus yield runs of equal local minima; keep one per run of
        // adjacent indices in 1-D.
        std::vector<std::pair<double, std::size_t>> kept;
        for (const auto& m : minima) {
            bool adjacent = false;
            for (const auto& k : kept) {
                const long di0 = static_cast<long>(m.second / n1) - static_cast<long>(k.second / n1);
                const long di1 = static_cast<long>(m.second % n1) - static_cast<long>(k.second % n1);
                if (std::abs(di0) <= 1 && std::abs(di1) <= 1 && std::abs(m.first - k.first) <= cfg.value_tol) {
                    adjacent = true;
                    break;
                }
            }
            if (!adjacent) kept.push_back(m);
            if (static_cast<int>(kept.size()) >= cfg.max_candidates) break;
        }
        for (const auto& m : kept) {
            const int i0 = static_cast<int>(m.second / n1), i1 = static_cast<int>(m.second % n1);
            const Vector t0 = param_at(i0, i1);
            Candidate c = polish(Q, chart.params, t0, step, cfg.polish_iterations);
            if (!(c.value <= m.first)) c = Candidate{t0, m.first};
            out.push_back(Candidate{chart.map(chart.params.clamp(c.x)), c.value});
        }
        diag.candidates += static_cast<int>(kept.size());
    }
    for (const auto& a : anchors) {
        const double v = finite_or_inf(P(a));
        if (v < kInf) out.push_back(Candidate{a, v});
    }
    return out;
}

inline ProxResult assemble(std::vector<Candidate> cands, double lambda, const SearchConfig& cfg) {
    ProxResult r;
    cands.erase(std::remove_if(cands.begin(), cands.end(), [](const Candidate& c) { return !(c.value < kInf); }),
                cands.end());
    if (cands.empty()) throw InvalidArgument("search region misses dom f (prox objective infinite everywhere)");
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
    const double vmin = cands.front().value;
    if (vmin < cfg.floor) throw NotProxBounded(lambda);
    r.env_value = vmin;
    for (const auto& c : cands) {
        if (c.value > vmin + cfg.value_tol) break;
        bool dup = false;
        for (const auto& m : r.minimizers)
            if ((m - c.x).norm() <= cfg.point_tol) {
                dup = true;
                break;
            }
        if (!dup) r.minimizers.push_back(c.x);
    }
    r.multivalued = r.minimizers.size() > 1;
    return r;
}

/// Search box clipped to the closure of a domain box.
inline Box clip_box(const Box& box, const Box& dom) {
    Box b = box;
    for (Eigen::Index i = 0; i < b.dim(); ++i) {
        b.lower[i] = std::max(b.lower[i], dom.lower[i]);
        b.upper[i] = std::min(b.upper[i], dom.upper[i]);
        if (b.lower[i] > b.upper[i]) throw InvalidArgument("search box does not meet the kernel domain");
    }
    return b;
}

/// Follows the ray from y through a boundary minimizer and reports whether
/// the objective falls below the floor.
inline bool ray_escapes(const std::function<double(const Vector&)>& P, const Vector& y, const Vector& xb,
                        double floor) {
    const Vector d = xb - y;
    if (d.norm() == 0.0) return false;
    for (int k = 1; k <= 10; ++k) {
        const double v = P(y + std::pow(10.0, k) * d);
        if (!std::isnan(v) && v < floor) return true;
    }
    return false;
}

}  // namespace detail

/// Left envelope and prox: min_x f(x) + (1/lambda) D_phi(x, y).
inline ProxResult left_envelope(const ProxQuery& q, const SearchConfig& cfg = {}) {
    const Kernel& k = q.k;
    const Eigen::Index m = q.base.size();
    if (!(q.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (m != k.dim() || m != q.f.dim) throw InvalidArgument("dimension mismatch in prox query");
    if (m < 1 || m > 2) throw InvalidArgument("grid oracle supports m in {1, 2}");
    if (!k.dom_interior(q.base)) throw DomainError("left prox base point must lie in int(dom phi)");
    if (q.f.prox_bounded_threshold && q.lambda > *q.f.prox_bounded_threshold) throw NotProxBounded(q.lambda);

    const double inv = 1.0 / q.lambda;
    auto P = [&](const Vector& x) {
        const double fx = q.f.value(x);
        if (!(fx < kInf)) return kInf;
        return fx + inv * bregman_distance(k, x, q.base);
    };
    SearchDiagnostics diag;
    diag.method = "grid+polish";
    diag.box = detail::clip_box(cfg.box ? *cfg.box : detail::default_box(q.base), k.domain_box());
    std::vector<Chart> charts = q.f.charts;
    if (q.f.search_box) {
        const Box box = diag.box;
        charts.insert(charts.begin(),
                      Chart{box, [&k](const Vector& t) { return Vector(k.clamp_interior(t)); }, true});
    }
    double grid_min = kInf;
    auto cands = detail::search_candidates(P, charts, q.f.anchors, cfg, diag, grid_min);
    if (grid_min < cfg.floor) throw NotProxBounded(q.lambda);
    ProxResult r = detail::assemble(cands, q.lambda, cfg);
    r.diagnostics = diag;
    if (q.f.search_box) {
        for (const auto& x : r.minimizers) {
            for (Eigen::Index i = 0; i < m; ++i) {
                const double w = (diag.box.upper[i] - diag.box.lower[i]) * 1e-3;
                const bool at_edge = (x[i] - diag.box.lower[i] <= w && std::isinf(k.domain_box().lower[i])) ||
                                     (diag.box.upper[i] - x[i] <= w && std::isinf(k.domain_box().upper[i]));
                if (at_edge && detail::ray_escapes(P, q.base, x, cfg.floor)) throw NotProxBounded(q.lambda);
            }
        }
    }
    return r;
}

/// Right envelope and prox: min_x f(x) + (1/lambda) D_phi(y, x), computed
/// directly and through the translation to a left prox of f o grad phi*
/// relative to phi*, with a hard cross-check.
inline ProxResult right_envelope(const ProxQuery& q, const SearchConfig& cfg = {}) {
    const Kernel& k = q.k;
    const Eigen::Index m = q.base.size();
    if (!(q.lambda > 0.0)) throw InvalidArgument("lambda must be positive");
    if (!k.full_domain()) throw InvalidArgument("right prox requires dom phi = R^m");
    if (m != k.dim() || m != q.f.dim) throw InvalidArgument("dimension mismatch in prox query");
    if (m < 1 || m > 2) throw InvalidArgument("grid oracle supports m in {1, 2}");
    if (q.f.prox_bounded_threshold && q.lambda > *q.f.prox_bounded_threshold) throw NotProxBounded(q.lambda);

    const double inv = 1.0 / q.lambda;
    const Box box = cfg.box ? *cfg.box : detail::default_box(q.base);

    // (a) direct
    auto P = [&](const Vector& x) {
        const double fx = q.f.value(x);
        if (!(fx < kInf)) return kInf;
        return fx + inv * bregman_distance(k, q.base, x);
    };
    SearchDiagnostics diag;
    diag.method = "grid+polish, dual-path";
    diag.box = box;
    std::vector<Chart> charts = q.f.charts;
    if (q.f.search_box) charts.insert(charts.begin(), identity_chart(box));
    double grid_min = kInf;
    auto cands = detail::search_candidates(P, charts, q.f.anchors, cfg, diag, grid_min);
    if (grid_min < cfg.floor) throw NotProxBounded(q.lambda);
    ProxResult direct = detail::assemble(cands, q.lambda, cfg);
    if (q.f.search_box)
        for (const auto& x : direct.minimizers)
            for (Eigen::Index i = 0; i < m; ++i) {
                const double w = (box.upper[i] - box.lower[i]) * 1e-3;
                if ((x[i] - box.lower[i] <= w || box.upper[i] - x[i] <= w) &&
                    detail::ray_escapes(P, q.base, x, cfg.floor))
                    throw NotProxBounded(q.lambda);
            }

    // (b) translated: left prox of g = f o grad phi* w.r.t. phi* at grad phi(y).
    // The dual search grid is the image of the primal grid under grad phi.
    const Kernel kc = k.conjugate();
    ObjectiveFn g = compose_with_conj_grad(q.f, k);
    if (q.f.search_box) {
        g.charts.insert(g.charts.begin(), Chart{box, [&k](const Vector& t) { return Vector(k.grad(t)); }, false});
        g.search_box = false;
    }
    const Vector ydual = k.grad(q.base);
    auto Pd = [&](const Vector& w) {
        const double gw = g.value(w);
        if (!(gw < kInf)) return kInf;
        return gw + inv * bregman_distance(kc, w, ydual);
    };
    SearchDiagnostics dd;
    double dual_min = kInf;
    auto dc = detail::search_candidates(Pd, g.charts, g.anchors, cfg, dd, dual_min);
    ProxResult dual = detail::assemble(dc, q.lambda, cfg);
    std::vector<Vector> mapped;
    for (const auto& w : dual.minimizers) mapped.push_back(k.conj_grad(w));

    const double env_tol = 1e-6 * (1.0 + std::abs(direct.env_value));
    if (std::abs(direct.env_value - dual.env_value) > env_tol || !same_point_sets(direct.minimizers, mapped, 1e-4))
        throw Error("right prox: direct and translated evaluations disagree");
    direct.dual_minimizers = dual.minimizers;
    direct.diagnostics = diag;
    direct.diagnostics.grid_points += dd.grid_points;
    return direct;
}

inline ProxResult evaluate_prox(const ProxQuery& q, const SearchConfig& cfg = {}) {
    return q.side == Side::left ? left_envelope(q, cfg) : right_envelope(q, cfg);
}

/// Shorthand for the left prox query.
inline ProxResult lprox(const ObjectiveFn& f, const Kernel& k, double lambda, const Vector& y,
                        const SearchConfig& cfg = {}) {
    return left_envelope(ProxQuery{f, k, lambda, y, Side::left}, cfg);
}

inline ProxResult rprox(const ObjectiveFn& f, const Kernel& k, double lambda, const Vector& y,
                        const SearchConfig& cfg = {}) {
    return right_envelope(ProxQuery{f, k, lambda, y, Side::right}, cfg);
}

/// z = grad phi*(grad phi(y) + lambda v).
inline Vector tilt_transform_point(const Kernel& k, const Vector& y, const Vector& v, double lambda) {
    if (!k.dom_interior(y)) throw DomainError("tilt base point must lie in int(dom phi)");
    const Vector w = k.grad(y) + lambda * v;
    if (!k.conj_dom_interior(w)) throw DomainError("tilted dual point outside int(dom phi*)");
    return k.conj_grad(w);
}

/// Checks lprox_{f - <.,v>}(y) = lprox_f(z) and the matching envelope identity.
inline bool tilt_identity_check(const ObjectiveFn& f, const Kernel& k, const Vector& y, const Vector& v,
                                double lambda, double tol, const SearchConfig& cfg = {}) {
    const Vector z = tilt_transform_point(k, y, v, lambda);
    const ProxResult lhs = lprox(tilt(f, v), k, lambda, y, cfg);
    const ProxResult rhs = lprox(f, k, lambda, z, cfg);
    if (!same_point_sets(lhs.minimizers, rhs.minimizers, std::max(tol, cfg.point_tol))) return false;
    const double env_rhs = rhs.env_value + bregman_distance(k, z, y) / lambda - v.dot(z);
    return std::abs(lhs.env_value - env_rhs) <= tol * (1.0 + std::abs(lhs.env_value));
}

struct ProxBoundEstimate {
    double lambda_f = 0.0;  ///< +inf when every grid value passed; 0 when none did
    bool below_grid = false;
    std::vector<double> sampled_inf;  ///< per grid lambda, at the largest box
    std::optional<double> liminf_ratio;
};

/// Largest grid lambda for which the sampled infimum of f + (1/lambda) phi
/// stabilizes over boxes of radius 10^j around the probe (j = 0..6).
inline ProxBoundEstimate prox_bounded_estimate(const ObjectiveFn& f, const Kernel& k, std::vector<double> lambdas,
                                               const Vector& probe, double floor = -1e12) {
    if (!k.dom_interior(probe)) throw DomainError("probe must lie in int(dom phi)");
    std::sort(lambdas.begin(), lambdas.end());
    const Eigen::Index m = probe.size();
    const int n = m == 1 ? 2001 : 101;
    std::vector<Vector> pts;
    for (int j = 0; j <= 6; ++j) {
        const double R = std::pow(10.0, j);
        Box b = detail::clip_box(Box{probe.array() - R, probe.array() + R}, k.domain_box());
        for (int i0 = 0; i0 < n; ++i0)
            for (int i1 = 0; i1 < (m == 2 ? n : 1); ++i1) {
                Vector x(m);
                x[0] = b.lower[0] + (b.upper[0] - b.lower[0]) * i0 / (n - 1);
                if (m == 2) x[1] = b.lower[1] + (b.upper[1] - b.lower[1]) * i1 / (n - 1);
                pts.push_back(k.clamp_interior(x));
            }
    }
    const std::size_t per_box = pts.size() / 7;
    for (const auto& a : f.anchors) pts.insert(pts.begin(), a);
    const std::size_t extra = f.anchors.size();

    ProxBoundEstimate est;
    bool prefix_ok = true;
    for (double lam : lambdas) {
        double cum = kInf, prev = kInf;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double fx = f.value(pts[i]);
            const double px = k.value(pts[i]);
            if (fx < kInf && px < kInf) cum = std::min(cum, fx + px / lam);
            if (i + 1 == extra + 6 * per_box) prev = cum;
        }
        est.sampled_inf.push_back(cum);
        const bool stable = cum > floor && std::abs(cum - prev) <= 1e-6 * (1.0 + std::abs(prev));
        if (stable && prefix_ok)
            est.lambda_f = lam;
        else
            prefix_ok = false;
    }
    if (prefix_ok && !lambdas.empty()) est.lambda_f = kInf;
    est.below_grid = !lambdas.empty() && !(est.lambda_f >= lambdas.front());
    if (k.full_domain()) {
        double r = kInf;
        const int dirs = m == 1 ? 2 : 16;
        for (int e = 3; e <= 6; ++e)
            for (int d = 0; d < dirs; ++d) {
                Vector u(m);
                if (m == 1)
                    u[0] = d == 0 ? 1.0 : -1.0;
                else {
                    const double th = 2.0 * M_PI * d / dirs;
                    u << std::cos(th), std::sin(th);
                }
                const Vector x = probe + std::pow(10.0, e) * u;
                const double fx = f.value(x), px = k.value(x);
                if (fx < kInf && px > 0.0 && px < kInf) r = std::min(r, fx / px);
            }
        if (r < kInf) est.liminf_ratio = r;
    }
    return est;
}

}  // namespace bregman
