#pragma once

// Experiment runners shared by the CLI subcommands and run-suite.

#include "bregman/algorithms.hpp"
#include "bregman/analytic_prox.hpp"
#include "bregman/catalog.hpp"
#include "bregman/config.hpp"
#include "bregman/csv.hpp"
#include "bregman/envelope_calculus.hpp"
#include "bregman/figure.hpp"
#include "bregman/regularity.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

namespace bregman::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kConfigError = 2, kUnbounded = 3 };

struct Metric {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool passed = true;
};

struct Outcome {
    std::vector<Metric> metrics;
    bool passed() const {
        for (const auto& m : metrics)
            if (!m.passed) return false;
        return true;
    }
    void add(const std::string& name, double value, double tol, bool ok) { metrics.push_back({name, value, tol, ok}); }
};

// ---------------------------------------------------------------- builders

inline Kernel kernel_from(const ConfigSection& s, Eigen::Index dim) {
    const std::string kind = s.get("kernel", "half_squared_norm");
    if (kind == "epigraph") return epigraph_example_kernel();
    std::vector<double> params;
    if (kind == "power") params = {s.get_double("q")};
    if (kind == "square_plus_power") params = s.get_list("kernel_params");
    try {
        return make_kernel(kind, params, s.get_int("dim", dim));
    } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("[") + s.name + "] " + e.what());
    }
}

inline ObjectiveFn objective_from(const ConfigSection& s, Eigen::Index dim = 1) {
    const std::string kind = s.get("f");
    dim = s.get_int("dim", dim);
    if (kind == "power") return catalog::power(s.get_double("p"), dim);
    if (kind == "abs") return catalog::abs_value(s.get_double("scale", 1.0), s.get_double("center", 0.0));
    if (kind == "indicator_interval")
        return catalog::indicator_interval(s.get_double("lo"), s.get_double("hi"), dim);
    if (kind == "quadratic") return catalog::quadratic(s.get_double("a"), s.get_double("center", 0.0), dim);
    if (kind == "epigraph") return catalog::epigraph_indicator();
    if (kind == "segment") return catalog::segment_indicator();
    throw ConfigError("[" + s.name + "] unknown objective '" + kind + "'");
}

/// Points from `key` (';'-separated) or from key_min, key_max, key_step.
inline std::vector<Vector> points_from(const ConfigSection& s, const std::string& key) {
    std::vector<Vector> pts;
    if (s.has(key)) {
        pts = s.get_points(key);
    } else if (s.has(key + "_min")) {
        const double lo = s.get_double(key + "_min"), hi = s.get_double(key + "_max"),
                     st = s.get_double(key + "_step");
        if (!(st > 0.0)) throw ConfigError("[" + s.name + "] " + key + "_step must be positive");
        const long n = static_cast<long>(std::floor((hi - lo) / st + 1e-9)) + 1;
        for (long i = 0; i < n; ++i) pts.push_back(scalar_point(lo + st * i));
    }
    if (pts.empty()) throw ConfigError("[" + s.name + "] empty point list '" + key + "'");
    return pts;
}

inline SearchConfig search_from(const ConfigSection& s) {
    SearchConfig c;
    c.resolution = static_cast<int>(s.get_int("resolution", c.resolution));
    c.resolution_2d = static_cast<int>(s.get_int("resolution_2d", c.resolution_2d));
    if (s.has("box_lo")) c.box = Box{Vector(s.get_points("box_lo").at(0)), Vector(s.get_points("box_hi").at(0))};
    return c;
}

/// Closed-form power prox applies for f = power(p), phi = power(q) with
/// q = alpha + (1 - alpha) p, alpha in {2, 3, 4}.
inline std::optional<PowerProxSpec> analytic_spec(const ConfigSection& s, double lambda) {
    if (s.get("f") != "power" || s.get("kernel", "") != "power" || s.get_int("dim", 1) != 1) return std::nullopt;
    const double p = s.get_double("p"), q = s.get_double("q");
    if (!(p > 0.0 && p < 1.0)) return std::nullopt;
    const double alpha = (q - p) / (1.0 - p);
    const long a = std::lround(alpha);
    if (std::abs(alpha - double(a)) > 1e-12 || a < 2 || a > 4) return std::nullopt;
    return make_power_spec(p, static_cast<int>(a), lambda);
}

inline Side side_from(const ConfigSection& s) {
    const std::string side = s.get("side", "left");
    if (side == "left") return Side::left;
    if (side == "right") return Side::right;
    throw ConfigError("[" + s.name + "] side must be left or right");
}

/// Oracle or closed-form prox for the section's (f, kernel, lambda, side).
inline ProxMap prox_from(const ConfigSection& s, const ObjectiveFn& f, const Kernel& k, double lambda, Side side) {
    if (side == Side::left) {
        if (auto spec = analytic_spec(s, lambda)) return analytic_power_prox(*spec);
        return oracle_left_prox(f, k, lambda, search_from(s));
    }
    if (!k.full_domain()) throw ConfigError("[" + s.name + "] right prox requires dom phi = R^m; kernel " + k.name());
    return oracle_right_prox(f, k, lambda, search_from(s));
}

inline std::string flag(bool b) { return b ? "1" : "0"; }

// ---------------------------------------------------------------- runners

/// Columns: y, minimizers, env, multivalued, agreement.
inline Outcome run_prox(const ConfigSection& s, std::ostream& out) {
    const double lambda = s.get_double("lambda");
    const Side side = side_from(s);
    const Kernel k = kernel_from(s, 1);
    const ObjectiveFn f = objective_from(s, k.dim());
    const auto ys = points_from(s, "y");
    const auto spec = side == Side::left ? analytic_spec(s, lambda) : std::nullopt;
    const bool compare = spec && s.get_bool("compare", true);
    const ProxMap prox = prox_from(s, f, k, lambda, side);
    const SearchConfig cfg = search_from(s);
    CsvWriter csv(out, {"y", "minimizers", "env", "multivalued", "agreement"});
    Outcome o;
    int agree = 0, compared = 0;
    for (const auto& y : ys) {
        const ProxResult r = prox(y);
        std::string agreement;
        if (compare) {
            const ProxResult ref = lprox(f, k, lambda, y, cfg);
            const bool ok = same_point_sets(r.minimizers, ref.minimizers, 1e-4) &&
                            std::abs(r.env_value - ref.env_value) <= 1e-6 * (1.0 + std::abs(ref.env_value));
            agreement = flag(ok);
            agree += ok;
            ++compared;
        }
        csv.row({format_point(y), format_points(r.minimizers), format_number(r.env_value), flag(r.multivalued),
                 agreement});
    }
    o.add("points", double(ys.size()), 0.0, true);
    if (compared) o.add("agreement_fraction", double(agree) / compared, 1.0, agree == compared);
    return o;
}

/// Columns: y, env, side.
inline Outcome run_envelope(const ConfigSection& s, std::ostream& out) {
    const double lambda = s.get_double("lambda");
    const Side side = side_from(s);
    const Kernel k = kernel_from(s, 1);
    const ObjectiveFn f = objective_from(s, k.dim());
    const auto ys = points_from(s, "y");
    const ProxMap prox = prox_from(s, f, k, lambda, side);
    CsvWriter csv(out, {"y", "env", "side"});
    for (const auto& y : ys) csv.row({format_point(y), format_number(prox(y).env_value), side_name(side)});
    Outcome o;
    o.add("points", double(ys.size()), 0.0, true);
    return o;
}

/// Columns: y, formula, fd, abs_err, rel_err, single_valued, passed.
/// Points are primal; the composed formula is evaluated at grad phi(y).
inline Outcome run_grad_check(const ConfigSection& s, std::ostream& out) {
    const double lambda = s.get_double("lambda");
    const double tol = s.get_double("tol", 1e-4);
    const std::string which = s.get("formula");
    const Kernel k = kernel_from(s, 1);
    const ObjectiveFn f = objective_from(s, k.dim());
    const auto ys = points_from(s, "y");
    const Side side = which == "right" ? Side::right : Side::left;
    if (which != "composed" && which != "left" && which != "right")
        throw ConfigError("[" + s.name + "] formula must be composed, left or right");
    const ProxMap prox = prox_from(s, f, k, lambda, side);

    std::function<Vector(const Vector&)> formula;
    ScalarFn env;
    std::function<bool(const Vector&)> single;
    std::vector<Vector> pts;
    double max_gap = 0.0;
    if (which == "composed") {
        formula = [&](const Vector& w) { return left_env_grad_composed(prox, k, lambda, w); };
        env = [&](const Vector& w) { return prox(k.conj_grad(w)).env_value; };
        single = [&](const Vector& w) { return !prox(k.conj_grad(w)).multivalued; };
        for (const auto& y : ys) pts.push_back(k.grad(y));
    } else if (which == "left") {
        formula = [&](const Vector& y) { return left_env_grad(prox, k, lambda, y); };
        env = envelope_of(prox);
        single = [&](const Vector& y) { return !prox(y).multivalued; };
        pts = ys;
    } else {
        formula = [&](const Vector& y) {
            const RightGradient g = right_env_grad(prox, k, lambda, y);
            max_gap = std::max(max_gap, g.gap / (1.0 + g.primal.norm()));
            return g.primal;
        };
        env = envelope_of(prox);
        single = [&](const Vector& y) { return !prox(y).multivalued; };
        pts = ys;
    }
    const auto rows = grad_check(formula, env, single, pts, tol);
    CsvWriter csv(out, {"y", "formula", "fd", "abs_err", "rel_err", "single_valued", "passed"});
    double worst = 0.0;
    int checked = 0;
    bool ok = true;
    for (const auto& r : rows) {
        csv.row({format_point(r.y), r.single_valued ? format_point(r.formula) : "",
                 r.single_valued ? format_point(r.fd) : "", format_number(r.abs_err), format_number(r.rel_err),
                 flag(r.single_valued), flag(r.passed)});
        if (!r.single_valued) continue;
        ++checked;
        worst = std::max(worst, r.rel_err);
        ok = ok && r.passed;
    }
    Outcome o;
    o.add("single_valued_points", checked, double(s.get_int("min_points", 1)), checked >= s.get_int("min_points", 1));
    o.add("max_rel_err", worst, tol, ok);
    if (which == "right") o.add("max_dual_gap", max_gap, 1e-8, max_gap <= 1e-8);
    return o;
}

/// key: value lines.
inline Outcome run_certify(const ConfigSection& s, std::ostream& out) {
    const Kernel k = kernel_from(s, s.get("f", "epigraph") == "epigraph" ? 2 : 1);
    ConfigSection fs = s;
    if (!fs.has("f")) fs.values["f"] = "epigraph";
    const ObjectiveFn f = objective_from(fs, k.dim());
    const Vector xbar = s.has("xbar") ? s.get_points("xbar").at(0) : Vector(Vector::Zero(k.dim()));
    const Vector vbar = s.has("vbar") ? s.get_points("vbar").at(0) : Vector(make_point({0.0, -1.0}));
    if (xbar.size() != k.dim() || vbar.size() != k.dim()) throw ConfigError("[" + s.name + "] xbar/vbar dimension");
    CertifyConfig cc;
    cc.resolution = static_cast<int>(s.get_int("resolution", cc.resolution));
    cc.chart_resolution = static_cast<int>(s.get_int("chart_resolution", cc.chart_resolution));
    cc.max_doubling = static_cast<int>(s.get_int("max_doubling", cc.max_doubling));
    const auto c = certify_prox_regularity(f, k, xbar, vbar, s.get_double("eps", 0.3), cc);
    out << "kernel: " << c.kernel << '\n'
        << "xbar: " << format_point(c.xbar) << '\n'
        << "vbar: " << format_point(c.vbar) << '\n'
        << "eps: " << format_number(c.eps) << '\n'
        << "attentive_band: " << format_number(c.attentive_band) << '\n'
        << "grid_resolution: " << cc.resolution << '\n'
        << "checked_pairs: " << c.checked_pairs << '\n'
        << "verified: " << (c.verified ? "true" : "false") << '\n'
        << "r: " << format_number(c.r) << '\n'
        << "required_r: " << format_number(c.required_r) << '\n';
    if (!c.reason.empty()) out << "reason: " << c.reason << '\n';
    if (c.bad_x) out << "violation_x: " << format_point(*c.bad_x) << '\n';
    if (c.bad_xprime) out << "violation_xprime: " << format_point(*c.bad_xprime) << '\n';
    if (c.bad_v) out << "violation_v: " << format_point(*c.bad_v) << '\n';
    Outcome o;
    const std::string expect = s.get("expect", "any");
    if (expect != "any" && expect != "verified" && expect != "not_verified")
        throw ConfigError("[" + s.name + "] expect must be verified, not_verified or any");
    const bool ok = expect == "any" || (expect == "verified") == c.verified;
    o.add(c.verified ? "verified_r" : "required_r", c.verified ? c.r : c.required_r, 0.0, ok);
    return o;
}

struct BpamSetup {
    SparseToy toy;
    XUpdate x_update;
    UUpdate u_update;
    Vector u0, x0;
    BpamOptions opt;
};

inline BpamSetup bpam_from(const ConfigSection& s, std::uint64_t seed) {
    const std::string problem = s.get("problem", "sparse_toy");
    if (problem != "sparse_toy") throw ConfigError("[" + s.name + "] unknown problem '" + problem + "'");
    BpamSetup b;
    const int n = static_cast<int>(s.get_int("n", 20));
    b.toy = make_sparse_toy(seed, n, s.get_double("p", 0.5), static_cast<int>(s.get_int("alpha", 2)),
                            s.get_double("lambda", 0.2), s.get_double("mu", 50.0), s.get_double("sigma_scale", 0.1),
                            s.get_double("omega_scale", 0.1), static_cast<int>(s.get_int("nonzeros", 4)));
    const BpamProblem& p = b.toy.problem;
    b.x_update = make_power_x_update(p, b.toy.p, b.toy.alpha);
    if (s.has("M"))
        b.u_update = make_palm_u_update(p, s.get_double("M"), classical_prox_least_squares(b.toy.B, b.toy.b, b.toy.mu));
    else
        b.u_update = make_newton_u_update(p);
    const std::string init = s.get("init", "zero");
    b.x0 = Vector::Zero(n);
    if (init == "zero") b.u0 = Vector::Zero(n);
    else if (init == "least_squares") b.u0 = b.toy.B.colPivHouseholderQr().solve(b.toy.b);
    else throw ConfigError("[" + s.name + "] init must be zero or least_squares");
    b.opt.max_iter = static_cast<int>(s.get_int("max_iter", 10000));
    b.opt.residual_tol = s.get_double("tol", 1e-7);
    b.opt.step_tol = s.get_double("step_tol", 1e-6);
    b.opt.decrease_tol = s.get_double("decrease_tol", 1e-9);
    return b;
}

/// Columns: t, F, decrease_slack, rho_x, rho_u, step_norm.
inline Outcome run_bpam(const ConfigSection& s, std::uint64_t seed, std::ostream& out) {
    BpamSetup b = bpam_from(s, seed);
    const BpamProblem& p = b.toy.problem;
    const IterateTrace tr = bpam_run(p, b.x_update, b.u_update, b.u0, b.x0, b.opt);
    CsvWriter csv(out, {"t", "F", "decrease_slack", "rho_x", "rho_u", "step_norm"});
    for (const auto& r : tr.records)
        csv.row({std::to_string(r.t), format_number(r.F), format_number(r.decrease_slack), format_number(r.rho_x),
                 format_number(r.rho_u), format_number(r.step_norm)});
    Outcome o;
    double worst_rel = kInf;
    for (std::size_t t = 1; t < tr.records.size(); ++t)
        worst_rel = std::min(worst_rel, tr.records[t].decrease_slack / (1.0 + std::abs(tr.records[t - 1].F)));
    const double res_tol = s.get_double("residual_check", 1e-6);
    o.add("worst_relative_decrease_slack", tr.records.size() > 1 ? worst_rel : 0.0, -b.opt.decrease_tol,
          tr.sufficient_decrease);
    o.add("iterations", tr.iterations, b.opt.max_iter, tr.converged);
    o.add("final_rho_x", tr.records.back().rho_x, res_tol, tr.records.back().rho_x <= res_tol);
    o.add("final_rho_u", tr.records.back().rho_u, res_tol, tr.records.back().rho_u <= res_tol);
    if (s.get_bool("translated_check", true)) {
        const double ttol = s.get_double("translated_tol", 1e-5);
        const auto ts = translated_stationarity_check(
            p, analytic_power_prox(make_power_spec(b.toy.p, b.toy.alpha, p.lambda)), tr.u, tr.x);
        o.add("translated_residual", ts.residual, ttol, ts.passed(ttol));
    }
    return o;
}

/// Columns: t, u_bpam, u_bpg, gap.
inline Outcome run_bpg(const ConfigSection& s, std::ostream& out) {
    const auto spec = make_power_spec(s.get_double("p", 0.5), static_cast<int>(s.get_int("alpha", 2)),
                                      s.get_double("lambda", 0.2));
    const auto tr = bpg_equivalence_demo(spec, s.get_double("mu", 50.0), s.get_double("b", 2.0),
                                         s.get_double("c", 0.1), s.get_double("u0", 0.5),
                                         static_cast<int>(s.get_int("steps", 50)));
    CsvWriter csv(out, {"t", "u_bpam", "u_bpg", "gap"});
    for (const auto& r : tr.rows)
        csv.row({std::to_string(r.t), format_number(r.u_bpam), format_number(r.u_bpg), format_number(r.gap)});
    Outcome o;
    const double tol = s.get_double("tol", 1e-8);
    o.add("max_gap", tr.max_gap, tol, tr.max_gap <= tol);
    return o;
}

/// Writes <prefix>level_set.csv (z1, z2) and <prefix>graph.csv (t, h).
inline Outcome run_figure(const ConfigSection& s, const std::filesystem::path& dir, const std::string& prefix,
                          std::ostream& log) {
    ConfigSection ks = s;
    if (!ks.has("kernel")) ks.values["kernel"] = "epigraph";
    const Kernel k = kernel_from(ks, 2);
    if (k.dim() != 2) throw ConfigError("[" + s.name + "] figure needs a 2-D kernel (set dim = 2)");
    const Vector v = s.has("v") ? s.get_points("v").at(0) : Vector(make_point({0.0, -1.0}));
    TangencyConfig tc;
    tc.half_width = s.get_double("half_width", tc.half_width);
    const auto rep = tangency_scan(k, catalog::epigraph_h, s.get_double("tbar", 0.0), v, s.get_double("lambda"), tc);
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / (prefix + "level_set.csv"));
        CsvWriter csv(f, {"z1", "z2"});
        for (const auto& z : rep.level_set) csv.row({format_number(z[0]), format_number(z[1])});
    }
    {
        std::ofstream f(dir / (prefix + "graph.csv"));
        CsvWriter csv(f, {"t", "h"});
        for (const auto& z : rep.graph) csv.row({format_number(z[0]), format_number(z[1])});
    }
    log << "center: " << format_point(rep.center) << '\n'
        << "level: " << format_number(rep.level) << '\n'
        << "min_gap: " << format_number(rep.min_gap) << " at " << format_point(rep.argmin) << '\n'
        << "tangency: " << (rep.passed ? "pass" : "fail") << '\n';
    const std::string expect = s.get("expect", "any");
    if (expect != "any" && expect != "pass" && expect != "fail")
        throw ConfigError("[" + s.name + "] expect must be pass, fail or any");
    Outcome o;
    o.add("min_gap", rep.min_gap, 0.0, expect == "any" || (expect == "pass") == rep.passed);
    return o;
}

struct KernelSampler {
    std::string kind;
    std::vector<double> params;
    double lo, hi;
};

inline std::vector<KernelSampler> kernel_samplers() {
    return {{"half_squared_norm", {}, -5, 5},  {"power", {1.5}, -4, 4},       {"power", {3.0}, -3, 3},
            {"boltzmann_shannon", {}, 0.05, 5}, {"burg", {}, 0.1, 10},        {"fermi_dirac", {}, 0.02, 0.98},
            {"hellinger", {}, -0.95, 0.95},     {"exponential", {}, -3, 3},   {"square_plus_power", {1, 1, 1.1}, -2, 2}};
}

/// Columns: kernel, max_roundtrip_err, max_fenchel_young_err, max_dual_identity_err, passed.
inline Outcome run_kernel_duality(const ConfigSection& s, std::uint64_t seed, std::ostream& out) {
    const int samples = static_cast<int>(s.get_int("samples", 100));
    const double tol = s.get_double("tol", 1e-9), dual_tol = s.get_double("dual_tol", 1e-8);
    const Eigen::Index dim = s.get_int("dim", 2);
    std::mt19937_64 rng(seed);
    CsvWriter csv(out, {"kernel", "max_roundtrip_err", "max_fenchel_young_err", "max_dual_identity_err", "passed"});
    Outcome o;
    for (const auto& ks : kernel_samplers()) {
        const Kernel k = make_kernel(ks.kind, ks.params, dim);
        std::uniform_real_distribution<double> u(ks.lo, ks.hi);
        auto draw = [&]() {
            Vector x(dim);
            for (Eigen::Index i = 0; i < dim; ++i) x[i] = u(rng);
            return x;
        };
        double rt = 0.0, fy = 0.0, di = 0.0;
        bool ok = true;
        for (int i = 0; i < samples; ++i) {
            const Vector x = draw(), y = draw();
            const Vector g = k.grad(x);
            const double e1 = (k.conj_grad(g) - x).norm();
            const double e2 = std::abs(k.value(x) + k.conj_value(g) - g.dot(x));
            const double e3 = std::abs(bregman_distance(k, x, y) - conj_bregman(k, k.grad(y), g));
            rt = std::max(rt, e1);
            fy = std::max(fy, e2 / (1.0 + std::abs(g.dot(x))));
            di = std::max(di, e3);
            ok = ok && e1 <= tol * (1.0 + x.norm()) && e2 <= tol * (1.0 + std::abs(g.dot(x))) && e3 <= dual_tol;
        }
        std::string label = ks.kind;
        for (double q : ks.params) label += "_" + format_number(q);
        csv.row({label, format_number(rt), format_number(fy), format_number(di), flag(ok)});
        o.add(label + "_roundtrip", rt, tol, ok);
    }
    return o;
}

inline const std::vector<std::string>& known_kinds() {
    static const std::vector<std::string> k = {"prox",      "envelope",       "grad-check", "certify",
                                               "bpam",      "bpg-equivalence", "figure",     "kernel-duality"};
    return k;
}

/// Builds the objects of a section without running it, so config errors
/// surface before any experiment starts.
inline void validate_section(const ConfigSection& s) {
    const std::string kind = s.get("kind");
    if (std::find(known_kinds().begin(), known_kinds().end(), kind) == known_kinds().end())
        throw ConfigError("[" + s.name + "] unknown kind '" + kind + "'");
    if (kind == "prox" || kind == "envelope" || kind == "grad-check") {
        const Kernel k = kernel_from(s, 1);
        objective_from(s, k.dim());
        points_from(s, "y");
        if (side_from(s) == Side::right && !k.full_domain())
            throw ConfigError("[" + s.name + "] right prox requires dom phi = R^m");
    } else if (kind == "certify") {
        kernel_from(s, 2);
    } else if (kind == "figure") {
        ConfigSection ks = s;
        if (!ks.has("kernel")) ks.values["kernel"] = "epigraph";
        kernel_from(ks, 2);
        s.get_double("lambda");
    } else if (kind == "bpam") {
        bpam_from(s, 0);
    }
}

}  // namespace bregman::cli
