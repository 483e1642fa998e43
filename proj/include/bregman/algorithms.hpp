#pragma once

// Bregman proximal alternating minimization (BPAM) for
//   F_lambda(u, x) = f(x) + (1/lambda) D_phi(x, grad phi*(A u)) + g(u),
// a PALM-type u-step, stationarity residuals, and the BPG equivalence demo.

#include "bregman/analytic_prox.hpp"
#include "bregman/catalog.hpp"
#include "bregman/envelope_calculus.hpp"

#include <Eigen/Cholesky>

#include <random>

namespace bregman {

struct BpamProblem {
    ObjectiveFn f;             ///< on R^m
    ObjectiveFn g;             ///< on R^n
    Matrix A;                  ///< m x n
    Kernel phi;                ///< on R^m
    double sigma_scale = 0.0;  ///< sigma = sigma_scale * phi (0: no x-regularization)
    Kernel omega;              ///< on R^n, full domain
    double lambda = 1.0;

    Eigen::Index m() const { return A.rows(); }
    Eigen::Index n() const { return A.cols(); }

    void validate() const {
        if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
        if (!(sigma_scale >= 0.0)) throw InvalidArgument("sigma scale must be nonnegative");
        if (phi.dim() != m() || f.dim != m()) throw InvalidArgument("f and phi must live on R^m with m = rows(A)");
        if (omega.dim() != n() || g.dim != n()) throw InvalidArgument("g and omega must live on R^n with n = cols(A)");
        if (!omega.full_domain()) throw InvalidArgument("omega must have full domain");
    }

    /// F_lambda(u, x) = f(x) + (1/lambda)(phi(x) + phi*(A u) - <A u, x>) + g(u).
    double value(const Vector& u, const Vector& x) const {
        const Vector w = A * u;
        if (!phi.conj_dom_interior(w)) return kInf;
        const double fx = f(x), gu = g(u);
        if (!(fx < kInf && gu < kInf)) return kInf;
        return fx + (phi.value(x) + phi.conj_value(w) - w.dot(x)) / lambda + gu;
    }
};

using XUpdate = std::function<Vector(const Vector& u, const Vector& x_prev)>;
using UUpdate = std::function<Vector(const Vector& x_next, const Vector& u_prev)>;

struct Residuals {
    double rho_x = 0.0;  ///< dist(-(1/lambda)(grad phi(x) - A u), subdiff f(x))
    double rho_u = 0.0;  ///< dist(-(1/lambda) A^T (grad phi*(A u) - x), subdiff g(u))
    double max() const { return std::max(rho_x, rho_u); }
};

inline Residuals stationarity_residuals(const BpamProblem& p, const Vector& u, const Vector& x) {
    if (!p.phi.dom_interior(x)) throw DomainError("residuals need x in int(dom phi)");
    const Vector w = p.A * u;
    Residuals r;
    r.rho_x = p.f.dist_subdiff(x, -(p.phi.grad(x) - w) / p.lambda);
    r.rho_u = p.g.dist_subdiff(u, -p.A.transpose() * (p.phi.conj_grad(w) - x) / p.lambda);
    return r;
}

namespace detail {

/// Effective step and prox point of the x-update with sigma = s phi:
/// 1/lambda' = 1/lambda + s, grad phi(y') = lambda' ((1/lambda) A u + s grad phi(x_prev)).
inline std::pair<double, Vector> combined_x_prox_point(const BpamProblem& p, const Vector& u, const Vector& x_prev) {
    const double lam = 1.0 / (1.0 / p.lambda + p.sigma_scale);
    Vector w = (p.A * u) / p.lambda;
    if (p.sigma_scale > 0.0) w += p.sigma_scale * p.phi.grad(x_prev);
    w *= lam;
    if (!p.phi.conj_dom_interior(w)) throw DomainError("x-update prox point outside int(dom phi*)");
    return {lam, p.phi.conj_grad(w)};
}

}  // namespace detail

/// x-update through the closed-form power prox (f = (1/p)||.||_p^p,
/// phi = (1/q)||.||_q^q, both separable).
inline XUpdate make_power_x_update(const BpamProblem& p, double power_p, int alpha) {
    return [p, power_p, alpha](const Vector& u, const Vector& x_prev) {
        const auto [lam, y] = detail::combined_x_prox_point(p, u, x_prev);
        const PowerProxSpec s = make_power_spec(power_p, alpha, lam);
        Vector x(y.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) x[i] = power_prox(s, y[i]).minimizers.front()[0];
        return x;
    };
}

/// x-update through the grid oracle (m <= 2).
inline XUpdate make_oracle_x_update(const BpamProblem& p, SearchConfig cfg = {}) {
    return [p, cfg](const Vector& u, const Vector& x_prev) {
        const auto [lam, y] = detail::combined_x_prox_point(p, u, x_prev);
        return Vector(lprox(p.f, p.phi, lam, y, cfg).minimizers.front());
    };
}

/// Exact u-update
///   argmin_u g(u) + (1/lambda)(phi*(A u) - <A u, x>) + D_omega(u, u_prev)
/// by damped Newton; needs g smooth with a Hessian and phi*, omega twice
/// differentiable along the iterates.
inline UUpdate make_newton_u_update(const BpamProblem& p, int max_iter = 100, double grad_tol = 1e-13) {
    if (!p.g.gradient || !p.g.hessian) throw InvalidArgument("Newton u-update needs the gradient and Hessian of g");
    return [p, max_iter, grad_tol](const Vector& x, const Vector& u_prev) {
        const Vector gw_prev = p.omega.grad(u_prev);
        auto G = [&](const Vector& u) {
            const Vector w = p.A * u;
            if (!p.phi.conj_dom_interior(w)) return kInf;
            return p.g(u) + (p.phi.conj_value(w) - w.dot(x)) / p.lambda + p.omega.value(u) - gw_prev.dot(u);
        };
        Vector u = u_prev;
        double Gu = G(u);
        for (int it = 0; it < max_iter; ++it) {
            const Vector w = p.A * u;
            const Vector grad = p.g.gradient(u) + p.A.transpose() * (p.phi.conj_grad(w) - x) / p.lambda +
                                p.omega.grad(u) - gw_prev;
            if (grad.norm() <= grad_tol * (1.0 + u.norm())) break;
            const auto Hc = p.phi.conj_hessian(w);
            const auto Hw = p.omega.hessian(u);
            if (!Hc || !Hw) throw InvalidArgument("Newton u-update: Hessian of phi* or omega unavailable");
            const Matrix H = p.g.hessian(u) + p.A.transpose() * (*Hc) * p.A / p.lambda + *Hw;
            const Vector d = -H.ldlt().solve(grad);
            double t = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
                const Vector cand = u + t * d;
                const double Gc = G(cand);
                if (Gc <= Gu + 1e-4 * t * grad.dot(d)) {
                    u = cand;
                    Gu = Gc;
                    moved = true;
                    break;
                }
            }
            if (!moved) {
                // flat to machine precision: accept the full Newton step if it
                // does not increase G beyond rounding
                const Vector cand = u + d;
                if (G(cand) <= Gu + 1e-15 * (1.0 + std::abs(Gu))) u = cand;
                break;
            }
        }
        return u;
    };
}

/// Classical prox of g: argmin_u g(u) + (1/(2t)) ||u - z||^2.
using ClassicalProx = std::function<Vector(const Vector& z, double t)>;

inline ClassicalProx classical_prox_zero() {
    return [](const Vector& z, double) { return z; };
}

inline ClassicalProx classical_prox_box(double lo, double hi) {
    return [lo, hi](const Vector& z, double) { return Vector(z.array().max(lo).min(hi)); };
}

/// g = (mu/2)||B u - b||^2.
inline ClassicalProx classical_prox_least_squares(const Matrix& B, const Vector& b, double mu) {
    const Matrix Q = mu * B.transpose() * B;
    const Vector c = mu * B.transpose() * b;
    return [Q, c](const Vector& z, double t) {
        const Matrix K = Q + Matrix::Identity(Q.rows(), Q.cols()) / t;
        return Vector(K.llt().solve(c + z / t));
    };
}

/// PALM-type u-step
///   argmin_u g(u) + (1/lambda)<u, A^T(grad phi*(A u_t) - x)> + (M / (2 lambda)) ||u - u_t||^2.
/// M is not checked against any Lipschitz constant.
inline Vector palm_u_step(const BpamProblem& p, const Vector& x, const Vector& u_prev, double M,
                          const ClassicalProx& g_prox) {
    if (!(M > 0.0)) throw InvalidArgument("PALM step needs M > 0");
    const Vector d = p.A.transpose() * (p.phi.conj_grad(p.A * u_prev) - x);
    return g_prox(u_prev - d / M, p.lambda / M);
}

inline UUpdate make_palm_u_update(const BpamProblem& p, double M, ClassicalProx g_prox) {
    return [p, M, g_prox](const Vector& x, const Vector& u_prev) { return palm_u_step(p, x, u_prev, M, g_prox); };
}

struct BpamOptions {
    int max_iter = 10000;
    double residual_tol = 1e-7;
    double step_tol = 1e-6;      ///< |x+ - x| + |u+ - u| bound for stopping
    double decrease_tol = 1e-9;  ///< relative slack allowed in the sufficient decrease
};

struct IterateRecord {
    int t = 0;
    double F = 0.0;
    double D_sigma = 0.0;
    double D_omega = 0.0;
    double decrease_slack = 0.0;  ///< F(t-1) - F(t) - D_sigma - D_omega
    double rho_x = 0.0;
    double rho_u = 0.0;
    double step_norm = 0.0;
};

struct IterateTrace {
    std::vector<IterateRecord> records;  ///< records[0] is the starting point
    Vector u, x;
    bool converged = false;
    bool sufficient_decrease = true;
    double worst_slack = kInf;
    int iterations = 0;
};

inline IterateTrace bpam_run(const BpamProblem& p, const XUpdate& x_update, const UUpdate& u_update, const Vector& u0,
                             const Vector& x0, const BpamOptions& opt = {}) {
    p.validate();
    const double lam_x = 1.0 / (1.0 / p.lambda + p.sigma_scale);
    if (p.f.prox_bounded_threshold && lam_x > *p.f.prox_bounded_threshold)
        throw NotProxBounded(lam_x);
    if (!p.phi.dom_interior(x0)) throw DomainError("infeasible init: x0 must lie in int(dom phi)");
    IterateTrace tr;
    tr.u = u0;
    tr.x = x0;
    double F = p.value(u0, x0);
    if (!(F < kInf)) throw InvalidArgument("starting point outside dom F_lambda");
    {
        const Residuals r = stationarity_residuals(p, u0, x0);
        tr.records.push_back(IterateRecord{0, F, 0.0, 0.0, 0.0, r.rho_x, r.rho_u, 0.0});
    }
    for (int t = 1; t <= opt.max_iter; ++t) {
        const Vector x = x_update(tr.u, tr.x);
        const Vector u = u_update(x, tr.u);
        IterateRecord rec;
        rec.t = t;
        rec.F = p.value(u, x);
        rec.D_sigma = p.sigma_scale > 0.0 ? p.sigma_scale * bregman_distance(p.phi, x, tr.x) : 0.0;
        rec.D_omega = bregman_distance(p.omega, u, tr.u);
        rec.decrease_slack = F - rec.F - rec.D_sigma - rec.D_omega;
        const Residuals r = stationarity_residuals(p, u, x);
        rec.rho_x = r.rho_x;
        rec.rho_u = r.rho_u;
        rec.step_norm = (u - tr.u).norm() + (x - tr.x).norm();
        tr.worst_slack = std::min(tr.worst_slack, rec.decrease_slack);
        if (rec.decrease_slack < -opt.decrease_tol * (1.0 + std::abs(F))) tr.sufficient_decrease = false;
        tr.records.push_back(rec);
        tr.u = u;
        tr.x = x;
        F = rec.F;
        tr.iterations = t;
        if (r.max() <= opt.residual_tol && rec.step_norm <= opt.step_tol) {
            tr.converged = true;
            break;
        }
    }
    return tr;
}

struct TranslatedStationarity {
    double residual = 0.0;       ///< dist(-A^T grad(lenv o grad phi*)(A u), subdiff g(u))
    double prox_gap = 0.0;       ///< |lprox(grad phi*(A u)) - x|
    double hypothesis_distance = 0.0;  ///< dist((1/lambda)(A u - grad phi(x)), subdiff f(x))
    Vector envelope_gradient;    ///< grad(lenv o grad phi*)(A u)
    bool passed(double tol) const { return residual <= tol; }
};

/// Stationarity of the translated problem min_u lenv(grad phi*(A u)) + g(u)
/// at a BPAM limit (u, x).
inline TranslatedStationarity translated_stationarity_check(const BpamProblem& p, const ProxMap& lprox_map,
                                                            const Vector& u, const Vector& x) {
    TranslatedStationarity out;
    const Vector w = p.A * u;
    out.envelope_gradient = left_env_grad_composed(lprox_map, p.phi, p.lambda, w);
    out.residual = p.g.dist_subdiff(u, -p.A.transpose() * out.envelope_gradient);
    out.prox_gap = (lprox_map(p.phi.conj_grad(w)).unique() - x).norm();
    out.hypothesis_distance = p.f.dist_subdiff(x, (w - p.phi.grad(x)) / p.lambda);
    return out;
}

struct BpgRow {
    int t = 0;
    double u_bpam = 0.0;
    double u_bpg = 0.0;
    double gap = 0.0;
};

struct BpgEquivalenceTrace {
    std::vector<BpgRow> rows;
    double max_gap = 0.0;
};

/// One-dimensional toy with A = 1, sigma = 0, f = (1/p)|x|^p, phi = power(q),
/// g = (mu/2)(u - b)^2, omega = (c/2)u^2. Runs partial BPAM and Bregman
/// proximal gradient on lenv o grad phi* + g side by side. Throws
/// MultivaluedProx when the prox is multivalued at an iterate.
inline BpgEquivalenceTrace bpg_equivalence_demo(const PowerProxSpec& s, double mu, double b, double c, double u0,
                                                int iterations = 50) {
    validate(s);
    if (!(mu >= 0.0) || !(c > 0.0)) throw InvalidArgument("BPG demo needs mu >= 0 and c > 0");
    BpamProblem p;
    p.f = catalog::power(s.p, 1);
    p.g = catalog::least_squares(Matrix::Identity(1, 1), scalar_point(b), mu);
    p.A = Matrix::Identity(1, 1);
    p.phi = power_kernel_for(s);
    p.omega = Kernel(kernels::scaled(kernels::half_squared_norm(), c), 1);
    p.lambda = s.lambda;
    const ProxMap prox = analytic_power_prox(s);
    const UUpdate u_update = make_newton_u_update(p);
    const Kernel& k = p.phi;

    BpgEquivalenceTrace tr;
    double ua = u0, ub = u0;
    tr.rows.push_back(BpgRow{0, ua, ub, 0.0});
    for (int t = 1; t <= iterations; ++t) {
        // partial BPAM
        const ProxResult xr = prox(k.conj_grad(scalar_point(ua)));
        const Vector x = xr.unique("prox at BPAM iterate " + std::to_string(t));
        ua = u_update(x, scalar_point(ua))[0];

        // BPG: argmin g(u) + <grad, u - u_t> + D_{phi*/lambda + omega}(u, u_t);
        // the optimality condition is monotone in u, solved by bisection
        const double grad = left_env_grad_composed(prox, k, s.lambda, scalar_point(ub))[0];
        const double cg = k.conj_grad(scalar_point(ub))[0];
        auto dG = [&](double u) {
            return mu * (u - b) + grad + (k.conj_grad(scalar_point(u))[0] - cg) / s.lambda + c * (u - ub);
        };
        double lo = ub - 1.0, hi = ub + 1.0;
        while (dG(lo) > 0.0) lo -= 2.0 * (hi - lo);
        while (dG(hi) < 0.0) hi += 2.0 * (hi - lo);
        for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid == lo || mid == hi) break;
            (dG(mid) > 0.0 ? hi : lo) = mid;
        }
        ub = std::abs(dG(lo)) <= std::abs(dG(hi)) ? lo : hi;

        const double gap = std::abs(ua - ub);
        tr.rows.push_back(BpgRow{t, ua, ub, gap});
        tr.max_gap = std::max(tr.max_gap, gap);
    }
    return tr;
}

struct SparseToy {
    BpamProblem problem;
    double p = 0.5;
    int alpha = 2;
    Matrix B;
    Vector b;
    Vector u_true;
    double mu = 1.0;
};

/// Sparse recovery toy: f = (1/p)||x||_p^p on R^n, phi = power(q) with
/// q = alpha + (1 - alpha) p, A = I, g = (mu/2)||B u - b||^2 with a seeded
/// Gaussian B, sigma = s phi, omega = (c/2)||.||^2.
inline SparseToy make_sparse_toy(std::uint64_t seed, int n = 20, double p = 0.5, int alpha = 2, double lambda = 0.2,
                                 double mu = 50.0, double sigma_scale = 0.1, double omega_scale = 0.1,
                                 int nonzeros = 4) {
    SparseToy toy;
    toy.p = p;
    toy.alpha = alpha;
    toy.mu = mu;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    toy.B.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) toy.B(i, j) = normal(rng) / std::sqrt(double(n));
    toy.u_true = Vector::Zero(n);
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> mag(1.0, 3.0);
    for (int k = 0; k < std::min(nonzeros, n); ++k)
        toy.u_true[idx[static_cast<std::size_t>(k)]] = (rng() & 1 ? 1.0 : -1.0) * mag(rng);
    toy.b = toy.B * toy.u_true;

    BpamProblem& pr = toy.problem;
    const PowerProxSpec s = make_power_spec(p, alpha, lambda);
    pr.f = catalog::power(p, n);
    pr.g = catalog::least_squares(toy.B, toy.b, mu);
    pr.A = Matrix::Identity(n, n);
    pr.phi = Kernel(kernels::power(s.q), n);
    pr.sigma_scale = sigma_scale;
    pr.omega = Kernel(kernels::scaled(kernels::half_squared_norm(), omega_scale), n);
    pr.lambda = lambda;
    return toy;
}

}  // namespace bregman
