#include "bregman/catalog.hpp"
#include "bregman/prox_core.hpp"

#include <gtest/gtest.h>

using namespace bregman;

namespace {

// Independent dense-grid oracle for a 1-D prox objective.
std::pair<double, double> brute_min(const std::function<double(double)>& P, double lo, double hi, int n) {
    double bx = lo, bv = kInf;
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = P(x);
        if (v < bv) {
            bv = v;
            bx = x;
        }
    }
    return {bx, bv};
}

}  // namespace

TEST(ProxCore, EuclideanProjection) {
    auto r = lprox(catalog::indicator_interval(0, 1), make_kernel("half_squared_norm"), 1.0, scalar_point(2));
    ASSERT_EQ(r.minimizers.size(), 1u);
    EXPECT_NEAR(r.minimizers[0][0], 1.0, 1e-9);
    EXPECT_NEAR(r.env_value, 0.5, 1e-12);
    EXPECT_FALSE(r.multivalued);
}

TEST(ProxCore, PowerObjectiveAtFour) {
    SearchConfig cfg;
    cfg.box = make_box(0, 10);
    auto r = lprox(catalog::power(0.5), make_kernel("power", {1.5}), 1.0, scalar_point(4), cfg);
    ASSERT_EQ(r.minimizers.size(), 1u);
    EXPECT_NEAR(r.minimizers[0][0], 0.0, 1e-9);
    EXPECT_NEAR(r.env_value, 8.0 / 3.0, 1e-12);
    // brute force over [0, 10] at resolution 1e-4
    auto P = [](double x) {
        const double d = std::pow(x, 1.5) / 1.5 - 8.0 / 1.5 - 2.0 * (x - 4.0);
        return 2.0 * std::sqrt(x) + d;
    };
    auto [bx, bv] = brute_min(P, 0, 10, 100000);
    EXPECT_NEAR(bx, 0.0, 1e-4);
    EXPECT_NEAR(r.env_value, bv, 1e-9);
}

TEST(ProxCore, NegativeQuadraticNotProxBounded) {
    auto f = catalog::quadratic(-1.0);
    Kernel k = make_kernel("half_squared_norm");
    EXPECT_THROW(lprox(f, k, 2.0, scalar_point(0.3)), NotProxBounded);
    try {
        lprox(f, k, 2.0, scalar_point(0.3));
    } catch (const NotProxBounded& e) {
        EXPECT_NE(std::string(e.what()).find("not prox-bounded at this lambda"), std::string::npos);
        EXPECT_EQ(e.lambda(), 2.0);
    }
    // below the threshold lambda_f = 1 the prox is (1/(1-lambda)) y... at lambda=0.5: y / (1 - 0.5)
    auto r = lprox(f, k, 0.5, scalar_point(0.3));
    EXPECT_NEAR(r.unique()[0], 0.6, 1e-7);
}

TEST(ProxCore, MultivaluedProx) {
    // -|x| + x^2/(2 lambda) at y = 0 has minimizers +-lambda
    auto r = lprox(catalog::abs_value(-1.0), make_kernel("half_squared_norm"), 0.5, scalar_point(0));
    ASSERT_EQ(r.minimizers.size(), 2u);
    EXPECT_TRUE(r.multivalued);
    EXPECT_TRUE(same_point_sets(r.minimizers, {scalar_point(-0.5), scalar_point(0.5)}, 1e-7));
    EXPECT_THROW(r.unique(), MultivaluedProx);
    try {
        r.unique();
    } catch (const MultivaluedProx& e) {
        EXPECT_EQ(e.minimizers().size(), 2u);
    }
}

TEST(ProxCore, RightEqualsLeftForEuclidean) {
    Kernel k = make_kernel("half_squared_norm");
    for (double y : {-2.0, 0.3, 1.7}) {
        auto f = catalog::abs_value(0.5, 0.2);
        auto l = lprox(f, k, 0.7, scalar_point(y));
        auto r = rprox(f, k, 0.7, scalar_point(y));
        EXPECT_NEAR(l.env_value, r.env_value, 1e-10);
        EXPECT_TRUE(same_point_sets(l.minimizers, r.minimizers, 1e-6));
    }
}

TEST(ProxCore, RightProxSegmentExponentialDualPath) {
    Kernel k = make_kernel("exponential", {}, 2);
    const Vector y = make_point({0.5, 0.5});
    auto r = rprox(catalog::segment_indicator(), k, 1.0, y);
    ASSERT_EQ(r.minimizers.size(), 1u);
    ASSERT_EQ(r.dual_minimizers.size(), 1u);
    EXPECT_NEAR((k.conj_grad(r.dual_minimizers[0]) - r.minimizers[0]).norm(), 0.0, 1e-6);
    // independent 1-D brute force over t in [0,1] of D(y, (t, 2t))
    auto P = [&](double t) {
        const double a = std::exp(0.5) - std::exp(t) - std::exp(t) * (0.5 - t);
        const double b = std::exp(0.5) - std::exp(2 * t) - std::exp(2 * t) * (0.5 - 2 * t);
        return a + b;
    };
    auto [bt, bv] = brute_min(P, 0, 1, 200000);
    EXPECT_NEAR(r.minimizers[0][0], bt, 1e-5);
    EXPECT_NEAR(r.minimizers[0][1], 2 * bt, 1e-5);
    EXPECT_NEAR(r.env_value, bv, 1e-9);
}

TEST(ProxCore, SingletonForcedMinimizer) {
    auto f = catalog::indicator_point(scalar_point(1.0));
    for (const char* kind : {"burg", "boltzmann_shannon", "exponential", "half_squared_norm"}) {
        Kernel k = make_kernel(kind);
        const Vector y = scalar_point(2.5);
        auto r = lprox(f, k, 0.7, y);
        ASSERT_EQ(r.minimizers.size(), 1u);
        EXPECT_EQ(r.minimizers[0][0], 1.0);
        EXPECT_NEAR(r.env_value, bregman_distance(k, scalar_point(1.0), y) / 0.7, 1e-14) << kind;
    }
    Kernel e = make_kernel("exponential");
    auto r = rprox(f, e, 0.7, scalar_point(2.5));
    EXPECT_EQ(r.unique()[0], 1.0);
    EXPECT_NEAR(r.env_value, bregman_distance(e, scalar_point(2.5), scalar_point(1.0)) / 0.7, 1e-12);
}

TEST(ProxCore, RightProxNeedsFullDomain) {
    EXPECT_THROW(rprox(catalog::abs_value(), make_kernel("burg"), 1.0, scalar_point(1.0)), InvalidArgument);
}

TEST(ProxCore, BadQueries) {
    Kernel k = make_kernel("burg");
    EXPECT_THROW(lprox(catalog::abs_value(), k, 1.0, scalar_point(-1.0)), DomainError);
    EXPECT_THROW(lprox(catalog::abs_value(), k, 0.0, scalar_point(1.0)), InvalidArgument);
    SearchConfig cfg;
    cfg.box = make_box(5, 6);
    ObjectiveFn g = catalog::indicator_interval(0, 1);
    g.anchors.clear();
    EXPECT_THROW(lprox(g, make_kernel("half_squared_norm"), 1.0, scalar_point(1), cfg), InvalidArgument);
    // anchors are always offered, even outside the box
    EXPECT_NEAR(lprox(catalog::indicator_interval(0, 1), make_kernel("half_squared_norm"), 1.0, scalar_point(1), cfg)
                    .unique()[0],
                1.0, 0.0);
}

TEST(ProxCore, EntropyProjectionOntoInterval) {
    // Boltzmann-Shannon projection of y = 3 onto [0.5, 2]: D(x, y) increasing for x < y -> x = 2
    auto r = lprox(catalog::indicator_interval(0.5, 2.0), make_kernel("boltzmann_shannon"), 1.0, scalar_point(3.0));
    EXPECT_NEAR(r.unique()[0], 2.0, 1e-12);
    EXPECT_NEAR(r.env_value, 2 * std::log(2.0 / 3.0) - 2 + 3, 1e-12);
}

TEST(ProxCore, EnvelopeMonotoneInLambdaAndBelowF) {
    auto f = catalog::power(0.5);
    Kernel k = make_kernel("power", {1.5});
    for (double y : {-3.0, 0.4, 2.0, 6.0}) {
        double prev = kInf;
        for (double lam : {0.1, 0.3, 1.0, 2.0}) {
            auto r = lprox(f, k, lam, scalar_point(y));
            EXPECT_LE(r.env_value, prev + 1e-12);
            EXPECT_LE(r.env_value, f(scalar_point(y)) + 1e-12);
            for (const auto& x : r.minimizers)
                EXPECT_LE(f(x) + bregman_distance(k, x, scalar_point(y)) / lam, r.env_value + 1e-9);
            prev = r.env_value;
        }
    }
}

TEST(ProxCore, OuterSemicontinuityProbe) {
    // near the kink of -|x|, minimizers of y_n -> 0 cluster in lprox(0) = {-l, l}
    auto f = catalog::abs_value(-1.0);
    Kernel k = make_kernel("half_squared_norm");
    auto limit = lprox(f, k, 0.5, scalar_point(0.0));
    for (int n = 1; n <= 6; ++n) {
        const double yn = std::pow(10.0, -n);
        auto r = lprox(f, k, 0.5, scalar_point(yn));
        for (const auto& x : r.minimizers) {
            double best = kInf;
            for (const auto& z : limit.minimizers) best = std::min(best, (x - z).norm());
            EXPECT_LE(best, 2 * yn + 1e-6);
        }
    }
}

TEST(ProxCore, RangeStaysInterior) {
    Kernel k = make_kernel("burg");
    auto f = catalog::indicator_interval(0.5, 2.0);
    for (double y : {0.01, 0.3, 1.0, 5.0, 80.0}) {
        auto r = lprox(f, k, 1.0, scalar_point(y));
        for (const auto& x : r.minimizers) EXPECT_TRUE(k.dom_interior(x));
    }
}

TEST(ProxCore, TwoDimensionalEuclideanBoxProjection) {
    SearchConfig cfg;
    auto r = lprox(catalog::indicator_interval(0, 1, 2), make_kernel("half_squared_norm", {}, 2), 1.0,
                   make_point({2.0, 0.4}), cfg);
    EXPECT_NEAR((r.unique() - make_point({1.0, 0.4})).norm(), 0.0, 1e-7);
    EXPECT_NEAR(r.env_value, 0.5, 1e-12);
}

TEST(ProxCore, TiltTransformPoint) {
    Kernel h = make_kernel("half_squared_norm");
    EXPECT_NEAR(tilt_transform_point(h, scalar_point(0.3), scalar_point(2.0), 0.5)[0], 1.3, 1e-15);
    EXPECT_DOUBLE_EQ(tilt_transform_point(make_kernel("burg"), scalar_point(1), scalar_point(0), 1.0)[0], 1.0);
    EXPECT_NEAR(tilt_transform_point(make_kernel("exponential"), scalar_point(0), scalar_point(1), 1.0)[0],
                std::log(2.0), 1e-15);
    // burg: grad phi(1) + 2 = 1 > 0 is outside int(dom phi*) = (-inf, 0)
    EXPECT_THROW(tilt_transform_point(make_kernel("burg"), scalar_point(1), scalar_point(2), 1.0), DomainError);
}

TEST(ProxCore, TiltIdentity) {
    EXPECT_TRUE(tilt_identity_check(catalog::indicator_interval(0, 1), make_kernel("power", {1.5}), scalar_point(0.5),
                                    scalar_point(0.0), 1.0, 1e-6));
    EXPECT_TRUE(tilt_identity_check(catalog::indicator_interval(0, 1), make_kernel("power", {1.5}), scalar_point(0.5),
                                    scalar_point(0.3), 1.0, 1e-6));
    EXPECT_TRUE(tilt_identity_check(catalog::abs_value(0.5), make_kernel("half_squared_norm"), scalar_point(1.0),
                                    scalar_point(0.2), 1.0, 1e-6));
}

TEST(ProxCore, ProxBoundedEstimate) {
    const std::vector<double> grid{0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0, 4.0};
    auto nq = prox_bounded_estimate(catalog::quadratic(-1.0), make_kernel("half_squared_norm"), grid, scalar_point(0));
    EXPECT_NEAR(nq.lambda_f, 1.0, 1e-12);
    ASSERT_TRUE(nq.liminf_ratio.has_value());
    EXPECT_NEAR(*nq.liminf_ratio, -1.0, 1e-12);
    auto ind = prox_bounded_estimate(catalog::indicator_interval(-1, 3), make_kernel("half_squared_norm"), grid,
                                     scalar_point(0));
    EXPECT_EQ(ind.lambda_f, kInf);
    auto ab = prox_bounded_estimate(catalog::abs_value(), make_kernel("half_squared_norm"), grid, scalar_point(0));
    EXPECT_EQ(ab.lambda_f, kInf);
    auto bad = prox_bounded_estimate(catalog::quadratic(-10.0), make_kernel("half_squared_norm"), grid, scalar_point(0));
    EXPECT_TRUE(bad.below_grid);
}
