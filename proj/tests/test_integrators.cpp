#include <gtest/gtest.h>

#include <cmath>

#include "platonic/integrators.hpp"

using namespace platonic;

namespace {

HamiltonianSystem vt_system() { return make_system(make_potential("V_T"), Level::sphere); }

// In the octant x, y, z > 0 with energy 8 (minimum there is 3 sqrt 3).
PhaseState vt_state(double energy = 8.0) {
    PhaseState s{Chart::sphere, {0.9, 0.6, 0, 0}, {}, 0};
    double v = make_potential("V_T").value(s.q);
    double k = std::sqrt(2 * (energy - v));
    s.p[0] = k * std::cos(0.4);
    s.p[1] = k * std::sin(0.4) * std::sin(s.q[0]);
    return s;
}

double max_diff(const PhaseState& a, const PhaseState& b) {
    double m = 0;
    for (int i = 0; i < max_dof; ++i) m = std::max({m, std::abs(a.q[i] - b.q[i]), std::abs(a.p[i] - b.p[i])});
    return m;
}

IntegratorConfig adaptive(double tol, double t_end) {
    IntegratorConfig c;
    c.method = Method::adaptive_embedded;
    c.tol = {tol, tol};
    c.t_end = t_end;
    return c;
}

}  // namespace

TEST(Rk4Step, LinearGrowthFactor) {
    auto f = [](double, const Vec<1>& y) -> std::optional<Vec<1>> { return Vec<1>{y[0]}; };
    for (double h : {0.1, 0.5, 1.0}) {
        auto y = rk4_step<1>(f, 0.0, Vec<1>{1.0}, h);
        EXPECT_NEAR((*y)[0], 1 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24, 1e-15);
    }
}

TEST(Rk4Step, EquatorialGeodesic) {
    auto sys = make_system(make_free(Chart::sphere), Level::sphere);
    PhaseState s{Chart::sphere, {pi / 2, 0, 0, 0}, {0, 1, 0, 0}, 0};
    for (int i = 0; i < 1000; ++i) s = *rk4_step(sys, s, 0.01);
    EXPECT_NEAR(s.q[0], pi / 2, 1e-12);
    EXPECT_NEAR(s.p[0], 0.0, 1e-12);
    EXPECT_NEAR(s.q[1], 10.0, 1e-12);
    EXPECT_NEAR(s.t, 10.0, 1e-12);
}

TEST(Rk4Step, LocalErrorOrder) {
    auto sys = vt_system();
    PhaseState s = vt_state();
    IntegratorConfig ref = adaptive(1e-14, 0);
    double errs[2];
    double hs[2] = {0.02, 0.01};
    for (int k = 0; k < 2; ++k) {
        ref.t_end = hs[k];
        auto exact = integrate(sys, s, ref).states.back();
        errs[k] = max_diff(*rk4_step(sys, s, hs[k]), exact);
    }
    double ratio = errs[0] / errs[1];
    EXPECT_GT(ratio, 32 / 1.5);
    EXPECT_LT(ratio, 32 * 1.5);
}

TEST(Rk4Step, SingularPropagates) {
    auto sys = vt_system();
    PhaseState s{Chart::sphere, {pi / 2, 0.3, 0, 0}, {}, 0};
    EXPECT_FALSE(rk4_step(sys, s, 0.01).has_value());
}

TEST(Integrate, DriftProtocol) {
    IntegratorConfig c;
    c.t_end = 50;
    auto tr = integrate(vt_system(), vt_state(), c);
    EXPECT_EQ(tr.status, Termination::completed);
    EXPECT_LE(tr.max_drift, 1e-5);
    EXPECT_EQ(tr.states.back().t, 50.0);
    EXPECT_EQ(tr.size(), 25001u);
    double m = 0;
    for (double d : tr.rel_drift) m = std::max(m, d);
    EXPECT_EQ(m, tr.max_drift);
}

TEST(Integrate, CrossIntegratorAgreement) {
    IntegratorConfig c;
    c.t_end = 1;
    auto a = integrate(vt_system(), vt_state(), c);
    auto b = integrate(vt_system(), vt_state(), adaptive(1e-10, 1));
    ASSERT_TRUE(a.ok() && b.ok());
    EXPECT_EQ(b.states.back().t, 1.0);
    EXPECT_LE(max_diff(a.states.back(), b.states.back()), 1e-6);
}

TEST(Integrate, BackwardThenForwardReturns) {
    IntegratorConfig c;
    c.t_end = -50;
    auto back = integrate(vt_system(), vt_state(), c);
    ASSERT_TRUE(back.ok());
    EXPECT_EQ(back.states.back().t, -50.0);
    for (std::size_t i = 1; i < back.size(); ++i) ASSERT_LT(back.states[i].t, back.states[i - 1].t);
    c.t_end = 0;
    auto fwd = integrate(vt_system(), back.states.back(), c);
    ASSERT_TRUE(fwd.ok());
    EXPECT_LE(max_diff(fwd.states.back(), vt_state()), 1e-6);
}

TEST(Integrate, SymmetricIntervalMerged) {
    IntegratorConfig c;
    c.t_start = -2;
    c.t_end = 2;
    auto tr = integrate(vt_system(), vt_state(), c);
    ASSERT_TRUE(tr.ok());
    EXPECT_EQ(tr.states.front().t, -2.0);
    EXPECT_EQ(tr.states.back().t, 2.0);
    EXPECT_EQ(tr.size(), 2001u);
    for (std::size_t i = 1; i < tr.size(); ++i) {
        ASSERT_GT(tr.states[i].t, tr.states[i - 1].t);
        EXPECT_NEAR(tr.steps[i], tr.states[i].t - tr.states[i - 1].t, 1e-12);
    }
    EXPECT_EQ(tr.rel_drift[1000], 0.0);
}

TEST(Integrate, LastSampleMatchesUnevenHorizon) {
    IntegratorConfig c;
    c.t_end = 0.0105;
    auto tr = integrate(vt_system(), vt_state(), c);
    EXPECT_EQ(tr.states.back().t, 0.0105);
    auto ad = integrate(vt_system(), vt_state(), adaptive(1e-8, 3.3));
    EXPECT_EQ(ad.states.back().t, 3.3);
}

TEST(Integrate, DriftAbortKeepsPartialTrace) {
    IntegratorConfig c;
    c.step = 0.2;
    c.t_end = 50;
    auto tr = integrate(vt_system(), vt_state(), c);
    EXPECT_EQ(tr.status, Termination::drift_exceeded);
    EXPECT_GT(tr.max_drift, 1e-5);
    EXPECT_GT(tr.size(), 1u);
    EXPECT_LT(tr.states.back().t, 50);
}

TEST(Integrate, GuardTrips) {
    // free motion through the north pole
    auto sys = make_system(make_free(Chart::sphere), Level::sphere);
    PhaseState s{Chart::sphere, {0.5, 0, 0, 0}, {-1, 0, 0, 0}, 0};
    IntegratorConfig c;
    c.t_end = 2;
    auto tr = integrate(sys, s, c);
    EXPECT_EQ(tr.status, Termination::guard_tripped);
    EXPECT_NEAR(tr.states.back().t, 0.5, 0.01);
}

TEST(Integrate, RejectsBadConfig) {
    IntegratorConfig c;
    c.step = 0;
    EXPECT_THROW(integrate(vt_system(), vt_state(), c), std::invalid_argument);
    auto a = adaptive(0, 1);
    EXPECT_THROW(integrate(vt_system(), vt_state(), a), std::invalid_argument);
}

TEST(Integrate, GlobalOrderFour) {
    auto sys = vt_system();
    auto s0 = vt_state();
    const double T = 5;
    auto ref = integrate(sys, s0, adaptive(1e-14, T)).states.back();
    double e[3];
    double hs[3] = {0.008, 0.004, 0.002};
    for (int k = 0; k < 3; ++k) {
        IntegratorConfig c;
        c.step = hs[k];
        c.t_end = T;
        e[k] = max_diff(integrate(sys, s0, c).states.back(), ref);
    }
    for (int k = 0; k < 2; ++k) {
        double ratio = e[k] / e[k + 1];
        EXPECT_GT(ratio, 8) << k;
        EXPECT_LT(ratio, 32) << k;
    }
}

TEST(Integrate, DriftDoesNotGrowWhenHalvingStep) {
    auto sys = vt_system();
    double prev = INFINITY;
    for (double h : {0.008, 0.004, 0.002}) {
        IntegratorConfig c;
        c.step = h;
        c.t_end = 10;
        auto tr = integrate(sys, vt_state(), c);
        EXPECT_LE(tr.max_drift, prev * (1 + 1e-6) + 1e-14);
        prev = tr.max_drift;
    }
}

TEST(AdaptiveStep, ErrorEstimateTracksTrueError) {
    // y' = y, y(0) = 1; compare the estimate with the true error of the
    // embedded fourth-order solution.
    auto f = [](double, const Vec<1>& y) -> std::optional<Vec<1>> { return Vec<1>{y[0]}; };
    for (double h : {0.05, 0.1, 0.2, 0.4}) {
        auto r = *dopri5_trial<1>(f, 0.0, Vec<1>{1.0}, h);
        double y4 = r.y[0] - r.error[0];
        double true4 = std::abs(y4 - std::exp(h));
        double est = std::abs(r.error[0]);
        EXPECT_LE(est, 10 * true4) << h;
        EXPECT_GE(est, true4 / 10) << h;
    }
}

TEST(AdaptiveStep, ContractFields) {
    auto r = adaptive_step_contract(vt_system(), vt_state(), 0.5, {1e-10, 1e-10});
    ASSERT_TRUE(r.ok);
    EXPECT_LE(r.error_norm, 1.0);
    EXPECT_GT(r.accepted_step, 0);
    EXPECT_LT(r.accepted_step, 0.5);
    EXPECT_NEAR(r.state.t, r.accepted_step, 1e-15);
    EXPECT_GT(r.error_estimate, 0);
}

TEST(AdaptiveStep, TinyToleranceNearWall) {
    // close to the wall theta = pi/2 and rushing towards it
    auto sys = vt_system();
    PhaseState s{Chart::sphere, {1.45, 0.7, 0, 0}, {1.0, 0, 0, 0}, 0};
    auto tr = integrate(sys, s, adaptive(1e-14, 3));
    EXPECT_EQ(tr.status, Termination::completed);
    EXPECT_LE(tr.max_drift, 1e-5);
    double smallest = INFINITY;
    for (std::size_t i = 1; i < tr.size(); ++i) smallest = std::min(smallest, std::abs(tr.steps[i]));
    EXPECT_LT(smallest, 1e-3);
}

TEST(AdaptiveStep, FewerStepsThanFixedWhenLoose) {
    auto c = adaptive(1e-3, 10);
    c.drift_abort = 1.0;  // loose tolerance: only the step count matters here
    auto tr = integrate(vt_system(), vt_state(), c);
    ASSERT_TRUE(tr.ok());
    EXPECT_LT(tr.size(), 5001u);
}

TEST(Integrate, H4MomentumExactlyConstant) {
    auto sys = make_system(make_potential("V_T"), Level::euclid4, 1.0);
    PhaseState s{Chart::euclid4_cylindrical, {0.3, 1.2, 0.9, 0.6}, {0.7, 0.1, 0.2, 0.3}, 0};
    IntegratorConfig c;
    c.t_end = 5;
    auto tr = integrate(sys, s, c);
    ASSERT_TRUE(tr.ok());
    for (const auto& st : tr.states) ASSERT_EQ(st.p[0], 0.7);
    auto ad = integrate(sys, s, adaptive(1e-10, 5));
    for (const auto& st : ad.states) ASSERT_EQ(st.p[0], 0.7);
}

#include "platonic/validation.hpp"

TEST(ExactIntegrals, Suite) {
    auto checks = checks::exact_integrals();
    int h1 = 0, radial = 0;
    for (const auto& c : checks) {
        EXPECT_TRUE(c.passed) << c.name << " = " << c.value << " " << c.detail;
        h1 += c.name.rfind("H1 drift", 0) == 0;
        radial += c.name.rfind("radial", 0) == 0;
    }
    // every sphere potential plus the lifted harmonic entry
    EXPECT_EQ(h1, 8);
    EXPECT_EQ(radial, 8);
}

TEST(ExactIntegrals, FreeParticleRadiusIsQuadratic) {
    auto sys = make_system(make_free(Chart::sphere), Level::euclid3);
    PhaseState s{Chart::euclid3_spherical, {1.3, 0.8, 0.4, 0}, {0.2, 0.9, -0.6, 0}, 0};
    auto cfg = checks::oracle_config(20);
    auto tr = integrate(sys, s, cfg);
    ASSERT_TRUE(tr.ok());
    double H = tr.initial_energy, r0 = s.q[0], pr = s.p[0];
    double worst = 0;
    for (const auto& x : tr.states) {
        double t = x.t, want = r0 * r0 + 2 * r0 * pr * t + 2 * H * t * t;
        worst = std::max(worst, std::abs(x.q[0] * x.q[0] - want) / (1 + want));
    }
    EXPECT_LE(worst, 1e-8);
    EXPECT_LE(integral_drift(tr, "L"), 1e-10);
}
