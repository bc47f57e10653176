#include <gtest/gtest.h>

#include <cmath>

#include "platonic/sections.hpp"

using namespace platonic;

namespace {

PhaseState sphere_state(const PotentialSpec& v, double th, double ps, double energy, double dir) {
    PhaseState s{Chart::sphere, {th, ps, 0, 0}, {}, 0};
    double k = std::sqrt(2 * (energy - v.value(s.q)));
    s.p[0] = k * std::cos(dir);
    s.p[1] = k * std::sin(dir) * std::sin(th);
    return s;
}

IntegratorConfig rk4(double t_end) {
    IntegratorConfig c;
    c.t_end = t_end;
    return c;
}

IntegratorConfig adaptive(double tol, double t_end) {
    IntegratorConfig c = rk4(t_end);
    c.method = Method::adaptive_embedded;
    c.tol = {tol, tol};
    return c;
}

}  // namespace

TEST(PhaseVar, Parsing) {
    auto v = parse_phase_var(Chart::sphere, "p_theta");
    EXPECT_TRUE(v.momentum);
    EXPECT_EQ(v.index, 0);
    EXPECT_EQ(parse_phase_var(Chart::sphere, "psi"), (PhaseVar{false, 1}));
    EXPECT_EQ(parse_phase_var(Chart::euclid4_cylindrical, "q4"), (PhaseVar{false, 3}));
    EXPECT_EQ(parse_phase_var(Chart::sphere, "p2"), (PhaseVar{true, 1}));
    EXPECT_THROW(parse_phase_var(Chart::sphere, "rho"), std::invalid_argument);
    EXPECT_THROW(parse_phase_var(Chart::sphere, "q3"), std::invalid_argument);
    EXPECT_EQ(phase_var_name(Chart::sphere, {true, 1}), "p_psi");
    EXPECT_THROW(make_section_spec(Chart::sphere, "psi", 0, Direction::both, "theta", "theta"), std::invalid_argument);
}

TEST(Bisection, LinearTrigger) {
    // y' = 1 from y = -0.37 crosses y = 0 at t = 0.37
    auto step = [](double y, double tau) -> std::optional<double> { return y + tau; };
    auto g = [](double y) { return y; };
    auto r = bisect_crossing<double>(step, -0.37, 1.0, g, 1e-12, 40);
    EXPECT_EQ(r.status, RefineStatus::ok);
    EXPECT_LE(r.iterations, 40);
    EXPECT_NEAR(r.tau, 0.37, 1e-12);
}

TEST(Bisection, NonBracketing) {
    auto step = [](double y, double tau) -> std::optional<double> { return y + tau; };
    auto r = bisect_crossing<double>(step, 0.5, 1.0, [](double y) { return y; }, 1e-12);
    EXPECT_EQ(r.status, RefineStatus::not_bracketing);
    auto sys = make_system(make_free(Chart::sphere), Level::sphere);
    auto spec = make_section_spec(Chart::sphere, "psi", 3.0, Direction::both, "theta", "p_theta");
    PhaseState a{Chart::sphere, {1, 0.1, 0, 0}, {0, 0.1, 0, 0}, 0}, b = a;
    b.q[1] = 0.2;
    b.t = 0.5;
    EXPECT_EQ(refine_crossing(sys, a, b, spec).status, RefineStatus::not_bracketing);
}

TEST(Bisection, MaxIterationsFlagged) {
    auto step = [](double y, double tau) -> std::optional<double> { return y + tau; };
    auto r = bisect_crossing<double>(step, -0.37, 1.0, [](double y) { return y; }, 1e-15, 5);
    EXPECT_EQ(r.status, RefineStatus::max_iterations);
    EXPECT_LE(r.residual, 1.0 / 32);
}

TEST(Section, EquatorialGeodesicFixedPoint) {
    auto sys = make_system(make_free(Chart::sphere), Level::sphere);
    PhaseState s{Chart::sphere, {pi / 2, 0, 0, 0}, {0, 1, 0, 0}, 0};
    auto spec = make_section_spec(Chart::sphere, "psi", 0, Direction::positive, "theta", "p_theta");
    auto set = compute_section(sys, s, rk4(50), spec);
    ASSERT_EQ(set.size(), 7u);  // t = 2 pi m, m = 1..7
    for (std::size_t i = 0; i < set.size(); ++i) {
        EXPECT_NEAR(set.points[i].rec1, pi / 2, 1e-8);
        EXPECT_NEAR(set.points[i].rec2, 0, 1e-8);
        EXPECT_NEAR(set.points[i].t_cross, two_pi * double(i + 1), 1e-8);
    }
    spec.direction = Direction::negative;
    EXPECT_EQ(compute_section(sys, s, rk4(50), spec).size(), 0u);
}

TEST(Section, NeverReachesTrigger) {
    auto sys = make_system(make_free(Chart::sphere), Level::sphere);
    PhaseState s{Chart::sphere, {1.0, 0, 0, 0}, {0.1, 0, 0, 0}, 0};
    auto spec = make_section_spec(Chart::sphere, "psi", 1.0, Direction::both, "theta", "p_theta");
    auto set = compute_section(sys, s, rk4(5), spec);
    EXPECT_EQ(set.size(), 0u);
    EXPECT_EQ(set.status, Termination::completed);
}

TEST(Section, V4PointsOnAnalyticCurve) {
    auto v = make_potential("V_4");
    auto sys = make_system(v, Level::sphere);
    auto spec = make_section_spec(Chart::sphere, "psi", pi / 6, Direction::positive, "theta", "p_theta");
    for (double dir : {0.3, 1.1, 2.0}) {
        auto s0 = sphere_state(v, 1.2, 0.4, 4.0, dir);
        auto I = *integrals(sys, s0);
        for (auto cfg : {rk4(100), adaptive(1e-10, 100)}) {
            auto set = compute_section(sys, s0, cfg, spec);
            ASSERT_GT(set.size(), 10u);
            for (const auto& p : set.points) {
                double st = std::sin(p.rec1);
                EXPECT_NEAR(p.rec2 * p.rec2 + *I.Q4 / (st * st), 2 * *I.H, 1e-6);
                EXPECT_LE(std::abs(trigger_residual(spec, p.state)), spec.tolerance);
            }
        }
    }
}

TEST(Section, RefinedResidualOnVTCrossings) {
    auto v = make_potential("V_T");
    auto sys = make_system(v, Level::sphere);
    auto spec = make_section_spec(Chart::sphere, "theta", 0.95, Direction::both, "psi", "p_psi");
    int n = 0;
    for (int k = 0; n < 100 && k < 20; ++k) {
        auto s0 = sphere_state(v, 0.9, 0.6, 7.0 + 0.2 * k, 0.3 * k + 0.1);
        auto tr = integrate(sys, s0, rk4(20));
        auto set = section_of_trace(tr, spec);
        for (const auto& p : set.points) {
            ++n;
            EXPECT_LE(std::abs(trigger_residual(spec, p.state)), 1e-10);
            auto h = *hamiltonian_value(sys, p.state);
            EXPECT_LE(std::abs(h - tr.initial_energy) / tr.initial_energy, tr.max_drift + 1e-12);
        }
        EXPECT_EQ(set.refine_failures, 0);
    }
    EXPECT_GE(n, 100);
}

TEST(Section, DirectionFilterAndOrdering) {
    auto v = make_potential("V_T");
    auto sys = make_system(v, Level::sphere);
    auto s0 = sphere_state(v, 0.9, 0.6, 8.0, 0.4);
    auto tr = integrate(sys, s0, rk4(30));
    auto both = section_of_trace(tr, make_section_spec(Chart::sphere, "psi", 0.7, Direction::both, "theta", "p_theta"));
    auto pos = section_of_trace(tr, make_section_spec(Chart::sphere, "psi", 0.7, Direction::positive, "theta", "p_theta"));
    auto neg = section_of_trace(tr, make_section_spec(Chart::sphere, "psi", 0.7, Direction::negative, "theta", "p_theta"));
    EXPECT_EQ(both.size(), pos.size() + neg.size());
    for (const auto& p : pos.points) EXPECT_GT(hamilton_rhs(sys, p.state)->dq[1], 0);
    for (const auto& p : neg.points) EXPECT_LT(hamilton_rhs(sys, p.state)->dq[1], 0);
    for (std::size_t i = 1; i < both.size(); ++i) EXPECT_GT(both.points[i].t_cross, both.points[i - 1].t_cross);
}

TEST(Section, CountIndependentOfRefinementTolerance) {
    auto v = make_potential("V_O");
    auto sys = make_system(v, Level::sphere);
    PhaseState s0 = sphere_state(v, 0.9, 0.7, 40.0, 0.9);
    auto tr = integrate(sys, s0, rk4(40));
    auto spec = make_section_spec(Chart::sphere, "psi", 0.7, Direction::positive, "theta", "p_theta");
    std::size_t n0 = section_of_trace(tr, spec).size();
    EXPECT_GT(n0, 5u);
    for (double tol : {1e-6, 1e-8, 1e-12}) {
        spec.tolerance = tol;
        EXPECT_EQ(section_of_trace(tr, spec).size(), n0);
    }
}

TEST(Section, StableUnderStepHalving) {
    auto v = make_potential("V_4");
    auto sys = make_system(v, Level::sphere);
    auto s0 = sphere_state(v, 1.2, 0.4, 4.0, 0.7);
    auto spec = make_section_spec(Chart::sphere, "psi", pi / 6, Direction::positive, "theta", "p_theta");
    IntegratorConfig a = rk4(30), b = rk4(30);
    b.step = 0.001;
    auto sa = compute_section(sys, s0, a, spec), sb = compute_section(sys, s0, b, spec);
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t i = 0; i < sa.size(); ++i) {
        EXPECT_LE(std::abs(sa.points[i].rec1 - sb.points[i].rec1), 1e-5);
        EXPECT_LE(std::abs(sa.points[i].rec2 - sb.points[i].rec2), 1e-5);
    }
}

TEST(Section, MergeOrdersByIcThenTime) {
    SectionPointSet a, b;
    a.ic_id = 1;
    b.ic_id = 0;
    a.points = {{2.0, 0, 0, {}}, {1.0, 0, 0, {}}};
    b.points = {{5.0, 0, 0, {}}};
    auto m = merge_sections({a, b});
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].ic_id, 0);
    EXPECT_EQ(m[1].t_cross, 1.0);
    EXPECT_EQ(m[2].t_cross, 2.0);
}
