#include <gtest/gtest.h>

#include <cmath>

#include "platonic/diagnostics.hpp"

using namespace platonic;

namespace {

const Coords vt_seed{0.9553, pi / 4, 0, 0};
const Coords vi_seed{1.3820858, 5.6548668, 0, 0};  // triangle region with f_I > 0

IntegratorConfig rk4_sym(double T) {
    IntegratorConfig c;
    c.t_start = -T;
    c.t_end = T;
    return c;
}

IntegratorConfig adaptive(double t_end) {
    IntegratorConfig c;
    c.method = Method::adaptive_embedded;
    c.tol = {1e-10, 1e-10};
    c.t_end = t_end;
    return c;
}

}  // namespace

TEST(BoxCounting, LineSegment) {
    std::vector<Point2> p;
    for (int i = 0; i < 1000; ++i) p.push_back({i / 999.0, 0.3 * i / 999.0});
    EXPECT_NEAR(box_counting_dimension(p, log_scales()), 1.0, 0.1);
}

TEST(BoxCounting, UniformSquare) {
    Rng rng(42);
    std::vector<Point2> p;
    for (int i = 0; i < 4096; ++i) p.push_back({rng.uniform(), rng.uniform()});
    EXPECT_NEAR(box_counting_dimension(p, log_scales()), 2.0, 0.15);
}

TEST(BoxCounting, Degenerate) {
    std::vector<Point2> p(50, Point2{0.3, 0.7});
    EXPECT_EQ(box_counting_dimension(p, log_scales()), 0.0);
    EXPECT_EQ(box_counting_dimension({}, log_scales()), 0.0);
    EXPECT_THROW(box_counting_dimension(p, {0.5, 0.25}), std::invalid_argument);
}

TEST(BoxCounting, CircleWithFewPoints) {
    std::vector<Point2> p;
    for (int i = 0; i < 300; ++i) p.push_back({std::cos(0.1 + i * 2.39996), std::sin(0.1 + i * 2.39996)});
    auto bc = box_counting(p, log_scales());
    EXPECT_NEAR(bc.dimension, 1.0, 0.2);
    EXPECT_GE(bc.scales_used.size(), 3u);
}

TEST(Classify, InsufficientBelowMinimum) {
    std::vector<Point2> p;
    for (int i = 0; i < 50; ++i) p.push_back({double(i), double(i)});
    auto v = classify_points(p);
    EXPECT_EQ(v.label, SectionLabel::insufficient);
    EXPECT_EQ(v.points, 50u);
    SectionPointSet s;
    EXPECT_EQ(classify_section(s).label, SectionLabel::insufficient);
}

TEST(Classify, Thresholds) {
    Rng rng(5);
    std::vector<Point2> sq, line;
    for (int i = 0; i < 400; ++i) {
        sq.push_back({rng.uniform(), rng.uniform()});
        line.push_back({rng.uniform(), 0.0});
    }
    EXPECT_EQ(classify_points(sq).label, SectionLabel::scattered);
    EXPECT_EQ(classify_points(line).label, SectionLabel::curve_like);
    ClassifierConfig c;
    c.curve_max = 0.5;
    c.scatter_min = 1.9;
    EXPECT_EQ(classify_points(line, c).label, SectionLabel::ambiguous_curve_like);
}

TEST(Classify, VTSectionIsCurveLike) {
    auto V = make_potential("V_T");
    auto reg = find_region(V, vt_seed);
    Rng rng(42);
    auto s0 = *sample_initial_condition(V, reg, 6.8, rng);
    auto spec = make_section_spec(Chart::sphere, "psi", vt_seed[1], Direction::positive, "theta", "p_theta");
    auto set = compute_section(make_system(V, Level::sphere), s0, rk4_sym(100), spec);
    auto v = classify_section(set);
    EXPECT_EQ(v.label, SectionLabel::curve_like) << v.dimension << " " << v.points;
}

TEST(Classify, VTOChaoticIsScattered) {
    auto V = make_potential("V_TO");
    auto reg = find_region(V, vt_seed);
    Rng rng(42);
    auto s0 = *sample_initial_condition(V, reg, 12.0, rng);
    auto spec = make_section_spec(Chart::sphere, "p_theta", 0, Direction::positive, "psi", "p_psi");
    auto set = compute_section(make_system(V, Level::sphere), s0, rk4_sym(100), spec);
    auto v = classify_section(set);
    EXPECT_EQ(v.label, SectionLabel::scattered) << v.dimension << " " << v.points;
}

TEST(Classify, EnrichmentStable) {
    auto V = make_potential("V_4");
    auto sys = make_system(V, Level::sphere);
    auto reg = find_region(V, {1.3, 0.5, 0, 0});
    Rng rng(3);
    auto s0 = *sample_initial_condition(V, reg, 5.0, rng);
    auto spec = make_section_spec(Chart::sphere, "psi", pi / 6, Direction::positive, "theta", "p_theta");
    IntegratorConfig c;
    c.t_end = 400;
    auto set = compute_section(sys, s0, c, spec);
    ASSERT_GT(set.size(), 300u);
    SectionPointSet half = set;
    half.points.resize(set.size() / 2);
    auto a = classify_section(half), b = classify_section(set);
    EXPECT_EQ(a.label, SectionLabel::curve_like);
    EXPECT_EQ(b.label, SectionLabel::curve_like);
    EXPECT_NEAR(a.dimension, b.dimension, 0.1 + 1e-12) << a.dimension << " " << b.dimension;
}

TEST(Region, VTOctant) {
    auto V = make_potential("V_T");
    auto reg = find_region(V, vt_seed);
    EXPECT_EQ(reg.sign, 1);
    EXPECT_TRUE(reg.contains({0.5, 0.3, 0, 0}));
    EXPECT_FALSE(reg.contains({2.0, 0.3, 0, 0}));
    EXPECT_FALSE(reg.contains({0.5, 2.0, 0, 0}));
    // one octant is an eighth of the sphere's raster cells less the walls,
    // with the raster weighting cells equally in (theta, psi)
    EXPECT_GT(reg.size(), 512u * 512u / 8 * 9 / 10);
    EXPECT_LT(reg.size(), 512u * 512u / 8);
    EXPECT_NEAR(region_min_potential(V, reg), 3 * std::sqrt(3.0), 1e-3);
}

TEST(Region, PeriodicPsiWrap) {
    auto V = make_potential("V_T");
    // octant x > 0, y < 0, z < 0 spans psi in (3 pi/2, 2 pi) and touches psi = 0
    auto reg = find_region(V, {2.2, 5.5, 0, 0});
    EXPECT_EQ(reg.sign, 1);
    EXPECT_TRUE(reg.contains({2.2, 6.2, 0, 0}));
    EXPECT_FALSE(reg.contains({2.2, 0.1, 0, 0}));
    auto ca2 = make_potential("Ca2");
    auto wedge = find_region(ca2, {1.0, 0.05, 0, 0});
    EXPECT_TRUE(wedge.contains({1.0, 1.0, 0, 0}));
    EXPECT_FALSE(wedge.contains({1.0, 1.1, 0, 0}));
    EXPECT_FALSE(wedge.contains({1.0, 6.2, 0, 0}));
}

TEST(Region, SeedOnSingularSetRejected) {
    auto V = make_potential("V_T");
    EXPECT_THROW(find_region(V, {pi / 2, 1.0, 0, 0}), std::invalid_argument);
}

TEST(Sampling, StatesInRegionWithEnergy) {
    auto V = make_potential("V_T");
    auto reg = find_region(V, vt_seed);
    auto sys = make_system(V, Level::sphere);
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        auto s = sample_initial_condition(V, reg, 7.0, rng);
        ASSERT_TRUE(s);
        EXPECT_GT(V.region_factor(s->q), 0);
        EXPECT_NEAR(*hamiltonian_value(sys, *s), 7.0, 1e-12);
    }
    EXPECT_FALSE(sample_initial_condition(V, reg, 1.0, rng, 1000).has_value());
}

TEST(Sampling, Deterministic) {
    auto V = make_potential("V_O");
    auto reg = find_region(V, vt_seed);
    Rng a(42), b(42);
    for (int i = 0; i < 10; ++i) {
        auto x = *sample_initial_condition(V, reg, 40, a), y = *sample_initial_condition(V, reg, 40, b);
        EXPECT_EQ(x.q, y.q);
        EXPECT_EQ(x.p, y.p);
    }
}

TEST(Confinement, InRegionOrbits) {
    for (auto [name, seed, factor] : {std::tuple{"V_T", vt_seed, 1.3}, {"V_O", vt_seed, 1.3}, {"V_I", vi_seed, 1.3}}) {
        auto V = make_potential(name);
        auto reg = find_region(V, seed);
        double E = factor * region_min_potential(V, reg);
        Rng rng(11);
        for (int k = 0; k < 2; ++k) {
            auto s0 = *sample_initial_condition(V, reg, E, rng);
            auto tr = integrate(make_system(V, Level::sphere), s0, rk4_sym(100));
            EXPECT_TRUE(tr.ok()) << name;
            EXPECT_TRUE(confinement_check(tr)) << name;
        }
    }
}

TEST(Confinement, StraightPathAcrossWallFails) {
    OrbitTrace tr;
    tr.system = make_system(make_potential("V_T"), Level::sphere);
    for (int i = 0; i <= 20; ++i) tr.states.push_back({Chart::sphere, {1.2 + 0.04 * i, 0.7, 0, 0}, {}, double(i)});
    EXPECT_FALSE(confinement_check(tr));
    EXPECT_FALSE(confinement_check(tr, [](const Coords& q) { return angular_factor(InvariantPolynomial::T, q[0], q[1]); }));
}

TEST(Confinement, VOInOctantSubregion) {
    auto V = make_potential("V_O");
    for (Coords seed : {Coords{0.9, 0.7, 0, 0}, Coords{2.2, 2.4, 0, 0}, Coords{0.9, 4.0, 0, 0}}) {
        auto reg = find_region(V, seed);
        Rng rng(2);
        auto s0 = *sample_initial_condition(V, reg, 35, rng);
        auto tr = integrate(make_system(V, Level::sphere), s0, rk4_sym(100));
        EXPECT_TRUE(tr.ok());
        EXPECT_TRUE(confinement_check(tr));
    }
}

TEST(CriticalPoints, VTOctantSingleMinimum) {
    auto V = make_potential("V_T");
    auto cs = find_critical_points(V, find_region(V, vt_seed), 32);
    ASSERT_EQ(cs.points.size(), 1u);
    const auto& p = cs.points[0];
    EXPECT_NEAR(p.q[0], std::atan(std::sqrt(2.0)), 1e-6);
    EXPECT_NEAR(p.q[1], pi / 4, 1e-6);
    EXPECT_NEAR(p.value, 3 * std::sqrt(3.0), 1e-6);
    EXPECT_EQ(p.type, CriticalType::minimum);
    EXPECT_LE(p.grad_norm, 1e-8);
}

TEST(CriticalPoints, V4Sector) {
    auto V = make_potential("V_4");
    auto cs = find_critical_points(V, find_region(V, {1.0, 0.5, 0, 0}), 32);
    ASSERT_EQ(cs.points.size(), 1u);
    EXPECT_NEAR(cs.points[0].q[0], pi / 2, 1e-6);
    EXPECT_NEAR(cs.points[0].q[1], pi / 6, 1e-6);
    EXPECT_LE(cs.points[0].grad_norm, 1e-8);
}

TEST(CriticalPoints, OnePerRegion) {
    for (auto [name, seed] : {std::pair{"V_O", vt_seed}, {"V_I", vi_seed}, {"V_O", Coords{2.2, 4.0, 0, 0}}}) {
        auto V = make_potential(name);
        auto cs = find_critical_points(V, find_region(V, seed), 32);
        EXPECT_EQ(cs.points.size(), 1u) << name;
        for (const auto& p : cs.points) EXPECT_LE(p.grad_norm, 1e-8);
    }
    auto nv = negate(make_potential("V_I"));
    auto cs = find_critical_points(nv, find_region(nv, {std::atan(2.0), 0.0, 0, 0}), 32);
    EXPECT_EQ(cs.points.size(), 1u);
}

TEST(IntegralDrift, H6ConservedOnlyWithoutHarmonicTerm) {
    auto V = make_potential("V_T");
    PhaseState s{Chart::euclid4_cylindrical, {0.4, 1.1, 0.9, 0.7}, {0.3, 0.2, 0.4, 0.1}, 0};
    auto k0 = integrate(make_system(V, Level::euclid4, 0.0), s, adaptive(20));
    auto k1 = integrate(make_system(V, Level::euclid4, 1.0), s, adaptive(20));
    ASSERT_TRUE(k0.ok() && k1.ok());
    EXPECT_LE(integral_drift(k0, "H6"), 1e-8);
    EXPECT_GE(integral_drift(k1, "H6"), 1e-3);
    EXPECT_LE(integral_drift(k0, "H5"), 1e-15);
}

TEST(IntegralDrift, HMatchesTrace) {
    auto V = make_potential("V_T");
    auto reg = find_region(V, vt_seed);
    Rng rng(1);
    IntegratorConfig c;
    c.t_end = 5;
    auto tr = integrate(make_system(V, Level::sphere), *sample_initial_condition(V, reg, 7, rng), c);
    EXPECT_EQ(integral_drift(tr, "H"), tr.max_drift);
    EXPECT_THROW(integral_drift(tr, "H6"), std::invalid_argument);
}

TEST(RegionReport, VT) {
    auto V = make_potential("V_T");
    auto reg = find_region(V, vt_seed);
    Rng rng(4);
    std::vector<OrbitTrace> orbits;
    for (int i = 0; i < 2; ++i)
        orbits.push_back(integrate(make_system(V, Level::sphere), *sample_initial_condition(V, reg, 7, rng), rk4_sym(20)));
    auto r = region_report(V, reg, orbits);
    EXPECT_TRUE(r.confined);
    EXPECT_EQ(r.orbits_tested, 2);
    EXPECT_EQ(r.sign, 1);
    EXPECT_EQ(r.critical_points.size(), 1u);
}
