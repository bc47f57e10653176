#include <gtest/gtest.h>

#include <cmath>

#include "platonic/dynamics.hpp"
#include "platonic/quadrature.hpp"
#include "platonic/random.hpp"

using namespace platonic;

namespace {

HamiltonianSystem sphere_free() { return make_system(make_free(Chart::sphere), Level::sphere); }

PhaseState state(Chart c, Coords q, Coords p) { return PhaseState{c, q, p, 0}; }

// Random nonsingular state for a system, away from walls.
PhaseState random_state(const HamiltonianSystem& sys, Rng& rng) {
    auto box = sampling_box(sys.chart);
    for (;;) {
        PhaseState s;
        s.chart = sys.chart;
        for (int i = 0; i < sys.dof(); ++i) {
            s.q[i] = rng.uniform(box[i].first, box[i].second);
            s.p[i] = rng.uniform(-1, 1);
        }
        auto h = hamiltonian_value(sys, s);
        if (h && std::abs(*h) < 30 && sys.potential.barrier(sys.lifted() ? detail::angular_coords(sys, s.q) : s.q) != 0)
            return s;
    }
}

std::vector<HamiltonianSystem> all_systems() {
    std::vector<HamiltonianSystem> out;
    for (const auto& p : catalog()) {
        out.push_back(make_system(p, natural_level(p.chart)));
        if (p.chart == Chart::sphere) {
            out.push_back(make_system(p, Level::euclid3, 1.0));
            out.push_back(make_system(p, Level::euclid4, 0.5));
        }
    }
    return out;
}

}  // namespace

TEST(Hamiltonian, Examples) {
    auto sys = sphere_free();
    EXPECT_NEAR(*hamiltonian_value(sys, state(Chart::sphere, {1, 0, 0, 0}, {1, 0, 0, 0})), 0.5, 1e-15);
    auto vt = make_system(make_potential("V_T"), Level::sphere);
    EXPECT_NEAR(*hamiltonian_value(vt, state(Chart::sphere, {pi / 4, pi / 4, 0, 0}, {})), 4 * std::sqrt(2.0), 1e-12);
    auto h3 = make_system(make_free(Chart::sphere), Level::euclid3, 1.0);
    EXPECT_NEAR(*hamiltonian_value(h3, state(Chart::euclid3_spherical, {1, 1, 0, 0}, {})), 0.5, 1e-15);
}

TEST(Hamiltonian, LevelH3MatchesDisplay) {
    auto h3 = make_system(make_potential("V_T"), Level::euclid3, 1.5);
    Rng rng(2);
    for (int i = 0; i < 50; ++i) {
        PhaseState s = random_state(h3, rng);
        double r = s.q[0];
        double h1 = 0.5 * (s.p[1] * s.p[1] + s.p[2] * s.p[2] / std::pow(std::sin(s.q[1]), 2)) +
                    h3.potential.value({s.q[1], s.q[2], 0, 0});
        double expect = 0.5 * (s.p[0] * s.p[0] + 2 / (r * r) * h1) + 0.75 * r * r;
        EXPECT_NEAR(*hamiltonian_value(h3, s), expect, 1e-12 * (1 + std::abs(expect)));
        auto I = integrals(h3, s);
        EXPECT_NEAR(*I->H1, h1, 1e-12 * (1 + std::abs(h1)));
    }
}

TEST(Hamiltonian, LevelH4MatchesDisplay) {
    auto h4 = make_system(make_potential("V_O"), Level::euclid4, 0.7);
    auto h3 = make_system(make_potential("V_O"), Level::euclid3, 0.7);
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        PhaseState s = random_state(h4, rng);
        PhaseState t = state(Chart::euclid3_spherical, {s.q[1], s.q[2], s.q[3], 0}, {s.p[1], s.p[2], s.p[3], 0});
        double expect = 0.5 * (s.p[0] * s.p[0] + 2 * *hamiltonian_value(h3, t));
        EXPECT_NEAR(*hamiltonian_value(h4, s), expect, 1e-12 * (1 + std::abs(expect)));
    }
}

TEST(Hamiltonian, SingularStateMarker) {
    auto vt = make_system(make_potential("V_T"), Level::sphere);
    auto s = state(Chart::sphere, {pi / 2, 0.5, 0, 0}, {});
    EXPECT_EQ(check_state(vt, s), Fault::singular);
    EXPECT_FALSE(hamiltonian_value(vt, s).has_value());
    EXPECT_FALSE(hamilton_rhs(vt, s).has_value());
    auto pole = state(Chart::sphere, {1e-9, 0.5, 0, 0}, {});
    EXPECT_EQ(check_state(sphere_free(), pole), Fault::chart_guard);
}

TEST(Hamiltonian, LevelPairingValidated) {
    EXPECT_THROW(make_system(make_potential("Ca2"), Level::sphere), std::invalid_argument);
    EXPECT_THROW(make_system(make_potential("KM2"), Level::euclid4), std::invalid_argument);
    EXPECT_THROW(make_system(make_potential("V_T"), Level::euclid3, -1), std::invalid_argument);
    EXPECT_EQ(make_system(make_potential("V_T"), Level::euclid4).dof(), 4);
}

TEST(HamiltonRhs, EquatorIsGeodesic) {
    auto v = hamilton_rhs(sphere_free(), state(Chart::sphere, {pi / 2, 0.3, 0, 0}, {0, 1.2, 0, 0}));
    ASSERT_TRUE(v);
    EXPECT_NEAR(v->dp[0], 0, 1e-15);
    EXPECT_NEAR(v->dq[1], 1.2, 1e-15);
}

TEST(HamiltonRhs, SeparableV4) {
    auto sys = make_system(make_potential("V_4"), Level::sphere);
    const auto& F = *sys.potential.separable_profile;
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        PhaseState s = random_state(sys, rng);
        double st = std::sin(s.q[0]);
        auto v = *hamilton_rhs(sys, s);
        EXPECT_NEAR(v.dp[1], -F.derivative(s.q[1]) / (st * st), 1e-10 * (1 + std::abs(v.dp[1])));
        EXPECT_NEAR(v.dq[0], s.p[0], 1e-15);
        EXPECT_NEAR(v.dq[1], s.p[1] / (st * st), 1e-12);
    }
}

TEST(HamiltonRhs, CyclicU) {
    auto sys = make_system(make_potential("V_T"), Level::euclid4, 0.0);
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        PhaseState s = random_state(sys, rng);
        auto v = *hamilton_rhs(sys, s);
        EXPECT_EQ(v.dp[0], 0.0);
        EXPECT_EQ(v.dq[0], s.p[0]);
    }
}

TEST(HamiltonRhs, MatchesDerivativesOfHamiltonian) {
    Rng rng(6);
    for (const auto& sys : all_systems()) {
        double worst = 0;
        for (int n = 0; n < 40; ++n) {
            PhaseState s = random_state(sys, rng);
            auto v = hamilton_rhs(sys, s);
            ASSERT_TRUE(v) << sys.potential.name;
            for (int i = 0; i < sys.dof(); ++i) {
                const double h = 1e-6;
                PhaseState a = s, b = s;
                a.q[i] += h;
                b.q[i] -= h;
                auto ha = hamiltonian_value(sys, a), hb = hamiltonian_value(sys, b);
                if (ha && hb) worst = std::max(worst, std::abs(-(*ha - *hb) / (2 * h) - v->dp[i]) / (1 + std::abs(v->dp[i])));
                a = s;
                b = s;
                a.p[i] += h;
                b.p[i] -= h;
                worst = std::max(worst, std::abs((*hamiltonian_value(sys, a) - *hamiltonian_value(sys, b)) / (2 * h) -
                                                 v->dq[i]) / (1 + std::abs(v->dq[i])));
            }
        }
        EXPECT_LE(worst, 1e-5) << sys.potential.name << " " << level_name(sys.level);
    }
}

TEST(HamiltonRhs, Reversibility) {
    Rng rng(7);
    for (const auto& sys : all_systems()) {
        PhaseState s = random_state(sys, rng), r = s;
        for (int i = 0; i < 4; ++i) r.p[i] = -s.p[i];
        auto a = *hamilton_rhs(sys, s), b = *hamilton_rhs(sys, r);
        for (int i = 0; i < sys.dof(); ++i) {
            EXPECT_NEAR(b.dq[i], -a.dq[i], 1e-12 * (1 + std::abs(a.dq[i])));
            EXPECT_NEAR(b.dp[i], a.dp[i], 1e-12 * (1 + std::abs(a.dp[i])));
        }
    }
}

TEST(Integrals, Examples) {
    auto h4 = make_system(make_potential("V_T"), Level::euclid4);
    auto s = state(Chart::euclid4_cylindrical, {0, 1.3, 0.9, 0.6}, {3, 0.2, 0.1, -0.3});
    auto I = *integrals(h4, s);
    EXPECT_NEAR(*I.H5, 9, 1e-15);
    EXPECT_NEAR(*I.H6, 0.5 * 1.3 * 1.3 * 9, 1e-12);

    auto v4 = make_system(make_potential("V_4"), Level::sphere);
    auto J = *integrals(v4, state(Chart::sphere, {1.0, pi / 6, 0, 0}, {0.3, 0, 0, 0}));
    EXPECT_NEAR(*J.Q4, 2, 1e-12);
    EXPECT_FALSE(J.H5);
    EXPECT_FALSE(J.L);
}

TEST(Integrals, AxisymmetricHasL) {
    auto sys = make_system(make_potential("V_4", {{"n", 0}}), Level::sphere);
    auto I = *integrals(sys, state(Chart::sphere, {1, 2, 0, 0}, {0.1, 0.7, 0, 0}));
    ASSERT_TRUE(I.L);
    EXPECT_EQ(*I.L, 0.7);
    auto vt = *integrals(make_system(make_potential("V_T"), Level::sphere), state(Chart::sphere, {1, 0.5, 0, 0}, {}));
    EXPECT_FALSE(vt.L);
    EXPECT_THROW((void)vt.get("H2"), std::invalid_argument);
}

TEST(Radial, ZeroAtStart) {
    auto sys = make_system(make_potential("V_T"), Level::euclid3, 1.0);
    OrbitTrace tr;
    tr.system = sys;
    tr.states.push_back(state(Chart::euclid3_spherical, {1.2, 0.9, 0.7, 0}, {0.3, 0.1, -0.2, 0}));
    EXPECT_LE(radial_consistency(tr), 1e-14);
}
