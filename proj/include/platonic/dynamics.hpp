#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "platonic/core.hpp"
#include "platonic/potentials.hpp"

namespace platonic {

/// Which natural Hamiltonian the system uses.
///   sphere:  H_1 = 1/2 (p_th^2 + p_ps^2 / sin^2 th) + V(th, ps)
///   plane:   1/2 |p|^2_metric + V on a plane chart
///   euclid3: H_3 = 1/2 (p_rho^2 + (2 / rho^2) H_1) + (k/2) rho^2 for a sphere V,
///            or the natural Hamiltonian of an R^3 potential
///   euclid4: H_4 = 1/2 (p_u^2 + 2 H_3)
enum class Level { sphere, plane, euclid3, euclid4 };

inline std::string_view level_name(Level l) {
    switch (l) {
        case Level::sphere: return "H1-sphere";
        case Level::plane: return "H2D-plane";
        case Level::euclid3: return "H3-euclid3";
        case Level::euclid4: return "H4-euclid4";
    }
    return "?";
}

inline Level parse_level(std::string_view s) {
    for (Level l : {Level::sphere, Level::plane, Level::euclid3, Level::euclid4})
        if (level_name(l) == s) return l;
    if (s == "sphere") return Level::sphere;
    if (s == "plane") return Level::plane;
    if (s == "euclid3") return Level::euclid3;
    if (s == "euclid4") return Level::euclid4;
    throw std::invalid_argument("unknown level: " + std::string(s));
}

inline constexpr double default_chart_guard = 1e-6;

struct HamiltonianSystem {
    Level level = Level::sphere;
    Chart chart = Chart::sphere;
    PotentialSpec potential;
    double harmonic_k = 0.0;  ///< k of the (k/2) rho^2 term added to a lifted sphere potential
    double guard = default_chart_guard;

    /// True when a sphere potential is embedded radially (levels euclid3/euclid4).
    bool lifted() const { return potential.chart == Chart::sphere && level != Level::sphere; }

    int dof() const { return chart_dim(chart); }
};

/// Validates the potential/level pairing and picks the state chart.
inline HamiltonianSystem make_system(PotentialSpec potential, Level level, double k = 0.0,
                                     double guard = default_chart_guard) {
    if (k < 0) throw std::invalid_argument("harmonic k must be >= 0");
    HamiltonianSystem sys;
    sys.level = level;
    sys.guard = guard;
    const Chart pc = potential.chart;
    auto fail = [&] {
        throw std::invalid_argument("potential " + potential.name + " on chart " + std::string(chart_name(pc)) +
                                    " does not fit level " + std::string(level_name(level)));
    };
    switch (level) {
        case Level::sphere:
            if (pc != Chart::sphere) fail();
            sys.chart = Chart::sphere;
            break;
        case Level::plane:
            if (pc != Chart::plane_polar && pc != Chart::plane_cartesian) fail();
            sys.chart = pc;
            break;
        case Level::euclid3:
            if (pc == Chart::sphere) {
                sys.chart = Chart::euclid3_spherical;
                sys.harmonic_k = k;
            } else if (pc == Chart::euclid3_spherical || pc == Chart::euclid3_cartesian) {
                if (k != 0) throw std::invalid_argument("harmonic k applies only to lifted sphere potentials");
                sys.chart = pc;
            } else {
                fail();
            }
            break;
        case Level::euclid4:
            if (pc != Chart::sphere) fail();
            sys.chart = Chart::euclid4_cylindrical;
            sys.harmonic_k = k;
            break;
    }
    if (potential.full_hamiltonian && level != Level::euclid3) fail();
    sys.potential = std::move(potential);
    return sys;
}

/// Default level for a potential's own chart.
inline Level natural_level(Chart c) {
    switch (c) {
        case Chart::sphere: return Level::sphere;
        case Chart::plane_polar:
        case Chart::plane_cartesian: return Level::plane;
        case Chart::euclid3_spherical:
        case Chart::euclid3_cartesian: return Level::euclid3;
        case Chart::euclid4_cylindrical: return Level::euclid4;
    }
    return Level::sphere;
}

enum class Fault { none, chart_guard, singular };

inline std::string_view fault_name(Fault f) {
    switch (f) {
        case Fault::none: return "none";
        case Fault::chart_guard: return "chart-guard";
        case Fault::singular: return "singular";
    }
    return "?";
}

struct PhaseVelocity {
    Coords dq{};
    Coords dp{};
};

namespace detail {

/// Offset of the (rho, theta, psi) block inside the chart, or -1.
inline int spherical_block(Chart c) {
    if (c == Chart::euclid3_spherical) return 0;
    if (c == Chart::euclid4_cylindrical) return 1;
    return -1;
}

inline Coords angular_coords(const HamiltonianSystem& sys, const Coords& q) {
    int o = spherical_block(sys.chart);
    return {q[o + 1], q[o + 2], 0, 0};
}

struct PotentialTerm {
    double value;
    Gradient grad;
};

/// Potential energy and gradient in the state chart.
inline std::optional<PotentialTerm> potential_term(const HamiltonianSystem& sys, const Coords& q) {
    const auto& V = sys.potential;
    if (!sys.lifted()) {
        double v = V.value(q);
        if (!std::isfinite(v)) return std::nullopt;
        auto g = V.gradient(q);
        if (!g) return std::nullopt;
        return PotentialTerm{v, *g};
    }
    const int o = spherical_block(sys.chart);
    const Coords a = angular_coords(sys, q);
    double v = V.value(a);
    if (!std::isfinite(v)) return std::nullopt;
    auto g = V.gradient(a);
    if (!g) return std::nullopt;
    const double r = q[o], r2 = r * r, k = sys.harmonic_k;
    PotentialTerm t{v / r2 + 0.5 * k * r2, {}};
    t.grad[o] = -2 * v / (r2 * r) + k * r;
    t.grad[o + 1] = (*g)[0] / r2;
    t.grad[o + 2] = (*g)[1] / r2;
    return t;
}

/// Kinetic energy with dT/dp and dT/dq.
struct KineticTerm {
    double value = 0;
    Coords dT_dp{};
    Coords dT_dq{};
};

inline KineticTerm kinetic_term(const HamiltonianSystem& sys, const Coords& q, const Coords& p) {
    KineticTerm k;
    switch (sys.chart) {
        case Chart::plane_cartesian:
        case Chart::euclid3_cartesian:
            for (int i = 0; i < sys.dof(); ++i) {
                k.value += 0.5 * p[i] * p[i];
                k.dT_dp[i] = p[i];
            }
            return k;
        case Chart::plane_polar: {
            double r = q[0];
            k.value = 0.5 * (p[0] * p[0] + p[1] * p[1] / (r * r));
            k.dT_dp = {p[0], p[1] / (r * r), 0, 0};
            k.dT_dq[0] = -p[1] * p[1] / (r * r * r);
            return k;
        }
        case Chart::sphere: {
            double s = std::sin(q[0]), c = std::cos(q[0]);
            k.value = 0.5 * (p[0] * p[0] + p[1] * p[1] / (s * s));
            k.dT_dp = {p[0], p[1] / (s * s), 0, 0};
            k.dT_dq[0] = -p[1] * p[1] * c / (s * s * s);
            return k;
        }
        case Chart::euclid3_spherical:
        case Chart::euclid4_cylindrical: {
            const int o = spherical_block(sys.chart);
            const double r = q[o], r2 = r * r;
            if (sys.potential.full_hamiltonian) {
                const double h = sys.potential.parameter("h");
                const double S = std::sin(h * q[o + 1]), C = std::cos(h * q[o + 1]);
                const double ang = p[o + 1] * p[o + 1] + p[o + 2] * p[o + 2] / (S * S);
                k.value = p[o] * p[o] + ang / r2;
                k.dT_dp[o] = 2 * p[o];
                k.dT_dp[o + 1] = 2 * p[o + 1] / r2;
                k.dT_dp[o + 2] = 2 * p[o + 2] / (r2 * S * S);
                k.dT_dq[o] = -2 * ang / (r2 * r);
                k.dT_dq[o + 1] = -2 * p[o + 2] * p[o + 2] * h * C / (r2 * S * S * S);
                return k;
            }
            const double s = std::sin(q[o + 1]), c = std::cos(q[o + 1]);
            const double ang = p[o + 1] * p[o + 1] + p[o + 2] * p[o + 2] / (s * s);
            k.value = 0.5 * (p[o] * p[o] + ang / r2);
            k.dT_dp[o] = p[o];
            k.dT_dp[o + 1] = p[o + 1] / r2;
            k.dT_dp[o + 2] = p[o + 2] / (r2 * s * s);
            k.dT_dq[o] = -ang / (r2 * r);
            k.dT_dq[o + 1] = -p[o + 2] * p[o + 2] * c / (r2 * s * s * s);
            if (o == 1) {
                k.value += 0.5 * p[0] * p[0];
                k.dT_dp[0] = p[0];
            }
            return k;
        }
    }
    return k;
}

}  // namespace detail

/// Reports whether a state can be evaluated: chart guards first, then the
/// singular set of the potential.
inline Fault check_state(const HamiltonianSystem& sys, const PhaseState& s) {
    if (s.chart != sys.chart) throw std::invalid_argument("state chart does not match the system chart");
    for (int i = 0; i < sys.dof(); ++i)
        if (!std::isfinite(s.q[i]) || !std::isfinite(s.p[i])) return Fault::singular;
    if (chart_singularity_distance(sys.chart, s.q) < sys.guard) return Fault::chart_guard;
    if (sys.potential.full_hamiltonian) {
        const int it = theta_index(sys.chart);
        if (std::abs(std::sin(sys.potential.parameter("h") * s.q[it])) < sys.guard) return Fault::chart_guard;
    }
    if (!detail::potential_term(sys, s.q)) return Fault::singular;
    return Fault::none;
}

inline std::optional<double> hamiltonian_value(const HamiltonianSystem& sys, const PhaseState& s) {
    if (check_state(sys, s) != Fault::none) return std::nullopt;
    auto u = detail::potential_term(sys, s.q);
    return detail::kinetic_term(sys, s.q, s.p).value + u->value;
}

/// Canonical equations dq/dt = dH/dp, dp/dt = -dH/dq.
inline std::optional<PhaseVelocity> hamilton_rhs(const HamiltonianSystem& sys, const Coords& q, const Coords& p) {
    if (chart_singularity_distance(sys.chart, q) < sys.guard) return std::nullopt;
    auto u = detail::potential_term(sys, q);
    if (!u) return std::nullopt;
    auto k = detail::kinetic_term(sys, q, p);
    PhaseVelocity v;
    for (int i = 0; i < sys.dof(); ++i) {
        v.dq[i] = k.dT_dp[i];
        v.dp[i] = -(k.dT_dq[i] + u->grad[i]);
    }
    return v;
}

inline std::optional<PhaseVelocity> hamilton_rhs(const HamiltonianSystem& sys, const PhaseState& s) {
    if (s.chart != sys.chart) throw std::invalid_argument("state chart does not match the system chart");
    return hamilton_rhs(sys, s.q, s.p);
}

/// Constructively known first integrals; entries not defined for the system stay empty.
struct IntegralSet {
    std::optional<double> H;   ///< the system Hamiltonian
    std::optional<double> H1;  ///< angular Hamiltonian on the sphere (levels euclid3, euclid4)
    std::optional<double> H5;  ///< p_u^2 (euclid4)
    std::optional<double> H6;  ///< 1/2 (u p_rho - rho p_u)^2 + (u^2 / rho^2) H_1 (euclid4; conserved for k = 0)
    std::optional<double> Q4;  ///< p_psi^2 + 2 F(psi) for separable V = F / sin^2 theta
    std::optional<double> L;   ///< p_psi for axisymmetric potentials

    std::optional<double> get(std::string_view name) const {
        if (name == "H") return H;
        if (name == "H1") return H1;
        if (name == "H5") return H5;
        if (name == "H6") return H6;
        if (name == "Q4") return Q4;
        if (name == "L") return L;
        throw std::invalid_argument("unknown integral: " + std::string(name));
    }
};

namespace detail {

/// Sphere potential governing the angular motion, if any.
inline const PotentialSpec* angular_potential(const HamiltonianSystem& sys) {
    if (sys.potential.chart == Chart::sphere) return &sys.potential;
    if (sys.potential.angular_part) return sys.potential.angular_part.get();
    return nullptr;
}

}  // namespace detail

inline std::optional<IntegralSet> integrals(const HamiltonianSystem& sys, const PhaseState& s) {
    auto h = hamiltonian_value(sys, s);
    if (!h) return std::nullopt;
    IntegralSet out;
    out.H = h;
    const PotentialSpec* ang = detail::angular_potential(sys);
    const int ip = psi_index(sys.chart);
    const int it = theta_index(sys.chart);

    std::optional<double> h1;
    if (ang && it >= 0) {
        const double th = s.q[it], st = std::sin(th);
        const double v = ang->value({th, s.q[ip], 0, 0});
        h1 = 0.5 * (s.p[it] * s.p[it] + s.p[ip] * s.p[ip] / (st * st)) + v;
        if (sys.level == Level::euclid3 || sys.level == Level::euclid4) out.H1 = h1;
    }
    if (sys.level == Level::euclid4) {
        const double u = s.q[0], rho = s.q[1], pu = s.p[0], prho = s.p[1];
        out.H5 = pu * pu;
        const double m = u * prho - rho * pu;
        out.H6 = 0.5 * m * m + (u * u) / (rho * rho) * *h1;
    }
    if (ang && ang->separable_profile && ip >= 0) {
        out.Q4 = s.p[ip] * s.p[ip] + 2 * ang->separable_profile->value(s.q[ip]);
    }
    const bool axisym = ang ? ang->axisymmetric : sys.potential.axisymmetric;
    if (axisym && ip >= 0 && !sys.potential.full_hamiltonian) out.L = s.p[ip];
    return out;
}

}  // namespace platonic
