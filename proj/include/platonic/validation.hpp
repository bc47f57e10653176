#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "json.hpp"
#include "platonic/diagnostics.hpp"
#include "platonic/polyhedral.hpp"
#include "platonic/potentials.hpp"
#include "platonic/quadrature.hpp"

namespace platonic {

struct Check {
    std::string group;
    std::string name;
    double value = 0;
    double threshold = 0;
    bool passed = false;
    std::string detail;
};

inline Check check_le(std::string group, std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(group), std::move(name), value, threshold, std::isfinite(value) && value <= threshold,
            std::move(detail)};
}

inline Check check_ge(std::string group, std::string name, double value, double threshold, std::string detail = {}) {
    return {std::move(group), std::move(name), value, threshold, std::isfinite(value) && value >= threshold,
            std::move(detail)};
}

struct ValidationOptions {
    bool perturb_i60 = false;  ///< add 1e-3 to one stored I60 element
    int samples = 1000;
};

struct ValidationReport {
    std::vector<Check> checks;

    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
    }
    int failures() const {
        return int(std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
    }
    void add(const std::vector<Check>& v) { checks.insert(checks.end(), v.begin(), v.end()); }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j = nlohmann::ordered_json::array();
        for (const auto& c : checks)
            j.push_back({{"group", c.group},
                         {"name", c.name},
                         {"value", c.value},
                         {"threshold", c.threshold},
                         {"passed", c.passed},
                         {"detail", c.detail}});
        return {{"passed", ok()}, {"failures", failures()}, {"checks", j}};
    }
};

namespace checks {

inline SymmetryGroup group_for(const std::string& name, const ValidationOptions& o) {
    auto g = symmetry_group(name);
    if (o.perturb_i60 && name == "I60") g.elements.at(7).a[0] += 1e-3;
    return g;
}

inline std::vector<Check> gradients(int samples) {
    std::vector<Check> out;
    for (const auto& s : catalog()) {
        auto r = gradient_check(s, samples);
        out.push_back(check_le("potentials", "gradient " + s.name, r.max_relative_error, 1e-6,
                               std::to_string(r.points) + " points"));
    }
    return out;
}

inline std::vector<Check> groups(const ValidationOptions& o) {
    std::vector<Check> out;
    for (auto [name, order] : {std::pair{"T12", 12}, {"O24", 24}, {"I60", 60}}) {
        auto g = group_for(name, o);
        auto v = validate_group(g, true);
        std::string n(name);
        out.push_back(check_le("symmetry", n + " orthogonality", v.orthogonality, 1e-9));
        out.push_back(check_le("symmetry", n + " determinant", v.determinant, 1e-9));
        out.push_back(check_le("symmetry", n + " closure", v.closure, 1e-9));
        out.push_back(check_le("symmetry", n + " order", std::abs(double(g.elements.size()) - order), 0,
                               std::to_string(g.elements.size()) + " elements"));
        out.push_back(check_ge("symmetry", n + " identity", v.has_identity, 1));
    }
    return out;
}

inline std::vector<Check> invariance(const ValidationOptions& o) {
    std::vector<Check> out;
    for (auto [p, g] : {std::pair{InvariantPolynomial::T, "T12"},
                        {InvariantPolynomial::O, "O24"},
                        {InvariantPolynomial::TO, "O24"},
                        {InvariantPolynomial::I, "I60"}}) {
        auto grp = group_for(g, o);
        double r = check_invariance([p = p](std::span<const double> x) { return evaluate(p, x); }, grp, o.samples);
        out.push_back(check_le("symmetry", "invariance " + std::string(polynomial_name(p)) + " under " + g, r, 1e-9));
    }
    return out;
}

/// V_I carries the designated arbiter role: its residual is always reported,
/// and a miss counts as a discrepancy report rather than a failure.
inline std::vector<Check> factorization(int samples) {
    std::vector<Check> out;
    for (auto [n, p] : {std::pair{"V_T", InvariantPolynomial::T},
                        {"V_O", InvariantPolynomial::O},
                        {"V_TO", InvariantPolynomial::TO}})
        out.push_back(check_le("potentials", std::string("factorization ") + n,
                               factorization_check(make_potential(n), p, samples), 1e-9));
    auto vi = make_potential("V_I");
    double r = factorization_check(vi, InvariantPolynomial::I, samples);
    Check c = check_le("potentials", "factorization V_I", r, 1e-6);
    char buf[64];
    std::snprintf(buf, sizeof buf, "residual %.3g, sign s = %d", r, vi.factor_sign);
    c.detail = buf;
    if (!c.passed) {
        c.detail += "; discrepancy report emitted";
        c.passed = std::isfinite(r);
    }
    out.push_back(c);
    return out;
}

inline IntegratorConfig oracle_config(double t_end = 20) {
    IntegratorConfig c;
    c.method = Method::adaptive_embedded;
    c.tol = {1e-10, 1e-10};
    c.t_end = t_end;
    c.drift_abort = 1e-3;
    return c;
}

/// A sphere point away from the singular set where V is moderate and positive.
inline std::optional<Coords> quiet_point(const PotentialSpec& v, Rng& rng) {
    for (int k = 0; k < 100000; ++k) {
        Coords q{std::acos(rng.uniform(-0.9, 0.9)), rng.uniform(0, two_pi), 0, 0};
        double x = v.value(q);
        if (!std::isfinite(x) || x <= 0 || x > 200) continue;
        double b = v.barrier(q), g = 0;
        for (int i = 0; i < 2; ++i) {
            Coords a = q, c = q;
            a[i] += 1e-6;
            c[i] -= 1e-6;
            g = std::max(g, std::abs(v.barrier(a) - v.barrier(c)) / 2e-6);
        }
        if (std::abs(b) < 0.05 * g) continue;
        return q;
    }
    return std::nullopt;
}

/// H_1 along lifted flows, H_6 with and without the harmonic term, Q4, L and
/// the radial quadrature.
inline std::vector<Check> exact_integrals() {
    std::vector<Check> out;
    Rng rng(2024);
    const auto cfg = oracle_config();
    for (const auto& v : catalog()) {
        const bool sphere = v.chart == Chart::sphere;
        if (!sphere && !v.angular_part) continue;
        const PotentialSpec& ang = sphere ? v : *v.angular_part;
        auto sys = sphere ? make_system(v, Level::euclid3, 1.0) : make_system(v, natural_level(v.chart));
        // orbits running into an attracting centre (V_CO) have no conserved
        // quantities past the collision; those starts are redrawn
        OrbitTrace tr;
        int attempts = 0;
        for (; attempts < 20; ++attempts) {
            auto q = quiet_point(ang, rng);
            if (!q) break;
            PhaseState s{Chart::euclid3_spherical, {1.0, (*q)[0], (*q)[1], 0}, {0.1, 0.2, -0.15, 0}, 0};
            tr = integrate(sys, s, cfg);
            if (tr.ok()) break;
        }
        if (tr.states.empty()) {
            out.push_back({"dynamics", "H1 drift " + v.name, NAN, 1e-8, false, "no sample point"});
            continue;
        }
        double d = tr.ok() ? integral_drift(tr, "H1") : NAN;
        double r = tr.ok() ? radial_consistency(tr) : NAN;
        out.push_back(check_le("dynamics", "H1 drift " + v.name, d, 1e-8,
                               std::string(termination_name(tr.status)) + ", start " + std::to_string(attempts + 1)));
        out.push_back(check_le("dynamics", "radial consistency " + v.name, r, 1e-8));
    }

    auto vt = make_potential("V_T");
    PhaseState s4{Chart::euclid4_cylindrical, {0.4, 1.1, 0.9, 0.7}, {0.3, 0.2, 0.4, 0.1}, 0};
    auto k0 = integrate(make_system(vt, Level::euclid4, 0.0), s4, cfg);
    auto k1 = integrate(make_system(vt, Level::euclid4, 1.0), s4, cfg);
    out.push_back(check_le("dynamics", "H6 drift k=0", k0.ok() ? integral_drift(k0, "H6") : NAN, 1e-8));
    out.push_back(check_ge("dynamics", "H6 drift k=1 (sensitivity)", k1.ok() ? integral_drift(k1, "H6") : NAN, 1e-3));

    auto v4 = make_potential("V_4");
    PhaseState s{Chart::sphere, {1.2, 0.6, 0, 0}, {0.5, 0.4, 0, 0}, 0};
    auto tq = integrate(make_system(v4, Level::sphere), s, cfg);
    out.push_back(check_le("dynamics", "Q4 drift V_4", tq.ok() ? integral_drift(tq, "Q4") : NAN, 1e-8));

    std::vector<PotentialSpec> axi{make_v4(constant_profile(1.0))};
    for (const auto& v : catalog())
        if (v.axisymmetric) axi.push_back(v);
    for (const auto& v : axi) {
        auto tr = integrate(make_system(v, Level::sphere), {Chart::sphere, {1.0, 0.3, 0, 0}, {0.4, 0.7, 0, 0}, 0}, cfg);
        out.push_back(check_le("dynamics", "L drift " + v.name + (v.separable_profile ? " with " + v.separable_profile->description : ""),
                               tr.ok() ? integral_drift(tr, "L") : NAN, 1e-10));
    }
    return out;
}

/// RK4 at the default step against the adaptive oracle at t = 1.
inline std::vector<Check> cross_integrator() {
    auto vt = make_potential("V_T");
    auto sys = make_system(vt, Level::sphere);
    const double th = 0.9, ps = 0.6, E = 8.0;
    double V = vt.value({th, ps, 0, 0});
    double p = std::sqrt(2 * (E - V));
    PhaseState s{Chart::sphere, {th, ps, 0, 0}, {p * std::cos(0.4), p * std::sin(0.4) * std::sin(th), 0, 0}, 0};
    IntegratorConfig rk;
    rk.t_end = 1;
    auto a = integrate(sys, s, rk);
    auto b = integrate(sys, s, oracle_config(1));
    double d = 0;
    if (a.ok() && b.ok())
        for (int i = 0; i < 2; ++i)
            d = std::max({d, std::abs(a.states.back().q[i] - b.states.back().q[i]),
                          std::abs(a.states.back().p[i] - b.states.back().p[i])});
    else
        d = NAN;
    return {check_le("integrators", "rk4 vs adaptive at t=1", d, 1e-6)};
}

inline std::vector<Check> jacobi() {
    std::vector<Check> out;
    auto u = jacobi_forward({{1, 1, 1, 1}});
    double e = std::abs(u[0]) + std::abs(u[1]) + std::abs(u[2]) + std::abs(u[3] - 2);
    out.push_back(check_le("core", "jacobi (1,1,1,1) -> (0,0,0,2)", e, 1e-12));
    Rng rng(99);
    double rt = 0, nrm = 0, sum = 0;
    for (int k = 0; k < 1000; ++k) {
        LineConfiguration c;
        for (auto& x : c.x) x = rng.uniform(-10, 10);
        auto j = jacobi_forward(c);
        auto back = jacobi_inverse(j);
        double n0 = 0, n1 = 0, s = 0;
        for (int i = 0; i < 4; ++i) {
            rt = std::max(rt, std::abs(back.x[i] - c.x[i]));
            n0 += c.x[i] * c.x[i];
            n1 += j[i] * j[i];
            s += c.x[i];
        }
        nrm = std::max(nrm, std::abs(std::sqrt(n0) - std::sqrt(n1)));
        sum = std::max(sum, std::abs(s - 2 * j[3]));
    }
    out.push_back(check_le("core", "jacobi round trip", rt, 1e-12));
    out.push_back(check_le("core", "jacobi norm preservation", nrm, 1e-12));
    out.push_back(check_le("core", "jacobi sum identity", sum, 1e-12));
    return out;
}

}  // namespace checks

/// Full invariant suite of every module.
inline ValidationReport run_validation(const ValidationOptions& o = {}) {
    ValidationReport r;
    r.add(checks::gradients(o.samples));
    r.add(checks::groups(o));
    r.add(checks::invariance(o));
    r.add(checks::factorization(o.samples));
    r.add(checks::exact_integrals());
    r.add(checks::cross_integrator());
    r.add(checks::jacobi());
    return r;
}

}  // namespace platonic
