#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "platonic/core.hpp"
#include "platonic/polynomials.hpp"
#include "platonic/random.hpp"

namespace platonic {

/// Denominators below this magnitude are treated as lying on the singular set.
inline constexpr double singular_tolerance = 1e-14;

using Gradient = Coords;

/// Returns num / den, or a signed infinity when |den| is below the singular tolerance.
inline double guarded_ratio(double num, double den) {
    if (std::abs(den) < singular_tolerance) {
        double sign = (den < 0) != (num < 0) ? -1.0 : 1.0;
        return sign * std::numeric_limits<double>::infinity();
    }
    return num / den;
}

inline bool is_singular_value(double v) { return !std::isfinite(v); }

/// Pluggable meridional profile F(psi) of the separable family F(psi) / sin^2(theta).
struct AngularProfile {
    std::string description;
    std::function<double(double)> value;
    std::function<double(double)> derivative;
    std::function<double(double)> barrier;  ///< zero where F is infinite
    bool constant = false;
};

/// F(psi) = c / sin^2(n psi).
inline AngularProfile inverse_sine_squared_profile(int n, double c = 1.0) {
    return {"F(psi) = " + std::to_string(c) + " / sin^2(" + std::to_string(n) + " psi)",
            [=](double psi) { return guarded_ratio(c, std::pow(std::sin(n * psi), 2)); },
            [=](double psi) {
                double s = std::sin(n * psi);
                return guarded_ratio(-2.0 * c * n * std::cos(n * psi), s * s * s);
            },
            [=](double psi) { return std::sin(n * psi); },
            false};
}

/// F(psi) = c: axisymmetric member of the family.
inline AngularProfile constant_profile(double c) {
    return {"F(psi) = " + std::to_string(c), [=](double) { return c; }, [](double) { return 0.0; },
            [](double) { return 1.0; }, true};
}

/// Catalog entry: a potential on a chart with its analytic gradient.
struct PotentialSpec {
    std::string name;
    Chart chart = Chart::sphere;
    std::map<std::string, double> parameters;

    std::function<double(const Coords&)> value;                   ///< +-inf on the singular set
    std::function<std::optional<Gradient>(const Coords&)> gradient;  ///< empty on the singular set
    /// Function vanishing exactly on the singular set (the angular factor f for V = 1/f).
    std::function<double(const Coords&)> barrier;
    /// Function whose sign-constant components are the dynamically separated
    /// regions; same zero set as `barrier` but with simple zeros.
    std::function<double(const Coords&)> region_factor;

    std::string singular_set;
    std::optional<std::string> symmetry;
    std::optional<InvariantPolynomial> generator;  ///< V = s / f_P on the sphere
    int factor_sign = 1;                           ///< s in V * f_P = s
    bool negated = false;
    /// KM2: stored as a complete Hamiltonian with kinetic term
    /// p_rho^2 + p_theta^2 / rho^2 + p_psi^2 / (rho^2 sin^2(h theta)), no 1/2.
    bool full_hamiltonian = false;
    bool axisymmetric = false;                       ///< independent of psi
    std::optional<AngularProfile> separable_profile;  ///< V = F(psi) / sin^2(theta)
    /// For rho^-2 V(theta, psi) + (k/2) rho^2 entries: the sphere potential V and k.
    std::shared_ptr<const PotentialSpec> angular_part;
    double radial_harmonic = 0.0;

    double parameter(const std::string& key) const {
        auto it = parameters.find(key);
        if (it == parameters.end()) throw std::out_of_range(name + ": no parameter " + key);
        return it->second;
    }
};

inline double eval_potential(const PotentialSpec& spec, const Coords& q) { return spec.value(q); }

inline std::optional<Gradient> grad_potential(const PotentialSpec& spec, const Coords& q) {
    return spec.gradient(q);
}

/// The potential -V: same singular set, opposite forces.
inline PotentialSpec negate(PotentialSpec spec) {
    auto v = spec.value;
    auto g = spec.gradient;
    spec.name = (spec.negated ? spec.name.substr(1) : "-" + spec.name);
    spec.negated = !spec.negated;
    spec.factor_sign = -spec.factor_sign;
    spec.value = [v](const Coords& q) { return -v(q); };
    spec.gradient = [g](const Coords& q) -> std::optional<Gradient> {
        auto r = g(q);
        if (!r) return r;
        for (double& x : *r) x = -x;
        return r;
    };
    if (spec.separable_profile) {
        auto p = *spec.separable_profile;
        auto f = p.value, df = p.derivative;
        p.value = [f](double x) { return -f(x); };
        p.derivative = [df](double x) { return -df(x); };
        p.description = "-(" + p.description + ")";
        spec.separable_profile = p;
    }
    return spec;
}

namespace detail {

inline double ipow(double x, int n) {
    double r = 1;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

inline int as_int(const std::map<std::string, double>& p, const char* key) {
    double v = p.at(key);
    if (v != std::floor(v)) throw std::invalid_argument(std::string("parameter ") + key + " must be an integer");
    return static_cast<int>(v);
}

/// V = 1 / D with D and its gradient supplied.
struct Reciprocal {
    std::function<double(const Coords&)> den;
    std::function<Gradient(const Coords&)> den_grad;

    double value(const Coords& q) const { return guarded_ratio(1.0, den(q)); }
    std::optional<Gradient> gradient(const Coords& q) const {
        double d = den(q);
        if (std::abs(d) < singular_tolerance) return std::nullopt;
        Gradient g = den_grad(q);
        for (double& x : g) x = -x / (d * d);
        return g;
    }
};

inline void install(PotentialSpec& s, const Reciprocal& r) {
    s.value = [r](const Coords& q) { return r.value(q); };
    s.gradient = [r](const Coords& q) { return r.gradient(q); };
    s.barrier = r.den;
}

// f_T = sin^2 th cos th cos ps sin ps
inline double tetra_den(const Coords& q) {
    double s = std::sin(q[0]), c = std::cos(q[0]);
    return s * s * c * std::cos(q[1]) * std::sin(q[1]);
}

inline Gradient tetra_den_grad(const Coords& q) {
    double s = std::sin(q[0]), c = std::cos(q[0]), cp = std::cos(q[1]), sp = std::sin(q[1]);
    return {(2 * s * c * c - s * s * s) * cp * sp, s * s * c * (cp * cp - sp * sp), 0, 0};
}

// -cos th * B(th, ps): printed denominator of V_I
inline double ico_bracket_psi(double ps) {
    double sp = std::sin(ps), sp2 = sp * sp;
    return std::cos(ps) * (32 * sp2 * sp2 - 24 * sp2 + 2);
}

inline double ico_bracket_psi_deriv(double ps) {
    double sp = std::sin(ps), cp = std::cos(ps), sp2 = sp * sp;
    return -sp * (32 * sp2 * sp2 - 24 * sp2 + 2) + cp * cp * sp * (128 * sp2 - 48);
}

inline double ico_den(const Coords& q) {
    double s = std::sin(q[0]), c = std::cos(q[0]);
    double s2 = s * s, c2 = c * c;
    double b = c2 * c2 * c - 5 * s2 * c2 * c + 5 * s2 * s2 * c + s2 * s2 * s * ico_bracket_psi(q[1]);
    return -c * b;
}

inline Gradient ico_den_grad(const Coords& q) {
    double s = std::sin(q[0]), c = std::cos(q[0]);
    double s2 = s * s, c2 = c * c, s4 = s2 * s2;
    double g = ico_bracket_psi(q[1]);
    double b = c2 * c2 * c - 5 * s2 * c2 * c + 5 * s4 * c + s4 * s * g;
    double db_th = -15 * c2 * c2 * s + 35 * s2 * s * c2 - 5 * s4 * s + 5 * s4 * c * g;
    double db_ps = s4 * s * ico_bracket_psi_deriv(q[1]);
    return {s * b - c * db_th, -c * db_ps, 0, 0};
}

// sin^2 th * E(th, ps): printed denominator of V_TO
inline double to_den(const Coords& q) {
    double s = std::sin(q[0]), c2 = std::pow(std::cos(q[0]), 2), C = std::pow(std::cos(q[1]), 2);
    return s * s * (C - C * C - C * c2 + C * C * c2 + c2);
}

inline Gradient to_den_grad(const Coords& q) {
    double s = std::sin(q[0]), c = std::cos(q[0]), c2 = c * c;
    double cp = std::cos(q[1]), sp = std::sin(q[1]), C = cp * cp;
    double e = C - C * C - C * c2 + C * C * c2 + c2;
    double de_th = (1 - C + C * C) * (-2 * s * c);
    double de_ps = (1 - 2 * C - c2 + 2 * C * c2) * (-2 * cp * sp);
    return {2 * s * c * e + s * s * de_th, s * s * de_ps, 0, 0};
}

}  // namespace detail

inline PotentialSpec make_vt() {
    PotentialSpec s;
    s.name = "V_T";
    s.chart = Chart::sphere;
    detail::install(s, {detail::tetra_den, detail::tetra_den_grad});
    s.region_factor = s.barrier;
    s.singular_set = "the three coordinate great circles x=0, y=0, z=0 (theta=pi/2, psi = m pi/2)";
    s.symmetry = "T12";
    s.generator = InvariantPolynomial::T;
    return s;
}

inline PotentialSpec make_vo() {
    PotentialSpec s;
    s.name = "V_O";
    s.chart = Chart::sphere;
    s.value = [](const Coords& q) {
        double v = guarded_ratio(1.0, detail::tetra_den(q));
        return v * v;
    };
    s.gradient = [](const Coords& q) -> std::optional<Gradient> {
        double d = detail::tetra_den(q);
        if (std::abs(d) < singular_tolerance) return std::nullopt;
        Gradient g = detail::tetra_den_grad(q);
        for (double& x : g) x = -2 * x / (d * d * d);
        return g;
    };
    s.barrier = [](const Coords& q) { return std::pow(detail::tetra_den(q), 2); };
    s.region_factor = detail::tetra_den;
    s.singular_set = "the three coordinate great circles (double zeros of f_O = f_T^2)";
    s.symmetry = "O24";
    s.generator = InvariantPolynomial::O;
    return s;
}

inline PotentialSpec make_vi() {
    PotentialSpec s;
    s.name = "V_I";
    s.chart = Chart::sphere;
    detail::install(s, {detail::ico_den, detail::ico_den_grad});
    s.region_factor = s.barrier;
    s.singular_set = "six great circles orthogonal to the fivefold axes (zero set of f_I)";
    s.symmetry = "I60";
    s.generator = InvariantPolynomial::I;
    return s;
}

inline PotentialSpec make_vto() {
    PotentialSpec s;
    s.name = "V_TO";
    s.chart = Chart::sphere;
    detail::install(s, {detail::to_den, detail::to_den_grad});
    s.region_factor = s.barrier;
    s.singular_set = "six isolated points +-e_x, +-e_y, +-e_z (no partition of the sphere)";
    s.symmetry = "O24";
    s.generator = InvariantPolynomial::TO;
    return s;
}

/// Six force centres on the vertices of a cuboctahedron; written with the
/// tan terms cleared so that the equator is a regular point of the chart.
inline PotentialSpec make_vco() {
    PotentialSpec s;
    s.name = "V_CO";
    s.chart = Chart::sphere;
    struct Parts {
        double a, n, m, s, c;
    };
    auto parts = [](const Coords& q) {
        double s = std::sin(q[0]), c = std::cos(q[0]);
        double a = 3 * s * s * c - 8 * c * c * c + s * s * s * std::cos(3 * q[1]);
        return Parts{a, 8 * c * c - s * s, 1 + std::cos(6 * q[1]), s, c};
    };
    auto singular = [](const Parts& p) {
        return std::abs(p.a) < singular_tolerance || std::abs(p.s * p.s * p.m) < singular_tolerance;
    };
    s.value = [=](const Coords& q) {
        Parts p = parts(q);
        if (singular(p)) return std::numeric_limits<double>::infinity();
        double c2 = p.c * p.c;
        return 9 * c2 * p.n * p.n / (2 * p.a * p.a) + 12 * c2 * p.c / p.a + 9 / (4 * p.s * p.s * p.m);
    };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        Parts p = parts(q);
        if (singular(p)) return std::nullopt;
        double s_ = p.s, c = p.c, a = p.a, n = p.n, m = p.m;
        double s3 = s_ * s_ * s_, c2 = c * c;
        double a_th = 30 * s_ * c2 - 3 * s3 + 3 * s_ * s_ * c * std::cos(3 * q[1]);
        double a_ps = -3 * s3 * std::sin(3 * q[1]);
        double n_th = -18 * s_ * c;
        double a2 = a * a, a3 = a2 * a;
        double t1_th = 4.5 * (-2 * c * s_ * n * n + 2 * c2 * n * n_th) / a2 - 9 * c2 * n * n * a_th / a3;
        double t1_ps = -9 * c2 * n * n * a_ps / a3;
        double t2_th = -36 * c2 * s_ / a - 12 * c2 * c * a_th / a2;
        double t2_ps = -12 * c2 * c * a_ps / a2;
        double t3_th = -9 * c / (2 * s3 * m);
        double t3_ps = 27 * std::sin(6 * q[1]) / (2 * s_ * s_ * m * m);
        return Gradient{t1_th + t2_th + t3_th, t1_ps + t2_ps + t3_ps, 0, 0};
    };
    s.barrier = [=](const Coords& q) {
        Parts p = parts(q);
        return p.a * p.s * p.s * p.m;
    };
    s.region_factor = s.barrier;
    s.singular_set = "the six force centres (numerator-free zeros of 3 tan^2 th - 8 + tan^3 th cos 3ps) "
                     "and the meridians psi = pi/6 + m pi/3";
    s.symmetry = "O24";
    return s;
}

/// 1 / (r^2 sin^2(k psi)) + (c/2) r^2 on the plane.
inline PotentialSpec make_dihedral(int k, double harmonic = 0.0, std::string name = "dihedral") {
    PotentialSpec s;
    s.name = std::move(name);
    s.chart = Chart::plane_polar;
    s.parameters = {{"k", double(k)}, {"harmonic", harmonic}};
    s.value = [=](const Coords& q) {
        double sn = std::sin(k * q[1]);
        return guarded_ratio(1.0, q[0] * q[0] * sn * sn) + 0.5 * harmonic * q[0] * q[0];
    };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        double r = q[0], sn = std::sin(k * q[1]), cs = std::cos(k * q[1]);
        if (std::abs(r * r * sn * sn) < singular_tolerance) return std::nullopt;
        return Gradient{-2 / (r * r * r * sn * sn) + harmonic * r, -2 * k * cs / (r * r * sn * sn * sn), 0, 0};
    };
    s.barrier = [=](const Coords& q) { return q[0] * std::sin(k * q[1]); };
    s.region_factor = s.barrier;
    s.singular_set = "the " + std::to_string(2 * k) + " rays psi = m pi / " + std::to_string(k);
    s.symmetry = "dihedral(" + std::to_string(k) + ")";
    return s;
}

/// Three points on a line with inverse-square pair repulsion.
inline PotentialSpec make_ca1() {
    PotentialSpec s;
    s.name = "Ca1";
    s.chart = Chart::euclid3_cartesian;
    auto pair = [](double d) { return guarded_ratio(1.0, d * d); };
    s.value = [=](const Coords& q) { return pair(q[0] - q[1]) + pair(q[1] - q[2]) + pair(q[2] - q[0]); };
    s.gradient = [](const Coords& q) -> std::optional<Gradient> {
        double d12 = q[0] - q[1], d23 = q[1] - q[2], d31 = q[2] - q[0];
        if (std::abs(d12 * d23 * d31) < singular_tolerance) return std::nullopt;
        auto f = [](double d) { return -2 / (d * d * d); };
        return Gradient{f(d12) - f(d31), -f(d12) + f(d23), -f(d23) + f(d31), 0};
    };
    s.barrier = [](const Coords& q) { return (q[0] - q[1]) * (q[1] - q[2]) * (q[2] - q[0]); };
    s.region_factor = s.barrier;
    s.singular_set = "collision planes x^i = x^j";
    return s;
}

/// (sin^a(h x) cos^b(k y))^-1 on the Cartesian plane.
inline PotentialSpec make_v1(int a, int b, int h, int k) {
    PotentialSpec s;
    s.name = "V_1";
    s.chart = Chart::plane_cartesian;
    s.parameters = {{"a", double(a)}, {"b", double(b)}, {"h", double(h)}, {"k", double(k)}};
    auto den = [=](const Coords& q) { return detail::ipow(std::sin(h * q[0]), a) * detail::ipow(std::cos(k * q[1]), b); };
    s.value = [=](const Coords& q) { return guarded_ratio(1.0, den(q)); };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        double d = den(q);
        if (std::abs(d) < singular_tolerance) return std::nullopt;
        double v = 1 / d;
        return Gradient{-a * h * std::cos(h * q[0]) / std::sin(h * q[0]) * v,
                        b * k * std::sin(k * q[1]) / std::cos(k * q[1]) * v, 0, 0};
    };
    s.barrier = den;
    s.region_factor = [=](const Coords& q) { return std::sin(h * q[0]) * std::cos(k * q[1]); };
    s.singular_set = "rectangular grid x = m pi/h, y = pi/(2k) + m pi/k";
    return s;
}

/// (sin^a(h x) sin^b(k y) sin^c(l z))^-1 in R^3.
inline PotentialSpec make_w1(int a, int b, int c, int h, int k, int l) {
    PotentialSpec s;
    s.name = "W_1";
    s.chart = Chart::euclid3_cartesian;
    s.parameters = {{"a", double(a)}, {"b", double(b)}, {"c", double(c)},
                    {"h", double(h)}, {"k", double(k)}, {"l", double(l)}};
    auto den = [=](const Coords& q) {
        return detail::ipow(std::sin(h * q[0]), a) * detail::ipow(std::sin(k * q[1]), b) *
               detail::ipow(std::sin(l * q[2]), c);
    };
    s.value = [=](const Coords& q) { return guarded_ratio(1.0, den(q)); };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        double d = den(q);
        if (std::abs(d) < singular_tolerance) return std::nullopt;
        double v = 1 / d;
        auto cot = [](double x) { return std::cos(x) / std::sin(x); };
        return Gradient{-a * h * cot(h * q[0]) * v, -b * k * cot(k * q[1]) * v, -c * l * cot(l * q[2]) * v, 0};
    };
    s.barrier = den;
    s.region_factor = [=](const Coords& q) { return std::sin(h * q[0]) * std::sin(k * q[1]) * std::sin(l * q[2]); };
    s.singular_set = "cubic honeycomb of planes x = m pi/h, y = m pi/k, z = m pi/l";
    return s;
}

/// (sin^a(h theta) sin^b(k psi))^-1 on the sphere.
inline PotentialSpec make_v2(int a, int b, int h, int k) {
    PotentialSpec s;
    s.name = "V_2";
    s.chart = Chart::sphere;
    s.parameters = {{"a", double(a)}, {"b", double(b)}, {"h", double(h)}, {"k", double(k)}};
    auto den = [=](const Coords& q) { return detail::ipow(std::sin(h * q[0]), a) * detail::ipow(std::sin(k * q[1]), b); };
    s.value = [=](const Coords& q) { return guarded_ratio(1.0, den(q)); };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        double d = den(q);
        if (std::abs(d) < singular_tolerance) return std::nullopt;
        double v = 1 / d;
        double gps = b == 0 ? 0.0 : -b * k * std::cos(k * q[1]) / std::sin(k * q[1]) * v;
        return Gradient{-a * h * std::cos(h * q[0]) / std::sin(h * q[0]) * v, gps, 0, 0};
    };
    s.barrier = den;
    s.region_factor = [=](const Coords& q) {
        return std::sin(h * q[0]) * (b == 0 ? 1.0 : std::sin(k * q[1]));
    };
    s.axisymmetric = (b == 0);
    s.singular_set = "meridian-parallel web theta = m pi/h, psi = m pi/k";
    s.symmetry = "dihedral(" + std::to_string(k) + ")";
    return s;
}

/// (sin^a(h r) cos^b(k psi))^-1 on the plane in polar coordinates (r, psi).
inline PotentialSpec make_v3(int a, int b, int h, int k) {
    PotentialSpec s;
    s.name = "V_3";
    s.chart = Chart::plane_polar;
    s.parameters = {{"a", double(a)}, {"b", double(b)}, {"h", double(h)}, {"k", double(k)}};
    auto den = [=](const Coords& q) { return detail::ipow(std::sin(h * q[0]), a) * detail::ipow(std::cos(k * q[1]), b); };
    s.value = [=](const Coords& q) { return guarded_ratio(1.0, den(q)); };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        double d = den(q);
        if (std::abs(d) < singular_tolerance) return std::nullopt;
        double v = 1 / d;
        return Gradient{-a * h * std::cos(h * q[0]) / std::sin(h * q[0]) * v,
                        b * k * std::sin(k * q[1]) / std::cos(k * q[1]) * v, 0, 0};
    };
    s.barrier = den;
    s.region_factor = [=](const Coords& q) { return std::sin(h * q[0]) * std::cos(k * q[1]); };
    s.singular_set = "circles r = m pi/h and rays psi = pi/(2k) + m pi/k";
    s.symmetry = "dihedral(" + std::to_string(k) + ")";
    return s;
}

/// F(psi) / sin^2(theta) on the sphere; separable with first integral p_psi^2 + 2F.
inline PotentialSpec make_v4(const AngularProfile& profile) {
    PotentialSpec s;
    s.name = "V_4";
    s.chart = Chart::sphere;
    auto F = profile.value, dF = profile.derivative, fb = profile.barrier;
    s.value = [=](const Coords& q) {
        double st = std::sin(q[0]);
        double f = F(q[1]);
        if (!std::isfinite(f)) return f;
        return guarded_ratio(f, st * st);
    };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        double st = std::sin(q[0]), ct = std::cos(q[0]);
        double f = F(q[1]), df = dF(q[1]);
        if (std::abs(st * st) < singular_tolerance || !std::isfinite(f) || !std::isfinite(df)) return std::nullopt;
        return Gradient{-2 * ct * f / (st * st * st), df / (st * st), 0, 0};
    };
    s.barrier = [=](const Coords& q) { return std::sin(q[0]) * fb(q[1]); };
    s.region_factor = s.barrier;
    s.axisymmetric = profile.constant;
    s.separable_profile = profile;
    s.singular_set = "the poles and the infinities of " + profile.description;
    return s;
}

/// Parameterized V_4: F = c / sin^2(n psi) for n > 0 and F = c for n = 0.
inline PotentialSpec make_v4(int n, double c) {
    auto s = make_v4(n == 0 ? constant_profile(c) : inverse_sine_squared_profile(n, c));
    s.parameters = {{"n", double(n)}, {"c", c}};
    if (n > 0) s.symmetry = "dihedral(" + std::to_string(n) + ")";
    return s;
}

/// Maximally superintegrable KM2 system, stored verbatim as a full Hamiltonian:
/// H = p_rho^2 + p_theta^2/rho^2 + p_psi^2/(rho^2 sin^2 h th) + alpha/rho
///     + rho^-2 (b1/cos^2 h th + b2/(sin^2 h th cos^2 k ps) + b3/(sin^2 h th sin^2 k ps)).
/// `value` and `gradient` cover the potential part only.
inline PotentialSpec make_km2(double alpha, double b1, double b2, double b3, double h, double k) {
    PotentialSpec s;
    s.name = "KM2";
    s.chart = Chart::euclid3_spherical;
    s.full_hamiltonian = true;
    s.parameters = {{"alpha", alpha}, {"beta1", b1}, {"beta2", b2}, {"beta3", b3}, {"h", h}, {"k", k}};
    auto den = [=](const Coords& q) {
        return q[0] * std::cos(h * q[1]) * std::sin(h * q[1]) * std::cos(k * q[2]) * std::sin(k * q[2]);
    };
    s.value = [=](const Coords& q) {
        if (std::abs(den(q)) < singular_tolerance) return std::numeric_limits<double>::infinity();
        double r = q[0], ch = std::cos(h * q[1]), sh = std::sin(h * q[1]);
        double ck = std::cos(k * q[2]), sk = std::sin(k * q[2]);
        double ang = b1 / (ch * ch) + b2 / (sh * sh * ck * ck) + b3 / (sh * sh * sk * sk);
        return alpha / r + ang / (r * r);
    };
    s.gradient = [=](const Coords& q) -> std::optional<Gradient> {
        if (std::abs(den(q)) < singular_tolerance) return std::nullopt;
        double r = q[0], ch = std::cos(h * q[1]), sh = std::sin(h * q[1]);
        double ck = std::cos(k * q[2]), sk = std::sin(k * q[2]);
        double psi_part = b2 / (ck * ck) + b3 / (sk * sk);
        double ang = b1 / (ch * ch) + psi_part / (sh * sh);
        double d_th = 2 * b1 * h * sh / (ch * ch * ch) - 2 * h * ch / (sh * sh * sh) * psi_part;
        double d_ps = (2 * b2 * k * sk / (ck * ck * ck) - 2 * b3 * k * ck / (sk * sk * sk)) / (sh * sh);
        return Gradient{-alpha / (r * r) - 2 * ang / (r * r * r), d_th / (r * r), d_ps / (r * r), 0};
    };
    s.barrier = den;
    s.region_factor = den;
    s.singular_set = "rho = 0, cos(h theta) = 0, sin(h theta) = 0, sin(2 k psi) = 0";
    return s;
}

/// rho^-2 V(theta, psi) + (k/2) rho^2 in R^3 for a sphere potential V.
inline PotentialSpec make_radial_lift(const PotentialSpec& sphere, double k, std::string name) {
    if (sphere.chart != Chart::sphere) throw std::invalid_argument("make_radial_lift: need a sphere potential");
    PotentialSpec s;
    s.name = std::move(name);
    s.chart = Chart::euclid3_spherical;
    s.parameters = sphere.parameters;
    s.parameters["k"] = k;
    auto base = std::make_shared<const PotentialSpec>(sphere);
    s.angular_part = base;
    s.radial_harmonic = k;
    s.value = [base, k](const Coords& q) {
        double v = base->value({q[1], q[2], 0, 0});
        if (!std::isfinite(v)) return v;
        return v / (q[0] * q[0]) + 0.5 * k * q[0] * q[0];
    };
    s.gradient = [base, k](const Coords& q) -> std::optional<Gradient> {
        Coords a{q[1], q[2], 0, 0};
        auto g = base->gradient(a);
        if (!g) return std::nullopt;
        double r = q[0], v = base->value(a);
        return Gradient{-2 * v / (r * r * r) + k * r, (*g)[0] / (r * r), (*g)[1] / (r * r), 0};
    };
    s.barrier = [base](const Coords& q) { return base->barrier({q[1], q[2], 0, 0}); };
    s.region_factor = [base](const Coords& q) { return base->region_factor({q[1], q[2], 0, 0}); };
    s.singular_set = "cone over the singular set of " + sphere.name;
    s.symmetry = sphere.symmetry;
    return s;
}

/// V = 0 on a chart: free motion, used by geodesic and free-particle checks.
inline PotentialSpec make_free(Chart chart) {
    PotentialSpec s;
    s.name = "free";
    s.chart = chart;
    s.value = [](const Coords&) { return 0.0; };
    s.gradient = [](const Coords&) -> std::optional<Gradient> { return Gradient{}; };
    s.barrier = [](const Coords&) { return 1.0; };
    s.region_factor = s.barrier;
    s.axisymmetric = true;
    s.singular_set = "none";
    return s;
}

/// Names of all catalog entries, in listing order.
inline const std::vector<std::string>& catalog_names() {
    static const std::vector<std::string> names = {
        "Ca1", "Ca2", "dihedral", "V_T", "V_O", "V_I", "V_TO", "V_CO", "V_1",
        "W_1", "V_2", "V_3", "V_4", "KM2", "W_VT_harmonic"};
    return names;
}

/// Default parameters of each parameterized entry.
inline std::map<std::string, double> default_parameters(const std::string& name) {
    if (name == "Ca2") return {{"harmonic", 0.0}};
    if (name == "dihedral") return {{"k", 3}, {"harmonic", 0.0}};
    if (name == "V_1") return {{"a", 2}, {"b", 2}, {"h", 1}, {"k", 1}};
    if (name == "W_1") return {{"a", 2}, {"b", 2}, {"c", 2}, {"h", 1}, {"k", 1}, {"l", 1}};
    if (name == "V_2") return {{"a", 4}, {"b", 1}, {"h", 2}, {"k", 3}};
    if (name == "V_3") return {{"a", 2}, {"b", 2}, {"h", 1}, {"k", 1}};
    if (name == "V_4") return {{"n", 3}, {"c", 1.0}};
    if (name == "KM2") return {{"alpha", 0.0}, {"beta1", 1.0}, {"beta2", 1.0}, {"beta3", 1.0}, {"h", 1.0}, {"k", 1.0}};
    if (name == "W_VT_harmonic") return {{"k", 1.0}};
    return {};
}

/// Builds a catalog entry; `overrides` replaces default parameters. A leading
/// '-' on the name selects the negated potential.
inline PotentialSpec make_potential(const std::string& name_in, const std::map<std::string, double>& overrides = {}) {
    if (!name_in.empty() && name_in[0] == '-') return negate(make_potential(name_in.substr(1), overrides));
    const std::string& name = name_in;
    auto known = catalog_names();
    if (std::find(known.begin(), known.end(), name) == known.end())
        throw std::invalid_argument("unknown potential: " + name);
    auto p = default_parameters(name);
    for (const auto& [k, v] : overrides) {
        if (!p.count(k)) throw std::invalid_argument("potential " + name + " has no parameter '" + k + "'");
        p[k] = v;
    }
    using detail::as_int;
    if (name == "Ca1") return make_ca1();
    if (name == "Ca2") {
        auto s = make_dihedral(3, p["harmonic"], "Ca2");
        s.parameters = p;
        return s;
    }
    if (name == "dihedral") return make_dihedral(as_int(p, "k"), p["harmonic"]);
    if (name == "V_T") return make_vt();
    if (name == "V_O") return make_vo();
    if (name == "V_I") return make_vi();
    if (name == "V_TO") return make_vto();
    if (name == "V_CO") return make_vco();
    if (name == "V_1") return make_v1(as_int(p, "a"), as_int(p, "b"), as_int(p, "h"), as_int(p, "k"));
    if (name == "W_1")
        return make_w1(as_int(p, "a"), as_int(p, "b"), as_int(p, "c"), as_int(p, "h"), as_int(p, "k"), as_int(p, "l"));
    if (name == "V_2") return make_v2(as_int(p, "a"), as_int(p, "b"), as_int(p, "h"), as_int(p, "k"));
    if (name == "V_3") return make_v3(as_int(p, "a"), as_int(p, "b"), as_int(p, "h"), as_int(p, "k"));
    if (name == "V_4") return make_v4(as_int(p, "n"), p["c"]);
    if (name == "KM2") return make_km2(p["alpha"], p["beta1"], p["beta2"], p["beta3"], p["h"], p["k"]);
    if (name == "W_VT_harmonic") return make_radial_lift(make_vt(), p["k"], "W_VT_harmonic");
    throw std::invalid_argument("unknown potential: " + name);
}

/// Every catalog entry with default parameters.
inline std::vector<PotentialSpec> catalog() {
    std::vector<PotentialSpec> out;
    for (const auto& n : catalog_names()) out.push_back(make_potential(n));
    return out;
}

/// max |V(theta, psi) * f_P(theta, psi) - s| over random sphere points with
/// |f_P| >= 1e-4.
inline double factorization_check(const PotentialSpec& spec, InvariantPolynomial P, int samples,
                                  std::uint64_t seed = 11) {
    if (spec.chart != Chart::sphere) throw std::invalid_argument("factorization_check: sphere potential required");
    Rng rng(seed);
    double worst = 0;
    int taken = 0;
    while (taken < samples) {
        double th = std::acos(rng.uniform(-1, 1)), ps = rng.uniform(0, two_pi);
        double f = angular_factor(P, th, ps);
        if (std::abs(f) < 1e-4) continue;
        double v = spec.value({th, ps, 0, 0});
        if (!std::isfinite(v)) continue;
        worst = std::max(worst, std::abs(v * f - spec.factor_sign));
        ++taken;
    }
    return worst;
}

/// Box of chart coordinates used for random nonsingular sampling.
inline std::array<std::pair<double, double>, max_dof> sampling_box(Chart c) {
    using B = std::pair<double, double>;
    switch (c) {
        case Chart::sphere: return {B{0.05, pi - 0.05}, B{0, two_pi}, B{}, B{}};
        case Chart::plane_polar: return {B{0.3, 3.0}, B{0, two_pi}, B{}, B{}};
        case Chart::plane_cartesian: return {B{-3, 3}, B{-3, 3}, B{}, B{}};
        case Chart::euclid3_spherical: return {B{0.5, 2.0}, B{0.05, pi - 0.05}, B{0, two_pi}, B{}};
        case Chart::euclid3_cartesian: return {B{-3, 3}, B{-3, 3}, B{-3, 3}, B{}};
        case Chart::euclid4_cylindrical: return {B{-2, 2}, B{0.5, 2.0}, B{0.05, pi - 0.05}, B{0, two_pi}};
    }
    return {};
}

struct GradientCheck {
    double max_relative_error = 0;
    int points = 0;
};

/// Compares the analytic gradient with central differences (step 1e-5) at
/// random nonsingular points. A point counts as nonsingular when |V| <= value_cap,
/// |grad V| <= slope_cap * (1 + |V|) and the first-order distance estimate
/// |b| / |grad b| to the zero set of the barrier b is at least wall_distance.
/// Error measure: |g_fd - g| / (1 + |g|).
inline GradientCheck gradient_check(const PotentialSpec& spec, int samples, std::uint64_t seed = 5,
                                    double value_cap = 50.0, double step = 1e-5, double slope_cap = 50.0,
                                    double wall_distance = 0.02) {
    Rng rng(seed);
    auto box = sampling_box(spec.chart);
    const int d = chart_dim(spec.chart);
    GradientCheck out;
    int tries = 0;
    while (out.points < samples && tries < 1000 * samples) {
        ++tries;
        Coords q{};
        for (int i = 0; i < d; ++i) q[i] = rng.uniform(box[i].first, box[i].second);
        double v = spec.value(q);
        if (!std::isfinite(v) || std::abs(v) > value_cap) continue;
        auto g = spec.gradient(q);
        if (!g) continue;
        double gmax = 0;
        for (int i = 0; i < d; ++i) gmax = std::max(gmax, std::abs((*g)[i]));
        if (gmax > slope_cap * (1 + std::abs(v))) continue;
        double b = spec.barrier(q), bgrad = 0;
        for (int i = 0; i < d; ++i) {
            Coords qp = q, qm = q;
            qp[i] += 1e-6;
            qm[i] -= 1e-6;
            bgrad = std::max(bgrad, std::abs(spec.barrier(qp) - spec.barrier(qm)) / 2e-6);
        }
        if (std::abs(b) < wall_distance * bgrad) continue;
        for (int i = 0; i < d; ++i) {
            Coords qp = q, qm = q;
            qp[i] += step;
            qm[i] -= step;
            double fd = (spec.value(qp) - spec.value(qm)) / (2 * step);
            out.max_relative_error = std::max(out.max_relative_error, std::abs(fd - (*g)[i]) / (1 + std::abs((*g)[i])));
        }
        ++out.points;
    }
    return out;
}

}  // namespace platonic
