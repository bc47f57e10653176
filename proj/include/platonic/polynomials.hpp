#pragma once

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "platonic/core.hpp"

namespace platonic {

/// Homogeneous polynomials on R^3 characteristic of the polyhedral groups.
enum class InvariantPolynomial { T, O, I, TO };

inline std::string_view polynomial_name(InvariantPolynomial p) {
    switch (p) {
        case InvariantPolynomial::T: return "T";
        case InvariantPolynomial::O: return "O";
        case InvariantPolynomial::I: return "I";
        case InvariantPolynomial::TO: return "TO";
    }
    return "?";
}

inline InvariantPolynomial parse_polynomial(std::string_view s) {
    for (auto p : {InvariantPolynomial::T, InvariantPolynomial::O, InvariantPolynomial::I,
                   InvariantPolynomial::TO})
        if (polynomial_name(p) == s) return p;
    throw std::invalid_argument("unknown invariant polynomial: " + std::string(s));
}

constexpr int polynomial_degree(InvariantPolynomial p) {
    switch (p) {
        case InvariantPolynomial::T: return 3;
        case InvariantPolynomial::O: return 6;
        case InvariantPolynomial::I: return 6;
        case InvariantPolynomial::TO: return 4;
    }
    return 0;
}

/// Quartic cofactor of the icosahedral sextic.
inline double icosahedral_quartic(double x, double y, double z) {
    const double x2 = x * x, y2 = y * y, z2 = z * z;
    return x2 * x2 - x2 * z2 + z2 * z2 + 2 * (x2 * x * z - x * z2 * z) + 5 * (y2 * y2 - y2 * z2) +
           10 * (x * y2 * z - x2 * y2);
}

inline double evaluate(InvariantPolynomial p, double x, double y, double z) {
    switch (p) {
        case InvariantPolynomial::T: return x * y * z;
        case InvariantPolynomial::O: return x * x * y * y * z * z;
        case InvariantPolynomial::I: return -z * (2 * x + z) * icosahedral_quartic(x, y, z);
        case InvariantPolynomial::TO: return x * x * y * y + x * x * z * z + y * y * z * z;
    }
    return 0;
}

inline double evaluate(InvariantPolynomial p, std::span<const double> v) {
    return evaluate(p, v[0], v[1], v[2]);
}

/// Restriction to the unit sphere: P = rho^degree * f(theta, psi).
inline double angular_factor(InvariantPolynomial p, double theta, double psi) {
    auto c = spherical_to_cartesian(1.0, theta, psi);
    return evaluate(p, c.x, c.y, c.z);
}

}  // namespace platonic
