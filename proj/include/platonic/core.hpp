#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

namespace platonic {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Maximum number of degrees of freedom handled by any chart.
inline constexpr int max_dof = 4;

using Coords = std::array<double, max_dof>;

/// Coordinate systems on the configuration manifolds.
enum class Chart {
    plane_polar,         ///< (r, psi)
    plane_cartesian,     ///< (x, y)
    sphere,              ///< (theta, psi)
    euclid3_spherical,   ///< (rho, theta, psi)
    euclid3_cartesian,   ///< (x, y, z)
    euclid4_cylindrical  ///< (u, rho, theta, psi)
};

constexpr int chart_dim(Chart c) {
    switch (c) {
        case Chart::plane_polar:
        case Chart::plane_cartesian:
        case Chart::sphere: return 2;
        case Chart::euclid3_spherical:
        case Chart::euclid3_cartesian: return 3;
        case Chart::euclid4_cylindrical: return 4;
    }
    return 0;
}

inline std::string_view chart_name(Chart c) {
    switch (c) {
        case Chart::plane_polar: return "plane-polar";
        case Chart::plane_cartesian: return "plane-cartesian";
        case Chart::sphere: return "sphere";
        case Chart::euclid3_spherical: return "euclid3-spherical";
        case Chart::euclid3_cartesian: return "euclid3-cartesian";
        case Chart::euclid4_cylindrical: return "euclid4-cylindrical";
    }
    return "?";
}

inline Chart parse_chart(std::string_view s) {
    for (Chart c : {Chart::plane_polar, Chart::plane_cartesian, Chart::sphere,
                    Chart::euclid3_spherical, Chart::euclid3_cartesian,
                    Chart::euclid4_cylindrical})
        if (chart_name(c) == s) return c;
    throw std::invalid_argument("unknown chart: " + std::string(s));
}

/// Coordinate labels, in storage order.
inline std::string_view coordinate_name(Chart c, int i) {
    static constexpr std::string_view polar[] = {"r", "psi"};
    static constexpr std::string_view cart2[] = {"x", "y"};
    static constexpr std::string_view sph[] = {"theta", "psi"};
    static constexpr std::string_view sph3[] = {"rho", "theta", "psi"};
    static constexpr std::string_view cart3[] = {"x", "y", "z"};
    static constexpr std::string_view cyl4[] = {"u", "rho", "theta", "psi"};
    if (i < 0 || i >= chart_dim(c)) throw std::out_of_range("coordinate index");
    switch (c) {
        case Chart::plane_polar: return polar[i];
        case Chart::plane_cartesian: return cart2[i];
        case Chart::sphere: return sph[i];
        case Chart::euclid3_spherical: return sph3[i];
        case Chart::euclid3_cartesian: return cart3[i];
        case Chart::euclid4_cylindrical: return cyl4[i];
    }
    return "?";
}

/// Index of a named coordinate, or -1.
inline int coordinate_index(Chart c, std::string_view name) {
    for (int i = 0; i < chart_dim(c); ++i)
        if (coordinate_name(c, i) == name) return i;
    return -1;
}

/// Azimuthal coordinates are 2*pi periodic; they are stored unwrapped.
inline bool is_periodic(Chart c, int i) { return coordinate_name(c, i) == "psi"; }

/// Index of the polar angle theta, or -1 when the chart has none.
inline int theta_index(Chart c) { return coordinate_index(c, "theta"); }
inline int psi_index(Chart c) { return coordinate_index(c, "psi"); }

/// Wrap an angle into [0, 2*pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a, two_pi);
    if (w < 0) w += two_pi;
    if (w >= two_pi) w = 0.0;
    return w;
}

/// Distance of the state from the chart singularities (poles theta in {0, pi},
/// radial origin). Infinite when the chart has none.
inline double chart_singularity_distance(Chart c, const Coords& q) {
    double d = INFINITY;
    int it = theta_index(c);
    if (it >= 0) d = std::min(d, std::min(q[it], pi - q[it]));
    int ir = coordinate_index(c, "rho");
    if (ir < 0) ir = coordinate_index(c, "r");
    if (ir >= 0) d = std::min(d, q[ir]);
    return d;
}

/// True when q lies in the open chart ranges (angles taken modulo 2*pi).
inline bool in_chart_range(Chart c, const Coords& q) {
    for (int i = 0; i < chart_dim(c); ++i)
        if (!std::isfinite(q[i])) return false;
    return chart_singularity_distance(c, q) > 0.0;
}

/// Point of phase space. Momenta are conjugate to q in the same order.
struct PhaseState {
    Chart chart = Chart::sphere;
    Coords q{};
    Coords p{};
    double t = 0.0;

    int dof() const { return chart_dim(chart); }
};

struct Cartesian3 {
    double x, y, z;
};

inline Cartesian3 spherical_to_cartesian(double rho, double theta, double psi) {
    double st = std::sin(theta);
    return {rho * st * std::cos(psi), rho * st * std::sin(psi), rho * std::cos(theta)};
}

/// Positions x^1..x^4 of four points on a line.
struct LineConfiguration {
    std::array<double, 4> x{};
};

using JacobiVector = std::array<double, 4>;
using Matrix4 = std::array<std::array<double, 4>, 4>;

/// Orthogonal change of variables from positions to Jacobi coordinates:
/// row j < 3 is (x^1 + ... + x^{j+1} - (j+1) x^{j+2}) / sqrt((j+1)(j+2)),
/// the last row is the center-of-mass mode (x^1 + ... + x^4) / 2.
inline const Matrix4& jacobi_matrix() {
    static const Matrix4 m = [] {
        Matrix4 a{};
        for (int j = 1; j <= 3; ++j) {
            double s = 1.0 / std::sqrt(double(j * (j + 1)));
            for (int i = 0; i < j; ++i) a[j - 1][i] = s;
            a[j - 1][j] = -j * s;
        }
        for (int i = 0; i < 4; ++i) a[3][i] = 0.5;
        return a;
    }();
    return m;
}

inline JacobiVector jacobi_forward(const LineConfiguration& c) {
    const auto& m = jacobi_matrix();
    JacobiVector u{};
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) u[j] += m[j][i] * c.x[i];
    return u;
}

/// Inverse via the transpose.
inline LineConfiguration jacobi_inverse(const JacobiVector& u) {
    const auto& m = jacobi_matrix();
    LineConfiguration c;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c.x[i] += m[j][i] * u[j];
    return c;
}

/// Four-points-on-a-line picture of a state in R^4 cylindrical coordinates
/// (u, rho, theta, psi): u^1..u^3 are the Cartesian image of (rho, theta, psi)
/// and u^4 = u.
inline LineConfiguration r4_state_to_line(const PhaseState& s) {
    if (s.chart != Chart::euclid4_cylindrical)
        throw std::invalid_argument("r4_state_to_line: chart must be euclid4-cylindrical, got " +
                                    std::string(chart_name(s.chart)));
    auto c = spherical_to_cartesian(s.q[1], s.q[2], s.q[3]);
    return jacobi_inverse({c.x, c.y, c.z, s.q[0]});
}

}  // namespace platonic
