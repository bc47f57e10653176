#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "platonic/core.hpp"
#include "platonic/random.hpp"

namespace platonic {

/// Orthogonal transformation of R^2 or R^3, stored row major in a 3x3 block
/// (2x2 matrices use the upper-left corner).
struct OrthoMatrix {
    int dim = 3;
    std::array<double, 9> a{};

    double operator()(int i, int j) const { return a[3 * i + j]; }
    double& operator()(int i, int j) { return a[3 * i + j]; }

    static OrthoMatrix identity(int dim) {
        OrthoMatrix m;
        m.dim = dim;
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static OrthoMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        OrthoMatrix m;
        m.dim = static_cast<int>(rows.size());
        int i = 0;
        for (auto& r : rows) {
            int j = 0;
            for (double v : r) m(i, j++) = v;
            ++i;
        }
        return m;
    }

    friend OrthoMatrix operator*(const OrthoMatrix& l, const OrthoMatrix& r) {
        OrthoMatrix m;
        m.dim = l.dim;
        for (int i = 0; i < l.dim; ++i)
            for (int j = 0; j < l.dim; ++j) {
                double s = 0;
                for (int k = 0; k < l.dim; ++k) s += l(i, k) * r(k, j);
                m(i, j) = s;
            }
        return m;
    }

    OrthoMatrix transpose() const {
        OrthoMatrix m;
        m.dim = dim;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) m(i, j) = (*this)(j, i);
        return m;
    }

    std::array<double, 3> apply(std::span<const double> x) const {
        std::array<double, 3> y{};
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    double determinant() const {
        if (dim == 2) return a[0] * a[4] - a[1] * a[3];
        return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
               a[2] * (a[3] * a[7] - a[4] * a[6]);
    }

    double max_abs_diff(const OrthoMatrix& o) const {
        double d = 0;
        for (int i = 0; i < 9; ++i) d = std::max(d, std::abs(a[i] - o.a[i]));
        return d;
    }
};

/// Rotation by `angle` about `axis` (Rodrigues formula).
inline OrthoMatrix axis_rotation(std::array<double, 3> axis, double angle) {
    double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    double x = axis[0] / n, y = axis[1] / n, z = axis[2] / n;
    double c = std::cos(angle), s = std::sin(angle), C = 1 - c;
    return OrthoMatrix::from_rows({{c + x * x * C, x * y * C - z * s, x * z * C + y * s},
                                   {y * x * C + z * s, c + y * y * C, y * z * C - x * s},
                                   {z * x * C - y * s, z * y * C + x * s, c + z * z * C}});
}

inline OrthoMatrix rotation_from_vector(std::array<double, 3> w) {
    double n = std::sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]);
    if (n == 0) return OrthoMatrix::identity(3);
    return axis_rotation(w, n);
}

struct SymmetryGroup {
    std::string name;
    std::vector<OrthoMatrix> elements;
    int order = 0;

    int dim() const { return elements.empty() ? 0 : elements.front().dim; }
};

/// Enumerate the group generated by `generators`. Throws when the closure
/// exceeds `max_order`, which happens for non-orthogonal or irrational inputs.
inline std::vector<OrthoMatrix> group_closure(std::span<const OrthoMatrix> generators,
                                              std::size_t max_order = 512, double tol = 1e-9) {
    if (generators.empty()) throw std::invalid_argument("group_closure: no generators");
    std::vector<OrthoMatrix> elems{OrthoMatrix::identity(generators.front().dim)};
    for (std::size_t k = 0; k < elems.size(); ++k) {
        for (const auto& g : generators) {
            OrthoMatrix m = g * elems[k];
            bool known = std::any_of(elems.begin(), elems.end(),
                                     [&](const OrthoMatrix& e) { return e.max_abs_diff(m) < tol; });
            if (!known) {
                elems.push_back(m);
                if (elems.size() > max_order)
                    throw std::runtime_error("group_closure: closure exceeds max order");
            }
        }
    }
    return elems;
}

namespace generators {

inline OrthoMatrix cyclic_permutation() {
    // (x, y, z) -> (z, x, y)
    return OrthoMatrix::from_rows({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}});
}

inline OrthoMatrix double_sign_flip() { return OrthoMatrix::from_rows({{-1, 0, 0}, {0, -1, 0}, {0, 0, 1}}); }

inline OrthoMatrix quarter_turn_z() { return OrthoMatrix::from_rows({{0, -1, 0}, {1, 0, 0}, {0, 0, 1}}); }

inline std::vector<OrthoMatrix> tetrahedral() { return {cyclic_permutation(), double_sign_flip()}; }

inline std::vector<OrthoMatrix> octahedral() { return {cyclic_permutation(), quarter_turn_z()}; }

/// Icosahedral rotations in the frame whose icosahedron has vertices at the
/// cyclic permutations of (0, +-1, +-golden).
inline std::vector<OrthoMatrix> icosahedral_textbook() {
    const double g = std::numbers::phi;
    return {cyclic_permutation(), axis_rotation({0, 1, g}, two_pi / 5)};
}

}  // namespace generators

/// Relative invariance defect max |P(g x) - P(x)| / (1 + |P(x)|) over random
/// points of [-1, 1]^d and all group elements.
inline double check_invariance(const std::function<double(std::span<const double>)>& poly,
                               const SymmetryGroup& group, int samples, std::uint64_t seed = 7) {
    Rng rng(seed);
    const int d = group.dim();
    double worst = 0;
    for (int s = 0; s < samples; ++s) {
        std::array<double, 3> x{};
        for (int i = 0; i < d; ++i) x[i] = rng.uniform(-1.0, 1.0);
        const double px = poly(std::span<const double>(x.data(), d));
        for (const auto& g : group.elements) {
            auto gx = g.apply(std::span<const double>(x.data(), d));
            double r = std::abs(poly(std::span<const double>(gx.data(), d)) - px) / (1 + std::abs(px));
            worst = std::max(worst, r);
        }
    }
    return worst;
}

struct GroupValidation {
    double orthogonality = 0;  ///< max |G^T G - 1|
    double determinant = 0;    ///< max ||det| - 1|, or max |det - 1| for rotation groups
    double closure = 0;        ///< max distance of a product to the nearest element
    bool has_identity = false;
    bool order_matches = false;

    bool ok(double tol = 1e-9) const {
        return orthogonality <= tol && determinant <= tol && closure <= tol && has_identity &&
               order_matches;
    }
};

/// Checks the group axioms on the stored elements.
inline GroupValidation validate_group(const SymmetryGroup& g, bool rotations_only) {
    GroupValidation v;
    const auto id = OrthoMatrix::identity(g.dim());
    v.order_matches = static_cast<int>(g.elements.size()) == g.order;
    for (const auto& m : g.elements) {
        v.orthogonality = std::max(v.orthogonality, (m.transpose() * m).max_abs_diff(id));
        double det = m.determinant();
        v.determinant = std::max(v.determinant, rotations_only ? std::abs(det - 1) : std::abs(std::abs(det) - 1));
        if (m.max_abs_diff(id) < 1e-12) v.has_identity = true;
    }
    for (const auto& a : g.elements)
        for (const auto& b : g.elements) {
            OrthoMatrix ab = a * b;
            double best = INFINITY;
            for (const auto& e : g.elements) best = std::min(best, e.max_abs_diff(ab));
            v.closure = std::max(v.closure, best);
        }
    return v;
}

/// Dihedral group of the regular 2k-gon acting on the plane: rotations by
/// multiples of pi/k and the reflections psi -> (m pi / k) - psi. Order 4k.
inline SymmetryGroup dihedral_group(int k) {
    if (k < 1) throw std::invalid_argument("dihedral_group: k must be positive");
    double a = pi / k;
    auto rot = OrthoMatrix::from_rows({{std::cos(a), -std::sin(a)}, {std::sin(a), std::cos(a)}});
    auto refl = OrthoMatrix::from_rows({{1, 0}, {0, -1}});
    std::vector<OrthoMatrix> gens{rot, refl};
    SymmetryGroup g{"dihedral(" + std::to_string(k) + ")", group_closure(gens), 4 * k};
    return g;
}

}  // namespace platonic
