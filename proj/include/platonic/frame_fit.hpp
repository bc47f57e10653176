#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "platonic/random.hpp"
#include "platonic/symmetry.hpp"

namespace platonic {

struct FrameFit {
    OrthoMatrix rotation;                   ///< R such that P(R g x) = P(R x)
    std::vector<OrthoMatrix> generators;    ///< conjugated generators R g R^T
    double residual = INFINITY;             ///< max relative invariance defect of the generators
    int starts_tried = 0;
};

namespace detail {

inline std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> a, std::array<double, 3> b) {
    for (int c = 0; c < 3; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        std::swap(a[c], a[piv]);
        std::swap(b[c], b[piv]);
        if (a[c][c] == 0) return {0, 0, 0};
        for (int r = c + 1; r < 3; ++r) {
            double f = a[r][c] / a[c][c];
            for (int k = c; k < 3; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < 3; ++k) s -= a[r][k] * x[k];
        x[r] = s / a[r][r];
    }
    return x;
}

}  // namespace detail

/// Finds a frame rotation R under which the polynomial `poly` is invariant
/// for the group generated by `gens`, i.e. poly(R g x) = poly(R x).
///
/// Multistart Levenberg-Marquardt over rotation vectors; the residual vector
/// collects poly(R g x) - poly(R x) for every generator and sample point.
inline FrameFit fit_invariant_frame(const std::function<double(std::span<const double>)>& poly,
                                    std::span<const OrthoMatrix> gens, int starts = 64,
                                    std::uint64_t seed = 2024, int sample_points = 48) {
    Rng rng(seed);
    std::vector<std::array<double, 3>> pts;
    for (int i = 0; i < sample_points; ++i) {
        double z = rng.uniform(-1, 1), a = rng.uniform(0, two_pi), s = std::sqrt(1 - z * z);
        pts.push_back({s * std::cos(a), s * std::sin(a), z});
    }

    auto residuals = [&](const std::array<double, 3>& w) {
        OrthoMatrix r = rotation_from_vector(w);
        std::vector<double> res;
        res.reserve(gens.size() * pts.size());
        for (const auto& g : gens) {
            OrthoMatrix rg = r * g;
            for (const auto& x : pts) {
                auto a = rg.apply(x);
                auto b = r.apply(x);
                res.push_back(poly(a) - poly(b));
            }
        }
        return res;
    };
    auto cost = [](const std::vector<double>& r) {
        double s = 0;
        for (double v : r) s += v * v;
        return s;
    };

    FrameFit best;
    std::array<double, 3> best_w{};
    double best_cost = INFINITY;
    for (int s = 0; s < starts; ++s) {
        // random rotation vector, angle uniform in (0, pi)
        double z = rng.uniform(-1, 1), a = rng.uniform(0, two_pi), sr = std::sqrt(1 - z * z);
        double ang = rng.uniform(0, pi);
        std::array<double, 3> w{ang * sr * std::cos(a), ang * sr * std::sin(a), ang * z};
        auto r = residuals(w);
        double c = cost(r);
        double lambda = 1e-3;
        for (int it = 0; it < 200 && c > 1e-30; ++it) {
            const double h = 1e-7;
            std::vector<std::array<double, 3>> jac(r.size());
            for (int k = 0; k < 3; ++k) {
                auto wp = w, wm = w;
                wp[k] += h;
                wm[k] -= h;
                auto rp = residuals(wp), rm = residuals(wm);
                for (std::size_t i = 0; i < r.size(); ++i) jac[i][k] = (rp[i] - rm[i]) / (2 * h);
            }
            std::array<std::array<double, 3>, 3> jtj{};
            std::array<double, 3> jtr{};
            for (std::size_t i = 0; i < r.size(); ++i)
                for (int k = 0; k < 3; ++k) {
                    jtr[k] -= jac[i][k] * r[i];
                    for (int l = 0; l < 3; ++l) jtj[k][l] += jac[i][k] * jac[i][l];
                }
            bool improved = false;
            for (int tries = 0; tries < 12; ++tries) {
                auto m = jtj;
                for (int k = 0; k < 3; ++k) m[k][k] *= 1 + lambda;
                auto d = detail::solve3(m, jtr);
                std::array<double, 3> wn{w[0] + d[0], w[1] + d[1], w[2] + d[2]};
                auto rn = residuals(wn);
                double cn = cost(rn);
                if (cn < c) {
                    w = wn;
                    r = std::move(rn);
                    improved = c - cn > 1e-32;
                    c = cn;
                    lambda = std::max(lambda / 10, 1e-12);
                    break;
                }
                lambda *= 10;
            }
            if (!improved) break;
        }
        ++best.starts_tried;
        if (c < best_cost) {
            best_cost = c;
            best_w = w;
        }
        if (best_cost < 1e-28) break;
    }

    best.rotation = rotation_from_vector(best_w);
    const OrthoMatrix rt = best.rotation.transpose();
    for (const auto& g : gens) best.generators.push_back(best.rotation * g * rt);
    SymmetryGroup probe{"probe", best.generators, static_cast<int>(best.generators.size())};
    best.residual = check_invariance(poly, probe, 1000, seed + 1);
    return best;
}

}  // namespace platonic
