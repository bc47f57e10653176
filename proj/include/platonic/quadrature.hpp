#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "platonic/integrators.hpp"

namespace platonic {

/// Radial quadrature check on an H_3 orbit: max over samples of
/// |p_rho^2 - (2 h3 - k rho^2 - 2 h2 / rho^2)|, divided by
/// 1 + p_rho^2 + k rho^2 + 2 |h2| / rho^2 (the size of the cancelling terms).
inline double radial_consistency(const OrbitTrace& orbit, double h2, double h3, double k) {
    if (orbit.system.chart != Chart::euclid3_spherical || orbit.system.potential.full_hamiltonian)
        throw std::invalid_argument("radial_consistency: needs an H3 orbit in spherical coordinates");
    double worst = 0;
    for (const auto& s : orbit.states) {
        const double r = s.q[0];
        const double pr2 = s.p[0] * s.p[0], kr = k * r * r, c = 2 * h2 / (r * r);
        worst = std::max(worst, std::abs(pr2 - (2 * h3 - kr - c)) / (1 + pr2 + kr + std::abs(c)));
    }
    return worst;
}

/// Same check with h2, h3 taken from the orbit's initial state.
inline double radial_consistency(const OrbitTrace& orbit) {
    if (orbit.states.empty()) return 0;
    auto I = integrals(orbit.system, orbit.states.front());
    if (!I || !I->H1) throw std::invalid_argument("radial_consistency: no angular Hamiltonian");
    return radial_consistency(orbit, *I->H1, *I->H, orbit.system.harmonic_k + orbit.system.potential.radial_harmonic);
}

}  // namespace platonic
