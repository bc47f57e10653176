#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "platonic/i60_frame.hpp"
#include "platonic/polynomials.hpp"
#include "platonic/symmetry.hpp"

namespace platonic {

/// Generators of the icosahedral rotation group fixing the sextic I, as
/// persisted by tools/fit_i60.
inline std::vector<OrthoMatrix> fitted_icosahedral_generators() {
    std::vector<OrthoMatrix> gens;
    for (const auto& a : fitted::i60_generators) {
        OrthoMatrix m;
        m.dim = 3;
        m.a = a;
        gens.push_back(m);
    }
    return gens;
}

/// Named symmetry groups: "T12", "O24", "I60" (rotation groups of the
/// Platonic polyhedra) and "dihedral(k)".
inline SymmetryGroup symmetry_group(std::string_view name) {
    auto make = [&](std::vector<OrthoMatrix> gens, int order) {
        return SymmetryGroup{std::string(name), group_closure(gens), order};
    };
    if (name == "T12") return make(generators::tetrahedral(), 12);
    if (name == "O24") return make(generators::octahedral(), 24);
    if (name == "I60") return make(fitted_icosahedral_generators(), 60);
    if (name.starts_with("dihedral(") && name.ends_with(")")) {
        std::string k(name.substr(9, name.size() - 10));
        std::size_t used = 0;
        int kk = 0;
        try {
            kk = std::stoi(k, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != k.size() || kk < 1) throw std::invalid_argument("bad dihedral order: " + std::string(name));
        return dihedral_group(kk);
    }
    throw std::invalid_argument("unknown symmetry group: " + std::string(name));
}

/// Rotation subgroups have determinant +1; the dihedral groups include reflections.
inline bool is_rotation_group(const SymmetryGroup& g) { return !g.name.starts_with("dihedral"); }

}  // namespace platonic
