// Regenerates include/platonic/i60_frame.hpp: fits the frame in which the
// icosahedral sextic I is invariant and prints the conjugated generators.
//
//   fit_i60 > include/platonic/i60_frame.hpp

#include <cstdio>

#include "platonic/frame_fit.hpp"
#include "platonic/polynomials.hpp"

int main() {
    using namespace platonic;
    auto gens = generators::icosahedral_textbook();
    auto poly = [](std::span<const double> x) { return evaluate(InvariantPolynomial::I, x); };
    FrameFit fit = fit_invariant_frame(poly, gens);

    std::printf("#pragma once\n\n");
    std::printf("// Generated by tools/fit_i60. Do not edit by hand.\n");
    std::printf("// Icosahedral rotation generators conjugated into the frame of the\n");
    std::printf("// sextic I; invariance residual of the fit: %.3e (%d starts).\n\n",
                fit.residual, fit.starts_tried);
    std::printf("#include <array>\n\nnamespace platonic::fitted {\n\n");
    std::printf("inline constexpr double i60_fit_residual = %.17g;\n\n", fit.residual);
    std::printf("inline constexpr std::array<std::array<double, 9>, %zu> i60_generators{{\n",
                fit.generators.size());
    for (const auto& g : fit.generators) {
        std::printf("    {");
        for (int i = 0; i < 9; ++i) std::printf("%s%.17g", i ? ", " : "", g.a[i]);
        std::printf("},\n");
    }
    std::printf("}};\n\n}  // namespace platonic::fitted\n");
    return fit.residual <= 1e-9 ? 0 : 1;
}
