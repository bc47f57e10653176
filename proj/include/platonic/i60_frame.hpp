#pragma once

// Generated by tools/fit_i60. Do not edit by hand.
// Icosahedral rotation generators conjugated into the frame of the
// sextic I; invariance residual of the fit: 4.202e-15 (1 starts).

#include <array>

namespace platonic::fitted {

inline constexpr double i60_fit_residual = 4.2021296111776853e-15;

inline constexpr std::array<std::array<double, 9>, 2> i60_generators{{
    {0.44721359549995804, 0.85065080835203988, -0.27639320225002106, 0.52573111211913359, -1.2904781691512896e-16, 0.85065080835203999, 0.72360679774997883, -0.52573111211913393, -0.44721359549995815},
    {0.67082039324993703, -0.16245984811645314, -0.72360679774997916, 0.6881909602355869, 0.5, 0.5257311121191337, 0.2763932022500209, -0.8506508083520401, 0.44721359549995815},
}};

}  // namespace platonic::fitted
