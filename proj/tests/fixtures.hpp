#pragma once

// Shared density fixtures. The bumps are wide enough that the clipping floor
// never activates, so every density is smooth.

#include <array>
#include <utility>

#include "beckmann/density.hpp"

namespace fixture {

inline beckmann::Density source(const beckmann::Grid& g)
{
    if (g.dim() == 1) {
        std::array<double, 1> c{0.3};
        return beckmann::gaussian_bump(g, c, 0.2);
    }
    std::array<double, 2> c{0.35, 0.4};
    return beckmann::gaussian_bump(g, c, 0.3);
}

inline beckmann::Density target(const beckmann::Grid& g)
{
    if (g.dim() == 1) {
        std::array<double, 1> c{0.7};
        return beckmann::gaussian_bump(g, c, 0.25);
    }
    std::array<double, 2> c{0.65, 0.6};
    return beckmann::gaussian_bump(g, c, 0.3);
}

}  // namespace fixture
