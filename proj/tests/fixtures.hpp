#pragma once

#include <cmath>
#include <vector>

#include "fractube/geom2d.hpp"

namespace fixtures {

using fractube::SelfSimilarSystem;
using fractube::Similitude;

inline const double kSqrt3 = std::sqrt(3.0);

inline SelfSimilarSystem cantor() {
    return SelfSimilarSystem(1, {{1.0 / 3.0, 0.0, false, {0.0, 0.0}}, {1.0 / 3.0, 0.0, false, {2.0 / 3.0, 0.0}}});
}

inline SelfSimilarSystem fibonacci() {
    return SelfSimilarSystem(1, {{0.5, 0.0, false, {0.0, 0.0}}, {0.25, 0.0, false, {0.75, 0.0}}});
}

inline SelfSimilarSystem gasket() {
    return SelfSimilarSystem(
        2, {{0.5, 0.0, false, {0.0, 0.0}}, {0.5, 0.0, false, {0.5, 0.0}}, {0.5, 0.0, false, {0.25, kSqrt3 / 4.0}}});
}

inline SelfSimilarSystem koch(std::complex<double> xi = {0.5, 0.5 / std::sqrt(3.0)}) {
    const auto rest = 1.0 - xi;
    return SelfSimilarSystem(2, {{std::abs(xi), std::arg(xi), true, {0.0, 0.0}},
                                 {std::abs(rest), std::arg(rest), true, {xi.real(), xi.imag()}}});
}

inline SelfSimilarSystem koch_nonlattice() { return koch({0.55, 0.22}); }

inline SelfSimilarSystem pentagasket() {
    const double r = (3.0 - std::sqrt(5.0)) / 2.0;
    std::vector<Similitude> maps;
    for (int k = 0; k < 5; ++k) {
        const double a = std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * k / 5.0;
        maps.push_back({r, 0.0, false, {(1.0 - r) * std::cos(a), (1.0 - r) * std::sin(a)}});
    }
    return SelfSimilarSystem(2, maps);
}

}  // namespace fixtures
