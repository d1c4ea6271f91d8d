#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fractube/tiling.hpp"

namespace fractube {

/// Exact squared Euclidean distance transform (lower envelope of parabolas,
/// separable in rows and columns). `seeds` is row-major, nonzero = feature.
/// Distances are in cell units; cells with no feature anywhere get +inf.
std::vector<double> squared_distance_transform(std::span<const std::uint8_t> seeds, int width, int height);

namespace serial {
std::vector<double> squared_distance_transform(std::span<const std::uint8_t> seeds, int width, int height);
}

struct DecompositionRow {
    double eps = 0.0;
    double raster_area = 0.0;  // |{x : d(x, F) <= eps}| measured on the grid
    double predicted = 0.0;    // tile tube + exterior Steiner tube of the hull
    double relative_gap = 0.0;
    std::size_t refined_cells = 0;
};

struct DecompositionReport {
    std::vector<DecompositionRow> rows;
    int cells = 0;
    double cell_size = 0.0;
    double tolerance = 0.0;
    bool holds = false;  // every gap within tolerance
    HullBoundaryCheck boundary;
};

/// Compares the measured eps-neighborhood of the attractor with the tile
/// tube plus the hull's exterior parallel set. Cells near the level set are
/// decided exactly by branch and bound on the attractor.
DecompositionReport exterior_decomposition_check(const SelfSimilarTiling& tiling, std::span<const double> eps,
                                                 int cells = 2000, double tolerance = 0.01);

}  // namespace fractube
