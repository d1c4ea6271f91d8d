#pragma once

#include <span>
#include <vector>

#include "fractube/common.hpp"

namespace fractube {

/// Unique real D with sum_j r_j^D = 1.
double moran_dimension(std::span<const double> ratios);

/// r_j = base^{exponents[j]} when lattice.
struct LatticeInfo {
    bool lattice = false;
    double base = 0.0;
    std::vector<int> exponents;
    /// True when the rational fit is not bit-exact; `achieved_error` is the
    /// largest |log r_j / log r_1 - a_j / b_j|.
    bool tolerance_certified = false;
    double achieved_error = 0.0;
};
LatticeInfo classify_lattice(std::span<const double> ratios, int max_denominator = 64, double tol = 1e-12);

/// 1 - sum_j r_j^s and its derivative.
cplx moran_function(std::span<const double> ratios, cplx s);
cplx moran_derivative(std::span<const double> ratios, cplx s);

/// Residue of 1 / (1 - sum_j r_j^s) at a simple root.
cplx residue_scaling_zeta(std::span<const double> ratios, cplx omega);

/// Vertical-line screen at sigma_min, height cap |Im s| <= t_max.
/// t_max <= 0 selects the default (10 periods for lattice, 200 otherwise).
struct Window {
    double sigma_min = -1.0;
    double t_max = 0.0;
};

struct Box {
    double re_lo, re_hi, im_lo, im_hi;
};

/// Argument-principle count of zeros of 1 - sum r_j^s inside `box`, from the
/// tracked argument along the boundary with a Lipschitz-certified step.
/// Throws DomainError if a zero lies within `guard` of the boundary.
int winding_number(std::span<const double> ratios, const Box& box, double guard = 1e-9);

struct ComplexDimension {
    cplx omega;
    cplx residue;
};

/// One root z of 1 - sum z^{k_j}; its poles are s = (Log z + 2 pi i n) / log r.
struct LatticeLine {
    cplx z;
    double real_part = 0.0;
    double im_offset = 0.0;  // Im s at n = 0
    cplx residue;
};

enum class SpectrumKind { lattice, nonlattice };

struct ComplexDimensionSet {
    SpectrumKind kind = SpectrumKind::nonlattice;
    std::vector<double> ratios;
    double dimension = 0.0;
    LatticeInfo lattice;
    double period = 0.0;  // lattice only
    Window window;
    std::vector<LatticeLine> lines;      // lattice only, all polynomial roots
    std::vector<ComplexDimension> roots;  // inside the window, sorted by (Re, Im)
    int census = 0;                       // nonlattice: winding count of the window box

    /// Poles used by tube formulas: every lattice line truncated at
    /// |Im| <= (n_max + 1/2) p, or the nonlattice window roots.
    std::vector<ComplexDimension> poles(long n_max) const;
};

/// Every root of 1 - sum r_j^s has Re s above this value: below it the
/// smallest-ratio terms dominate the rest by more than 1. Returns -infinity
/// when all ratios are equal (no dominant term).
double root_strip_lower_bound(std::span<const double> ratios);

ComplexDimensionSet complex_dimensions(std::span<const double> ratios, const Window& window = {},
                                       std::size_t root_budget = 100'000);

}  // namespace fractube
