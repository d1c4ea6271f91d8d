#pragma once

#include <span>
#include <vector>

#include "fractube/spectrum.hpp"
#include "fractube/string_core.hpp"
#include "fractube/tiling.hpp"

namespace fractube {

/// A pole term contributes coefficient * eps^{d - omega}.
struct PoleTerm {
    cplx omega;
    cplx coefficient;
};

struct TubeEvaluation {
    int dimension = 1;
    std::vector<double> eps;
    std::vector<double> values;
    std::vector<double> imag;        // Im of the complex sum, per eps
    std::vector<double> tail_bound;  // estimated truncation error, per eps
    std::vector<PoleTerm> poles;
    /// Non-oscillatory terms: polynomial[i] multiplies eps^{d-i}, i < d.
    std::vector<double> polynomial;
    long n_max = 0;
    double max_imag = 0.0;
    /// Largest eps for which the residue expansion is exact (smallest first
    /// breakpoint over generators).
    double valid_up_to = 0.0;
};

/// Poles for tube formulas: lattice lines in full, or the nonlattice roots
/// in a window whose screen sits left of the whole root strip.
ComplexDimensionSet tube_dimensions(std::span<const double> ratios, const Window& window = {});

TubeEvaluation string_tube_formula(const FractalString& string, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max);

/// zeta_T(eps, s) = eps^{d-s} zeta_s(s) sum_pieces sum_i kappa_i (e_{k+1}^{s-i} - e_k^{s-i}) / (s - i),
/// which reduces to sum_i g^{s-i} kappa_i / (s - i) for a diphase generator.
cplx spray_geometric_zeta(const SelfSimilarTiling& tiling, std::size_t generator, double eps, cplx s);

TubeEvaluation tiling_tube_formula(const SelfSimilarTiling& tiling, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max);

namespace serial {
// Single-threaded references for the OpenMP kernels above.
TubeEvaluation string_tube_formula(const FractalString& string, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max);
TubeEvaluation tiling_tube_formula(const SelfSimilarTiling& tiling, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max);
}  // namespace serial

struct SprayPiece {
    double ratio;
    Generator generator;
};
/// Residue-free evaluation for a finite spray: only the integer-dimension
/// terms survive, sum_n rho_n^d (area + sum_i kappa_i (eps / rho_n)^{d-i}).
double finite_spray_degeneration(std::span<const SprayPiece> pieces, double eps);
/// The same quantity from direct polygon geometry.
double finite_spray_geometry(std::span<const SprayPiece> pieces, double eps);

/// Log-spaced grid of `count` points on [lo, hi].
std::vector<double> log_grid(double lo, double hi, int count);

}  // namespace fractube
