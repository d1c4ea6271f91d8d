#pragma once

#include <span>
#include <vector>

#include "fractube/common.hpp"
#include "fractube/geom2d.hpp"

namespace fractube {

using u128 = unsigned __int128;

/// One distinct scale of a fractal string: `multiplicity` intervals of
/// length 2 g ratio. `weight` is the multiplicity as a double; `exact` is
/// false when the 128-bit count overflowed (weight is then still correct to
/// double rounding).
struct Atom {
    double ratio = 1.0;
    u128 multiplicity = 1;
    double weight = 1.0;
    bool exact = true;
    int level = 0;
};

/// Composite ratios r_w = r_{w_1} ... r_{w_k} over all finite words, grouped by
/// exponent vector over the distinct generator ratios. Returns every bucket
/// with ratio >= min_ratio and level <= max_level, sorted by decreasing ratio.
/// Throws BudgetError past `budget` buckets.
std::vector<Atom> enumerate_ratio_buckets(std::span<const double> ratios, double min_ratio,
                                          int max_level = 1 << 30, std::size_t budget = 10'000'000);

/// Sum over all words of r_w^p, i.e. 1 / (1 - sum_j r_j^p); requires sum_j r_j^p < 1.
double word_power_sum(std::span<const double> ratios, double p);

class FractalString {
public:
    /// Self-similar string: all finite products of `ratios`, largest interval 2g.
    static FractalString self_similar(std::vector<double> ratios, double g);
    /// Explicit finite list; ratios in (0, 1], normalised so the largest is 1.
    static FractalString explicit_list(std::vector<Atom> atoms, double g);

    bool is_self_similar() const { return self_similar_; }
    const std::vector<double>& generator_ratios() const { return ratios_; }
    const std::vector<Atom>& explicit_atoms() const { return atoms_; }
    double largest_inradius() const { return g_; }
    /// Geometric realisability as a bounded open subset of the line
    /// (similarity dimension < 1); otherwise the string is a measure only.
    bool realizable() const;
    double total_length() const;
    /// Atoms with level <= depth (self-similar) or the explicit list.
    std::vector<Atom> atoms(int depth) const;

private:
    bool self_similar_ = true;
    std::vector<double> ratios_;
    std::vector<Atom> atoms_;
    double g_ = 0.5;
};

/// zeta_s(s) = sum_n m_n ratio_n^s; closed form 1 / (1 - sum_j r_j^s) for
/// self-similar strings. Throws DomainError("pole") within 1e-12 of a pole.
cplx scaling_zeta(const FractalString& string, cplx s);

/// Level-truncated Dirichlet sum with its geometric tail bound.
struct DirichletSum {
    cplx value;
    double tail_bound;
};
DirichletSum dirichlet_partial_sum(const FractalString& string, cplx s, int depth);

/// zeta_L(eps, s) = zeta_s(s) (2g)^s (2 eps)^{1-s} / (s (1 - s)).
cplx geometric_zeta_string(const FractalString& string, double eps, cplx s);

/// Exact V(eps) = sum_n m_n min(2 eps, l_n); the saturated tail is summed in
/// closed form.
double string_tube_oracle(const FractalString& string, double eps);

/// Self-similar string of the gaps of a one-dimensional system: the hull
/// interval minus the images of the maps must be a single open interval (the
/// generator), whose half-length becomes g.
FractalString string_from_system(const SelfSimilarSystem& system);

}  // namespace fractube
