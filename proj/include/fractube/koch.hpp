#pragma once

#include <functional>

#include "fractube/common.hpp"

// Inner tube of the Koch snowflake computed directly (not via the tiling):
// the preliminary area without error blocks, and the coefficient series of
// the two multiplicatively periodic factors.
namespace fractube::koch {

/// log_3 4.
double dimension();
/// 2 pi / log 3.
double period();

/// x = -log_3(eps sqrt 3).
double level_coordinate(double eps);
/// Coefficient of eps^{2-D} as a function of the fractional part {x}.
double preliminary_bracket(double frac);
/// V~(eps) for 0 < eps < 1/sqrt(3).
double preliminary_area(double eps);

struct SeriesValue {
    cplx value;
    double tail_bound;
};

struct Coefficients {
    cplx a, b, sigma, tau;
    double b_tail = 0.0;    // bound on |b - partial sum|
    double tau_tail = 0.0;  // bound on |tau - partial sum|
};

/// m-th terms of the b and tau series (m >= 1).
cplx b_term(long n, int m);
cplx tau_term(long n, int m);
/// Geometric ratio bounds |t_{m+1}| <= ratio |t_m| valid for all m >= 1.
inline constexpr double kBRatio = 0.272;
inline constexpr double kTauRatio = 0.25;

Coefficients coefficient_series(long n, int terms);

/// Fourier coefficients g_alpha of the unknown periodic error-block factor,
/// in the basis eps^{-i alpha p}.
using ErrorModel = std::function<cplx(long alpha)>;
ErrorModel constant_model(double level);
/// mu {x}: a periodic sawtooth reading of the pictured approximation.
ErrorModel sawtooth_model(double amplitude);

struct PeriodicFactors {
    cplx first;   // G_1(eps)
    cplx second;  // G_2(eps)
};
/// G_1 and G_2 truncated at |n|, |alpha| <= n_max, series at `terms`.
PeriodicFactors periodic_factors(double eps, const ErrorModel& model, long n_max, int terms = 30);
/// G_1(eps) eps^{2-D} + G_2(eps) eps^2 under the given model.
double snowflake_area(double eps, const ErrorModel& model, long n_max, int terms = 30);

}  // namespace fractube::koch
