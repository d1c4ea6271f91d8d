#include "doctest.h"
#include "fractube/koch.hpp"

using namespace fractube;
using doctest::Approx;

TEST_CASE("preliminary area: bracket at integer levels") {
    const double s3 = std::sqrt(3.0);
    const double bracket0 = 3 * s3 / 40 + s3 / 2 + (kPi / 3 - s3) / 6;
    CHECK(koch::preliminary_bracket(0.0) == Approx(bracket0).epsilon(1e-15));
    for (int m = 1; m <= 6; ++m) {
        const double eps = std::pow(3.0, -m) / s3;
        const double v = koch::preliminary_area(eps);
        const double expected = std::pow(eps, 2 - koch::dimension()) * bracket0 - eps * eps / 3 * (kPi / 3 + 2 * s3);
        CHECK(v == Approx(expected).epsilon(1e-12));
    }
    CHECK_THROWS_AS(koch::preliminary_area(0.0), DomainError);
    CHECK_THROWS_AS(koch::preliminary_area(1.0 / s3), DomainError);
}

TEST_CASE("preliminary area: the eps^{2-D} bracket is periodic in x") {
    const double d = koch::dimension();
    const double s3 = std::sqrt(3.0);
    auto bracket_of = [&](double eps) {
        return (koch::preliminary_area(eps) + eps * eps / 3 * (kPi / 3 + 2 * s3)) / std::pow(eps, 2 - d);
    };
    for (double eps : {0.5, 0.31, 0.2, 0.111, 0.07}) CHECK(bracket_of(eps / 3) == Approx(bracket_of(eps)).epsilon(1e-12));
}

TEST_CASE("preliminary area is bounded by the bracket extremes") {
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 10000; ++i) {
        const double b = koch::preliminary_bracket(i / 10000.0);
        lo = std::min(lo, b);
        hi = std::max(hi, b);
    }
    for (double eps : {1e-3, 1e-5, 1e-7, 3.3e-9}) {
        const double ratio = koch::preliminary_area(eps) / std::pow(eps, 2 - koch::dimension());
        CHECK(ratio <= hi);
        CHECK(ratio >= lo - 1e-3);
    }
}

TEST_CASE("coefficient series") {
    const double s3 = std::sqrt(3.0);
    const auto c0 = koch::coefficient_series(0, 40);
    CHECK(std::abs(c0.sigma - (-std::log(3.0) * (kPi / 3 + 2 * s3) - c0.tau)) < 1e-14);
    for (long n = 1; n <= 50; ++n) {
        const auto p = koch::coefficient_series(n, 30), m = koch::coefficient_series(-n, 30);
        CHECK(std::abs(m.a - std::conj(p.a)) < 1e-12);
        CHECK(std::abs(m.b - std::conj(p.b)) < 1e-12);
        CHECK(std::abs(m.sigma - std::conj(p.sigma)) < 1e-12);
        CHECK(std::abs(m.tau - std::conj(p.tau)) < 1e-12);
    }
}

TEST_CASE("geometric tail bounds hold term by term and for the sums") {
    for (long n : {0L, 1L, -7L, 40L}) {
        for (int m = 1; m < 60; ++m) {
            CHECK(std::abs(koch::b_term(n, m + 1)) <= koch::kBRatio * std::abs(koch::b_term(n, m)));
            CHECK(std::abs(koch::tau_term(n, m + 1)) <= koch::kTauRatio * std::abs(koch::tau_term(n, m)));
        }
        const auto reference = koch::coefficient_series(n, 80);
        for (int terms : {1, 2, 4, 8}) {
            const auto c = koch::coefficient_series(n, terms);
            CHECK(std::abs(c.b - reference.b) <= c.b_tail * (1 + 1e-12));
            CHECK(std::abs(c.tau - reference.tau) <= c.tau_tail * (1 + 1e-12));
        }
    }
}

TEST_CASE("without error blocks the series rebuild three copies of the preliminary area") {
    // G_1 eps^{2-D} + G_2 eps^2 with h = 0 is the Fourier series of
    // 3 V~(eps); partial sums converge slowly (coefficients decay like 1/n).
    for (double eps : {0.05, 0.01}) {
        const double series = koch::snowflake_area(eps, koch::constant_model(0.0), 200);
        CHECK(series == Approx(3.0 * koch::preliminary_area(eps)).epsilon(2e-3));
    }
}

TEST_CASE("error-block models") {
    const auto c = koch::constant_model(0.7);
    CHECK(c(0) == cplx(0.7));
    CHECK(c(3) == cplx(0.0));
    const auto saw = koch::sawtooth_model(2.0);
    CHECK(saw(0) == cplx(1.0));
    CHECK(std::abs(saw(-2) - std::conj(saw(2))) < 1e-15);
    const auto f = koch::periodic_factors(0.01, saw, 20);
    CHECK(std::abs(f.first.imag()) < 1e-12);
    CHECK(std::abs(f.second.imag()) < 1e-12);
    // Multiplicative periodicity in eps -> eps / 3.
    const auto g = koch::periodic_factors(0.01 / 3, saw, 20);
    CHECK(std::abs(g.first - f.first) < 1e-12);
}
