#include "fractube/koch.hpp"

#include <vector>

namespace fractube::koch {

namespace {

const double kSqrt3 = std::sqrt(3.0);
const double kLog3 = std::log(3.0);

// (2m)! / (m!)^2 / 4^{2m+1}, built from the previous m to avoid overflow.
double central_ratio(int m, double denominator_power) {
    return std::exp(std::lgamma(2.0 * m + 1.0) - 2.0 * std::lgamma(m + 1.0) - denominator_power * std::log(4.0));
}

}  // namespace

double dimension() { return std::log(4.0) / kLog3; }
double period() { return 2.0 * kPi / kLog3; }

double level_coordinate(double eps) { return -std::log(eps * kSqrt3) / kLog3; }

double preliminary_bracket(double frac) {
    return std::pow(4.0, -frac) *
           (3.0 * kSqrt3 / 40.0 * std::pow(9.0, frac) + kSqrt3 / 2.0 * std::pow(3.0, frac) + (kPi / 3.0 - kSqrt3) / 6.0);
}

double preliminary_area(double eps) {
    if (!(eps > 0.0 && eps < 1.0 / kSqrt3)) throw DomainError("preliminary area needs 0 < eps < 1/sqrt(3)");
    double x = level_coordinate(eps);
    // eps = 3^-m / sqrt(3) should land on level m, not just below it
    if (std::abs(x - std::round(x)) < 1e-12) x = std::round(x);
    const double frac = x - std::floor(x);
    return std::pow(eps, 2.0 - dimension()) * preliminary_bracket(frac) - eps * eps / 3.0 * (kPi / 3.0 + 2.0 * kSqrt3);
}

cplx b_term(long n, int m) {
    const double p3 = std::pow(3.0, 2 * m + 1);
    const double real = central_ratio(m, 2.0 * m + 1.0) * (p3 - 4.0) /
                        ((4.0 * m * m - 1.0) * (p3 - 2.0));
    return real / cplx(dimension() - 2.0 * m - 1.0, static_cast<double>(n) * period());
}

cplx tau_term(long n, int m) {
    const double p3 = std::pow(3.0, 2 * m + 1);
    const double real = central_ratio(m, 2.0 * m - 1.0) * (p3 - 1.0) /
                        ((4.0 * m * m - 1.0) * (p3 - 2.0));
    return real / cplx(-2.0 * m - 1.0, static_cast<double>(n) * period());
}

Coefficients coefficient_series(long n, int terms) {
    if (terms < 1) throw DomainError("series needs at least one term");
    Coefficients c;
    ComplexCompensatedSum b, tau;
    for (int m = 1; m <= terms; ++m) {
        b.add(b_term(n, m));
        tau.add(tau_term(n, m));
    }
    c.b = b.value();
    c.tau = tau.value();
    c.b_tail = std::abs(b_term(n, terms)) * kBRatio / (1.0 - kBRatio);
    c.tau_tail = std::abs(tau_term(n, terms)) * kTauRatio / (1.0 - kTauRatio);
    const double d = dimension();
    const cplx ip(0.0, static_cast<double>(n) * period());
    const double s27 = std::pow(3.0, 1.5), s243 = std::pow(3.0, 2.5);
    c.a = (kPi - s27) / (8.0 * (d + ip)) + s27 / (8.0 * (d - 1.0 + ip)) - s243 / (32.0 * (d - 2.0 + ip)) + 0.5 * c.b;
    c.sigma = -c.tau;
    if (n == 0) c.sigma -= kLog3 * (kPi / 3.0 + 2.0 * kSqrt3);
    return c;
}

ErrorModel constant_model(double level) {
    return [level](long alpha) { return alpha == 0 ? cplx(level) : cplx(0.0); };
}

ErrorModel sawtooth_model(double amplitude) {
    // {x} = 1/2 + sum_{a != 0} i/(2 pi a) e^{2 pi i a x}; with x = u - 1/2 and
    // eps^{-i a p} = e^{2 pi i a u} each mode picks up (-1)^a.
    return [amplitude](long alpha) {
        if (alpha == 0) return cplx(0.5 * amplitude);
        const double sign = (alpha % 2 == 0) ? 1.0 : -1.0;
        return cplx(0.0, amplitude * sign / (2.0 * kPi * static_cast<double>(alpha)));
    };
}

PeriodicFactors periodic_factors(double eps, const ErrorModel& model, long n_max, int terms) {
    std::vector<Coefficients> coeff;
    std::vector<cplx> g;
    for (long k = -2 * n_max; k <= 2 * n_max; ++k) g.push_back(model(k));
    for (long n = -n_max; n <= n_max; ++n) coeff.push_back(coefficient_series(n, terms));
    ComplexCompensatedSum first, second;
    const double log_eps = std::log(eps);
    for (long n = -n_max; n <= n_max; ++n) {
        cplx conv_b = 0.0, conv_tau = 0.0;
        for (long alpha = -n_max; alpha <= n_max; ++alpha) {
            const cplx ga = g[n - alpha + 2 * n_max];
            conv_b += coeff[alpha + n_max].b * ga;
            conv_tau += coeff[alpha + n_max].tau * ga;
        }
        const double sign = (n % 2 == 0) ? 1.0 : -1.0;
        const cplx phase = std::exp(cplx(0.0, -static_cast<double>(n) * period() * log_eps));
        first.add((coeff[n + n_max].a + conv_b) * sign * phase);
        second.add((coeff[n + n_max].sigma + conv_tau) * sign * phase);
    }
    return {first.value() / kLog3, second.value() / kLog3};
}

double snowflake_area(double eps, const ErrorModel& model, long n_max, int terms) {
    const auto f = periodic_factors(eps, model, n_max, terms);
    return (f.first * std::pow(eps, 2.0 - dimension()) + f.second * eps * eps).real();
}

}  // namespace fractube::koch
