#include "fractube/tube.hpp"

#include <algorithm>
#include <limits>

namespace fractube {

namespace {

struct Expansion {
    int dimension = 1;
    std::vector<PoleTerm> poles;
    std::vector<double> polynomial;
    double valid_up_to = 0.0;
};

Expansion string_expansion(const FractalString& string, const ComplexDimensionSet& dims, long n_max) {
    if (!string.is_self_similar()) throw DomainError("the residue formula needs a self-similar string");
    const auto& ratios = string.generator_ratios();
    if (std::abs(moran_function(ratios, 1.0)) < 1e-10 || std::abs(moran_function(ratios, 0.0)) < 1e-10)
        throw DomainError("non-simple structural collision");
    Expansion ex;
    ex.dimension = 1;
    const double g = string.largest_inradius();
    for (const auto& p : dims.poles(n_max)) {
        const cplx w = p.omega;
        const cplx c = p.residue * std::exp(w * std::log(2.0 * g) + (1.0 - w) * std::log(2.0)) / (w * (1.0 - w));
        ex.poles.push_back({w, c});
    }
    // s = 0 is not a scaling pole (zeta_s(0) = 1 / (1 - J)), so its term is kept.
    ex.polynomial = {2.0 * scaling_zeta(string, 0.0).real()};
    ex.valid_up_to = g;
    return ex;
}

cplx generator_mellin(const Generator& gen, cplx s) {
    cplx acc = 0.0;
    bool first = true;
    for (const auto& piece : gen.pieces()) {
        for (int i = 0; i <= 2; ++i) {
            const cplx e = s - static_cast<double>(i);
            cplx diff = std::exp(e * std::log(piece.end));
            if (!first) diff -= std::exp(e * std::log(piece.start));
            acc += piece.kappa[i] * diff / e;
        }
        first = false;
    }
    return acc;
}

Expansion tiling_expansion(const SelfSimilarTiling& tiling, const ComplexDimensionSet& dims, long n_max) {
    const auto ratios = tiling.ratios();
    constexpr int d = 2;
    for (int i = 0; i <= d; ++i)
        if (std::abs(moran_function(ratios, static_cast<double>(i))) < 1e-10)
            throw DomainError("pole collision, formula hypothesis violated");
    Expansion ex;
    ex.dimension = d;
    for (const auto& p : dims.poles(n_max)) {
        cplx m = 0.0;
        for (const auto& gen : tiling.generators()) m += generator_mellin(gen, p.omega);
        ex.poles.push_back({p.omega, p.residue * m});
    }
    ex.polynomial.assign(d, 0.0);
    for (int i = 0; i < d; ++i) {
        const double zeta_i = 1.0 / moran_function(ratios, static_cast<double>(i)).real();
        for (const auto& gen : tiling.generators()) ex.polynomial[i] += gen.pieces().front().kappa[i] * zeta_i;
    }
    ex.valid_up_to = std::numeric_limits<double>::infinity();
    for (const auto& gen : tiling.generators()) ex.valid_up_to = std::min(ex.valid_up_to, gen.pieces().front().end);
    return ex;
}

struct PointValue {
    double value, imag, tail;
};

// Tail of the pole sum beyond the truncation height T. The decay power k of
// |c_omega| ~ |Im omega|^{-k} is fitted by least squares on the upper three
// quarters of the ladder; the envelope constant A bounds every fitted term at
// this eps, and the tail is 2 rho A T^{1-k} / (k - 1) for pole density rho.
double tail_estimate(const Expansion& ex, double eps) {
    double top = 0.0;
    std::size_t oscillatory = 0;
    for (const auto& p : ex.poles)
        if (p.omega.imag() != 0.0) {
            top = std::max(top, std::abs(p.omega.imag()));
            ++oscillatory;
        }
    if (oscillatory == 0) return 0.0;
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (const auto& p : ex.poles) {
        const double h = std::abs(p.omega.imag());
        if (h < 0.25 * top || std::abs(p.coefficient) == 0.0) continue;
        const double x = std::log(h), y = std::log(std::abs(p.coefficient));
        sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
    }
    if (n < 2) return std::numeric_limits<double>::infinity();
    const double k = -(n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (!(k > 1.05)) return std::numeric_limits<double>::infinity();
    const double log_eps = std::log(eps);
    double envelope = 0.0;
    for (const auto& p : ex.poles) {
        const double h = std::abs(p.omega.imag());
        if (h < 0.25 * top) continue;
        envelope = std::max(envelope, std::abs(p.coefficient) * std::pow(h, k) *
                                          std::exp((ex.dimension - p.omega.real()) * log_eps));
    }
    const double density = static_cast<double>(oscillatory) / (2.0 * top);
    return 2.0 * density * envelope * std::pow(top, 1.0 - k) / (k - 1.0);
}

PointValue evaluate(const Expansion& ex, double eps) {
    ComplexCompensatedSum acc;
    const double log_eps = std::log(eps);
    for (const auto& p : ex.poles) acc.add(p.coefficient * std::exp((static_cast<double>(ex.dimension) - p.omega) * log_eps));
    for (std::size_t i = 0; i < ex.polynomial.size(); ++i)
        acc.add(ex.polynomial[i] * std::pow(eps, ex.dimension - static_cast<int>(i)));
    const cplx v = acc.value();
    return {v.real(), v.imag(), tail_estimate(ex, eps)};
}

TubeEvaluation package(const Expansion& ex, std::span<const double> eps, long n_max) {
    TubeEvaluation out;
    out.dimension = ex.dimension;
    out.eps.assign(eps.begin(), eps.end());
    out.values.resize(eps.size());
    out.imag.resize(eps.size());
    out.tail_bound.resize(eps.size());
    out.poles = ex.poles;
    out.polynomial = ex.polynomial;
    out.n_max = n_max;
    out.valid_up_to = ex.valid_up_to;
    return out;
}

void finish(TubeEvaluation& out) {
    out.max_imag = 0.0;
    for (double im : out.imag) out.max_imag = std::max(out.max_imag, std::abs(im));
}

TubeEvaluation run_parallel(const Expansion& ex, std::span<const double> eps, long n_max) {
    TubeEvaluation out = package(ex, eps, n_max);
    const long n = static_cast<long>(eps.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
        const auto pv = evaluate(ex, eps[i]);
        out.values[i] = pv.value;
        out.imag[i] = pv.imag;
        out.tail_bound[i] = pv.tail;
    }
    finish(out);
    return out;
}

TubeEvaluation run_serial(const Expansion& ex, std::span<const double> eps, long n_max) {
    TubeEvaluation out = package(ex, eps, n_max);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const auto pv = evaluate(ex, eps[i]);
        out.values[i] = pv.value;
        out.imag[i] = pv.imag;
        out.tail_bound[i] = pv.tail;
    }
    finish(out);
    return out;
}

}  // namespace

ComplexDimensionSet tube_dimensions(std::span<const double> ratios, const Window& window) {
    Window w = window;
    if (!classify_lattice(ratios).lattice) {
        const double lower = root_strip_lower_bound(ratios);
        if (std::isfinite(lower)) w.sigma_min = std::min(w.sigma_min, lower - 0.05);
    }
    return complex_dimensions(ratios, w);
}

TubeEvaluation string_tube_formula(const FractalString& string, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max) {
    return run_parallel(string_expansion(string, dims, n_max), eps, n_max);
}

TubeEvaluation tiling_tube_formula(const SelfSimilarTiling& tiling, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max) {
    return run_parallel(tiling_expansion(tiling, dims, n_max), eps, n_max);
}

namespace serial {

TubeEvaluation string_tube_formula(const FractalString& string, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max) {
    return run_serial(string_expansion(string, dims, n_max), eps, n_max);
}

TubeEvaluation tiling_tube_formula(const SelfSimilarTiling& tiling, const ComplexDimensionSet& dims,
                                   std::span<const double> eps, long n_max) {
    return run_serial(tiling_expansion(tiling, dims, n_max), eps, n_max);
}

}  // namespace serial

cplx spray_geometric_zeta(const SelfSimilarTiling& tiling, std::size_t generator, double eps, cplx s) {
    for (int i = 0; i <= 2; ++i)
        if (std::abs(s - static_cast<double>(i)) < 1e-12) throw DomainError("integer-dimension pole");
    const auto ratios = tiling.ratios();
    const cplx f = moran_function(ratios, s);
    if (std::abs(f) < 1e-12) throw DomainError("pole of the scaling zeta function");
    const auto& gen = tiling.generators().at(generator);
    return std::exp((2.0 - s) * std::log(eps)) / f * generator_mellin(gen, s);
}

double finite_spray_degeneration(std::span<const SprayPiece> pieces, double eps) {
    CompensatedSum acc;
    for (const auto& piece : pieces) {
        const double rho = piece.ratio;
        const auto& gen = piece.generator;
        const double t = eps / rho;
        if (t >= gen.inradius()) {
            acc.add(rho * rho * gen.area());
            continue;
        }
        const KappaPiece* kp = &gen.pieces().back();
        for (const auto& p : gen.pieces())
            if (t < p.end) {
                kp = &p;
                break;
            }
        // sum_i kappa_i rho^i eps^{d-i}; on the first phase kappa_d = -area cancels rho^d area.
        acc.add(kp->kappa[0] * eps * eps);
        acc.add(kp->kappa[1] * rho * eps);
        acc.add(rho * rho * (gen.area() + kp->kappa[2]));
    }
    return acc.value();
}

double finite_spray_geometry(std::span<const SprayPiece> pieces, double eps) {
    CompensatedSum acc;
    for (const auto& piece : pieces) {
        const Similitude scale{piece.ratio, 0.0, false, {0.0, 0.0}};
        const SimplePolygon poly = piece.generator.polygon().transformed(scale);
        acc.add(poly.is_convex() ? inner_tube_polygon(poly.as_convex(), eps) : inner_tube_polygon(poly, eps));
    }
    return acc.value();
}

std::vector<double> log_grid(double lo, double hi, int count) {
    if (!(lo > 0.0 && hi >= lo) || count < 1) throw DomainError("invalid eps grid");
    std::vector<double> out(count);
    if (count == 1) {
        out[0] = hi;
        return out;
    }
    const double a = std::log(lo), b = std::log(hi);
    for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
    out.front() = lo;
    out.back() = hi;
    return out;
}

}  // namespace fractube
