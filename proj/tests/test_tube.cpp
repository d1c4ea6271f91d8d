#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "fractube/tube.hpp"

using namespace fractube;
using doctest::Approx;

namespace {

double max_relative_error(const TubeEvaluation& ev, const std::vector<double>& oracle) {
    double worst = 0.0;
    for (std::size_t i = 0; i < oracle.size(); ++i) worst = std::max(worst, std::abs(ev.values[i] - oracle[i]) / oracle[i]);
    return worst;
}

SelfSimilarSystem scaled(const SelfSimilarSystem& sys, double c) {
    std::vector<Similitude> maps = sys.maps();
    for (auto& m : maps) m.translation = m.translation * c;
    return SelfSimilarSystem(sys.dimension(), maps);
}

}  // namespace

TEST_CASE("Cantor: formula against the exact oracle, with truncation convergence") {
    const auto s = string_from_system(fixtures::cantor());
    const auto dims = tube_dimensions(s.generator_ratios());
    const auto eps = log_grid(1e-4, 1.0 / 6.0, 50);
    std::vector<double> oracle;
    for (double e : eps) oracle.push_back(string_tube_oracle(s, e));
    double previous = 1.0;
    for (long n : {500L, 1000L, 2000L}) {
        const auto ev = string_tube_formula(s, dims, eps, n);
        const double err = max_relative_error(ev, oracle);
        CHECK(err < previous);
        previous = err;
        for (std::size_t i = 0; i < eps.size(); ++i)
            CHECK(std::abs(ev.imag[i]) < 1e-9 * (1.0 + std::abs(ev.values[i])));
    }
    CHECK(previous < 1e-3);
    // Leading term is c eps^{1-D} with 1 - D = 0.369070...
    const auto ev = string_tube_formula(s, dims, eps, 10);
    bool found = false;
    for (const auto& p : ev.poles)
        if (p.omega.imag() == 0.0) {
            found = true;
            CHECK(1.0 - p.omega.real() == Approx(0.369070246428543).epsilon(1e-12));
            CHECK(std::abs(p.coefficient.imag()) < 1e-15);
        }
    CHECK(found);
    CHECK(ev.polynomial.size() == 1);
    CHECK(ev.polynomial[0] == Approx(-2.0));  // 2 zeta_s(0) = 2 / (1 - 2)
}

TEST_CASE("Fibonacci string: two lattice lines") {
    const auto s = string_from_system(fixtures::fibonacci());
    const auto dims = tube_dimensions(s.generator_ratios());
    const auto eps = log_grid(1e-4, s.largest_inradius(), 50);
    std::vector<double> oracle;
    for (double e : eps) oracle.push_back(string_tube_oracle(s, e));
    CHECK(max_relative_error(string_tube_formula(s, dims, eps, 2000), oracle) < 1e-3);
}

TEST_CASE("tail bound covers the truncation error") {
    const auto s = string_from_system(fixtures::cantor());
    const auto dims = tube_dimensions(s.generator_ratios());
    const auto eps = log_grid(1e-4, 1.0 / 6.0, 20);
    const auto ev = string_tube_formula(s, dims, eps, 200);
    for (std::size_t i = 0; i < eps.size(); ++i)
        CHECK(std::abs(ev.values[i] - string_tube_oracle(s, eps[i])) <= 1.5 * ev.tail_bound[i]);
}

TEST_CASE("multiplicative periodicity of the lattice tube") {
    const auto s = string_from_system(fixtures::cantor());
    const auto dims = tube_dimensions(s.generator_ratios());
    const double d = dims.dimension;
    const std::vector<double> eps{0.01, 0.01 / 3.0, 0.01 / 9.0};
    const auto ev = string_tube_formula(s, dims, eps, 2000);
    std::vector<double> periodic;
    for (std::size_t i = 0; i < eps.size(); ++i)
        periodic.push_back((ev.values[i] - ev.polynomial[0] * eps[i]) / std::pow(eps[i], 1.0 - d));
    CHECK(periodic[1] == Approx(periodic[0]).epsilon(1e-4));
    CHECK(periodic[2] == Approx(periodic[0]).epsilon(1e-4));
}

TEST_CASE("gasket and Koch tilings: non-oscillatory terms and accuracy") {
    const auto g = build_tiling(fixtures::gasket());
    const auto gd = tube_dimensions(g.ratios());
    const auto geps = log_grid(1e-4, g.largest_inradius(), 50);
    const auto gev = tiling_tube_formula(g, gd, geps, 2000);
    CHECK(gev.polynomial[0] == Approx(std::pow(3.0, 1.5) / 2).epsilon(1e-9));
    CHECK(gev.polynomial[1] == Approx(-3.0).epsilon(1e-9));
    std::vector<double> goracle;
    for (double e : geps) goracle.push_back(tiling_tube_oracle(g, e));
    CHECK(max_relative_error(gev, goracle) < 1e-3);

    // Pole coefficients: res * g^omega * 3 sqrt 3 (-1/omega + 2/(omega-1) - 1/(omega-2)).
    const double gi = g.largest_inradius();
    for (const auto& p : gev.poles) {
        if (std::abs(p.omega.imag()) > 50) continue;
        const cplx w = p.omega;
        const cplx bracket = -1.0 / w + 2.0 / (w - 1.0) - 1.0 / (w - 2.0);
        const cplx expected = std::exp(w * std::log(gi)) * 3.0 * std::sqrt(3.0) * bracket / std::log(2.0);
        CHECK(std::abs(p.coefficient - expected) < 1e-12 * std::abs(expected));
    }

    const auto k = build_tiling(fixtures::koch());
    const auto kev = tiling_tube_formula(k, tube_dimensions(k.ratios()), log_grid(1e-4, k.largest_inradius(), 50), 2000);
    CHECK(kev.polynomial[0] == Approx(std::pow(3.0, 1.5)).epsilon(1e-9));
    CHECK(kev.polynomial[1] == Approx(1.0 / (1.0 - 2.0 / std::sqrt(3.0))).epsilon(1e-9));
    std::vector<double> koracle;
    for (double e : kev.eps) koracle.push_back(tiling_tube_oracle(k, e));
    CHECK(max_relative_error(kev, koracle) < 1e-3);
}

TEST_CASE("nonlattice Koch and pentagasket") {
    for (const auto& sys : {fixtures::koch_nonlattice(), fixtures::pentagasket()}) {
        const auto t = build_tiling(sys);
        const auto dims = tube_dimensions(t.ratios());
        const auto ev = tiling_tube_formula(t, dims, log_grid(1e-4, t.generators().back().pieces().front().end, 30), 2000);
        std::vector<double> oracle;
        for (double e : ev.eps) oracle.push_back(tiling_tube_oracle(t, e));
        CHECK(max_relative_error(ev, oracle) < 1e-3);
        CHECK(ev.max_imag < 1e-9);
    }
}

TEST_CASE("parallel and serial evaluations agree") {
    const auto t = build_tiling(fixtures::gasket());
    const auto dims = tube_dimensions(t.ratios());
    const auto eps = log_grid(1e-4, t.largest_inradius(), 40);
    const auto a = tiling_tube_formula(t, dims, eps, 500);
    const auto b = serial::tiling_tube_formula(t, dims, eps, 500);
    CHECK(a.values == b.values);
}

TEST_CASE("structural collisions are rejected") {
    const auto s = FractalString::self_similar({0.5, 0.5}, 0.25);
    const auto dims = complex_dimensions(s.generator_ratios());
    const std::vector<double> eps{0.01};
    CHECK_THROWS_WITH_AS(string_tube_formula(s, dims, eps, 10), "non-simple structural collision", DomainError);
}

TEST_CASE("spray geometric zeta") {
    const auto k = build_tiling(fixtures::koch());
    const double g = fixtures::kSqrt3 / 18;
    const double zeta3 = 1.0 / (1.0 - 2.0 * std::pow(3.0, -1.5));
    const double s27 = std::pow(3.0, 1.5);
    const double expected = std::pow(g, -1.0) * zeta3 * std::pow(g, 3.0) * (-s27 / 3.0 + 2.0 * s27 / 2.0 - s27 / 1.0);
    CHECK(spray_geometric_zeta(k, 0, g, 3.0).real() == Approx(expected).epsilon(1e-12));
    CHECK_THROWS_WITH_AS(spray_geometric_zeta(k, 0, g, 2.0), "integer-dimension pole", DomainError);
    const auto k2 = build_tiling(scaled(fixtures::koch(), 2.0));
    const cplx s(3.3, 1.7);
    CHECK(std::abs(spray_geometric_zeta(k2, 0, 2 * 0.01, s) - 4.0 * spray_geometric_zeta(k, 0, 0.01, s)) <
          1e-12 * std::abs(spray_geometric_zeta(k, 0, 0.01, s)));
}

TEST_CASE("finite spray degeneration equals direct geometry") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coord(0.0, 1.0), ratio(0.05, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        std::vector<SprayPiece> pieces;
        for (int i = 0; i < 5; ++i) {
            std::vector<Vec2> v{{coord(rng), coord(rng)}, {coord(rng), coord(rng)}, {coord(rng), coord(rng)}};
            if (signed_area(v) < 0) std::swap(v[1], v[2]);
            pieces.push_back({ratio(rng), Generator(SimplePolygon(v))});
        }
        for (double eps : {1e-3, 0.01, 0.05, 0.2})
            CHECK(finite_spray_degeneration(pieces, eps) == Approx(finite_spray_geometry(pieces, eps)).epsilon(1e-12));
    }
    const std::vector<SprayPiece> none;
    CHECK(finite_spray_degeneration(none, 0.1) == 0.0);
    const SimplePolygon tri({{0, 0}, {1, 0}, {0.5, fixtures::kSqrt3 / 2}});
    const std::vector<SprayPiece> two{{1.0, Generator(tri)}, {0.5, Generator(tri)}};
    const double direct = inner_tube_polygon(tri.as_convex(), 0.05) +
                          inner_tube_polygon(tri.transformed({0.5, 0.0, false, {0, 0}}).as_convex(), 0.05);
    CHECK(finite_spray_degeneration(two, 0.05) == Approx(direct).epsilon(1e-12));
}

TEST_CASE("log grid") {
    const auto g = log_grid(1e-4, 1.0, 5);
    CHECK(g.front() == 1e-4);
    CHECK(g.back() == 1.0);
    CHECK(g[2] == Approx(1e-2));
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 5), DomainError);
}
