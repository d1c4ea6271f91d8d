#include <random>

#include "doctest.h"
#include "fixtures.hpp"

using namespace fractube;
using doctest::Approx;

namespace {

ConvexPolygon square(double side = 1.0) {
    return ConvexPolygon::from_vertices({{0, 0}, {side, 0}, {side, side}, {0, side}});
}

ConvexPolygon equilateral(double side) {
    return ConvexPolygon::from_vertices({{0, 0}, {side, 0}, {side / 2, side * fixtures::kSqrt3 / 2}});
}

ConvexPolygon moved(const ConvexPolygon& p, double angle, Vec2 shift, double scale = 1.0) {
    std::vector<Vec2> v;
    const Similitude m{scale, angle, false, shift};
    for (Vec2 q : p.vertices()) v.push_back(m.apply(q));
    return ConvexPolygon::from_vertices(v);
}

}  // namespace

TEST_CASE("similitude contracts distances by its ratio") {
    const Similitude m{0.37, 1.1, true, {0.2, -0.4}};
    const Vec2 a{0.3, 0.9}, b{-1.2, 0.5};
    const Vec2 a2 = m.apply(m.apply(a)), b2 = m.apply(m.apply(b));
    CHECK(distance(a2, b2) == Approx(0.37 * 0.37 * distance(a, b)).epsilon(1e-12));
}

TEST_CASE("apply_word composes left to right and empty word is identity") {
    const auto sys = fixtures::cantor();
    const std::vector<Vec2> origin{{0.0, 0.0}};
    const std::vector<int> word{0, 1};  // Phi_2 o Phi_1
    const auto image = apply_word(sys, word, origin);
    CHECK(image[0].x == Approx(2.0 / 3.0));
    CHECK(sys.word_map(word).ratio == Approx(1.0 / 9.0));
    const auto same = apply_word(sys, {}, origin);
    CHECK(same[0].x == 0.0);

    const auto gasket = fixtures::gasket();
    const std::vector<Vec2> tri{{0, 0}, {1, 0}, {0.5, fixtures::kSqrt3 / 2}};
    const std::vector<int> first{0};
    const auto half = apply_word(gasket, first, tri);
    CHECK(half[1].x == Approx(0.5));
    CHECK(half[2].y == Approx(fixtures::kSqrt3 / 4));
}

TEST_CASE("inradius of the example generators") {
    CHECK(inradius(equilateral(0.5)) == Approx(1.0 / (4.0 * fixtures::kSqrt3)).epsilon(1e-14));
    CHECK(inradius(equilateral(1.0 / 3.0)) == Approx(fixtures::kSqrt3 / 18.0).epsilon(1e-14));
    CHECK(inradius(square()) == Approx(0.5).epsilon(1e-14));
}

TEST_CASE("inner tube of triangle and square") {
    const auto tri = equilateral(0.5);
    const double rho = inradius(tri);
    for (double eps : {0.0, 0.01, 0.05, 0.1, rho}) {
        const double expected = 6.0 * fixtures::kSqrt3 * rho * eps - 3.0 * fixtures::kSqrt3 * eps * eps;
        CHECK(inner_tube_polygon(tri, eps) == Approx(expected).epsilon(1e-12).scale(1.0));
    }
    CHECK(inner_tube_polygon(square(), 0.1) == Approx(0.36).epsilon(1e-14));
    CHECK(inner_tube_polygon(square(), 0.0) == 0.0);
    CHECK(inner_tube_polygon(square(), 0.7) == Approx(1.0));
}

TEST_CASE("inner tube is nondecreasing and saturates at the inradius") {
    const auto p = ConvexPolygon::from_vertices({{0, 0}, {3, 0}, {3.5, 1}, {1, 2.2}, {-0.3, 1}});
    const double rho = inradius(p);
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double v = inner_tube_polygon(p, rho * 1.2 * i / 200.0);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
    CHECK(inner_tube_polygon(p, rho) == Approx(p.area()).epsilon(1e-12));
}

TEST_CASE("outer Steiner tube") {
    CHECK(steiner_outer_tube(square(), 1.0, true) == Approx(4.0 + kPi).epsilon(1e-14));
    CHECK(steiner_outer_tube(square(), 0.0, true) == 0.0);
    CHECK(steiner_outer_tube(square(), 0.0, false) == Approx(1.0));
    const auto p = equilateral(0.8);
    for (double eps : {0.01, 0.3, 2.0})
        CHECK(steiner_outer_tube(p, eps, false) - steiner_outer_tube(p, eps, true) == Approx(p.area()).epsilon(1e-12));
}

TEST_CASE("outer Steiner tube agrees with Monte Carlo") {
    const auto p = ConvexPolygon::from_vertices({{0, 0}, {1, 0}, {1.3, 0.8}, {0.2, 1.0}});
    const double eps = 0.25;
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ux(-eps, 1.3 + eps), uy(-eps, 1.0 + eps);
    const double box = (1.3 + 2 * eps) * (1.0 + 2 * eps);
    const int n = 1'000'000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
        const Vec2 q{ux(rng), uy(rng)};
        if (!p.contains(q) && p.boundary_distance(q) <= eps) ++hits;
    }
    const double frac = static_cast<double>(hits) / n;
    const double estimate = frac * box, stderr_ = box * std::sqrt(frac * (1 - frac) / n);
    CHECK(std::abs(estimate - steiner_outer_tube(p, eps, true)) < 3.0 * stderr_);
}

TEST_CASE("intrinsic volumes: homogeneity and motion invariance") {
    const auto p = ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {2.5, 1}, {0.5, 1.7}});
    const auto mu = intrinsic_volumes(p).mu;
    CHECK(mu[0] == Approx(1.0));
    CHECK(mu[1] == Approx(p.perimeter() / 2));
    CHECK(mu[2] == Approx(p.area()));
    for (double x : {0.5, 2.0, 3.7}) {
        const auto scaled = intrinsic_volumes(moved(p, 0.0, {0, 0}, x)).mu;
        for (int i = 0; i < 3; ++i) CHECK(scaled[i] == Approx(mu[i] * std::pow(x, i)).epsilon(1e-10));
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> angle(0, 2 * kPi), shift(-5, 5);
    for (int k = 0; k < 100; ++k) {
        const auto q = moved(p, angle(rng), {shift(rng), shift(rng)});
        const auto m = intrinsic_volumes(q).mu;
        for (int i = 0; i < 3; ++i) CHECK(m[i] == Approx(mu[i]).epsilon(1e-10));
        CHECK(inradius(q) == Approx(inradius(p)).epsilon(1e-10));
    }
}

TEST_CASE("exterior angles sum to a full turn") {
    const auto p = ConvexPolygon::from_vertices({{0, 0}, {2, 0}, {2.5, 1}, {0.5, 1.7}, {-0.5, 0.8}});
    double total = 0.0;
    for (double a : p.interior_angles()) total += kPi - a;
    CHECK(total == Approx(2 * kPi).epsilon(1e-9));
}

TEST_CASE("attractor hulls") {
    const auto g = convex_hull_of_attractor(fixtures::gasket());
    CHECK(g.size() == 3);
    CHECK(g.area() == Approx(fixtures::kSqrt3 / 4).epsilon(1e-12));
    const auto k = convex_hull_of_attractor(fixtures::koch());
    // Tile areas: sum_k 2^k 3^{-k} area(G) = 3 area(G) with G of side 1/3.
    const double tile_total = 3.0 * fixtures::kSqrt3 / 4.0 / 9.0;
    CHECK(k.area() == Approx(tile_total).epsilon(1e-12));
    CHECK_THROWS_AS(convex_hull_of_attractor(SelfSimilarSystem(2, {{0.5, 0.0, false, {0.2, 0.1}}})), DomainError);
}

TEST_CASE("difference components") {
    const auto sys = fixtures::gasket();
    const auto hull = convex_hull_of_attractor(sys);
    std::vector<ConvexPolygon> images;
    for (const auto& m : sys.maps()) images.push_back(moved(hull, m.rotation, m.translation, m.ratio));
    const auto parts = polygon_difference_components(hull, images);
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].area() == Approx(fixtures::kSqrt3 / 16).epsilon(1e-12));
    CHECK(inradius(parts[0].as_convex()) == Approx(1.0 / (4 * fixtures::kSqrt3)).epsilon(1e-12));

    const auto penta = fixtures::pentagasket();
    const auto phull = convex_hull_of_attractor(penta);
    std::vector<ConvexPolygon> pimages;
    for (const auto& m : penta.maps()) pimages.push_back(moved(phull, m.rotation, m.translation, m.ratio));
    const auto pparts = polygon_difference_components(phull, pimages);
    CHECK(pparts.size() == 6);
    double total = 0.0;
    for (const auto& c : pparts) total += c.area();
    for (const auto& c : pimages) total += c.area();
    CHECK(total == Approx(phull.area()).epsilon(1e-9));
}
