#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "fractube/tiling.hpp"

using namespace fractube;
using doctest::Approx;

namespace {

std::size_t tile_paths(const std::string& svg) {
    std::size_t count = 0;
    for (std::size_t pos = svg.find("<path"); pos != std::string::npos; pos = svg.find("<path", pos + 1)) ++count;
    return count - 1;  // minus the hull outline
}

ConvexPolygon tile_polygon(const SelfSimilarTiling& t, const Tile& tile) {
    std::vector<Vec2> v;
    for (Vec2 p : t.generators()[tile.generator].polygon().vertices()) v.push_back(tile.map.apply(p));
    return ConvexPolygon::hull_of(v);
}

}  // namespace

TEST_CASE("tileset condition") {
    const auto g = fixtures::gasket();
    CHECK(check_tileset_condition(g, convex_hull_of_attractor(g)).pass);
    const auto k = fixtures::koch();
    CHECK(check_tileset_condition(k, convex_hull_of_attractor(k)).pass);
    const SelfSimilarSystem twin(1, {{0.5, 0.0, false, {0.0, 0.0}}, {0.5, 0.0, false, {0.0, 0.0}}});
    const auto bad = check_tileset_condition(twin, Interval{0.0, 1.0});
    CHECK_FALSE(bad.pass);
    CHECK(bad.overlap == Approx(0.5));
    const SelfSimilarSystem overlap(1, {{0.6, 0.0, false, {0.0, 0.0}}, {0.6, 0.0, false, {0.4, 0.0}}});
    const auto o = check_tileset_condition(overlap, attractor_interval(overlap));
    CHECK_FALSE(o.pass);
    CHECK(o.overlap == Approx(0.2));
}

TEST_CASE("gasket tiling: one triangle generator") {
    const auto t = build_tiling(fixtures::gasket());
    REQUIRE(t.generators().size() == 1);
    const auto& gen = t.generators()[0];
    CHECK(gen.inradius() == Approx(1.0 / (4 * fixtures::kSqrt3)).epsilon(1e-12));
    CHECK(gen.diphase());
    const auto nk = gen.normalized_kappa();
    const double s = 3.0 * fixtures::kSqrt3;
    CHECK(nk[0] == Approx(-s).epsilon(1e-12));
    CHECK(nk[1] == Approx(2 * s).epsilon(1e-12));
    CHECK(nk[2] == Approx(-s).epsilon(1e-12));
    CHECK(t.total_tile_area() == Approx(fixtures::kSqrt3 / 4).epsilon(1e-12));
}

TEST_CASE("Koch tiling: kappa matches the triangle constants") {
    const auto t = build_tiling(fixtures::koch());
    REQUIRE(t.generators().size() == 1);
    const auto& gen = t.generators()[0];
    CHECK(gen.inradius() == Approx(fixtures::kSqrt3 / 18).epsilon(1e-12));
    const double s = std::pow(3.0, 1.5);
    const auto nk = gen.normalized_kappa();
    CHECK(nk[0] == Approx(-s).epsilon(1e-12));
    CHECK(nk[1] == Approx(2 * s).epsilon(1e-12));
    CHECK(nk[2] == Approx(-s).epsilon(1e-12));
    CHECK(t.total_tile_area() == Approx(t.hull().area()).epsilon(1e-9));
}

TEST_CASE("pentagasket: six generators") {
    const auto t = build_tiling(fixtures::pentagasket());
    CHECK(t.generators().size() == 6);
    CHECK(t.ratios()[0] == Approx((3 - std::sqrt(5.0)) / 2));
    CHECK(t.total_tile_area() == Approx(t.hull().area()).epsilon(1e-9));
}

TEST_CASE("fitted kappa reproduces the generator's inner tube") {
    for (const auto& sys : {fixtures::gasket(), fixtures::pentagasket(), fixtures::koch_nonlattice()}) {
        const auto t = build_tiling(sys);
        for (const auto& gen : t.generators()) {
            const Generator sampled(gen.polygon(), KappaSource::sampled);
            CHECK(sampled.pieces().size() == gen.pieces().size());
            for (int i = 1; i <= 100; ++i) {
                const double eps = gen.inradius() * i / 100.0;
                const double direct = gen.inner_tube(eps);
                CHECK(gen.inner_tube_from_kappa(eps) == Approx(direct).epsilon(1e-10));
                CHECK(sampled.inner_tube_from_kappa(eps) == Approx(direct).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("regular generators are diphase") {
    for (int n : {3, 4, 5, 6, 8}) {
        std::vector<Vec2> v;
        for (int k = 0; k < n; ++k) v.push_back({std::cos(2 * kPi * k / n), std::sin(2 * kPi * k / n)});
        CHECK(Generator(SimplePolygon(v), KappaSource::sampled).diphase());
    }
    // A long rectangle is diphase too; an irregular quadrilateral is not.
    CHECK(Generator(SimplePolygon({{0, 0}, {3, 0}, {3, 1}, {0, 1}})).diphase());
    CHECK_FALSE(Generator(SimplePolygon({{0, 0}, {4, 0}, {3.2, 1}, {0.3, 2}})).diphase());
}

TEST_CASE("tile areas: level sums match the closed form") {
    const auto t = build_tiling(fixtures::koch());
    const auto tiles = t.tiles(8);
    double by_polygon = 0.0;
    for (const auto& tile : tiles) by_polygon += tile_polygon(t, tile).area();
    double q = 0.0;
    for (double r : t.ratios()) q += r * r;
    const double generator_area = t.generators()[0].area();
    const double closed = generator_area * (1.0 - std::pow(q, 9)) / (1.0 - q);
    CHECK(by_polygon == Approx(closed).epsilon(1e-9));
}

TEST_CASE("tiles are pairwise disjoint through depth 5") {
    for (const auto& sys : {fixtures::gasket(), fixtures::koch()}) {
        const auto t = build_tiling(sys);
        const auto tiles = t.tiles(5);
        std::vector<ConvexPolygon> polys;
        for (const auto& tile : tiles) polys.push_back(tile_polygon(t, tile));
        double worst = 0.0;
        for (std::size_t i = 0; i < polys.size(); ++i)
            for (std::size_t j = i + 1; j < polys.size(); ++j) worst = std::max(worst, convex_intersection_area(polys[i], polys[j]));
        CHECK(worst < 1e-12 * t.hull().area());
    }
}

TEST_CASE("tiling oracle") {
    const auto g = build_tiling(fixtures::gasket());
    const double gi = g.largest_inradius();
    CHECK(tiling_tube_oracle(g, gi) == Approx(fixtures::kSqrt3 / 4).epsilon(1e-12));
    CHECK(tiling_tube_oracle(g, 2 * gi) == Approx(fixtures::kSqrt3 / 4).epsilon(1e-12));
    const auto k = build_tiling(fixtures::koch());
    CHECK(tiling_tube_oracle(k, fixtures::kSqrt3 / 18) == Approx(3 * k.generators()[0].area()).epsilon(1e-12));
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double eps = 1e-6 * std::pow(1.07, i);
        const double v = tiling_tube_oracle(g, eps);
        CHECK(v >= prev - 1e-15);
        CHECK(std::abs(v - prev) < 0.1);
        prev = v;
    }
    CHECK(tiling_tube_oracle(g, 1e-9) < tiling_tube_oracle(g, 1e-8));
}

TEST_CASE("oracle agrees with brute-force tile sums") {
    const auto t = build_tiling(fixtures::koch_nonlattice());
    const double eps = 0.2 * t.largest_inradius();
    double brute = 0.0;
    const auto tiles = t.tiles(t.depth_cap());
    for (const auto& tile : tiles) brute += t.generators()[tile.generator].inner_tube(eps / tile.map.ratio) *
                                            tile.map.ratio * tile.map.ratio;
    // Tiles below the depth cap are all saturated at this eps.
    double deepest = 1.0;
    for (const auto& tile : tiles) deepest = std::min(deepest, tile.map.ratio);
    REQUIRE(deepest * t.largest_inradius() < eps);
    const double remaining = t.total_tile_area() - [&] {
        double a = 0.0;
        for (const auto& tile : tiles) a += t.generators()[tile.generator].area() * tile.map.ratio * tile.map.ratio;
        return a;
    }();
    CHECK(tiling_tube_oracle(t, eps) == Approx(brute + remaining).epsilon(1e-10));
}

TEST_CASE("no residue, no tiling") {
    const SelfSimilarSystem square(2, {{0.5, 0.0, false, {0.0, 0.0}},
                                       {0.5, 0.0, false, {0.5, 0.0}},
                                       {0.5, 0.0, false, {0.0, 0.5}},
                                       {0.5, 0.0, false, {0.5, 0.5}}});
    CHECK_THROWS_WITH_AS(build_tiling(square), "attractor has interior; no tiling residue", DomainError);
}

TEST_CASE("SVG export") {
    const auto g = build_tiling(fixtures::gasket());
    CHECK(tile_paths(export_tiling_svg(g, 3)) == 40);
    CHECK(tile_paths(export_tiling_svg(g, 0)) == 1);
    const auto p = build_tiling(fixtures::pentagasket());
    CHECK(tile_paths(export_tiling_svg(p, 1)) == 36);
    CHECK(export_tiling_svg(g, 4) == export_tiling_svg(g, 4));
}

TEST_CASE("hull boundary condition") {
    CHECK(check_hull_boundary_condition(fixtures::gasket()).pass);
    CHECK_FALSE(check_hull_boundary_condition(fixtures::koch()).pass);
    const SelfSimilarSystem full(1, {{0.5, 0.0, false, {0.0, 0.0}}, {0.5, 0.0, false, {0.5, 0.0}}});
    CHECK(check_hull_boundary_condition(full).pass);
}

TEST_CASE("attractor distance by branch and bound") {
    const auto sys = fixtures::gasket();
    const auto hull = convex_hull_of_attractor(sys);
    // The centroid of the central hole is at its inradius from the gasket.
    const Vec2 c{0.5, fixtures::kSqrt3 / 6};
    CHECK(attractor_distance(sys, hull, c, 1e-9) == Approx(1.0 / (4 * fixtures::kSqrt3)).epsilon(1e-7));
    CHECK(attractor_within(sys, hull, c, 0.1444, 1e-9));
    CHECK_FALSE(attractor_within(sys, hull, c, 0.1443, 1e-9));
}
