#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fractube/common.hpp"

namespace fractube {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Contraction similitude x -> ratio * R(rotation) * C(x) + translation, where
/// C is complex conjugation (reflection in the x-axis) when `reflect` is set.
/// Conjugation is applied before the rotation. One-dimensional systems live on
/// the x-axis and use rotation 0 or pi.
struct Similitude {
    double ratio = 0.5;
    double rotation = 0.0;
    bool reflect = false;
    Vec2 translation{};

    Vec2 apply(Vec2 p) const;
    /// (*this) o inner, i.e. apply `inner` first.
    Similitude after(const Similitude& inner) const;
    Vec2 fixed_point() const;
    static Similitude identity();
};

class SelfSimilarSystem {
public:
    /// Throws DomainError unless every ratio lies in (0, 1) and dimension is 1 or 2.
    SelfSimilarSystem(int dimension, std::vector<Similitude> maps);

    int dimension() const { return dimension_; }
    std::size_t size() const { return maps_.size(); }
    const Similitude& map(std::size_t j) const { return maps_.at(j); }
    const std::vector<Similitude>& maps() const { return maps_; }
    std::vector<double> ratios() const;

    /// Composite map Phi_w = Phi_{w_k} o ... o Phi_{w_1} for a 0-based word.
    Similitude word_map(std::span<const int> word) const;

private:
    int dimension_;
    std::vector<Similitude> maps_;
};

/// Image of `points` under Phi_w (0-based letters); empty word is the identity.
std::vector<Vec2> apply_word(const SelfSimilarSystem& system, std::span<const int> word,
                             std::span<const Vec2> points);

class ConvexPolygon {
public:
    ConvexPolygon() = default;
    /// Takes any point set, returns its hull with collinear vertices pruned.
    static ConvexPolygon hull_of(std::span<const Vec2> points);
    /// Vertices must already be in convex position (either orientation).
    static ConvexPolygon from_vertices(std::vector<Vec2> vertices);

    const std::vector<Vec2>& vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    bool empty() const { return vertices_.size() < 3; }
    double area() const;
    double perimeter() const;
    std::vector<double> interior_angles() const;
    bool contains(Vec2 p, double tol = 0.0) const;
    double boundary_distance(Vec2 p) const;
    Vec2 centroid() const;

private:
    explicit ConvexPolygon(std::vector<Vec2> v) : vertices_(std::move(v)) {}
    std::vector<Vec2> vertices_;
};

/// Simple (possibly non-convex) polygon, counterclockwise.
class SimplePolygon {
public:
    SimplePolygon() = default;
    explicit SimplePolygon(std::vector<Vec2> vertices);
    explicit SimplePolygon(const ConvexPolygon& p) : SimplePolygon(p.vertices()) {}

    const std::vector<Vec2>& vertices() const { return vertices_; }
    double area() const;
    double perimeter() const;
    bool is_convex() const { return convex_; }
    ConvexPolygon as_convex() const;
    SimplePolygon transformed(const Similitude& map) const;

private:
    std::vector<Vec2> vertices_;
    bool convex_ = false;
};

double signed_area(std::span<const Vec2> ring);

/// Intrinsic volumes mu_0..mu_2 of a planar convex body.
struct SteinerCoefficients {
    std::array<double, 3> mu{};
};
SteinerCoefficients intrinsic_volumes(const ConvexPolygon& poly);

/// Largest inscribed disk (Chebyshev centre).
struct InscribedCircle {
    Vec2 center;
    double radius = 0.0;
};
InscribedCircle inscribed_circle(const ConvexPolygon& poly);
double inradius(const ConvexPolygon& poly);

/// {x in poly : dist(x, boundary) >= eps}; empty once eps exceeds the inradius.
ConvexPolygon inner_parallel_body(const ConvexPolygon& poly, double eps);
/// Area of the inner eps-neighbourhood of the boundary.
double inner_tube_polygon(const ConvexPolygon& poly, double eps);
double inner_tube_polygon(const SimplePolygon& poly, double eps);

/// Kinetic description of the inward offset of a convex polygon: on
/// [start, end) the inner parallel body has area a0 - a1*(t - start) + a2*(t - start)^2.
struct OffsetPhase {
    double start = 0.0;
    double end = 0.0;
    double area_at_start = 0.0;
    double perimeter_at_start = 0.0;
    double corner_sum = 0.0;  // sum of cot(theta_i / 2)
};
std::vector<OffsetPhase> offset_phases(const ConvexPolygon& poly);

/// Steiner volume of the parallel body; `exterior_only` drops the area term.
double steiner_outer_tube(const ConvexPolygon& poly, double eps, bool exterior_only);

double convex_intersection_area(const ConvexPolygon& a, const ConvexPolygon& b);
ConvexPolygon convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b);

/// Connected components of int(outer) minus the closed union of `inner`.
/// Throws DomainError("tileset condition violated") on interior overlaps.
std::vector<SimplePolygon> polygon_difference_components(const ConvexPolygon& outer,
                                                         std::span<const ConvexPolygon> inner);

struct HullOptions {
    double tol = 1e-12;
    int max_iterations = 2000;
    double snap_tol = 1e-9;
    int snap_word_length = 2;
};

/// Convex hull of the attractor of a planar system, by iterating vertex
/// images from the hull of the fixed points, followed by snapping vertices
/// to nearby pre-periodic points Phi_u(fix Phi_v).
ConvexPolygon convex_hull_of_attractor(const SelfSimilarSystem& system, const HullOptions& opt = {});

/// Hausdorff distance between the vertex sets' hulls (convex polygons).
double hausdorff_distance(const ConvexPolygon& a, const ConvexPolygon& b);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};
/// Smallest interval containing the attractor of a one-dimensional system.
Interval attractor_interval(const SelfSimilarSystem& system);

}  // namespace fractube
