#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "fractube/geom2d.hpp"
#include "fractube/string_core.hpp"

namespace fractube {

/// One polynomial piece of a generator's inner tube: on [start, end),
/// V_G(eps) - area(G) = kappa[0] eps^2 + kappa[1] eps + kappa[2].
/// The first piece therefore has kappa[2] = -area(G).
struct KappaPiece {
    double start = 0.0;
    double end = 0.0;
    std::array<double, 3> kappa{};
};

enum class KappaSource { analytic, sampled };

class Generator {
public:
    /// Fits the piecewise kappa from sampled inner-tube values; for convex
    /// polygons the analytic offset phases replace the fit unless `source`
    /// asks for the sampled one.
    explicit Generator(SimplePolygon polygon, KappaSource source = KappaSource::analytic);

    const SimplePolygon& polygon() const { return polygon_; }
    double inradius() const { return inradius_; }
    double area() const { return polygon_.area(); }
    const std::vector<KappaPiece>& pieces() const { return pieces_; }
    bool diphase() const { return pieces_.size() == 1; }
    const std::array<double, 3>& kappa() const { return pieces_.front().kappa; }
    /// kappa_i / g^i, the scale-free form.
    std::array<double, 3> normalized_kappa() const;

    /// Direct geometry.
    double inner_tube(double eps) const;
    /// Evaluated from the kappa pieces.
    double inner_tube_from_kappa(double eps) const;

private:
    SimplePolygon polygon_;
    double inradius_ = 0.0;
    std::vector<KappaPiece> pieces_;
};

/// Breakpoint-detecting piecewise-quadratic fit of f on [0, end]; `tol` is
/// the relative residual allowed before a new piece starts.
std::vector<KappaPiece> fit_piecewise_quadratic(const std::function<double(double)>& f, double end,
                                                double tol, int samples = 256);

struct TilesetCheck {
    bool pass = false;
    std::string reason;
    int first = -1;
    int second = -1;
    double overlap = 0.0;
};
TilesetCheck check_tileset_condition(const SelfSimilarSystem& system, const ConvexPolygon& hull);
TilesetCheck check_tileset_condition(const SelfSimilarSystem& system, const Interval& hull);

struct Tile {
    int level = 0;
    std::vector<int> word;
    int generator = 0;
    Similitude map;
};

class SelfSimilarTiling {
public:
    SelfSimilarTiling(SelfSimilarSystem system, ConvexPolygon hull, std::vector<Generator> generators, int depth_cap);

    const SelfSimilarSystem& system() const { return system_; }
    const ConvexPolygon& hull() const { return hull_; }
    const std::vector<Generator>& generators() const { return generators_; }
    std::vector<double> ratios() const { return system_.ratios(); }
    int depth_cap() const { return depth_cap_; }
    double largest_inradius() const;

    /// Tiles through `depth`, ordered by (level, word lexicographic, generator).
    std::vector<Tile> tiles(int depth) const;
    /// Closed-form total tile area sum_q area(G_q) / (1 - sum_j r_j^2).
    double total_tile_area() const;

private:
    SelfSimilarSystem system_;
    ConvexPolygon hull_;
    std::vector<Generator> generators_;
    int depth_cap_;
};

inline constexpr std::size_t kMaxGenerators = 64;

SelfSimilarTiling build_tiling(const SelfSimilarSystem& system, int depth_cap = 12,
                               KappaSource source = KappaSource::analytic);

/// Exact V_T(eps): unsaturated ratio buckets evaluated geometrically, the
/// saturated remainder summed in closed form.
double tiling_tube_oracle(const SelfSimilarTiling& tiling, double eps);

std::string export_tiling_svg(const SelfSimilarTiling& tiling, int depth);

/// Points Phi_w(x0) for all words with r_w diam(hull) <= resolution < r_{w'} diam(hull)
/// at the parent, with x0 the fixed point of the first map; every point of the
/// attractor lies within `resolution` of the cloud.
struct AttractorCloud {
    std::vector<Vec2> points;
    double resolution = 0.0;
};
AttractorCloud attractor_cloud(const SelfSimilarSystem& system, const ConvexPolygon& hull, double resolution,
                               std::size_t budget = 5'000'000);

/// Nearest-point queries on a cloud via a uniform bucket grid.
class CloudIndex {
public:
    explicit CloudIndex(const AttractorCloud& cloud);
    double nearest(Vec2 p) const;

private:
    std::vector<Vec2> pts_;
    Vec2 origin_;
    double cell_ = 1.0;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

/// dist(p, F) to absolute accuracy `tol` by branch and bound over the word
/// tree (lower bound: distance to Phi_w(hull); upper bound: a point of F).
double attractor_distance(const SelfSimilarSystem& system, const ConvexPolygon& hull, Vec2 p, double tol);
/// Decides dist(p, F) <= eps exactly up to ties within `tol`.
bool attractor_within(const SelfSimilarSystem& system, const ConvexPolygon& hull, Vec2 p, double eps, double tol);

struct HullBoundaryCheck {
    bool pass = false;
    double max_distance = 0.0;
    double resolution = 0.0;
};
HullBoundaryCheck check_hull_boundary_condition(const SelfSimilarSystem& system, int samples = 2000,
                                                double resolution = 0.0);

}  // namespace fractube
