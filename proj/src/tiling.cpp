#include "fractube/tiling.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <queue>

namespace fractube {

namespace {

// Quadratic through three samples, as (c2, c1, c0).
std::array<double, 3> quadratic_through(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double c2 = (d12 - d01) / (x2 - x0);
    const double c1 = d01 - c2 * (x0 + x1);
    const double c0 = y0 - c1 * x0 - c2 * x0 * x0;
    return {c2, c1, c0};
}

double eval_quadratic(const std::array<double, 3>& c, double x) { return (c[0] * x + c[1]) * x + c[2]; }

double simple_inradius(const SimplePolygon& poly) {
    double lo = 0.0, hi = 0.0;
    for (Vec2 a : poly.vertices())
        for (Vec2 b : poly.vertices()) hi = std::max(hi, distance(a, b));
    const double area = poly.area();
    for (int i = 0; i < 80 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (inner_tube_polygon(poly, mid) < area * (1.0 - 1e-12) ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

std::vector<KappaPiece> fit_piecewise_quadratic(const std::function<double(double)>& f, double end, double tol,
                                                int samples) {
    std::vector<double> t(samples + 1), y(samples + 1);
    double scale = 0.0;
    for (int k = 0; k <= samples; ++k) {
        t[k] = end * static_cast<double>(k) / samples;
        y[k] = f(t[k]);
        scale = std::max(scale, std::abs(y[k]));
    }
    scale = std::max(scale, 1e-300);
    std::vector<double> breaks{0.0};
    int start = 0;
    while (start + 2 < samples) {
        const auto q = quadratic_through(t[start], y[start], t[start + 1], y[start + 1], t[start + 2], y[start + 2]);
        int k = start + 3;
        while (k <= samples && std::abs(y[k] - eval_quadratic(q, t[k])) <= tol * scale) ++k;
        if (k > samples || k + 2 > samples) break;
        // The tube is C^1 across a breakpoint, so the two quadratics touch at
        // the vertex of their difference.
        const auto next = quadratic_through(t[k], y[k], t[k + 1], y[k + 1], t[k + 2], y[k + 2]);
        const double dc2 = q[0] - next[0], dc1 = q[1] - next[1];
        double b = dc2 != 0.0 ? -dc1 / (2.0 * dc2) : 0.5 * (t[k - 1] + t[k]);
        b = std::clamp(b, t[k - 1], t[k]);
        breaks.push_back(b);
        start = k;
    }
    breaks.push_back(end);
    std::vector<KappaPiece> pieces;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double a = breaks[i], b = breaks[i + 1], w = b - a;
        const double x0 = a + 0.15 * w, x1 = a + 0.5 * w, x2 = a + 0.85 * w;
        pieces.push_back({a, b, quadratic_through(x0, f(x0), x1, f(x1), x2, f(x2))});
    }
    return pieces;
}

Generator::Generator(SimplePolygon polygon, KappaSource source) : polygon_(std::move(polygon)) {
    const double area = polygon_.area();
    if (!(area > 0.0)) throw DomainError("degenerate generator polygon");
    if (polygon_.is_convex()) {
        const ConvexPolygon cp = polygon_.as_convex();
        inradius_ = fractube::inradius(cp);
        if (source == KappaSource::analytic) {
            for (const auto& ph : offset_phases(cp)) {
                const double t = ph.start, c = ph.corner_sum;
                pieces_.push_back({ph.start, ph.end,
                                   {-c, ph.perimeter_at_start + 2.0 * c * t,
                                    -(ph.area_at_start + ph.perimeter_at_start * t + c * t * t)}});
            }
            return;
        }
        pieces_ = fit_piecewise_quadratic([&](double e) { return inner_tube_polygon(cp, e) - area; }, inradius_,
                                          1e-8);
        return;
    }
    inradius_ = simple_inradius(polygon_);
    // The round-join buffer approximates arcs, so the residual floor is higher.
    pieces_ = fit_piecewise_quadratic([&](double e) { return inner_tube_polygon(polygon_, e) - area; }, inradius_,
                                      1e-6);
}

std::array<double, 3> Generator::normalized_kappa() const {
    const auto& k = kappa();
    return {k[0], k[1] / inradius_, k[2] / (inradius_ * inradius_)};
}

double Generator::inner_tube(double eps) const {
    if (eps <= 0.0) return 0.0;
    return polygon_.is_convex() ? inner_tube_polygon(polygon_.as_convex(), eps) : inner_tube_polygon(polygon_, eps);
}

double Generator::inner_tube_from_kappa(double eps) const {
    if (eps <= 0.0) return 0.0;
    if (eps >= inradius_) return area();
    for (const auto& p : pieces_)
        if (eps < p.end) return area() + eval_quadratic(p.kappa, eps);
    return area();
}

TilesetCheck check_tileset_condition(const SelfSimilarSystem& system, const ConvexPolygon& hull) {
    TilesetCheck out;
    const double area = hull.area();
    std::vector<ConvexPolygon> images;
    double image_area = 0.0;
    for (const auto& m : system.maps()) {
        std::vector<Vec2> pts;
        for (Vec2 v : hull.vertices()) pts.push_back(m.apply(v));
        images.push_back(ConvexPolygon::hull_of(pts));
        image_area += images.back().area();
    }
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j) {
            const double ov = convex_intersection_area(images[i], images[j]);
            if (ov > 1e-12 * area) {
                out.reason = "images " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap";
                out.first = static_cast<int>(i);
                out.second = static_cast<int>(j);
                out.overlap = ov;
                return out;
            }
        }
    if (image_area >= area * (1.0 - 1e-12)) {
        out.reason = "images cover the hull";
        return out;
    }
    out.pass = true;
    return out;
}

TilesetCheck check_tileset_condition(const SelfSimilarSystem& system, const Interval& hull) {
    TilesetCheck out;
    const double len = hull.length();
    std::vector<Interval> images;
    double total = 0.0;
    for (const auto& m : system.maps()) {
        const double a = m.apply({hull.lo, 0.0}).x, b = m.apply({hull.hi, 0.0}).x;
        images.push_back({std::min(a, b), std::max(a, b)});
        total += images.back().length();
    }
    const double tol = 1e-12 * std::max(len, 1e-300);
    for (std::size_t i = 0; i < images.size(); ++i)
        for (std::size_t j = i + 1; j < images.size(); ++j) {
            const double ov = std::min(images[i].hi, images[j].hi) - std::max(images[i].lo, images[j].lo);
            const bool same = std::abs(images[i].lo - images[j].lo) <= tol && std::abs(images[i].hi - images[j].hi) <= tol;
            if (ov > tol || same) {
                out.reason = "images " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap";
                out.first = static_cast<int>(i);
                out.second = static_cast<int>(j);
                out.overlap = same ? images[i].length() : ov;
                return out;
            }
        }
    if (total >= len * (1.0 - 1e-12)) {
        out.reason = "images cover the hull";
        return out;
    }
    out.pass = true;
    return out;
}

SelfSimilarTiling::SelfSimilarTiling(SelfSimilarSystem system, ConvexPolygon hull, std::vector<Generator> generators,
                                     int depth_cap)
    : system_(std::move(system)), hull_(std::move(hull)), generators_(std::move(generators)), depth_cap_(depth_cap) {}

double SelfSimilarTiling::largest_inradius() const {
    double g = 0.0;
    for (const auto& gen : generators_) g = std::max(g, gen.inradius());
    return g;
}

double SelfSimilarTiling::total_tile_area() const {
    CompensatedSum a;
    for (const auto& gen : generators_) a.add(gen.area());
    const auto r = ratios();
    return a.value() * word_power_sum(r, 2.0);
}

std::vector<Tile> SelfSimilarTiling::tiles(int depth) const {
    if (depth < 0 || depth > depth_cap_) throw DomainError("tile depth exceeds the depth cap");
    std::vector<Tile> out;
    const std::size_t budget = 5'000'000;
    std::vector<int> word;
    std::function<void(int, const Similitude&)> visit = [&](int remaining, const Similitude& map) {
        if (remaining == 0) {
            for (std::size_t q = 0; q < generators_.size(); ++q) {
                out.push_back({static_cast<int>(word.size()), word, static_cast<int>(q), map});
                if (out.size() > budget) throw BudgetError("tile budget exceeded");
            }
            return;
        }
        for (std::size_t j = 0; j < system_.size(); ++j) {
            word.push_back(static_cast<int>(j));
            visit(remaining - 1, system_.map(j).after(map));
            word.pop_back();
        }
    };
    for (int level = 0; level <= depth; ++level) visit(level, Similitude::identity());
    return out;
}

SelfSimilarTiling build_tiling(const SelfSimilarSystem& system, int depth_cap, KappaSource source) {
    if (system.dimension() != 2) throw DomainError("tilings are built for planar systems");
    const ConvexPolygon hull = convex_hull_of_attractor(system);
    const auto check = check_tileset_condition(system, hull);
    if (!check.pass) {
        if (check.reason == "images cover the hull") throw DomainError("attractor has interior; no tiling residue");
        throw DomainError("tileset condition violated: " + check.reason);
    }
    std::vector<ConvexPolygon> images;
    for (const auto& m : system.maps()) {
        std::vector<Vec2> pts;
        for (Vec2 v : hull.vertices()) pts.push_back(m.apply(v));
        images.push_back(ConvexPolygon::hull_of(pts));
    }
    auto components = polygon_difference_components(hull, images);
    if (components.empty()) throw DomainError("attractor has interior; no tiling residue");
    if (components.size() > kMaxGenerators) throw DomainError("more than 64 generators");
    // Deterministic order: area descending, then lowest-leftmost vertex.
    auto key = [](const SimplePolygon& p) {
        Vec2 lo = p.vertices().front();
        for (Vec2 v : p.vertices())
            if (v.y < lo.y - 1e-12 || (std::abs(v.y - lo.y) <= 1e-12 && v.x < lo.x)) lo = v;
        return lo;
    };
    std::sort(components.begin(), components.end(), [&](const SimplePolygon& a, const SimplePolygon& b) {
        const double aa = a.area(), ab = b.area();
        if (std::abs(aa - ab) > 1e-12 * std::max(aa, ab)) return aa > ab;
        const Vec2 ka = key(a), kb = key(b);
        if (std::abs(ka.y - kb.y) > 1e-12) return ka.y < kb.y;
        return ka.x < kb.x;
    });
    std::vector<Generator> gens;
    for (auto& c : components) gens.emplace_back(std::move(c), source);
    return SelfSimilarTiling(system, hull, std::move(gens), depth_cap);
}

double tiling_tube_oracle(const SelfSimilarTiling& tiling, double eps) {
    if (!(eps > 0.0)) throw DomainError("eps must be positive");
    const auto ratios = tiling.ratios();
    const double all_words = word_power_sum(ratios, 2.0);
    CompensatedSum total;
    for (const auto& gen : tiling.generators()) {
        const double g = gen.inradius();
        const double threshold = eps / g;
        CompensatedSum open_area;
        for (const auto& b : enumerate_ratio_buckets(ratios, threshold)) {
            if (b.ratio <= threshold) continue;
            const double r2 = b.ratio * b.ratio;
            total.add(b.weight * r2 * gen.inner_tube(eps / b.ratio));
            open_area.add(b.weight * r2);
        }
        total.add(gen.area() * (all_words - open_area.value()));
    }
    return total.value();
}

std::string export_tiling_svg(const SelfSimilarTiling& tiling, int depth) {
    const auto& hv = tiling.hull().vertices();
    double x0 = hv[0].x, x1 = hv[0].x, y0 = hv[0].y, y1 = hv[0].y;
    for (Vec2 v : hv) {
        x0 = std::min(x0, v.x), x1 = std::max(x1, v.x);
        y0 = std::min(y0, v.y), y1 = std::max(y1, v.y);
    }
    const double size = 1000.0, margin = 10.0;
    const double scale = (size - 2.0 * margin) / std::max(x1 - x0, y1 - y0);
    const double width = (x1 - x0) * scale + 2.0 * margin, height = (y1 - y0) * scale + 2.0 * margin;
    char buf[256];
    auto point = [&](Vec2 p) {
        std::snprintf(buf, sizeof buf, "%.4f %.4f", margin + (p.x - x0) * scale, margin + (y1 - p.y) * scale);
        return std::string(buf);
    };
    auto path = [&](const std::vector<Vec2>& ring) {
        std::string d = "M " + point(ring[0]);
        for (std::size_t i = 1; i < ring.size(); ++i) d += " L " + point(ring[i]);
        return d + " Z";
    };
    static const char* palette[] = {"#1b4f72", "#2874a6", "#3498db", "#5dade2", "#85c1e9", "#aed6f1", "#d6eaf8"};
    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%.4f\" height=\"%.4f\" "
                  "viewBox=\"0 0 %.4f %.4f\">\n",
                  width, height, width, height);
    svg += buf;
    svg += "<path id=\"hull\" d=\"" + path(hv) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    const auto tiles = tiling.tiles(depth);
    int level = -1;
    for (const auto& t : tiles) {
        if (t.level != level) {
            if (level >= 0) svg += "</g>\n";
            level = t.level;
            std::snprintf(buf, sizeof buf, "<g id=\"level-%d\" fill=\"%s\" stroke=\"none\">\n", level,
                          palette[std::min<int>(level, 6)]);
            svg += buf;
        }
        const auto poly = tiling.generators()[t.generator].polygon().transformed(t.map);
        svg += "<path d=\"" + path(poly.vertices()) + "\"/>\n";
    }
    if (level >= 0) svg += "</g>\n";
    svg += "</svg>\n";
    return svg;
}

namespace {

double hull_diameter(const ConvexPolygon& hull) {
    double d = 0.0;
    for (Vec2 a : hull.vertices())
        for (Vec2 b : hull.vertices()) d = std::max(d, distance(a, b));
    return d;
}

double distance_to_convex(const std::vector<Vec2>& ring, Vec2 p) {
    bool in = true;
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = ring.size();
    double orient = 0.0;
    for (std::size_t i = 0; i < n; ++i) orient += cross(ring[i], ring[(i + 1) % n]);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = ring[i], b = ring[(i + 1) % n];
        if (cross(b - a, p - a) * orient < 0.0) in = false;
        best = std::min(best, point_segment_distance(p, a, b));
    }
    return in ? 0.0 : best;
}

struct Cell {
    double lower;
    double size;
    Similitude map;
    bool operator>(const Cell& o) const { return lower > o.lower; }
};

template <class Decide>
double branch_and_bound(const SelfSimilarSystem& system, const ConvexPolygon& hull, Vec2 p, double tol, Decide&& stop) {
    const double diam = hull_diameter(hull);
    const Vec2 seed = system.map(0).fixed_point();
    auto cell_lower = [&](const Similitude& m) {
        std::vector<Vec2> ring;
        ring.reserve(hull.size());
        for (Vec2 v : hull.vertices()) ring.push_back(m.apply(v));
        return distance_to_convex(ring, p);
    };
    std::priority_queue<Cell, std::vector<Cell>, std::greater<>> queue;
    const Similitude id = Similitude::identity();
    queue.push({cell_lower(id), diam, id});
    double best = distance(p, seed);
    while (!queue.empty()) {
        const Cell c = queue.top();
        queue.pop();
        best = std::min(best, distance(p, c.map.apply(seed)));
        const auto verdict = stop(c.lower, best, c.size);
        if (verdict) return *verdict;
        if (c.lower >= best - tol) return best;
        for (std::size_t j = 0; j < system.size(); ++j) {
            const Similitude child = c.map.after(system.map(j));
            queue.push({cell_lower(child), c.size * system.map(j).ratio, child});
        }
    }
    return best;
}

}  // namespace

double attractor_distance(const SelfSimilarSystem& system, const ConvexPolygon& hull, Vec2 p, double tol) {
    return branch_and_bound(system, hull, p, tol, [](double, double, double) { return std::optional<double>{}; });
}

bool attractor_within(const SelfSimilarSystem& system, const ConvexPolygon& hull, Vec2 p, double eps, double tol) {
    const double r = branch_and_bound(system, hull, p, tol, [&](double lower, double best, double size) {
        if (best <= eps) return std::optional<double>(0.0);
        if (lower > eps) return std::optional<double>(1.0);
        if (size < tol) return std::optional<double>(0.0);
        return std::optional<double>{};
    });
    return r == 0.0;
}

AttractorCloud attractor_cloud(const SelfSimilarSystem& system, const ConvexPolygon& hull, double resolution,
                               std::size_t budget) {
    AttractorCloud cloud;
    cloud.resolution = resolution;
    const double diam = hull_diameter(hull);
    const Vec2 seed = system.map(0).fixed_point();
    std::vector<std::pair<Similitude, double>> stack{{Similitude::identity(), diam}};
    while (!stack.empty()) {
        auto [m, size] = stack.back();
        stack.pop_back();
        if (size <= resolution) {
            cloud.points.push_back(m.apply(seed));
            if (cloud.points.size() > budget) throw BudgetError("attractor point cloud budget exceeded");
            continue;
        }
        for (std::size_t j = system.size(); j-- > 0;)
            stack.emplace_back(m.after(system.map(j)), size * system.map(j).ratio);
    }
    return cloud;
}

CloudIndex::CloudIndex(const AttractorCloud& cloud) : pts_(cloud.points) {
    if (pts_.empty()) throw DomainError("empty point cloud");
    Vec2 lo = pts_[0], hi = pts_[0];
    for (Vec2 p : pts_) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double span = std::max({hi.x - lo.x, hi.y - lo.y, 1e-12});
    const double target = std::sqrt(static_cast<double>(pts_.size()));
    cell_ = span / std::max(1.0, std::min(target, 2048.0));
    origin_ = lo;
    nx_ = static_cast<int>((hi.x - lo.x) / cell_) + 1;
    ny_ = static_cast<int>((hi.y - lo.y) / cell_) + 1;
    buckets_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (std::size_t i = 0; i < pts_.size(); ++i) {
        const int cx = std::clamp(static_cast<int>((pts_[i].x - lo.x) / cell_), 0, nx_ - 1);
        const int cy = std::clamp(static_cast<int>((pts_[i].y - lo.y) / cell_), 0, ny_ - 1);
        buckets_[static_cast<std::size_t>(cy) * nx_ + cx].push_back(static_cast<int>(i));
    }
}

double CloudIndex::nearest(Vec2 p) const {
    // Projection onto the grid box is non-expansive, so ring bounds measured
    // from the clamped point remain valid lower bounds for p.
    const int cx = std::clamp(static_cast<int>(std::floor((p.x - origin_.x) / cell_)), 0, nx_ - 1);
    const int cy = std::clamp(static_cast<int>(std::floor((p.y - origin_.y) / cell_)), 0, ny_ - 1);
    double best = std::numeric_limits<double>::infinity();
    const int max_ring = std::max(nx_, ny_);
    for (int k = 0; k <= max_ring; ++k) {
        if (std::isfinite(best) && (k - 1) * cell_ > best) break;
        for (int y = cy - k; y <= cy + k; ++y) {
            if (y < 0 || y >= ny_) continue;
            const bool edge_row = (y == cy - k || y == cy + k);
            for (int x = cx - k; x <= cx + k; x += edge_row ? 1 : 2 * k) {
                if (x >= 0 && x < nx_)
                    for (int i : buckets_[static_cast<std::size_t>(y) * nx_ + x]) best = std::min(best, distance(p, pts_[i]));
                if (k == 0) break;
            }
        }
    }
    return best;
}

HullBoundaryCheck check_hull_boundary_condition(const SelfSimilarSystem& system, int samples, double resolution) {
    HullBoundaryCheck out;
    if (system.dimension() == 1) {
        // The endpoints of the smallest interval containing F belong to F.
        out.pass = true;
        return out;
    }
    const ConvexPolygon hull = convex_hull_of_attractor(system);
    const double diam = hull_diameter(hull);
    if (resolution <= 0.0) resolution = 2.5e-4 * diam;
    const auto cloud = attractor_cloud(system, hull, resolution);
    const CloudIndex index(cloud);
    const auto& v = hull.vertices();
    const double perim = hull.perimeter();
    std::size_t edge = 0;
    double edge_start = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double s = perim * (static_cast<double>(i) + 0.5) / samples;
        while (edge_start + distance(v[edge], v[(edge + 1) % v.size()]) < s && edge + 1 < v.size()) {
            edge_start += distance(v[edge], v[(edge + 1) % v.size()]);
            ++edge;
        }
        const Vec2 a = v[edge], b = v[(edge + 1) % v.size()];
        const double t = std::clamp((s - edge_start) / distance(a, b), 0.0, 1.0);
        out.max_distance = std::max(out.max_distance, index.nearest(a + (b - a) * t));
    }
    out.resolution = resolution;
    out.pass = out.max_distance < 3.0 * resolution;
    return out;
}

}  // namespace fractube
