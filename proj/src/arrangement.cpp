// Generator extraction: int(C) \ (Phi_1(C) u ... u Phi_J(C)) split into
// connected components, via the planar arrangement of all polygon edges.

#include <algorithm>
#include <map>
#include <numeric>

#include "fractube/geom2d.hpp"

namespace fractube {

namespace {

struct Segment {
    Vec2 a, b;
};

class VertexPool {
public:
    explicit VertexPool(double tol) : tol_(tol) {}

    int insert(Vec2 p) {
        for (std::size_t i = 0; i < pts_.size(); ++i)
            if (distance(pts_[i], p) <= tol_) return static_cast<int>(i);
        pts_.push_back(p);
        return static_cast<int>(pts_.size() - 1);
    }
    const std::vector<Vec2>& points() const { return pts_; }

private:
    double tol_;
    std::vector<Vec2> pts_;
};

std::optional<Vec2> segment_intersection(const Segment& s1, const Segment& s2, double tol) {
    const Vec2 r = s1.b - s1.a, s = s2.b - s2.a;
    const double denom = cross(r, s);
    const double lr = norm(r), ls = norm(s);
    if (std::abs(denom) <= 1e-14 * lr * ls) return std::nullopt;
    const Vec2 qp = s2.a - s1.a;
    const double t = cross(qp, s) / denom;
    const double u = cross(qp, r) / denom;
    const double tt = tol / lr, tu = tol / ls;
    if (t < -tt || t > 1.0 + tt || u < -tu || u > 1.0 + tu) return std::nullopt;
    return s1.a + r * t;
}

// A point strictly inside a simple CCW ring: centroid of an empty ear.
Vec2 interior_point(const std::vector<Vec2>& ring) {
    const std::size_t n = ring.size();
    double best_area = 0.0;
    Vec2 best = ring[0];
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = ring[(i + n - 1) % n], b = ring[i], c = ring[(i + 1) % n];
        const double ar = 0.5 * cross(b - a, c - a);
        if (ar <= best_area) continue;
        bool empty = true;
        for (std::size_t k = 0; k < n && empty; ++k) {
            if (k == i || k == (i + 1) % n || k == (i + n - 1) % n) continue;
            const Vec2 p = ring[k];
            if (p == a || p == b || p == c) continue;
            empty = !(cross(b - a, p - a) > 0.0 && cross(c - b, p - b) > 0.0 && cross(a - c, p - c) > 0.0);
        }
        if (empty) {
            best_area = ar;
            best = (a + b + c) / 3.0;
        }
    }
    return best;
}

}  // namespace

std::vector<SimplePolygon> polygon_difference_components(const ConvexPolygon& outer,
                                                         std::span<const ConvexPolygon> inner) {
    if (outer.empty()) throw DomainError("outer polygon is degenerate");
    const double area_outer = outer.area();
    double scale = 0.0;
    for (Vec2 p : outer.vertices())
        for (Vec2 q : outer.vertices()) scale = std::max(scale, distance(p, q));
    const double tol = 1e-9 * scale;

    for (std::size_t i = 0; i < inner.size(); ++i) {
        for (Vec2 p : inner[i].vertices())
            if (!outer.contains(p, tol)) throw DomainError("inner polygon is not contained in the outer polygon");
        for (std::size_t j = i + 1; j < inner.size(); ++j) {
            const double ov = convex_intersection_area(inner[i], inner[j]);
            if (ov > 1e-12 * area_outer)
                throw DomainError("tileset condition violated: images " + std::to_string(i) + " and " +
                                  std::to_string(j) + " overlap");
        }
    }

    std::vector<Segment> segs;
    auto add_ring = [&](const ConvexPolygon& p) {
        const auto& v = p.vertices();
        for (std::size_t i = 0; i < v.size(); ++i) segs.push_back({v[i], v[(i + 1) % v.size()]});
    };
    add_ring(outer);
    for (const auto& p : inner) add_ring(p);

    VertexPool pool(tol);
    for (const auto& s : segs) {
        pool.insert(s.a);
        pool.insert(s.b);
    }
    for (std::size_t i = 0; i < segs.size(); ++i)
        for (std::size_t j = i + 1; j < segs.size(); ++j)
            if (auto x = segment_intersection(segs[i], segs[j], tol)) pool.insert(*x);
    const auto& pts = pool.points();
    const std::size_t nv = pts.size();

    // Split segments at every vertex lying on them.
    std::map<std::pair<int, int>, bool> edge_set;
    for (const auto& s : segs) {
        std::vector<std::pair<double, int>> on;
        const Vec2 d = s.b - s.a;
        const double len2 = dot(d, d);
        for (std::size_t k = 0; k < nv; ++k)
            if (point_segment_distance(pts[k], s.a, s.b) <= tol)
                on.emplace_back(dot(pts[k] - s.a, d) / len2, static_cast<int>(k));
        std::sort(on.begin(), on.end());
        for (std::size_t k = 0; k + 1 < on.size(); ++k) {
            int u = on[k].second, v = on[k + 1].second;
            if (u == v) continue;
            edge_set[{std::min(u, v), std::max(u, v)}] = true;
        }
    }

    // Connectivity guard: a disconnected arrangement means a component with a hole.
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& [e, _] : edge_set) parent[find(e.first)] = find(e.second);
    for (std::size_t k = 1; k < nv; ++k)
        if (find(static_cast<int>(k)) != find(0))
            throw DomainError("difference region has a hole; unsupported generator topology");

    // Half-edges sorted counterclockwise around each vertex.
    std::vector<std::vector<int>> out(nv);
    for (const auto& [e, _] : edge_set) {
        out[e.first].push_back(e.second);
        out[e.second].push_back(e.first);
    }
    for (std::size_t k = 0; k < nv; ++k) {
        auto& nb = out[k];
        std::sort(nb.begin(), nb.end(), [&](int a, int b) {
            const Vec2 da = pts[a] - pts[k], db = pts[b] - pts[k];
            return std::atan2(da.y, da.x) < std::atan2(db.y, db.x);
        });
    }
    std::map<std::pair<int, int>, bool> visited;
    std::vector<SimplePolygon> result;
    for (std::size_t u0 = 0; u0 < nv; ++u0)
        for (int v0 : out[u0]) {
            if (visited[{static_cast<int>(u0), v0}]) continue;
            std::vector<Vec2> ring;
            int u = static_cast<int>(u0), v = v0;
            while (!visited[{u, v}]) {
                visited[{u, v}] = true;
                ring.push_back(pts[u]);
                const auto& nb = out[v];
                const auto it = std::find(nb.begin(), nb.end(), u);
                const std::size_t k = static_cast<std::size_t>(it - nb.begin());
                const int w = nb[(k + nb.size() - 1) % nb.size()];
                u = v;
                v = w;
            }
            if (signed_area(ring) <= 1e-12 * area_outer) continue;  // unbounded face or noise
            const Vec2 probe = interior_point(ring);
            if (!outer.contains(probe)) continue;
            bool covered = false;
            for (const auto& p : inner)
                if (p.contains(probe)) {
                    covered = true;
                    break;
                }
            if (!covered) result.emplace_back(std::move(ring));
        }
    return result;
}

}  // namespace fractube
