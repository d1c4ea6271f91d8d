#include "fractube/geom2d.hpp"

#include <algorithm>
#include <limits>

#include <boost/geometry.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>

namespace fractube {

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + ab * t);
}

// ---------------------------------------------------------------------------
// Similitudes

Vec2 Similitude::apply(Vec2 p) const {
    if (reflect) p.y = -p.y;
    const double c = std::cos(rotation), s = std::sin(rotation);
    return Vec2{ratio * (c * p.x - s * p.y), ratio * (s * p.x + c * p.y)} + translation;
}

Similitude Similitude::after(const Similitude& inner) const {
    Similitude out;
    out.ratio = ratio * inner.ratio;
    out.reflect = reflect != inner.reflect;
    out.rotation = rotation + (reflect ? -inner.rotation : inner.rotation);
    out.translation = apply(inner.translation);
    return out;
}

Vec2 Similitude::fixed_point() const {
    // (I - M) p = t with M = ratio * R * diag(1, +-1)
    const double c = std::cos(rotation), s = std::sin(rotation);
    const double sy = reflect ? -1.0 : 1.0;
    const double m00 = ratio * c, m01 = -ratio * s * sy;
    const double m10 = ratio * s, m11 = ratio * c * sy;
    const double a = 1.0 - m00, b = -m01, cc = -m10, d = 1.0 - m11;
    const double det = a * d - b * cc;
    return {(d * translation.x - b * translation.y) / det, (-cc * translation.x + a * translation.y) / det};
}

Similitude Similitude::identity() { return Similitude{1.0, 0.0, false, {0.0, 0.0}}; }

SelfSimilarSystem::SelfSimilarSystem(int dimension, std::vector<Similitude> maps)
    : dimension_(dimension), maps_(std::move(maps)) {
    if (dimension_ != 1 && dimension_ != 2)
        throw DomainError("only dimensions 1 and 2 are supported");
    if (maps_.empty()) throw DomainError("a self-similar system needs at least one map");
    for (const auto& m : maps_) {
        if (!(m.ratio > 0.0 && m.ratio < 1.0))
            throw DomainError("similitude ratio must lie in (0, 1), got " + std::to_string(m.ratio));
        if (dimension_ == 1 && (m.reflect || std::abs(m.translation.y) > 0.0 ||
                                std::abs(std::sin(m.rotation)) > 1e-15))
            throw DomainError("one-dimensional maps must be x -> +-r x + a");
    }
}

std::vector<double> SelfSimilarSystem::ratios() const {
    std::vector<double> r;
    r.reserve(maps_.size());
    for (const auto& m : maps_) r.push_back(m.ratio);
    return r;
}

Similitude SelfSimilarSystem::word_map(std::span<const int> word) const {
    Similitude acc = Similitude::identity();
    for (int letter : word) {
        if (letter < 0 || static_cast<std::size_t>(letter) >= maps_.size())
            throw DomainError("word letter out of range");
        acc = maps_[letter].after(acc);
    }
    return acc;
}

std::vector<Vec2> apply_word(const SelfSimilarSystem& system, std::span<const int> word,
                             std::span<const Vec2> points) {
    const Similitude m = system.word_map(word);
    std::vector<Vec2> out;
    out.reserve(points.size());
    for (Vec2 p : points) out.push_back(m.apply(p));
    return out;
}

// ---------------------------------------------------------------------------
// Polygons

double signed_area(std::span<const Vec2> ring) {
    const std::size_t n = ring.size();
    if (n < 3) return 0.0;
    CompensatedSum acc;
    for (std::size_t i = 0; i < n; ++i) acc.add(cross(ring[i], ring[(i + 1) % n]));
    return 0.5 * acc.value();
}

namespace {

double diameter_hint(std::span<const Vec2> pts) {
    double xmin = std::numeric_limits<double>::max(), xmax = -xmin, ymin = xmin, ymax = -xmin;
    for (Vec2 p : pts) {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    return std::max(xmax - xmin, ymax - ymin);
}

// Drops duplicate and (near-)collinear vertices of a closed ring.
std::vector<Vec2> prune_ring(std::vector<Vec2> v, double rel_tol) {
    const double scale = std::max(diameter_hint(v), 1e-300);
    bool changed = true;
    while (changed && v.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
            const Vec2 a = v[(i + v.size() - 1) % v.size()];
            const Vec2 b = v[i];
            const Vec2 c = v[(i + 1) % v.size()];
            const double ac = distance(a, c);
            const bool dup = distance(a, b) <= rel_tol * scale;
            const bool collinear = ac > 0.0 && std::abs(cross(c - a, b - a)) / ac <= rel_tol * scale;
            if (dup || collinear) {
                v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    return v;
}

}  // namespace

ConvexPolygon ConvexPolygon::hull_of(std::span<const Vec2> points) {
    std::vector<Vec2> p(points.begin(), points.end());
    std::sort(p.begin(), p.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    p.erase(std::unique(p.begin(), p.end()), p.end());
    if (p.size() < 3) return ConvexPolygon(p);
    std::vector<Vec2> h(2 * p.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = p[i];
    }
    for (std::size_t i = p.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0.0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);
    return ConvexPolygon(prune_ring(std::move(h), 1e-13));
}

ConvexPolygon ConvexPolygon::from_vertices(std::vector<Vec2> vertices) {
    if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    return ConvexPolygon(prune_ring(std::move(vertices), 1e-13));
}

double ConvexPolygon::area() const { return std::max(0.0, signed_area(vertices_)); }

double ConvexPolygon::perimeter() const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        acc.add(distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]));
    return acc.value();
}

std::vector<double> ConvexPolygon::interior_angles() const {
    const std::size_t n = vertices_.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e1 = vertices_[i] - vertices_[(i + n - 1) % n];
        const Vec2 e2 = vertices_[(i + 1) % n] - vertices_[i];
        out[i] = kPi - std::atan2(cross(e1, e2), dot(e1, e2));
    }
    return out;
}

bool ConvexPolygon::contains(Vec2 p, double tol) const {
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
        if (cross(b - a, p - a) < -tol * norm(b - a)) return false;
    }
    return n >= 3;
}

double ConvexPolygon::boundary_distance(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(p, vertices_[i], vertices_[(i + 1) % n]));
    return best;
}

Vec2 ConvexPolygon::centroid() const {
    const std::size_t n = vertices_.size();
    double cx = 0.0, cy = 0.0;
    const double a = signed_area(vertices_);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 p = vertices_[i], q = vertices_[(i + 1) % n];
        const double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {cx / (6.0 * a), cy / (6.0 * a)};
}

SimplePolygon::SimplePolygon(std::vector<Vec2> vertices) {
    if (signed_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    vertices_ = prune_ring(std::move(vertices), 1e-13);
    convex_ = vertices_.size() >= 3;
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n && convex_; ++i) {
        const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n], c = vertices_[(i + 2) % n];
        if (cross(b - a, c - b) < 0.0) convex_ = false;
    }
}

double SimplePolygon::area() const { return std::abs(signed_area(vertices_)); }

double SimplePolygon::perimeter() const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        acc.add(distance(vertices_[i], vertices_[(i + 1) % vertices_.size()]));
    return acc.value();
}

ConvexPolygon SimplePolygon::as_convex() const {
    if (!convex_) throw DomainError("polygon is not convex");
    return ConvexPolygon::from_vertices(vertices_);
}

SimplePolygon SimplePolygon::transformed(const Similitude& map) const {
    std::vector<Vec2> v;
    v.reserve(vertices_.size());
    for (Vec2 p : vertices_) v.push_back(map.apply(p));
    return SimplePolygon(std::move(v));
}

// ---------------------------------------------------------------------------
// Intrinsic volumes, inradius, tubes

SteinerCoefficients intrinsic_volumes(const ConvexPolygon& poly) {
    return SteinerCoefficients{{1.0, 0.5 * poly.perimeter(), poly.area()}};
}

InscribedCircle inscribed_circle(const ConvexPolygon& poly) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    if (n < 3 || poly.area() <= 0.0) throw DomainError("inradius of a degenerate polygon");
    if (n == 3) {
        const double a = distance(v[1], v[2]), b = distance(v[2], v[0]), c = distance(v[0], v[1]);
        const double p = a + b + c;
        return {(v[0] * a + v[1] * b + v[2] * c) / p, 2.0 * poly.area() / p};
    }
    // max t s.t. n_i . x - t >= n_i . a_i for inward unit normals n_i;
    // the optimum sits on a vertex of the feasible set, so enumerate triples.
    std::vector<Vec2> nrm(n);
    std::vector<double> off(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 e = v[(i + 1) % n] - v[i];
        nrm[i] = Vec2{-e.y, e.x} / norm(e);
        off[i] = dot(nrm[i], v[i]);
    }
    InscribedCircle best{poly.centroid(), -1.0};
    const double scale = diameter_hint(v);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                // rows: [nx ny -1] [x y t]^T = off
                const double a[3][3] = {{nrm[i].x, nrm[i].y, -1.0},
                                        {nrm[j].x, nrm[j].y, -1.0},
                                        {nrm[k].x, nrm[k].y, -1.0}};
                const double rhs[3] = {off[i], off[j], off[k]};
                const double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                                   a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                                   a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
                if (std::abs(det) < 1e-14) continue;
                double sol[3];
                for (int c = 0; c < 3; ++c) {
                    double m[3][3];
                    for (int r = 0; r < 3; ++r)
                        for (int q = 0; q < 3; ++q) m[r][q] = (q == c) ? rhs[r] : a[r][q];
                    sol[c] = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                              m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                              m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])) /
                             det;
                }
                const Vec2 x{sol[0], sol[1]};
                const double t = sol[2];
                if (t <= best.radius) continue;
                bool feasible = true;
                for (std::size_t q = 0; q < n && feasible; ++q)
                    feasible = dot(nrm[q], x) - t >= off[q] - 1e-12 * scale;
                if (feasible) best = {x, t};
            }
    if (best.radius <= 0.0) throw DomainError("inscribed circle search failed");
    return best;
}

double inradius(const ConvexPolygon& poly) { return inscribed_circle(poly).radius; }

namespace {

// Keeps the part of `poly` with n . x >= c.
std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n, double c) {
    std::vector<Vec2> out;
    const std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2 p = poly[i], q = poly[(i + 1) % m];
        const double fp = dot(n, p) - c, fq = dot(n, q) - c;
        if (fp >= 0.0) out.push_back(p);
        if ((fp >= 0.0) != (fq >= 0.0)) {
            const double t = fp / (fp - fq);
            out.push_back(p + (q - p) * t);
        }
    }
    return out;
}

}  // namespace

ConvexPolygon inner_parallel_body(const ConvexPolygon& poly, double eps) {
    const auto& v = poly.vertices();
    const std::size_t n = v.size();
    std::vector<Vec2> cur = v;
    for (std::size_t i = 0; i < n && cur.size() >= 3; ++i) {
        const Vec2 e = v[(i + 1) % n] - v[i];
        const Vec2 nrm = Vec2{-e.y, e.x} / norm(e);
        cur = clip_halfplane(cur, nrm, dot(nrm, v[i]) + eps);
    }
    if (cur.size() < 3 || signed_area(cur) <= 0.0) return {};
    return ConvexPolygon::from_vertices(std::move(cur));
}

double inner_tube_polygon(const ConvexPolygon& poly, double eps) {
    if (eps <= 0.0) return 0.0;
    const double a = poly.area();
    if (eps >= inradius(poly)) return a;
    return std::clamp(a - inner_parallel_body(poly, eps).area(), 0.0, a);
}

namespace bg = boost::geometry;
using BgPoint = bg::model::d2::point_xy<double>;
using BgPolygon = bg::model::polygon<BgPoint>;
using BgMulti = bg::model::multi_polygon<BgPolygon>;

double inner_tube_polygon(const SimplePolygon& poly, double eps) {
    if (poly.is_convex()) return inner_tube_polygon(poly.as_convex(), eps);
    if (eps <= 0.0) return 0.0;
    BgPolygon p;
    // Boost wants clockwise outer rings by default.
    const auto& v = poly.vertices();
    for (auto it = v.rbegin(); it != v.rend(); ++it) bg::append(p.outer(), BgPoint(it->x, it->y));
    bg::append(p.outer(), BgPoint(v.back().x, v.back().y));
    bg::correct(p);
    BgMulti in{p}, out;
    bg::buffer(in, out, bg::strategy::buffer::distance_symmetric<double>(-eps),
               bg::strategy::buffer::side_straight(), bg::strategy::buffer::join_round(4096),
               bg::strategy::buffer::end_flat(), bg::strategy::buffer::point_circle(4096));
    const double a = poly.area();
    return std::clamp(a - bg::area(out), 0.0, a);
}

std::vector<OffsetPhase> offset_phases(const ConvexPolygon& poly) {
    std::vector<OffsetPhase> phases;
    const double rho = inradius(poly);
    ConvexPolygon cur = poly;
    double t0 = 0.0;
    const double tol = 1e-12 * std::max(rho, 1e-300);
    while (!cur.empty() && rho - t0 > tol) {
        const auto& v = cur.vertices();
        const std::size_t n = v.size();
        const auto ang = cur.interior_angles();
        std::vector<double> cot(n);
        double corner = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cot[i] = 1.0 / std::tan(0.5 * ang[i]);
            corner += cot[i];
        }
        double tau = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i)
            tau = std::min(tau, distance(v[i], v[(i + 1) % n]) / (cot[i] + cot[(i + 1) % n]));
        const double end = std::min(rho, t0 + tau);
        phases.push_back({t0, end, cur.area(), cur.perimeter(), corner});
        if (rho - end <= tol) break;
        cur = inner_parallel_body(cur, end - t0);
        t0 = end;
    }
    if (!phases.empty()) phases.back().end = rho;
    return phases;
}

double steiner_outer_tube(const ConvexPolygon& poly, double eps, bool exterior_only) {
    // C_i = mu_i * vol(B^{d-i}): vol(B^2) = pi, vol(B^1) = 2, mu_1 = perimeter / 2.
    const auto mu = intrinsic_volumes(poly).mu;
    const double ext = mu[0] * kPi * eps * eps + mu[1] * 2.0 * eps;
    return exterior_only ? ext : ext + mu[2];
}

ConvexPolygon convex_intersection(const ConvexPolygon& a, const ConvexPolygon& b) {
    std::vector<Vec2> cur = a.vertices();
    const auto& v = b.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n && cur.size() >= 3; ++i) {
        const Vec2 e = v[(i + 1) % n] - v[i];
        const Vec2 nrm = Vec2{-e.y, e.x} / norm(e);
        cur = clip_halfplane(cur, nrm, dot(nrm, v[i]));
    }
    if (cur.size() < 3 || signed_area(cur) <= 0.0) return {};
    return ConvexPolygon::from_vertices(std::move(cur));
}

double convex_intersection_area(const ConvexPolygon& a, const ConvexPolygon& b) {
    return convex_intersection(a, b).area();
}

// ---------------------------------------------------------------------------
// Attractor hulls

double hausdorff_distance(const ConvexPolygon& a, const ConvexPolygon& b) {
    auto one_way = [](const ConvexPolygon& from, const ConvexPolygon& to) {
        double worst = 0.0;
        for (Vec2 p : from.vertices())
            if (!to.contains(p)) worst = std::max(worst, to.boundary_distance(p));
        return worst;
    };
    return std::max(one_way(a, b), one_way(b, a));
}

namespace {

void words_up_to(std::size_t alphabet, int max_len, std::vector<std::vector<int>>& out) {
    out.push_back({});
    std::size_t begin = 0;
    for (int len = 1; len <= max_len; ++len) {
        const std::size_t end = out.size();
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = 0; j < alphabet; ++j) {
                auto w = out[i];
                w.push_back(static_cast<int>(j));
                out.push_back(std::move(w));
            }
        begin = end;
    }
}

}  // namespace

ConvexPolygon convex_hull_of_attractor(const SelfSimilarSystem& system, const HullOptions& opt) {
    if (system.dimension() != 2) throw DomainError("convex hull requires a planar system");
    std::vector<Vec2> pts;
    for (const auto& m : system.maps()) pts.push_back(m.fixed_point());
    ConvexPolygon hull = ConvexPolygon::hull_of(pts);
    std::vector<Vec2> seed = hull.empty() ? pts : hull.vertices();

    double gap = std::numeric_limits<double>::infinity();
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        std::vector<Vec2> next = seed;
        for (const auto& m : system.maps())
            for (Vec2 p : seed) next.push_back(m.apply(p));
        ConvexPolygon grown = ConvexPolygon::hull_of(next);
        if (grown.empty()) {
            // Collinear or single-point so far; keep the extreme points only.
            double spread = 0.0;
            for (Vec2 p : next)
                for (Vec2 q : seed) spread = std::max(spread, distance(p, q));
            if (spread <= opt.tol) throw DomainError("attractor not full-dimensional");
            std::sort(next.begin(), next.end(),
                      [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
            if (next.size() > 2) next = {next.front(), next.back()};
            if (seed.size() == next.size() && distance(seed.front(), next.front()) <= opt.tol &&
                distance(seed.back(), next.back()) <= opt.tol)
                throw DomainError("attractor not full-dimensional");
            seed = next;
            continue;
        }
        gap = hull.empty() ? std::numeric_limits<double>::infinity() : hausdorff_distance(hull, grown);
        hull = grown;
        seed = hull.vertices();
        if (gap <= opt.tol) break;
    }
    if (hull.empty()) throw DomainError("attractor not full-dimensional");
    if (gap > opt.tol)
        throw DomainError("hull iteration did not converge; last Hausdorff gap " + std::to_string(gap));

    // Snap to pre-periodic points Phi_u(fix Phi_v).
    std::vector<std::vector<int>> words;
    words_up_to(system.size(), opt.snap_word_length, words);
    std::vector<Vec2> candidates;
    for (const auto& v : words) {
        if (v.empty()) continue;
        const Vec2 f = system.word_map(v).fixed_point();
        for (const auto& u : words) candidates.push_back(system.word_map(u).apply(f));
    }
    const double scale = diameter_hint(hull.vertices());
    std::vector<Vec2> snapped;
    for (Vec2 p : hull.vertices()) {
        Vec2 best = p;
        double bd = opt.snap_tol * std::max(scale, 1.0);
        for (Vec2 c : candidates)
            if (const double d = distance(p, c); d <= bd) {
                bd = d;
                best = c;
            }
        snapped.push_back(best);
    }
    return ConvexPolygon::hull_of(snapped);
}

Interval attractor_interval(const SelfSimilarSystem& system) {
    if (system.dimension() != 1) throw DomainError("attractor_interval requires a 1-D system");
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& m : system.maps()) {
        const double f = m.fixed_point().x;
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    for (int it = 0; it < 10000; ++it) {
        double nlo = lo, nhi = hi;
        for (const auto& m : system.maps()) {
            const double a = m.apply({lo, 0.0}).x, b = m.apply({hi, 0.0}).x;
            nlo = std::min({nlo, a, b});
            nhi = std::max({nhi, a, b});
        }
        const bool done = nlo == lo && nhi == hi;
        lo = nlo;
        hi = nhi;
        if (done) break;
    }
    return {lo, hi};
}

}  // namespace fractube
