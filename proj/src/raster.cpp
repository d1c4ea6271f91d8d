#include "fractube/raster.hpp"

#include <algorithm>
#include <limits>

namespace fractube {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One-dimensional pass over f[0..n) with stride; v and z are scratch.
void envelope_1d(double* f, std::size_t stride, int n, std::vector<double>& out, std::vector<int>& v,
                 std::vector<double>& z) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        const double fq = f[q * stride];
        if (fq == kInf) continue;
        while (k >= 0) {
            const int p = v[k];
            const double s = ((fq + double(q) * q) - (f[p * stride] + double(p) * p)) / (2.0 * (q - p));
            if (s <= z[k]) {
                --k;
                continue;
            }
            z[k + 1] = s;
            break;
        }
        if (k < 0) z[0] = -kInf;
        v[++k] = q;
        z[k + 1] = kInf;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) out[q] = kInf;
    } else {
        int j = 0;
        for (int q = 0; q < n; ++q) {
            while (z[j + 1] < q) ++j;
            const double d = q - v[j];
            out[q] = d * d + f[v[j] * stride];
        }
    }
    for (int q = 0; q < n; ++q) f[q * stride] = out[q];
}

std::vector<double> initial_field(std::span<const std::uint8_t> seeds, int width, int height) {
    if (width <= 0 || height <= 0 || seeds.size() != static_cast<std::size_t>(width) * height)
        throw DomainError("distance transform grid size mismatch");
    std::vector<double> f(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) f[i] = seeds[i] ? 0.0 : kInf;
    return f;
}

std::vector<double> transform(std::span<const std::uint8_t> seeds, int width, int height, bool parallel) {
    auto f = initial_field(seeds, width, height);
    const int longest = std::max(width, height);
#pragma omp parallel if (parallel)
    {
        std::vector<double> out(longest), z(longest + 1);
        std::vector<int> v(longest);
#pragma omp for schedule(static)
        for (int x = 0; x < width; ++x) envelope_1d(f.data() + x, width, height, out, v, z);
#pragma omp for schedule(static)
        for (int y = 0; y < height; ++y) envelope_1d(f.data() + static_cast<std::size_t>(y) * width, 1, width, out, v, z);
    }
    return f;
}

}  // namespace

std::vector<double> squared_distance_transform(std::span<const std::uint8_t> seeds, int width, int height) {
    return transform(seeds, width, height, true);
}

namespace serial {
std::vector<double> squared_distance_transform(std::span<const std::uint8_t> seeds, int width, int height) {
    return transform(seeds, width, height, false);
}
}  // namespace serial

DecompositionReport exterior_decomposition_check(const SelfSimilarTiling& tiling, std::span<const double> eps,
                                                 int cells, double tolerance) {
    if (eps.empty()) throw DomainError("empty eps grid");
    if (cells < 16) throw DomainError("raster needs at least 16 cells per side");
    const auto& system = tiling.system();
    const ConvexPolygon& hull = tiling.hull();
    const double eps_max = *std::max_element(eps.begin(), eps.end());
    const double eps_min = *std::min_element(eps.begin(), eps.end());
    if (!(eps_min > 0.0)) throw DomainError("eps must be positive");

    Vec2 lo = hull.vertices().front(), hi = lo;
    for (Vec2 v : hull.vertices()) {
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
    }
    const double pad = 1.05 * eps_max;
    const double span = std::max(hi.x - lo.x, hi.y - lo.y) + 2.0 * pad;
    const double h = span / cells;
    if (h > eps_min / 10.0) throw DomainError("resolution: cell size exceeds eps / 10");
    const Vec2 origin{lo.x - pad, lo.y - pad};
    const int nx = cells, ny = cells;

    // Every cloud point lies on F and every point of F is within h / 2 of one.
    const auto cloud = attractor_cloud(system, hull, 0.5 * h);
    std::vector<std::uint8_t> seeds(static_cast<std::size_t>(nx) * ny, 0);
    for (Vec2 p : cloud.points) {
        const int cx = std::clamp(static_cast<int>((p.x - origin.x) / h), 0, nx - 1);
        const int cy = std::clamp(static_cast<int>((p.y - origin.y) / h), 0, ny - 1);
        seeds[static_cast<std::size_t>(cy) * nx + cx] = 1;
    }
    const auto dist2 = squared_distance_transform(seeds, nx, ny);

    // Center-to-seed-center distance differs from d(center, F) by at most
    // half a cell diagonal plus the cloud resolution.
    const double band = 0.5 * std::sqrt(2.0) * h + 0.5 * h + 1e-3 * h;
    const double tol = 1e-3 * h;

    DecompositionReport report;
    report.cells = cells;
    report.cell_size = h;
    report.tolerance = tolerance;
    report.holds = true;
    for (double e : eps) {
        DecompositionRow row;
        row.eps = e;
        std::size_t inside = 0, refined = 0;
        const long total = static_cast<long>(nx) * ny;
#pragma omp parallel for schedule(dynamic, 4096) reduction(+ : inside, refined)
        for (long i = 0; i < total; ++i) {
            const double d = std::sqrt(dist2[i]) * h;
            if (d < e - band) {
                ++inside;
            } else if (d <= e + band) {
                ++refined;
                const Vec2 c{origin.x + (static_cast<double>(i % nx) + 0.5) * h,
                             origin.y + (static_cast<double>(i / nx) + 0.5) * h};
                if (attractor_within(system, hull, c, e, tol)) ++inside;
            }
        }
        row.raster_area = static_cast<double>(inside) * h * h;
        row.refined_cells = refined;
        row.predicted = tiling_tube_oracle(tiling, e) + steiner_outer_tube(hull, e, true);
        row.relative_gap = std::abs(row.raster_area - row.predicted) / row.predicted;
        if (row.relative_gap > tolerance) report.holds = false;
        report.rows.push_back(row);
    }
    report.boundary = check_hull_boundary_condition(system);
    return report;
}

}  // namespace fractube
