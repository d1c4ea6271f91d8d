// Parallel kernels against their serial references: wall time and agreement.
#include <chrono>
#include <cstdio>
#include <random>

#include <omp.h>

#include "fractube/raster.hpp"
#include "fractube/tube.hpp"

using namespace fractube;

namespace {

template <class F>
double seconds(F&& f, int repeats = 3) {
    double best = 1e300;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
}

void report(const char* name, double parallel, double serial, double max_diff) {
    std::printf("%-28s parallel %9.4f s  serial %9.4f s  speedup %5.2fx  max|diff| %.3g\n", name, parallel, serial,
                serial / parallel, max_diff);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", omp_get_max_threads());

    {
        const auto cantor = FractalString::self_similar({1.0 / 3.0, 1.0 / 3.0}, 1.0 / 6.0);
        const auto dims = tube_dimensions(cantor.generator_ratios());
        const auto eps = log_grid(1e-4, 1.0 / 6.0, 400);
        TubeEvaluation a, b;
        const double tp = seconds([&] { a = string_tube_formula(cantor, dims, eps, 2000); });
        const double ts = seconds([&] { b = serial::string_tube_formula(cantor, dims, eps, 2000); });
        double diff = 0.0;
        for (std::size_t i = 0; i < eps.size(); ++i) diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        report("string tube, 400 eps", tp, ts, diff);
    }
    {
        const std::vector<Similitude> maps{
            {0.5, 0.0, false, {0.0, 0.0}}, {0.5, 0.0, false, {0.5, 0.0}}, {0.5, 0.0, false, {0.25, std::sqrt(3.0) / 4.0}}};
        const auto tiling = build_tiling(SelfSimilarSystem(2, maps));
        const auto dims = tube_dimensions(tiling.ratios());
        const auto eps = log_grid(1e-4, tiling.largest_inradius(), 400);
        TubeEvaluation a, b;
        const double tp = seconds([&] { a = tiling_tube_formula(tiling, dims, eps, 2000); });
        const double ts = seconds([&] { b = serial::tiling_tube_formula(tiling, dims, eps, 2000); });
        double diff = 0.0;
        for (std::size_t i = 0; i < eps.size(); ++i) diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        report("gasket tube, 400 eps", tp, ts, diff);
    }
    {
        const int n = 2000;
        std::vector<std::uint8_t> seeds(static_cast<std::size_t>(n) * n, 0);
        std::mt19937_64 rng(7);
        std::uniform_int_distribution<std::size_t> pick(0, seeds.size() - 1);
        for (int i = 0; i < 5000; ++i) seeds[pick(rng)] = 1;
        std::vector<double> a, b;
        const double tp = seconds([&] { a = squared_distance_transform(seeds, n, n); });
        const double ts = seconds([&] { b = serial::squared_distance_transform(seeds, n, n); });
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        report("distance transform 2000^2", tp, ts, diff);
    }
    return 0;
}
