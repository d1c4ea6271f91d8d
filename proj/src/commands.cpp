#include "fractube/commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "fractube/raster.hpp"
#include "fractube/tube.hpp"

namespace fractube {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string short_fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

std::filesystem::path artifact(const SystemConfig& config, const CommandOptions& options, const std::string& suffix) {
    std::filesystem::create_directories(options.out_dir);
    return std::filesystem::path(options.out_dir) / (artifact_stem(config) + suffix);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::vector<double> eps_grid(const SystemConfig& config, const CommandOptions& options, double valid_up_to) {
    const auto& ev = config.evaluation;
    const double hi = ev.eps_max.value_or(valid_up_to);
    const double lo = ev.eps_min.value_or(std::min(1e-4, hi));
    return log_grid(lo, hi, options.grid.value_or(ev.grid_points));
}

}  // namespace

std::string artifact_stem(const SystemConfig& config) {
    return config.label.empty() ? std::string("system") : config.label;
}

int run_dimensions(const SystemConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto system = config.system();
    const auto ratios = system.ratios();
    const auto dims = complex_dimensions(ratios, config.spectral_window());
    log << "[dimensions] " << artifact_stem(config) << "\n";
    log << "  D = " << fmt(dims.dimension) << "\n";
    std::string csv = "kind,re,im,residue_re,residue_im\n";
    if (dims.kind == SpectrumKind::lattice) {
        log << "  lattice: base r = " << fmt(dims.lattice.base) << ", exponents =";
        for (int k : dims.lattice.exponents) log << " " << k;
        log << "\n  period p = " << fmt(dims.period) << "\n";
        log << "  lines (Re omega, Im offset, residue):\n";
        for (const auto& line : dims.lines) {
            log << "    " << short_fmt(line.real_part) << "  " << short_fmt(line.im_offset) << "  "
                << short_fmt(line.residue.real()) << (line.residue.imag() < 0 ? " - " : " + ")
                << short_fmt(std::abs(line.residue.imag())) << "i\n";
            csv += "line," + fmt(line.real_part) + "," + fmt(line.im_offset) + "," + fmt(line.residue.real()) + "," +
                   fmt(line.residue.imag()) + "\n";
        }
    } else {
        log << "  nonlattice: window Re >= " << short_fmt(dims.window.sigma_min) << ", |Im| <= "
            << short_fmt(dims.window.t_max) << "\n";
        log << "  roots = " << dims.roots.size() << ", argument-principle census = " << dims.census << "\n";
        for (const auto& r : dims.roots)
            csv += "root," + fmt(r.omega.real()) + "," + fmt(r.omega.imag()) + "," + fmt(r.residue.real()) + "," +
                   fmt(r.residue.imag()) + "\n";
        const std::size_t shown = std::min<std::size_t>(dims.roots.size(), 12);
        log << "  roots with largest real part:\n";
        auto sorted = dims.roots;
        std::stable_sort(sorted.begin(), sorted.end(),
                         [](const auto& a, const auto& b) { return a.omega.real() > b.omega.real(); });
        for (std::size_t i = 0; i < shown; ++i)
            log << "    " << short_fmt(sorted[i].omega.real()) << (sorted[i].omega.imag() < 0 ? " - " : " + ")
                << short_fmt(std::abs(sorted[i].omega.imag())) << "i   residue " << short_fmt(std::abs(sorted[i].residue))
                << "\n";
    }
    const auto path = artifact(config, options, "-dimensions.csv");
    write_file(path, csv);
    log << "  wrote " << path.string() << "\n";
    return 0;
}

int run_tube(const SystemConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto system = config.system();
    const auto ratios = system.ratios();
    const long n_max = options.n_max.value_or(config.evaluation.n_max);
    const double tolerance = options.tolerance.value_or(config.evaluation.tolerance);
    const auto dims = tube_dimensions(ratios, config.spectral_window());

    std::vector<double> eps, oracle;
    TubeEvaluation eval;
    if (system.dimension() == 1) {
        const FractalString string = string_from_system(system);
        eps = eps_grid(config, options, string.largest_inradius());
        eval = string_tube_formula(string, dims, eps, n_max);
        for (double e : eps) oracle.push_back(string_tube_oracle(string, e));
    } else {
        const auto tiling = build_tiling(system);
        double valid = std::numeric_limits<double>::infinity();
        for (const auto& g : tiling.generators()) valid = std::min(valid, g.pieces().front().end);
        eps = eps_grid(config, options, valid);
        eval = tiling_tube_formula(tiling, dims, eps, n_max);
        for (double e : eps) oracle.push_back(tiling_tube_oracle(tiling, e));
    }

    std::string csv = "eps,V_formula,V_oracle,abs_err,rel_err,tail_bound\n";
    double max_rel = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double abs_err = std::abs(eval.values[i] - oracle[i]);
        const double rel_err = abs_err / std::abs(oracle[i]);
        max_rel = std::max(max_rel, rel_err);
        csv += fmt(eps[i]) + "," + fmt(eval.values[i]) + "," + fmt(oracle[i]) + "," + fmt(abs_err) + "," +
               fmt(rel_err) + "," + fmt(eval.tail_bound[i]) + "\n";
    }
    const auto path = artifact(config, options, "-tube.csv");
    write_file(path, csv);

    log << "[tube] " << artifact_stem(config) << "\n";
    log << "  poles = " << eval.poles.size();
    if (dims.kind == SpectrumKind::nonlattice)
        log << " (nonlattice roots; census " << dims.census << ", screen Re = " << short_fmt(dims.window.sigma_min) << ")";
    else
        log << " (n_max = " << n_max << ")";
    log << "\n  non-oscillatory terms:";
    for (std::size_t i = 0; i < eval.polynomial.size(); ++i)
        log << " " << short_fmt(eval.polynomial[i]) << " eps^" << (eval.dimension - static_cast<int>(i));
    log << "\n  eps in [" << short_fmt(eps.front()) << ", " << short_fmt(eps.back()) << "], " << eps.size()
        << " points; formula exact up to eps = " << short_fmt(eval.valid_up_to) << "\n";
    log << "  max |Im V| = " << short_fmt(eval.max_imag) << "\n";
    log << "max_rel_err = " << fmt(max_rel) << "\n";
    log << "  wrote " << path.string() << "\n";
    if (max_rel > tolerance) {
        log << "  FAIL: relative error exceeds tolerance " << short_fmt(tolerance) << "\n";
        return 1;
    }
    return 0;
}

int run_render(const SystemConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto system = config.system();
    if (system.dimension() != 2) throw DomainError("nothing to render: one-dimensional system");
    const int depth = options.depth.value_or(config.evaluation.depth);
    const auto tiling = build_tiling(system);
    const auto path = artifact(config, options, "-tiling.svg");
    write_file(path, export_tiling_svg(tiling, depth));
    log << "[render] " << artifact_stem(config) << ": " << tiling.generators().size() << " generator(s), depth "
        << depth << "\n  wrote " << path.string() << "\n";
    return 0;
}

int run_decomposition(const SystemConfig& config, const CommandOptions& options, std::ostream& log) {
    const auto system = config.system();
    if (system.dimension() != 2) throw DomainError("decomposition check needs a planar system");
    const auto tiling = build_tiling(system);
    const double g = tiling.largest_inradius();
    const auto eps = log_grid(g / 8.0, 1.5 * g, 5);
    const auto report =
        exterior_decomposition_check(tiling, eps, config.evaluation.raster_cells, config.evaluation.raster_tolerance);

    std::string csv = "eps,raster_area,predicted,relative_gap\n";
    log << "[decomposition] " << artifact_stem(config) << " (" << report.cells << "^2 cells, cell "
        << short_fmt(report.cell_size) << ")\n";
    for (const auto& row : report.rows) {
        csv += fmt(row.eps) + "," + fmt(row.raster_area) + "," + fmt(row.predicted) + "," + fmt(row.relative_gap) + "\n";
        log << "  eps " << short_fmt(row.eps) << "  raster " << short_fmt(row.raster_area) << "  predicted "
            << short_fmt(row.predicted) << "  gap " << short_fmt(row.relative_gap) << "\n";
    }
    log << "  hull boundary inside attractor: " << (report.boundary.pass ? "yes" : "no") << " (max distance "
        << short_fmt(report.boundary.max_distance) << ")\n";
    log << "verdict = " << (report.holds ? "HOLDS" : "FAILS") << "\n";
    const auto path = artifact(config, options, "-decomposition.csv");
    write_file(path, csv);
    log << "  wrote " << path.string() << "\n";
    return 0;
}

int run_all(const SystemConfig& config, const CommandOptions& options, std::ostream& log) {
    int code = run_dimensions(config, options, log);
    code = std::max(code, run_tube(config, options, log));
    if (config.dimension == 2) {
        code = std::max(code, run_render(config, options, log));
        code = std::max(code, run_decomposition(config, options, log));
    }
    return code;
}

}  // namespace fractube
