// fractube: tube formulas for self-similar strings and tilings.
#include <cstdlib>
#include <iostream>

#include <omp.h>

#include "CLI11.hpp"
#include "fractube/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kTolerance = 1, kConfig = 2, kGuard = 3 };

void apply_thread_cap() {
    if (const char* env = std::getenv("FRACTUBE_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && n > 0) omp_set_num_threads(static_cast<int>(n));
        else std::cerr << "warning: ignoring FRACTUBE_THREADS=" << env << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Residue tube formulas for self-similar fractal strings and tilings"};
    app.require_subcommand(1);

    std::string config_path;
    fractube::CommandOptions options;
    long n_max = 0;
    int depth = 0, grid = 0;
    double tolerance = 0.0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "system config file")->required();
        sub->add_option("--out", options.out_dir, "output directory")->capture_default_str();
        sub->add_option("--nmax", n_max, "lattice truncation |n| <= N")->check(CLI::NonNegativeNumber);
        sub->add_option("--depth", depth, "render depth")->check(CLI::NonNegativeNumber);
        sub->add_option("--tolerance", tolerance, "relative error tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--grid", grid, "number of eps points")->check(CLI::PositiveNumber);
    };
    using Runner = int (*)(const fractube::SystemConfig&, const fractube::CommandOptions&, std::ostream&);
    const std::pair<const char*, Runner> commands[] = {
        {"dimensions", fractube::run_dimensions},
        {"tube", fractube::run_tube},
        {"render", fractube::run_render},
        {"decomposition", fractube::run_decomposition},
        {"all", fractube::run_all},
    };
    const char* help[] = {
        "Moran dimension, lattice classification and complex dimensions",
        "residue tube formula vs. exact oracle, written as CSV",
        "SVG of the self-similar tiling",
        "exterior neighborhood decomposition check on a raster",
        "every applicable command",
    };
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        subs.push_back(app.add_subcommand(commands[i].first, help[i]));
        add_common(subs.back());
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    for (auto* sub : subs) {
        if (sub->count("--nmax")) options.n_max = n_max;
        if (sub->count("--depth")) options.depth = depth;
        if (sub->count("--tolerance")) options.tolerance = tolerance;
        if (sub->count("--grid")) options.grid = grid;
    }
    apply_thread_cap();

    try {
        const auto config = fractube::load_config(config_path);
        for (std::size_t i = 0; i < subs.size(); ++i)
            if (subs[i]->parsed()) return commands[i].second(config, options, std::cout) == 0 ? kOk : kTolerance;
    } catch (const fractube::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfig;
    } catch (const fractube::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfig;
    } catch (const fractube::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kGuard;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kGuard;
    }
    return kOk;
}
