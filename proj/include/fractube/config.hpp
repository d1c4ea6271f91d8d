#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fractube/geom2d.hpp"
#include "fractube/spectrum.hpp"

namespace fractube {

struct MapConfig {
    double ratio = 0.5;
    double rotation_deg = 0.0;
    bool reflect = false;
    std::vector<double> translation;  // one entry per coordinate

    bool operator==(const MapConfig&) const = default;
};

struct WindowConfig {
    std::optional<double> sigma_min;
    std::optional<double> t_max;

    bool operator==(const WindowConfig&) const = default;
};

struct EvaluationConfig {
    long n_max = 2000;
    std::optional<double> eps_min;  // default 1e-4
    std::optional<double> eps_max;  // default: validity limit of the expansion
    int grid_points = 50;
    int raster_cells = 2000;
    int depth = 6;                // render depth
    double tolerance = 1e-3;      // tube formula vs. oracle
    double raster_tolerance = 0.01;

    bool operator==(const EvaluationConfig&) const = default;
};

/// A self-similar system plus evaluation settings. Either explicit [[map]]
/// entries or `koch_xi` (the two-map Koch family z -> xi conj(z),
/// z -> (1 - xi) conj(z) + xi).
struct SystemConfig {
    std::string label;
    int dimension = 1;
    std::vector<MapConfig> maps;
    std::optional<cplx> koch_xi;
    WindowConfig window;
    EvaluationConfig evaluation;

    bool operator==(const SystemConfig&) const = default;

    SelfSimilarSystem system() const;
    Window spectral_window() const;
};

/// Strict parser: a TOML subset (key = value, [table], [[map]], # comments).
/// Numeric fields also accept a quoted arithmetic expression such as
/// "1/sqrt(3)". Unknown keys, duplicates and type mismatches raise
/// ConfigError with "source:line:column: message".
SystemConfig parse_config(std::string_view text, const std::string& source = "<config>");
SystemConfig load_config(const std::string& path);
std::string serialize_config(const SystemConfig& config);

/// Evaluates + - * / ^, unary minus, parentheses, pi, e, sqrt, log, exp,
/// sin, cos, tan, atan2. Throws ConfigError with the column of the failure.
double evaluate_expression(std::string_view text);

}  // namespace fractube
