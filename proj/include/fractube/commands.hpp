#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fractube/config.hpp"

namespace fractube {

/// Command-line overrides; unset fields fall back to the config.
struct CommandOptions {
    std::string out_dir = "out";
    std::optional<long> n_max;
    std::optional<int> depth;
    std::optional<double> tolerance;
    std::optional<int> grid;
};

/// Each command writes its artifacts under out_dir, prints a report to `log`
/// and returns 0 on success or 1 when a tolerance check fails. Errors
/// propagate as exceptions.
int run_dimensions(const SystemConfig& config, const CommandOptions& options, std::ostream& log);
int run_tube(const SystemConfig& config, const CommandOptions& options, std::ostream& log);
int run_render(const SystemConfig& config, const CommandOptions& options, std::ostream& log);
int run_decomposition(const SystemConfig& config, const CommandOptions& options, std::ostream& log);
/// dimensions + tube, and render + decomposition for planar systems.
int run_all(const SystemConfig& config, const CommandOptions& options, std::ostream& log);

/// Artifact stem: the config label, or "system" when unlabeled.
std::string artifact_stem(const SystemConfig& config);

}  // namespace fractube
