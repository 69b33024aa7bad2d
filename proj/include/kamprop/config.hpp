// config.hpp: parsing of value lists, grids and key=value config files.

#pragma once

#include "kamprop/experiments.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace kamprop {

enum class GridSpacing { linear, logarithmic };

/// "a,b,c" or "lo:hi:count". Ranges are log-spaced for GridSpacing::logarithmic
/// (requires 0 < lo) and evenly spaced otherwise. Throws ConfigError.
std::vector<double> parse_grid(std::string_view text, GridSpacing spacing);

/// "0,1,2" or "lo-hi" (inclusive). Throws ConfigError.
std::vector<int> parse_int_list(std::string_view text);

double parse_real(std::string_view text, std::string_view what);

/// Applies one setting. Keys: area_over_pi, eps, n, areas, oracle_tol,
/// hierarchy_tol, out, threads, timing. Throws ConfigError on unknown keys or
/// malformed values.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value);

/// Reads "key = value" lines ('#' comments, blank lines ignored) into config.
void load_config_file(const std::filesystem::path& path, ExperimentConfig& config);

}  // namespace kamprop
