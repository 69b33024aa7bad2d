#include "kamprop/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace kamprop {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

int parse_int(std::string_view text, std::string_view what) {
    text = trim(text);
    int value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

double parse_real(std::string_view text, std::string_view what) {
    text = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size() ||
        !std::isfinite(value)) {
        throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> parse_grid(std::string_view text, GridSpacing spacing) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty value list");
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError("range must be lo:hi:count");
        const double lo = parse_real(parts[0], "range start");
        const double hi = parse_real(parts[1], "range end");
        const int count = parse_int(parts[2], "range count");
        if (count < 1) throw ConfigError("range count must be >= 1");
        if (hi < lo) throw ConfigError("range end must not precede start");
        if (spacing == GridSpacing::logarithmic && !(lo > 0.0)) {
            throw ConfigError("log-spaced range needs lo > 0");
        }
        if (count == 1) {
            if (lo != hi) throw ConfigError("a one-point range needs lo == hi");
            return {lo};
        }
        std::vector<double> out(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const double f = static_cast<double>(k) / (count - 1);
            out[static_cast<std::size_t>(k)] = spacing == GridSpacing::logarithmic
                                                   ? lo * std::pow(hi / lo, f)
                                                   : lo + (hi - lo) * f;
        }
        out.back() = hi;
        return out;
    }
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_real(part, "list entry"));
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    text = trim(text);
    if (text.empty()) throw ConfigError("empty integer list");
    std::vector<int> out;
    for (auto part : split(text, ',')) {
        const auto dash = part.find('-', 1);
        if (dash != std::string_view::npos) {
            const int lo = parse_int(part.substr(0, dash), "n range");
            const int hi = parse_int(part.substr(dash + 1), "n range");
            if (hi < lo) throw ConfigError("n range end precedes start");
            for (int k = lo; k <= hi; ++k) out.push_back(k);
        } else {
            out.push_back(parse_int(part, "n"));
        }
    }
    return out;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "area_over_pi") {
        config.area_over_pi = parse_real(value, key);
    } else if (key == "eps") {
        config.epsilon_values = parse_grid(value, GridSpacing::logarithmic);
    } else if (key == "n") {
        config.n_values = parse_int_list(value);
    } else if (key == "areas") {
        config.area_over_pi_values = parse_grid(value, GridSpacing::linear);
    } else if (key == "oracle_tol") {
        config.oracle_rel_tol = parse_real(value, key);
    } else if (key == "hierarchy_tol") {
        config.hierarchy_tol = parse_real(value, key);
    } else if (key == "out") {
        config.output_path = std::string(value);
    } else if (key == "threads") {
        config.threads = parse_int(value, key);
    } else if (key == "timing") {
        config.record_timing = parse_int(value, key) != 0;
    } else {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

void load_config_file(const std::filesystem::path& path, ExperimentConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path.string());
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        try {
            apply_setting(config, view.substr(0, eq), view.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

}  // namespace kamprop
