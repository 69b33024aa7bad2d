// kamprop: KAM propagator sweeps for a sine-squared pulse driving a two-level system.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical-budget violation.

#include "kamprop/config.hpp"
#include "kamprop/experiments.hpp"
#include "kamprop/kam_su2.hpp"
#include "kamprop/ode.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Overrides {
    std::optional<std::string> config_path;
    std::optional<std::string> area_over_pi;
    std::optional<std::string> eps;
    std::optional<std::string> n;
    std::optional<std::string> areas;
    std::optional<std::string> oracle_tol;
    std::optional<std::string> hierarchy_tol;
    std::optional<std::string> out;
    std::optional<std::string> threads;
    bool timing{false};
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "key=value file overriding the defaults");
    cmd->add_option("--area-over-pi", o.area_over_pi, "pulse area A/pi");
    cmd->add_option("--eps", o.eps, "epsilon values: a,b,c or lo:hi:count (log spaced)");
    cmd->add_option("--n", o.n, "KAM iteration counts: a,b,c or lo-hi");
    cmd->add_option("--oracle-tol", o.oracle_tol, "relative tolerance of the reference integrator");
    cmd->add_option("--hierarchy-tol", o.hierarchy_tol, "relative tolerance of the KAM hierarchy");
    cmd->add_option("--out", o.out, "output CSV path (default: stdout)");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_flag("--timing", o.timing, "record wall_time_ms (output no longer byte-reproducible)");
}

// Defaults, then the config file, then explicit flags.
kamprop::ExperimentConfig resolve(kamprop::SweepKind kind, const Overrides& o) {
    kamprop::ExperimentConfig c = kamprop::ExperimentConfig::defaults(kind);
    if (o.config_path) kamprop::load_config_file(*o.config_path, c);
    const auto set = [&](const char* key, const std::optional<std::string>& v) {
        if (v) kamprop::apply_setting(c, key, *v);
    };
    set("area_over_pi", o.area_over_pi);
    set("eps", o.eps);
    set("n", o.n);
    set("areas", o.areas);
    set("oracle_tol", o.oracle_tol);
    set("hierarchy_tol", o.hierarchy_tol);
    set("out", o.out);
    set("threads", o.threads);
    if (o.timing) c.record_timing = true;
    return c;
}

template <class Fn>
int with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return std::cout ? 0 : 1;
    }
    std::ofstream file(path);
    if (!file) {
        throw kamprop::ConfigError("cannot open output file: " + path);
    }
    fn(file);
    file.close();
    if (!file) {
        throw std::runtime_error("failed writing " + path);
    }
    return 0;
}

int run_sweep_command(kamprop::SweepKind kind, const Overrides& o) {
    const kamprop::ExperimentConfig config = resolve(kind, o);
    const auto rows = kamprop::run_sweep(kind, config);
    with_output(config.output_path,
                [&](std::ostream& out) { kamprop::write_csv(out, kind, config, rows); });
    const auto flagged = std::count_if(rows.begin(), rows.end(), [](const auto& r) { return r.flagged; });
    if (flagged > 0) {
        std::cerr << "kamprop: " << flagged << " row(s) exceed the oracle unitarity budget\n";
        return kExitNumerical;
    }
    return 0;
}

// Single point: the propagator entries for each n, with the error and probabilities.
int run_propagate(const Overrides& o) {
    kamprop::ExperimentConfig config = resolve(kamprop::SweepKind::epsilon, o);
    if (!o.eps && !(o.config_path)) config.epsilon_values = {1.0};
    if (!o.n && !(o.config_path)) config.n_values = {5};
    config.validate(kamprop::SweepKind::epsilon);
    if (config.epsilon_values.size() != 1) {
        throw kamprop::ConfigError("propagate takes a single --eps value");
    }
    const double eps = config.epsilon_values.front();
    const kamprop::PulseShape pulse = kamprop::experiment_pulse(config.area_over_pi);
    const auto ref = kamprop::reference_state(eps, pulse, config.oracle_rel_tol);
    const int depth = *std::max_element(config.n_values.begin(), config.n_values.end());
    const kamprop::KamHierarchy hier = kamprop::build_hierarchy(
        {eps, depth, pulse, config.hierarchy_tol, config.hierarchy_tol * 1e-3});

    using kamprop::format_double;
    with_output(config.output_path, [&](std::ostream& out) {
        out << "# propagate: epsilon=" << format_double(eps) << ' ' << config.describe() << '\n';
        out << "n,u00_re,u00_im,u01_re,u01_im,u10_re,u10_im,u11_re,u11_im,delta_n,p_numeric,p_kam,"
               "oracle_drift\n";
        for (int n : config.n_values) {
            const kamprop::Unitary2 u =
                kamprop::propagator_lab(hier, pulse.t_end(), pulse.t_start(), n);
            const kamprop::StateVector2 psi = u * kamprop::StateVector2::lower();
            out << n;
            for (int r = 0; r < 2; ++r) {
                for (int c = 0; c < 2; ++c) {
                    out << ',' << format_double(u(r, c).real()) << ',' << format_double(u(r, c).imag());
                }
            }
            out << ',' << format_double(kamprop::delta_n(ref.state, psi)) << ','
                << format_double(ref.state.p_plus()) << ',' << format_double(psi.p_plus()) << ','
                << format_double(ref.drift) << '\n';
        }
    });
    return ref.drift > 10.0 * config.oracle_rel_tol ? kExitNumerical : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KAM superconvergent propagators for pulse-driven two-level systems"};
    app.require_subcommand(1);

    Overrides eps_o, iters_o, area_o, prop_o;
    auto* eps_cmd = app.add_subcommand("sweep-eps", "fixed A, sweep epsilon, every n");
    add_common_flags(eps_cmd, eps_o);
    auto* iters_cmd = app.add_subcommand("sweep-iters", "fixed A, a few epsilon, n = 0..6");
    add_common_flags(iters_cmd, iters_o);
    auto* area_cmd = app.add_subcommand("sweep-area", "fixed epsilon, sweep A/pi");
    add_common_flags(area_cmd, area_o);
    area_cmd->add_option("--areas", area_o.areas, "A/pi values: a,b,c or lo:hi:count (linear)");
    auto* prop_cmd = app.add_subcommand("propagate", "single point: U^(n)(t_f, t_i) entries and errors");
    add_common_flags(prop_cmd, prop_o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*eps_cmd) return run_sweep_command(kamprop::SweepKind::epsilon, eps_o);
        if (*iters_cmd) return run_sweep_command(kamprop::SweepKind::iterations, iters_o);
        if (*area_cmd) return run_sweep_command(kamprop::SweepKind::area, area_o);
        if (*prop_cmd) return run_propagate(prop_o);
    } catch (const kamprop::ConfigError& e) {
        std::cerr << "kamprop: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const kamprop::IntegrationError& e) {
        std::cerr << "kamprop: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "kamprop: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
