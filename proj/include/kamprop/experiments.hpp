// experiments.hpp: reference/KAM final states, the error metric, and the
// parameter sweeps written as CSV.

#pragma once

#include "kamprop/pulse.hpp"
#include "kamprop/su2.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kamprop {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class SweepKind { epsilon, iterations, area };

std::string_view to_string(SweepKind kind);

struct ExperimentConfig {
    double area_over_pi{0.5};
    std::vector<double> epsilon_values;
    std::vector<int> n_values;
    /// A/pi grid of the area sweep (unused by the other sweeps).
    std::vector<double> area_over_pi_values;
    double oracle_rel_tol{1e-10};
    double hierarchy_tol{1e-9};
    /// Empty writes to stdout.
    std::string output_path;
    int threads{1};
    /// When false, wall_time_ms is written as 0 so output is byte-reproducible.
    bool record_timing{false};

    /// Default grids for each sweep.
    static ExperimentConfig defaults(SweepKind kind);
    /// Throws ConfigError on empty grids, negative epsilon or area, n outside
    /// [0, 12], tolerances outside (0, 1e-2], or threads < 1.
    void validate(SweepKind kind) const;
    /// Single-line key=value rendering of every field.
    std::string describe() const;
};

struct SweepRecord {
    double epsilon{0.0};
    double area_over_pi{0.0};
    int n{0};
    double delta_n{0.0};
    double p_numeric{0.0};
    double p_kam{0.0};
    double oracle_drift{0.0};
    double wall_time_ms{0.0};
    /// oracle_drift > 10 * oracle_rel_tol
    bool flagged{false};
};

/// Sine-squared pulse of area A = area_over_pi * pi, or the null pulse on
/// [0, 1] when the area is zero.
PulseShape experiment_pulse(double area_over_pi);

/// i dU/dt = [Omega(t) sigma_1 + eps sigma_3] U from t_i to t_f applied to |-1>.
struct ReferenceResult {
    StateVector2 state;
    double drift{0.0};
};
ReferenceResult reference_state(double epsilon, const PulseShape& pulse, double oracle_tol);

/// U^(n)(t_f, t_i) |-1> from the KAM hierarchy with n levels.
StateVector2 kam_state(double epsilon, const PulseShape& pulse, int n, double tol);

/// [ sum_eta |<eta|a> - <eta|b>|^2 ]^(1/2); phase sensitive.
double delta_n(const StateVector2& psi_ref, const StateVector2& psi_kam);

/// Records for one (eps, A) point and every n in n_values; one oracle run and
/// one hierarchy of depth max(n_values).
std::vector<SweepRecord> evaluate_point(double epsilon, double area_over_pi,
                                        const std::vector<int>& n_values,
                                        const ExperimentConfig& config);

/// Runs the sweep over the config grids; rows sorted by (n, epsilon, area).
/// Points run on config.threads workers; output order does not depend on it.
std::vector<SweepRecord> run_sweep(SweepKind kind, const ExperimentConfig& config);
inline std::vector<SweepRecord> sweep_epsilon(const ExperimentConfig& c) { return run_sweep(SweepKind::epsilon, c); }
inline std::vector<SweepRecord> sweep_iterations(const ExperimentConfig& c) { return run_sweep(SweepKind::iterations, c); }
inline std::vector<SweepRecord> sweep_area(const ExperimentConfig& c) { return run_sweep(SweepKind::area, c); }

inline constexpr std::string_view kCsvHeader =
    "epsilon,area_over_pi,n,delta_n,p_numeric,p_kam,oracle_drift,wall_time_ms";

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Writes the column-description comment, the config comment, the header and
/// one line per record.
void write_csv(std::ostream& out, SweepKind kind, const ExperimentConfig& config,
               const std::vector<SweepRecord>& records);

}  // namespace kamprop
