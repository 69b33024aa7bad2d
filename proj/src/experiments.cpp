#include "kamprop/experiments.hpp"

#include "kamprop/kam_su2.hpp"
#include "kamprop/ode.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>
#include <type_traits>

namespace kamprop {

namespace {

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double step = std::log(hi / lo) / (count - 1);
    for (int k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = lo * std::exp(step * k);
    }
    out.back() = hi;
    return out;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (count - 1);
    }
    out.back() = hi;
    return out;
}

template <class T>
std::string join(const std::vector<T>& values) {
    std::string out;
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) out += ';';
        if constexpr (std::is_floating_point_v<T>) {
            out += format_double(values[k]);
        } else {
            out += std::to_string(values[k]);
        }
    }
    return out;
}

bool tol_ok(double tol) { return tol > 0.0 && tol <= 1e-2; }

}  // namespace

std::string_view to_string(SweepKind kind) {
    switch (kind) {
        case SweepKind::epsilon: return "sweep-eps";
        case SweepKind::iterations: return "sweep-iters";
        case SweepKind::area: return "sweep-area";
    }
    return "unknown";
}

ExperimentConfig ExperimentConfig::defaults(SweepKind kind) {
    ExperimentConfig c;
    switch (kind) {
        case SweepKind::epsilon:
            c.area_over_pi = 0.5;
            c.epsilon_values = log_grid(0.05, 5.0, 60);
            c.epsilon_values.insert(c.epsilon_values.begin(), 0.0);
            c.n_values = {0, 1, 2, 3, 4, 5, 6};
            break;
        case SweepKind::iterations:
            c.area_over_pi = 0.5;
            c.epsilon_values = {0.5, 1.0, 2.0};
            c.n_values = {0, 1, 2, 3, 4, 5, 6};
            break;
        case SweepKind::area:
            c.epsilon_values = {1.0};
            c.n_values = {0, 1, 2};
            c.area_over_pi_values = linear_grid(0.05, 2.0, 40);
            break;
    }
    return c;
}

void ExperimentConfig::validate(SweepKind kind) const {
    if (epsilon_values.empty()) throw ConfigError("epsilon grid is empty");
    if (n_values.empty()) throw ConfigError("n list is empty");
    for (double e : epsilon_values) {
        if (!std::isfinite(e) || e < 0.0) throw ConfigError("epsilon values must be finite and >= 0");
    }
    for (int n : n_values) {
        if (n < 0 || n > KamConfig::kMaxLevels) throw ConfigError("n values must lie in [0, 12]");
    }
    if (kind == SweepKind::area) {
        if (area_over_pi_values.empty()) throw ConfigError("area grid is empty");
        for (double a : area_over_pi_values) {
            if (!std::isfinite(a) || a < 0.0) throw ConfigError("areas must be finite and >= 0");
        }
    } else if (!std::isfinite(area_over_pi) || area_over_pi < 0.0) {
        throw ConfigError("area_over_pi must be finite and >= 0");
    }
    if (!tol_ok(oracle_rel_tol)) throw ConfigError("oracle_tol must lie in (0, 1e-2]");
    if (!tol_ok(hierarchy_tol)) throw ConfigError("hierarchy_tol must lie in (0, 1e-2]");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::string ExperimentConfig::describe() const {
    std::ostringstream s;
    s << "area_over_pi=" << format_double(area_over_pi) << " eps=" << join(epsilon_values)
      << " n=" << join(n_values) << " areas=" << join(area_over_pi_values)
      << " oracle_tol=" << format_double(oracle_rel_tol)
      << " hierarchy_tol=" << format_double(hierarchy_tol)
      << " timing=" << (record_timing ? "1" : "0");
    return s.str();
}

PulseShape experiment_pulse(double area_over_pi) {
    if (area_over_pi == 0.0) {
        return PulseShape::null_pulse(0.0, 1.0);
    }
    return PulseShape::sine_squared(area_over_pi * std::numbers::pi);
}

ReferenceResult reference_state(double epsilon, const PulseShape& pulse, double oracle_tol) {
    const HamiltonianFn h = [&](double t) {
        const double omega = pulse.omega(t);
        Eigen::Matrix2cd m;
        m << epsilon, omega, omega, -epsilon;
        return Eigen::MatrixXcd(m);
    };
    const UnitaryPropagation prop =
        propagate_unitary(h, 2, pulse.t_start(), pulse.t_end(), oracle_tol, oracle_tol * 1e-2);
    // column of |-1>
    return {StateVector2{prop.u(0, 1), prop.u(1, 1)}, prop.drift};
}

StateVector2 kam_state(double epsilon, const PulseShape& pulse, int n, double tol) {
    KamConfig config{epsilon, n, pulse, tol, tol * 1e-3};
    const KamHierarchy hier = build_hierarchy(config);
    return propagator_lab(hier, pulse.t_end(), pulse.t_start()) * StateVector2::lower();
}

double delta_n(const StateVector2& psi_ref, const StateVector2& psi_kam) {
    return std::sqrt(std::norm(psi_ref.plus - psi_kam.plus) +
                     std::norm(psi_ref.minus - psi_kam.minus));
}

std::vector<SweepRecord> evaluate_point(double epsilon, double area_over_pi,
                                        const std::vector<int>& n_values,
                                        const ExperimentConfig& config) {
    using clock = std::chrono::steady_clock;
    const PulseShape pulse = experiment_pulse(area_over_pi);

    const auto start = clock::now();
    const ReferenceResult ref = reference_state(epsilon, pulse, config.oracle_rel_tol);
    const int depth = *std::max_element(n_values.begin(), n_values.end());
    const KamHierarchy hier = build_hierarchy(
        KamConfig{epsilon, depth, pulse, config.hierarchy_tol, config.hierarchy_tol * 1e-3});
    const double shared_ms = std::chrono::duration<double, std::milli>(clock::now() - start).count();

    std::vector<SweepRecord> out;
    out.reserve(n_values.size());
    for (int n : n_values) {
        const auto t0 = clock::now();
        const StateVector2 psi =
            propagator_lab(hier, pulse.t_end(), pulse.t_start(), n) * StateVector2::lower();
        const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
        SweepRecord r;
        r.epsilon = epsilon;
        r.area_over_pi = area_over_pi;
        r.n = n;
        r.delta_n = delta_n(ref.state, psi);
        r.p_numeric = ref.state.p_plus();
        r.p_kam = psi.p_plus();
        r.oracle_drift = ref.drift;
        r.wall_time_ms = config.record_timing ? shared_ms + ms : 0.0;
        r.flagged = ref.drift > 10.0 * config.oracle_rel_tol;
        out.push_back(r);
    }
    return out;
}

std::vector<SweepRecord> run_sweep(SweepKind kind, const ExperimentConfig& config) {
    config.validate(kind);

    struct Point {
        double epsilon;
        double area_over_pi;
    };
    std::vector<Point> points;
    const std::vector<double> areas =
        kind == SweepKind::area ? config.area_over_pi_values : std::vector<double>{config.area_over_pi};
    for (double a : areas) {
        for (double e : config.epsilon_values) {
            points.push_back({e, a});
        }
    }

    std::vector<std::vector<SweepRecord>> results(points.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                results[i] = evaluate_point(points[i].epsilon, points[i].area_over_pi,
                                            config.n_values, config);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), points.size());
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<SweepRecord> rows;
    for (auto& r : results) rows.insert(rows.end(), r.begin(), r.end());
    std::stable_sort(rows.begin(), rows.end(), [](const SweepRecord& a, const SweepRecord& b) {
        if (a.n != b.n) return a.n < b.n;
        if (a.epsilon != b.epsilon) return a.epsilon < b.epsilon;
        return a.area_over_pi < b.area_over_pi;
    });
    return rows;
}

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, SweepKind kind, const ExperimentConfig& config,
               const std::vector<SweepRecord>& records) {
    out << "# columns: epsilon=omega*tau; area_over_pi=A/pi; n=KAM iterations; "
           "delta_n=final-state error vs reference integrator; p_numeric, p_kam=|<+1|psi(t_f)>|^2; "
           "oracle_drift=||U^dagger U - I||_F of the reference; wall_time_ms=0 unless timing=1\n";
    out << "# config: kind=" << to_string(kind) << ' ' << config.describe() << '\n';
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << format_double(r.epsilon) << ',' << format_double(r.area_over_pi) << ',' << r.n << ','
            << format_double(r.delta_n) << ',' << format_double(r.p_numeric) << ','
            << format_double(r.p_kam) << ',' << format_double(r.oracle_drift) << ','
            << format_double(r.wall_time_ms) << '\n';
    }
}

}  // namespace kamprop
