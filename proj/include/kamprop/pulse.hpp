// pulse.hpp: pulse envelopes Omega(t) and cumulative areas A(t), dimensionless time.

#pragma once

#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace kamprop {

/// Envelope Omega(t) with support [t_start, t_end] and cumulative area
/// A(t) = int_{t_start}^t Omega(u) du. Immutable after construction.
class PulseShape {
public:
    /// Omega(t) = 2 A sin^2(pi t) on [0, 1], zero elsewhere; A(1) = A.
    /// Throws std::invalid_argument unless total_area > 0 and finite.
    static PulseShape sine_squared(double total_area);

    /// Monotone cubic (Fritsch-Carlson) interpolant through (t, omega) samples.
    /// t must be strictly increasing, omega finite and zero at both endpoints.
    static PulseShape tabulated(std::vector<double> t, std::vector<double> omega);

    /// Omega identically zero on [t_start, t_end].
    static PulseShape null_pulse(double t_start = 0.0, double t_end = 1.0);

    double omega(double t) const;
    /// Clamped: 0 for t <= t_start, total_area() for t >= t_end.
    double area(double t) const;

    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }
    double total_area() const { return total_area_; }

private:
    struct SineSquared {
        double area;
    };
    struct Table {
        std::vector<double> t;
        std::vector<double> omega;
        std::vector<double> slope;       // Hermite derivatives at nodes
        std::vector<double> cumulative;  // area up to each node
    };

    PulseShape(std::variant<SineSquared, Table> rep, double t0, double t1, double total);

    double table_omega(const Table& tab, double t) const;
    double table_area(const Table& tab, double t) const;

    std::variant<SineSquared, Table> rep_;
    double t_start_;
    double t_end_;
    double total_area_;
};

/// A(t) of the pulse, clamped outside its support.
inline double area_at(const PulseShape& pulse, double t) { return pulse.area(t); }

/// Reads a two-column whitespace-separated (t, Omega) file; '#' starts a comment.
/// Throws std::runtime_error on I/O or parse failure, std::invalid_argument on
/// invalid samples.
PulseShape load_tabulated_pulse(const std::filesystem::path& path);

}  // namespace kamprop
