// ode.hpp: adaptive explicit Runge-Kutta integration with dense output, and
// unitary propagators of time-dependent Hamiltonians built on it.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace kamprop {

/// Thrown when the integrator cannot meet its contract (step underflow,
/// non-finite derivative, step budget, unitarity budget).
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// dy/dt = f(t, y); writes into dydt (same size as y).
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    /// 0 selects the initial step automatically.
    double initial_step = 0.0;
    std::size_t max_steps = 10'000'000;
};

/// Accepted mesh, states and derivatives of one integration. Values between
/// mesh points come from cubic Hermite interpolation on the enclosing step;
/// at mesh points the stored state is returned exactly.
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(std::size_t dim, std::vector<double> times, std::vector<double> states,
               std::vector<double> derivs);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    double t_start() const { return times_.front(); }
    double t_end() const { return times_.back(); }

    std::span<const double> state(std::size_t i) const;
    std::span<const double> derivative(std::size_t i) const;
    std::span<const double> back() const { return state(size() - 1); }

    /// Interpolated state at t, clamped to [t_start, t_end].
    void value_at(double t, std::span<double> out) const;
    std::vector<double> value_at(double t) const;

private:
    std::size_t dim_{0};
    std::vector<double> times_;
    std::vector<double> states_;
    std::vector<double> derivs_;
};

/// Dormand-Prince 5(4) with error control
/// max_i |e_i| / (abs_tol + rel_tol * max(|y_i|, |y_new_i|)) <= 1.
/// Requires t_end >= t_start. Deterministic for identical inputs.
Trajectory integrate(const OdeRhs& f, std::vector<double> y0, double t_start, double t_end,
                     const IntegratorOptions& options = {});

using HamiltonianFn = std::function<Eigen::MatrixXcd(double t)>;

struct UnitaryPropagation {
    Eigen::MatrixXcd u;
    /// ||U^dagger U - I||_F of the returned matrix
    double drift{0.0};
    /// relative tolerance of the accepted run (after any tightening)
    double rel_tol{0.0};
};

/// Solves i dU/dt = H(t) U with U(t_start) = I as a real system of size 2 d^2.
/// If the drift exceeds 10 * rel_tol the run is repeated with rel_tol / 10, at
/// most twice; a persistent violation throws IntegrationError. For
/// t_end < t_start the adjoint of the forward propagator is returned.
UnitaryPropagation propagate_unitary(const HamiltonianFn& hamiltonian, Eigen::Index dim,
                                     double t_start, double t_end, double rel_tol = 1e-10,
                                     double abs_tol = 1e-12);

}  // namespace kamprop
