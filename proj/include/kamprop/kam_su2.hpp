// kam_su2.hpp: exact-resummation KAM hierarchy for a pulse-driven two-level system.
//
// Model (dimensionless time, energies in units of the inverse pulse duration):
//   i dU/dt = [Omega(t) sigma_1 + eps sigma_3] U
// In the frame of U0(t, t0) = exp(-i [A(t) - A(t0)] sigma_1) the reference is
// H0 = eps sigma_3 and the perturbation eps V1(t) with
//   V1(t) = (cos 2A(t) - 1) sigma_3 + sin 2A(t) sigma_2,
// which vanishes at the pulse start, so every time average is zero and each
// level p carries only
//   Vhat_p(t) = int_{t_i}^t U_H0(t,u) V_p(u) U_H0^dagger(t,u) du,
//   T_p(t)    = exp(-i eps^(2^(p-1)) Vhat_p(t)),
//   V_{p+1}   = xi_p [Vhat_p, V_p] + eps^(2^(p-1)) gamma_p [Vhat_p, [Vhat_p, V_p]].

#pragma once

#include "kamprop/ode.hpp"
#include "kamprop/pulse.hpp"
#include "kamprop/su2.hpp"

namespace kamprop {

struct KamConfig {
    static constexpr int kMaxLevels = 12;

    double epsilon{0.0};
    int n_levels{0};
    PulseShape pulse = PulseShape::null_pulse();
    double hierarchy_tol{1e-9};
    double hierarchy_abs_tol{1e-12};

    /// Throws std::invalid_argument on epsilon < 0 or non-finite, n_levels
    /// outside [0, kMaxLevels], or non-positive tolerances.
    void validate() const;
};

/// Pauli vector of V1(t) = (0, sin 2A(t), cos 2A(t) - 1); zero for t <= t_i.
PauliVector v1_at(const PulseShape& pulse, double t);

struct XiGamma {
    double xi;     // (cos x - 1 + x sin x) / x^2 ; xi_p = i * xi
    double gamma;  // (x cos x - sin x) / x^3
};

/// Resummation coefficients at x = 2 eps^(2^(p-1)) r_p. Power series below
/// kXiGammaSeriesThreshold, closed form above.
XiGamma xi_gamma(double x);
inline constexpr double kXiGammaSeriesThreshold = 0.5;

/// eps^(2^(p-1)); values below 1e-300 are returned as exactly 0.
double level_prefactor(double epsilon, int p);

/// V_{p+1} from (V_p, Vhat_p) in Pauli form:
///   -2 xi(x) (vhat x v) - 4 eps^(2^(p-1)) gamma(x) vhat x (vhat x v),  x = 2 eps^(2^(p-1)) |vhat|.
PauliVector next_level(const PauliVector& v, const PauliVector& vhat, double epsilon, int p);

/// Per-level trajectories Vhat_p(t) on [t_i, t_f].
///
/// All levels are co-integrated as one 3n-dimensional ODE
///   d z_p/dt = q_p + 2 eps (z_hat x z_p),
/// on rescaled variables z_p = s_p Vhat_p, q_p = s_p V_p with
/// s_p = max(1, eps)^(2^(p-1)). For eps <= 1 these are the plain operators;
/// for eps > 1 they are the generators eps^(2^(p-1)) Vhat_p themselves, which
/// stay O(1) where the plain operators would underflow. Queries outside
/// [t_i, t_f] are clamped (Vhat_p = 0 before t_i, frozen after t_f).
class KamHierarchy {
public:
    KamHierarchy(KamConfig config, Trajectory trajectory);

    const KamConfig& config() const { return config_; }
    int levels() const { return config_.n_levels; }
    const Trajectory& trajectory() const { return trajectory_; }

    /// Vhat_p(t); returns 0 where s_p overflows (the operator itself underflows).
    PauliVector vhat(int p, double t) const;
    /// eps^(2^(p-1)) Vhat_p(t), the exponent of T_p.
    PauliVector generator(int p, double t) const;
    /// V_p(t) rebuilt from the lower levels at t.
    PauliVector v(int p, double t) const;

private:
    PauliVector scaled(int p, double t) const;
    void check_level(int p) const;

    KamConfig config_;
    Trajectory trajectory_;
};

/// Integrates the hierarchy; IntegrationError from the integrator propagates.
KamHierarchy build_hierarchy(const KamConfig& config);

/// T_p(t) = cos(a r) I - i sin(a r)/r Vhat_p(t), a = eps^(2^(p-1)), r = |Vhat_p(t)|.
Unitary2 kam_T(const KamHierarchy& hier, int p, double t);

/// exp(-i (t - t0) eps sigma_3)
Unitary2 reference_propagator(double epsilon, double t, double t0);

/// exp(-i [A(t) - A(t0)] sigma_1)
Unitary2 pulse_frame(const PulseShape& pulse, double t, double t0);

/// T_1(t)..T_n(t) U_H0(t,t0) T_n^dagger(t0)..T_1^dagger(t0), truncated at
/// `levels` (defaults to all levels of the hierarchy).
Unitary2 propagator_interaction(const KamHierarchy& hier, double t, double t0, int levels = -1);

/// U0(t,t_i) U^(n)_H1(t,t0) U0^dagger(t0,t_i), the laboratory-frame propagator.
Unitary2 propagator_lab(const KamHierarchy& hier, double t, double t0, int levels = -1);

}  // namespace kamprop
