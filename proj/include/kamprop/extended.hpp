// extended.hpp: final-state errors of the two-level KAM hierarchy in 50-digit
// arithmetic, for resolving Delta_n far below the double-precision floor.
//
// The reference propagator and all hierarchy levels are co-integrated as one
// real ODE by Gragg-Bulirsch-Stoer extrapolation. Only the sine-squared pulse
// on [0, 1] is supported.

#pragma once

#include <vector>

namespace kamprop::extended {

struct FinalStateErrors {
    /// delta[n] = Delta_n for n = 0..n_max
    std::vector<double> delta;
    /// |<+1|psi(t_f)>|^2 of the reference
    double p_numeric{0.0};
    /// Accepted extrapolation steps.
    int steps{0};
};

/// Delta_n for i dU/dt = [Omega(t) sigma_1 + eps sigma_3] U with the
/// sine-squared pulse of area area_over_pi * pi (null pulse when zero).
/// Throws std::invalid_argument on negative or non-finite inputs, n_max
/// outside [0, 12], or tol outside [1e-45, 1e-6]; IntegrationError when the
/// step size underflows.
FinalStateErrors final_state_errors(double epsilon, double area_over_pi, int n_max,
                                    double tol = 1e-42);

}  // namespace kamprop::extended
