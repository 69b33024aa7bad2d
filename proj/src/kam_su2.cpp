#include "kamprop/kam_su2.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace kamprop {

namespace {

constexpr double kPrefactorFloor = 1e-300;

// base^(2^(p-1)) evaluated in log space; floors tiny values to 0.
double doubling_power(double base, int p) {
    if (base == 0.0) {
        return 0.0;
    }
    const double log_value = std::ldexp(std::log(base), p - 1);
    const double value = std::exp(log_value);
    return value < kPrefactorFloor ? 0.0 : value;
}

// Scale s_p of the integrated variables.
double level_scale(double epsilon, int p) {
    return epsilon > 1.0 ? doubling_power(epsilon, p) : 1.0;
}

// Coupling b_p = eps^(2^(p-1)) / s_p.
double level_coupling(double epsilon, int p) {
    return epsilon > 1.0 ? 1.0 : doubling_power(epsilon, p);
}

// Resummed remainder with coupling b: maps (q_p, z_p) to q_{p+1}.
PauliVector resummed_remainder(const PauliVector& q, const PauliVector& z, double b) {
    const PauliVector c = cross_commutator(z, q);
    if (c.is_zero()) {
        return {};
    }
    const auto [xi, gamma] = xi_gamma(2.0 * b * r_norm(z));
    return -2.0 * xi * c - 4.0 * b * gamma * cross_commutator(z, c);
}

// Taylor coefficients of x^(2j-2): xi_j = (-1)^(j-1) (2j-1)/(2j)!,
// gamma_j = (-1)^j 2j/(2j+1)!.
struct SeriesTables {
    static constexpr int kTerms = 12;
    double xi[kTerms];
    double gamma[kTerms];
    SeriesTables() {
        double fact = 1.0;  // (2j)! built incrementally
        for (int j = 1; j <= kTerms; ++j) {
            fact *= (2.0 * j - 1.0) * (2.0 * j);
            const double sign = (j % 2 == 1) ? 1.0 : -1.0;
            xi[j - 1] = sign * (2.0 * j - 1.0) / fact;
            gamma[j - 1] = -sign * 2.0 * j / (fact * (2.0 * j + 1.0));
        }
    }
};

}  // namespace

void KamConfig::validate() const {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw std::invalid_argument("KamConfig: epsilon must be finite and >= 0");
    }
    if (n_levels < 0 || n_levels > kMaxLevels) {
        throw std::invalid_argument("KamConfig: n_levels must lie in [0, " +
                                    std::to_string(kMaxLevels) + "]");
    }
    if (!(hierarchy_tol > 0.0) || !(hierarchy_abs_tol > 0.0)) {
        throw std::invalid_argument("KamConfig: tolerances must be positive");
    }
}

PauliVector v1_at(const PulseShape& pulse, double t) {
    if (t <= pulse.t_start()) {
        return {};
    }
    const double two_a = 2.0 * pulse.area(t);
    return {0.0, std::sin(two_a), std::cos(two_a) - 1.0};
}

XiGamma xi_gamma(double x) {
    if (x < kXiGammaSeriesThreshold) {
        static const SeriesTables tables;
        const double x2 = x * x;
        double xi = 0.0, gamma = 0.0;
        for (int j = SeriesTables::kTerms - 1; j >= 0; --j) {
            xi = xi * x2 + tables.xi[j];
            gamma = gamma * x2 + tables.gamma[j];
        }
        return {xi, gamma};
    }
    const double c = std::cos(x);
    const double s = std::sin(x);
    return {(c - 1.0 + x * s) / (x * x), (x * c - s) / (x * x * x)};
}

double level_prefactor(double epsilon, int p) {
    if (p < 1) {
        throw std::invalid_argument("level_prefactor: p must be >= 1");
    }
    return doubling_power(epsilon, p);
}

PauliVector next_level(const PauliVector& v, const PauliVector& vhat, double epsilon, int p) {
    return resummed_remainder(v, vhat, level_prefactor(epsilon, p));
}

KamHierarchy::KamHierarchy(KamConfig config, Trajectory trajectory)
    : config_(std::move(config)), trajectory_(std::move(trajectory)) {}

void KamHierarchy::check_level(int p) const {
    if (p < 1 || p > config_.n_levels) {
        throw std::out_of_range("KamHierarchy: level " + std::to_string(p) + " not in [1, " +
                                std::to_string(config_.n_levels) + "]");
    }
}

PauliVector KamHierarchy::scaled(int p, double t) const {
    check_level(p);
    if (t <= config_.pulse.t_start()) {
        return {};
    }
    const std::vector<double> y = trajectory_.value_at(t);
    const auto k = static_cast<std::size_t>(3 * (p - 1));
    return {y[k], y[k + 1], y[k + 2]};
}

PauliVector KamHierarchy::vhat(int p, double t) const {
    const double s = level_scale(config_.epsilon, p);
    if (!std::isfinite(s)) {
        return {};
    }
    return scaled(p, t) * (1.0 / s);
}

PauliVector KamHierarchy::generator(int p, double t) const {
    return level_coupling(config_.epsilon, p) * scaled(p, t);
}

PauliVector KamHierarchy::v(int p, double t) const {
    if (p == 1) {
        return v1_at(config_.pulse, t);
    }
    check_level(p - 1);
    const double eps = config_.epsilon;
    PauliVector q = level_scale(eps, 1) * v1_at(config_.pulse, t);
    for (int k = 1; k < p; ++k) {
        q = resummed_remainder(q, scaled(k, t), level_coupling(eps, k));
    }
    const double s = level_scale(eps, p);
    return std::isfinite(s) ? q * (1.0 / s) : PauliVector{};
}

KamHierarchy build_hierarchy(const KamConfig& config) {
    config.validate();
    const int n = config.n_levels;
    const double eps = config.epsilon;
    const PulseShape& pulse = config.pulse;

    std::vector<double> couplings(static_cast<std::size_t>(n));
    for (int p = 1; p <= n; ++p) {
        couplings[static_cast<std::size_t>(p - 1)] = level_coupling(eps, p);
    }
    const double q1_scale = level_scale(eps, 1);

    const OdeRhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        PauliVector q = q1_scale * v1_at(pulse, t);
        for (int p = 0; p < n; ++p) {
            const auto k = static_cast<std::size_t>(3 * p);
            const PauliVector z{y[k], y[k + 1], y[k + 2]};
            // d z/dt = q + 2 eps (z_hat x z)
            dy[k] = q.x - 2.0 * eps * z.y;
            dy[k + 1] = q.y + 2.0 * eps * z.x;
            dy[k + 2] = q.z;
            if (p + 1 < n) {
                q = resummed_remainder(q, z, couplings[static_cast<std::size_t>(p)]);
            }
        }
    };

    IntegratorOptions opts;
    opts.rel_tol = config.hierarchy_tol;
    opts.abs_tol = config.hierarchy_abs_tol;
    Trajectory traj = integrate(rhs, std::vector<double>(static_cast<std::size_t>(3 * n), 0.0),
                                pulse.t_start(), pulse.t_end(), opts);
    return KamHierarchy(config, std::move(traj));
}

Unitary2 kam_T(const KamHierarchy& hier, int p, double t) {
    const PauliVector g = hier.generator(p, t);
    const double theta = r_norm(g);
    if (theta == 0.0) {
        return Unitary2::identity();
    }
    return exp_traceless(theta, g);
}

Unitary2 reference_propagator(double epsilon, double t, double t0) {
    return exp_traceless((t - t0) * epsilon, PauliVector::e3());
}

Unitary2 pulse_frame(const PulseShape& pulse, double t, double t0) {
    return exp_traceless(pulse.area(t) - pulse.area(t0), PauliVector::e1());
}

Unitary2 propagator_interaction(const KamHierarchy& hier, double t, double t0, int levels) {
    const int n = levels < 0 ? hier.levels() : levels;
    if (n > hier.levels()) {
        throw std::out_of_range("propagator_interaction: truncation exceeds hierarchy depth");
    }
    Unitary2 left, right;
    for (int p = 1; p <= n; ++p) {
        left = left * kam_T(hier, p, t);
        right = right * kam_T(hier, p, t0);
    }
    return left * reference_propagator(hier.config().epsilon, t, t0) * right.adjoint();
}

Unitary2 propagator_lab(const KamHierarchy& hier, double t, double t0, int levels) {
    const PulseShape& pulse = hier.config().pulse;
    const double ti = pulse.t_start();
    return pulse_frame(pulse, t, ti) * propagator_interaction(hier, t, t0, levels) *
           pulse_frame(pulse, t0, ti).adjoint();
}

}  // namespace kamprop
