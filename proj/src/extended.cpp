#include "kamprop/extended.hpp"

#include "kamprop/kam_su2.hpp"
#include "kamprop/ode.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace kamprop::extended {

namespace {

using real = boost::multiprecision::cpp_bin_float_50;
using State = std::vector<real>;

// U = w I - i (x sigma_1 + y sigma_2 + z sigma_3)
struct Quat {
    real w, x, y, z;
};

Quat operator*(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + b.w * a.x + a.y * b.z - a.z * b.y,
            a.w * b.y + b.w * a.y + a.z * b.x - a.x * b.z,
            a.w * b.z + b.w * a.z + a.x * b.y - a.y * b.x};
}

// exp(-i g.sigma)
Quat exp_generator(const real& gx, const real& gy, const real& gz) {
    const real r = sqrt(gx * gx + gy * gy + gz * gz);
    if (r == 0) {
        return {1, 0, 0, 0};
    }
    const real s = sin(r) / r;
    return {cos(r), s * gx, s * gy, s * gz};
}

struct Vec3 {
    real x, y, z;
};

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

// (cos x - 1 + x sin x)/x^2 and (x cos x - sin x)/x^3, summed until the terms
// drop below the working precision when x < 1.
std::array<real, 2> xi_gamma_mp(const real& x) {
    if (x >= 1) {
        const real c = cos(x), s = sin(x);
        return {(c - 1 + x * s) / (x * x), (x * c - s) / (x * x * x)};
    }
    const real x2 = x * x;
    const real tiny = std::numeric_limits<real>::epsilon();
    real xi = 0, gamma = 0;
    real power = 1;  // x^(2j-2)
    real fact = 1;   // (2j)!
    for (int j = 1; j < 60; ++j) {
        fact *= (2 * j - 1) * (2 * j);
        const int sign = (j % 2 == 1) ? 1 : -1;
        const real txi = sign * (2 * j - 1) * power / fact;
        const real tgamma = -sign * (2 * j) * power / (fact * (2 * j + 1));
        xi += txi;
        gamma += tgamma;
        if (abs(txi) < tiny * abs(xi) && abs(tgamma) < tiny * abs(gamma)) {
            break;
        }
        power *= x2;
    }
    return {xi, gamma};
}

struct Model {
    real eps;
    real area;  // A
    int levels;
    std::vector<real> coupling;  // b_p
    real q1_scale;               // s_1
    real pi = boost::math::constants::pi<real>();

    // Omega(t) and A(t) for the sine-squared pulse on [0, 1].
    std::array<real, 2> pulse(const real& t) const {
        const real s = sin(pi * t);
        const real omega = 2 * area * s * s;
        const real a = area * (t - sin(2 * pi * t) / (2 * pi));
        return {omega, a};
    }

    // y = (oracle quaternion, z_1, ..., z_n)
    void rhs(const real& t, const State& y, State& dy) const {
        const auto [omega, a] = pulse(t);
        // dU/dt = (-i h.sigma) U, h = (Omega, 0, eps)
        const Quat u{y[0], y[1], y[2], y[3]};
        const Quat d = Quat{0, omega, 0, eps} * u;
        dy[0] = d.w;
        dy[1] = d.x;
        dy[2] = d.y;
        dy[3] = d.z;

        Vec3 q{0, q1_scale * sin(2 * a), q1_scale * (cos(2 * a) - 1)};
        for (int p = 0; p < levels; ++p) {
            const std::size_t k = 4 + 3 * static_cast<std::size_t>(p);
            const Vec3 z{y[k], y[k + 1], y[k + 2]};
            dy[k] = q.x - 2 * eps * z.y;
            dy[k + 1] = q.y + 2 * eps * z.x;
            dy[k + 2] = q.z;
            if (p + 1 < levels) {
                const Vec3 c = cross(z, q);
                const real& b = coupling[static_cast<std::size_t>(p)];
                const auto [xi, gamma] = xi_gamma_mp(2 * b * sqrt(z.x * z.x + z.y * z.y + z.z * z.z));
                const Vec3 cc = cross(z, c);
                q = {-2 * xi * c.x - 4 * b * gamma * cc.x,
                     -2 * xi * c.y - 4 * b * gamma * cc.y,
                     -2 * xi * c.z - 4 * b * gamma * cc.z};
            }
        }
    }
};

// Gragg's modified midpoint with n substeps over [t, t + H], smoothed.
State midpoint(const Model& m, const real& t, const State& y, const real& H, int n) {
    const std::size_t dim = y.size();
    const real h = H / n;
    State f(dim), z0 = y, z1(dim), tmp(dim);
    m.rhs(t, y, f);
    for (std::size_t i = 0; i < dim; ++i) z1[i] = y[i] + h * f[i];
    for (int k = 1; k < n; ++k) {
        m.rhs(t + k * h, z1, f);
        for (std::size_t i = 0; i < dim; ++i) {
            tmp[i] = z0[i] + 2 * h * f[i];
        }
        z0.swap(z1);
        z1.swap(tmp);
    }
    m.rhs(t + H, z1, f);
    State out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = (z0[i] + z1[i] + h * f[i]) / 2;
    return out;
}

// Adaptive extrapolation from t0 to t1; returns the end state.
State extrapolate(const Model& m, State y, const real& t0, const real& t1, const real& tol,
                  int& steps) {
    constexpr int kColumns = 16;
    const std::size_t dim = y.size();
    real t = t0;
    real H = (t1 - t0) / 8;
    steps = 0;
    while (t < t1) {
        if (t + H > t1) H = t1 - t;
        if (H < (t1 - t0) * 1e-12) {
            throw IntegrationError("extended: step size underflow");
        }
        std::vector<State> prev;
        bool accepted = false;
        int k_used = 0;
        for (int k = 0; k < kColumns && !accepted; ++k) {
            const int nk = 2 * (k + 1);
            std::vector<State> row(static_cast<std::size_t>(k + 1));
            row[0] = midpoint(m, t, y, H, nk);
            for (int j = 1; j <= k; ++j) {
                const real ratio = real(nk) / (2 * (k - j + 1));
                const real denom = ratio * ratio - 1;
                row[static_cast<std::size_t>(j)].resize(dim);
                for (std::size_t i = 0; i < dim; ++i) {
                    const real& a = row[static_cast<std::size_t>(j - 1)][i];
                    row[static_cast<std::size_t>(j)][i] =
                        a + (a - prev[static_cast<std::size_t>(j - 1)][i]) / denom;
                }
            }
            if (k >= 2) {
                real err = 0;
                const State& best = row.back();
                const State& last = prev.back();
                for (std::size_t i = 0; i < dim; ++i) {
                    const real e = abs(best[i] - last[i]) / (1 + abs(best[i]));
                    if (e > err) err = e;
                }
                if (err <= tol) {
                    accepted = true;
                    k_used = k;
                    y = row.back();
                }
            }
            prev = std::move(row);
        }
        if (!accepted) {
            H /= 2;
            continue;
        }
        t += H;
        ++steps;
        if (k_used < kColumns / 2) H *= 1.5;
    }
    return y;
}

}  // namespace

FinalStateErrors final_state_errors(double epsilon, double area_over_pi, int n_max, double tol) {
    if (!std::isfinite(epsilon) || epsilon < 0.0) {
        throw std::invalid_argument("final_state_errors: epsilon must be finite and >= 0");
    }
    if (!std::isfinite(area_over_pi) || area_over_pi < 0.0) {
        throw std::invalid_argument("final_state_errors: area must be finite and >= 0");
    }
    if (n_max < 0 || n_max > KamConfig::kMaxLevels) {
        throw std::invalid_argument("final_state_errors: n_max must lie in [0, 12]");
    }
    if (!(tol >= 1e-45 && tol <= 1e-6)) {
        throw std::invalid_argument("final_state_errors: tol must lie in [1e-45, 1e-6]");
    }

    Model m;
    m.eps = epsilon;
    m.area = real(area_over_pi) * m.pi;
    m.levels = n_max;
    // same rescaling as the double-precision hierarchy
    const real big = epsilon > 1.0 ? real(epsilon) : real(1);
    const real small = epsilon > 1.0 ? real(1) : real(epsilon);
    for (int p = 1; p <= n_max; ++p) {
        m.coupling.push_back(pow(small, real(std::ldexp(1.0, p - 1))));
    }
    m.q1_scale = big;

    State y(4 + 3 * static_cast<std::size_t>(n_max), real(0));
    y[0] = 1;
    FinalStateErrors out;
    y = extrapolate(m, y, real(0), real(1), real(tol), out.steps);

    const Quat ref{y[0], y[1], y[2], y[3]};
    // U0(1, 0) T_1(1)..T_n(1) U_H0(1, 0); T_p(0) = I.
    const real area_end = m.pulse(real(1))[1];
    const Quat frame{cos(area_end), sin(area_end), 0, 0};
    const Quat h0{cos(m.eps), 0, 0, sin(m.eps)};
    Quat chain{1, 0, 0, 0};
    // |U|-1> - U_ref|-1>| is the Euclidean distance of the quaternions.
    const auto distance = [&](const Quat& chain_now) {
        const Quat v = frame * chain_now * h0;
        const real d = sqrt((v.w - ref.w) * (v.w - ref.w) + (v.x - ref.x) * (v.x - ref.x) +
                            (v.y - ref.y) * (v.y - ref.y) + (v.z - ref.z) * (v.z - ref.z));
        return static_cast<double>(d);
    };
    out.delta.push_back(distance(chain));
    for (int p = 1; p <= n_max; ++p) {
        const std::size_t k = 4 + 3 * static_cast<std::size_t>(p - 1);
        const real& b = m.coupling[static_cast<std::size_t>(p - 1)];
        chain = chain * exp_generator(b * y[k], b * y[k + 1], b * y[k + 2]);
        out.delta.push_back(distance(chain));
    }
    // U_ref|-1> = (-y - i x, w + i z)
    out.p_numeric = static_cast<double>(ref.x * ref.x + ref.y * ref.y);
    return out;
}

}  // namespace kamprop::extended
