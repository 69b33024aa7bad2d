#include "kamprop/ode.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kamprop {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b_hat (error estimate weights)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

void eval(const OdeRhs& f, double t, std::span<const double> y, std::span<double> dy) {
    f(t, y, dy);
    for (double v : dy) {
        if (!std::isfinite(v)) {
            throw IntegrationError("integrate: non-finite derivative at t = " + std::to_string(t));
        }
    }
}

double error_norm(std::span<const double> y, std::span<const double> y_new,
                  std::span<const double> err, double rtol, double atol) {
    double worst = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

// Hairer-Norsett-Wanner starting step heuristic for a 5th-order method.
double initial_step(const OdeRhs& f, double t0, std::span<const double> y0,
                    std::span<const double> f0, double span, double rtol, double atol) {
    const std::size_t n = y0.size();
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        d0 = std::max(d0, std::abs(y0[i]) / sc);
        d1 = std::max(d1, std::abs(f0[i]) / sc);
    }
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    std::vector<double> y1(n), f1(n);
    for (std::size_t i = 0; i < n; ++i) {
        y1[i] = y0[i] + h0 * f0[i];
    }
    eval(f, t0 + h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::abs(y0[i]);
        d2 = std::max(d2, std::abs(f1[i] - f0[i]) / sc);
    }
    d2 /= h0;
    const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                  : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

Trajectory::Trajectory(std::size_t dim, std::vector<double> times, std::vector<double> states,
                       std::vector<double> derivs)
    : dim_(dim), times_(std::move(times)), states_(std::move(states)), derivs_(std::move(derivs)) {}

std::span<const double> Trajectory::state(std::size_t i) const {
    return {states_.data() + i * dim_, dim_};
}

std::span<const double> Trajectory::derivative(std::size_t i) const {
    return {derivs_.data() + i * dim_, dim_};
}

void Trajectory::value_at(double t, std::span<double> out) const {
    if (t <= times_.front()) {
        std::ranges::copy(state(0), out.begin());
        return;
    }
    if (t >= times_.back()) {
        std::ranges::copy(back(), out.begin());
        return;
    }
    const auto it = std::upper_bound(times_.begin(), times_.end(), t);
    const std::size_t k = static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
    const double t0 = times_[k];
    if (t == t0) {
        std::ranges::copy(state(k), out.begin());
        return;
    }
    const double h = times_[k + 1] - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    const auto y0 = state(k), y1 = state(k + 1);
    const auto f0 = derivative(k), f1 = derivative(k + 1);
    for (std::size_t i = 0; i < dim_; ++i) {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
}

std::vector<double> Trajectory::value_at(double t) const {
    std::vector<double> out(dim_);
    value_at(t, out);
    return out;
}

Trajectory integrate(const OdeRhs& f, std::vector<double> y0, double t_start, double t_end,
                     const IntegratorOptions& options) {
    const double rtol = options.rel_tol;
    const double atol = options.abs_tol;
    if (!(rtol > 0.0) || !(atol > 0.0)) {
        throw std::invalid_argument("integrate: tolerances must be positive");
    }
    if (!std::isfinite(t_start) || !std::isfinite(t_end) || t_end < t_start) {
        throw std::invalid_argument("integrate: require finite t_start <= t_end");
    }
    const std::size_t n = y0.size();

    std::vector<double> times{t_start};
    std::vector<double> states(y0.begin(), y0.end());
    std::vector<double> derivs(n);
    eval(f, t_start, y0, derivs);

    const double span = t_end - t_start;
    if (span == 0.0) {
        return Trajectory(n, std::move(times), std::move(states), std::move(derivs));
    }
    const double h_min = 1e-14 * span;

    std::vector<double> y = y0, k1(derivs), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n), err(n);

    double t = t_start;
    double h = options.initial_step > 0.0 ? std::min(options.initial_step, span)
                                          : initial_step(f, t, y, k1, span, rtol, atol);
    std::size_t steps = 0;

    while (t < t_end) {
        if (++steps > options.max_steps) {
            throw IntegrationError("integrate: step budget exhausted");
        }
        bool last = false;
        if (t + h >= t_end || t + 1.01 * h >= t_end) {
            h = t_end - t;
            last = true;
        }
        if (h < h_min) {
            throw IntegrationError("integrate: stiffness/underflow at t = " + std::to_string(t));
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        eval(f, t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        eval(f, t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        eval(f, t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        eval(f, t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        const double t_new = last ? t_end : t + h;
        eval(f, t_new, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        eval(f, t_new, ynew, k7);
        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);

        const double enorm = error_norm(y, ynew, err, rtol, atol);
        if (enorm <= 1.0) {
            t = t_new;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            times.push_back(t);
            states.insert(states.end(), y.begin(), y.end());
            derivs.insert(derivs.end(), k1.begin(), k1.end());
            const double grow = enorm == 0.0 ? 5.0 : std::min(5.0, 0.9 * std::pow(enorm, -0.2));
            h *= grow;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(enorm, -0.2));
        }
    }
    return Trajectory(n, std::move(times), std::move(states), std::move(derivs));
}

namespace {

UnitaryPropagation propagate_once(const HamiltonianFn& hamiltonian, Eigen::Index d, double t0,
                                  double t1, double rtol, double atol) {
    using Eigen::MatrixXcd;
    const auto dd = static_cast<std::size_t>(d * d);
    std::vector<double> y0(2 * dd, 0.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        y0[2 * static_cast<std::size_t>(i * d + i)] = 1.0;
    }
    const OdeRhs rhs = [&](double t, std::span<const double> y, std::span<double> dy) {
        const MatrixXcd h = hamiltonian(t);
        Eigen::Map<const MatrixXcd> u(reinterpret_cast<const std::complex<double>*>(y.data()), d, d);
        Eigen::Map<MatrixXcd> du(reinterpret_cast<std::complex<double>*>(dy.data()), d, d);
        du.noalias() = std::complex<double>(0.0, -1.0) * (h * u);
    };
    IntegratorOptions opts;
    opts.rel_tol = rtol;
    opts.abs_tol = atol;
    const Trajectory traj = integrate(rhs, std::move(y0), t0, t1, opts);
    const auto end = traj.back();
    MatrixXcd u = Eigen::Map<const MatrixXcd>(
        reinterpret_cast<const std::complex<double>*>(end.data()), d, d);
    const double drift = (u.adjoint() * u - MatrixXcd::Identity(d, d)).norm();
    return {std::move(u), drift, rtol};
}

}  // namespace

UnitaryPropagation propagate_unitary(const HamiltonianFn& hamiltonian, Eigen::Index dim,
                                     double t_start, double t_end, double rel_tol,
                                     double abs_tol) {
    if (dim < 1) {
        throw std::invalid_argument("propagate_unitary: dimension must be positive");
    }
    if (t_end < t_start) {
        UnitaryPropagation fwd = propagate_unitary(hamiltonian, dim, t_end, t_start, rel_tol, abs_tol);
        fwd.u = fwd.u.adjoint().eval();
        return fwd;
    }
    double rtol = rel_tol;
    double atol = abs_tol;
    for (int attempt = 0; attempt < 3; ++attempt) {
        UnitaryPropagation out = propagate_once(hamiltonian, dim, t_start, t_end, rtol, atol);
        if (out.drift <= 10.0 * rel_tol) {
            return out;
        }
        rtol /= 10.0;
        atol /= 10.0;
    }
    throw IntegrationError("propagate_unitary: unitarity budget exceeded");
}

}  // namespace kamprop
