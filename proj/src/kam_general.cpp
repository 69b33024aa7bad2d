#include "kamprop/kam_general.hpp"

#include "kamprop/kam_su2.hpp"
#include "kamprop/ode.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace kamprop::general {

namespace {

using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double prefactor_or_throw(double epsilon, int p) {
    const double a = level_prefactor(epsilon, p);
    if (!std::isfinite(a)) {
        throw std::domain_error("general KAM: eps^(2^(p-1)) overflows at level " +
                                std::to_string(p));
    }
    return a;
}

// Simpson with N (even) intervals of f on [a, b].
Matrix simpson(const OperatorFn& f, double a, double b, std::size_t intervals) {
    const double h = (b - a) / static_cast<double>(intervals);
    Matrix acc = f(a) + f(b);
    for (std::size_t k = 1; k < intervals; ++k) {
        acc += (k % 2 == 1 ? 4.0 : 2.0) * f(a + h * static_cast<double>(k));
    }
    return acc * (h / 3.0);
}

}  // namespace

bool is_hermitian(const Matrix& m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    return (m - m.adjoint()).norm() <= tol * std::max(1.0, m.norm());
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix exp_hermitian(const Matrix& h, double theta) {
    if (theta == 0.0) {
        return Matrix::Identity(h.rows(), h.cols());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("exp_hermitian: eigendecomposition failed");
    }
    const Eigen::VectorXcd phases =
        (solver.eigenvalues().cast<cplx>() * (-I * theta)).array().exp().matrix();
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

Propagator constant_propagator(const Matrix& h0) {
    if (!is_hermitian(h0)) {
        throw std::invalid_argument("constant_propagator: H0 must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h0));
    return [vectors = Matrix(solver.eigenvectors()),
            values = Eigen::VectorXd(solver.eigenvalues())](double t, double t0) -> Matrix {
        const Eigen::VectorXcd phases =
            (values.cast<cplx>() * (-I * (t - t0))).array().exp().matrix();
        return vectors * phases.asDiagonal() * vectors.adjoint();
    };
}

EigenSystem EigenSystem::of(const Matrix& k0, double rel_gap) {
    if (k0.rows() != k0.cols() || k0.rows() < 2) {
        throw std::invalid_argument("EigenSystem: K0 must be square with d >= 2");
    }
    if (!is_hermitian(k0)) {
        throw std::invalid_argument("EigenSystem: K0 must be Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(k0));
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("EigenSystem: eigendecomposition failed");
    }
    EigenSystem es;
    es.values = solver.eigenvalues();
    es.vectors = solver.eigenvectors();
    const Eigen::Index d = es.values.size();
    const double range = es.values(d - 1) - es.values(0);
    const double gap = rel_gap * range;
    es.cluster.assign(static_cast<std::size_t>(d), 0);
    int id = 0;
    for (Eigen::Index j = 1; j < d; ++j) {
        if (es.values(j) - es.values(j - 1) > gap) {
            ++id;
        }
        es.cluster[static_cast<std::size_t>(j)] = id;
    }
    es.cluster_count = id + 1;
    return es;
}

Matrix EigenSystem::reconstruct() const {
    return vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
}

AutonomousStep autonomous_average(const EigenSystem& k0, const Matrix& v) {
    const Eigen::Index d = k0.dim();
    if (v.rows() != d || v.cols() != d) {
        throw std::invalid_argument("autonomous_average: dimension mismatch");
    }
    const Matrix v_eig = k0.vectors.adjoint() * v * k0.vectors;
    Matrix d_eig = Matrix::Zero(d, d);
    Matrix w_eig = Matrix::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        for (Eigen::Index k = 0; k < d; ++k) {
            if (k0.cluster[static_cast<std::size_t>(j)] == k0.cluster[static_cast<std::size_t>(k)]) {
                d_eig(j, k) = v_eig(j, k);
            } else {
                w_eig(j, k) = -v_eig(j, k) / (k0.values(j) - k0.values(k));
            }
        }
    }
    return {k0.vectors * d_eig * k0.vectors.adjoint(), k0.vectors * w_eig * k0.vectors.adjoint()};
}

Matrix pulsed_vbar(const Propagator& u_h0, const Matrix& v1_ti, double ti, double t) {
    if (t <= ti) {
        return v1_ti;
    }
    const Matrix u = u_h0(t, ti);
    return u * v1_ti * u.adjoint();
}

PulsedFirstStep pulsed_s1_and_he1(const Propagator& u_h0, const Matrix& v1_ti, double epsilon,
                                  double ti, double t, double t0) {
    const Matrix e = exp_hermitian(v1_ti, (t - t0) * epsilon);
    const Matrix back = u_h0(t0, ti);
    return {back * e * back.adjoint(), u_h0(t, ti) * e * back.adjoint()};
}

Matrix hatv_general(const Propagator& u, const OperatorFn& v, const OperatorFn& vbar, double ti,
                    double t, double tol) {
    const Matrix probe = v(ti);
    if (t <= ti) {
        return Matrix::Zero(probe.rows(), probe.cols());
    }
    const OperatorFn integrand = [&](double s) -> Matrix {
        const Matrix us = u(t, s);
        return us * (v(s) - vbar(s)) * us.adjoint();
    };
    constexpr std::size_t kMaxIntervals = std::size_t{1} << 18;
    std::size_t n = 64;
    Matrix coarse = simpson(integrand, ti, t, n);
    while (n < kMaxIntervals) {
        n *= 2;
        Matrix fine = simpson(integrand, ti, t, n);
        if ((fine - coarse).norm() <= tol * std::max(1.0, fine.norm())) {
            return hermitian_part(fine);
        }
        coarse = std::move(fine);
    }
    throw IntegrationError("hatv_general: quadrature did not converge");
}

Matrix remainder_truncated(const Matrix& vhat, const Matrix& v, const Matrix& d, double epsilon,
                           int p, int max_terms) {
    if (max_terms < 1) {
        throw std::invalid_argument("remainder_truncated: need at least one term");
    }
    const double a = prefactor_or_throw(epsilon, p);
    Matrix sum = Matrix::Zero(v.rows(), v.cols());
    Matrix ad_v = v;
    Matrix ad_d = d;
    cplx phase{1.0, 0.0};  // i^k
    double a_pow = 1.0;    // a^(k-1)
    double factorial = 1.0;
    int quiet = 0;
    for (int k = 1; k <= max_terms; ++k) {
        ad_v = commutator(vhat, ad_v);
        ad_d = commutator(vhat, ad_d);
        phase *= I;
        factorial *= static_cast<double>(k + 1);
        const Matrix term = (phase * (a_pow / factorial)) * (static_cast<double>(k) * ad_v + ad_d);
        sum += term;
        const double tn = term.norm();
        quiet = (tn <= 1e-17 * sum.norm()) ? quiet + 1 : 0;
        if (quiet >= 2 || (ad_v.isZero(0.0) && ad_d.isZero(0.0))) {
            break;
        }
        a_pow *= a;
    }
    return sum;
}

Matrix pulsed_propagator_general(std::span<const OperatorFn> transforms, const Propagator& u_h0,
                                 const Matrix& v1_ti, double epsilon, double ti, double t,
                                 double t0) {
    const Eigen::Index d = v1_ti.rows();
    Matrix left = Matrix::Identity(d, d);
    Matrix right = Matrix::Identity(d, d);
    for (const auto& tp : transforms) {
        left = left * tp(t);
        right = right * tp(t0);
    }
    const Matrix core =
        u_h0(t, ti) * exp_hermitian(v1_ti, (t - t0) * epsilon) * u_h0(t0, ti).adjoint();
    return left * core * right.adjoint();
}

PulsedHierarchy::PulsedHierarchy(PulsedProblem problem, int levels, PulsedHierarchyOptions options)
    : problem_(std::move(problem)), levels_(levels), options_(options) {
    const std::size_t n = options_.mesh_points;
    if (n < 3 || n % 2 == 0) {
        throw std::invalid_argument("PulsedHierarchy: mesh_points must be odd and >= 3");
    }
    if (levels_ < 0 || levels_ > KamConfig::kMaxLevels) {
        throw std::invalid_argument("PulsedHierarchy: levels out of range");
    }
    if (!(problem_.t_end > problem_.t_start)) {
        throw std::invalid_argument("PulsedHierarchy: need t_end > t_start");
    }
    const double ti = problem_.t_start;
    const double eps = problem_.epsilon;
    v1_ti_ = problem_.v1(ti);
    if (!is_hermitian(v1_ti_)) {
        throw std::invalid_argument("PulsedHierarchy: V1 must be Hermitian");
    }
    const Eigen::Index d = v1_ti_.rows();

    const double h = (problem_.t_end - ti) / static_cast<double>(n - 1);
    mesh_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        mesh_[k] = ti + h * static_cast<double>(k);
    }
    mesh_.back() = problem_.t_end;

    std::vector<Matrix> v_cur(n), d_cur(n);
    for (std::size_t k = 0; k < n; ++k) {
        v_cur[k] = problem_.v1(mesh_[k]);
        d_cur[k] = pulsed_vbar(problem_.u_h0, v1_ti_, ti, mesh_[k]);
    }

    pulled_.resize(static_cast<std::size_t>(levels_));
    dpulled_.resize(static_cast<std::size_t>(levels_));
    for (int p = 1; p <= levels_; ++p) {
        auto& w = pulled_[static_cast<std::size_t>(p - 1)];
        auto& g = dpulled_[static_cast<std::size_t>(p - 1)];
        w.assign(n, Matrix::Zero(d, d));
        g.resize(n);
        std::vector<Matrix> frames(n);
        for (std::size_t k = 0; k < n; ++k) {
            frames[k] = level_frame(p, mesh_[k]);
            const Matrix x = (p == 1) ? Matrix(v_cur[k] - d_cur[k]) : v_cur[k];
            g[k] = frames[k].adjoint() * x * frames[k];
        }
        // cumulative Simpson; odd nodes close with a three-point partial rule
        for (std::size_t k = 1; k < n; ++k) {
            if (k % 2 == 0) {
                w[k] = w[k - 2] + (h / 3.0) * (g[k - 2] + 4.0 * g[k - 1] + g[k]);
            } else {
                w[k] = w[k - 1] + (h / 12.0) * (5.0 * g[k - 1] + 8.0 * g[k] - g[k + 1]);
            }
        }
        if (p == levels_) {
            break;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const Matrix vhat_k = hermitian_part(frames[k] * w[k] * frames[k].adjoint());
            const Matrix d_k = (p == 1) ? d_cur[k] : Matrix::Zero(d, d);
            v_cur[k] = remainder_truncated(vhat_k, v_cur[k], d_k, eps, p, options_.series_terms);
        }
        // For pulsed perturbations Vbar_p vanishes for p > 1, i.e. V_p(t_i) = 0.
        if (v_cur.front().norm() > 1e-12) {
            throw std::logic_error("PulsedHierarchy: V_p(t_i) != 0 for p > 1; not a pulsed problem");
        }
    }
}

Matrix PulsedHierarchy::level_frame(int p, double t) const {
    const double ti = problem_.t_start;
    if (p == 1) {
        return problem_.u_h0(t, ti);
    }
    return problem_.u_h0(t, ti) * exp_hermitian(v1_ti_, (t - ti) * problem_.epsilon);
}

Matrix PulsedHierarchy::vhat(int p, double t) const {
    if (p < 1 || p > levels_) {
        throw std::out_of_range("PulsedHierarchy: level out of range");
    }
    const Eigen::Index d = v1_ti_.rows();
    if (t <= mesh_.front()) {
        return Matrix::Zero(d, d);
    }
    t = std::min(t, mesh_.back());
    const auto& w = pulled_[static_cast<std::size_t>(p - 1)];
    const auto& g = dpulled_[static_cast<std::size_t>(p - 1)];
    const auto it = std::upper_bound(mesh_.begin(), mesh_.end(), t);
    std::size_t k = static_cast<std::size_t>(std::distance(mesh_.begin(), it));
    k = std::min(k, mesh_.size() - 1) - 1;
    const double hk = mesh_[k + 1] - mesh_[k];
    const double s = (t - mesh_[k]) / hk;
    const double s2 = s * s, s3 = s2 * s;
    const Matrix wt = (2 * s3 - 3 * s2 + 1) * w[k] + ((s3 - 2 * s2 + s) * hk) * g[k] +
                      (-2 * s3 + 3 * s2) * w[k + 1] + ((s3 - s2) * hk) * g[k + 1];
    const Matrix frame = level_frame(p, t);
    return hermitian_part(frame * wt * frame.adjoint());
}

Matrix PulsedHierarchy::transform(int p, double t) const {
    return exp_hermitian(vhat(p, t), prefactor_or_throw(problem_.epsilon, p));
}

std::vector<OperatorFn> PulsedHierarchy::transforms(int levels) const {
    const int n = levels < 0 ? levels_ : levels;
    if (n > levels_) {
        throw std::out_of_range("PulsedHierarchy: truncation exceeds hierarchy depth");
    }
    std::vector<OperatorFn> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int p = 1; p <= n; ++p) {
        out.emplace_back([this, p](double t) { return transform(p, t); });
    }
    return out;
}

Matrix PulsedHierarchy::propagator(double t, double t0, int levels) const {
    const std::vector<OperatorFn> ts = transforms(levels);
    return pulsed_propagator_general(ts, problem_.u_h0, v1_ti_, problem_.epsilon,
                                     problem_.t_start, t, t0);
}

}  // namespace kamprop::general
