// kam_general.hpp: finite-dimensional KAM machinery in the original Hilbert space.
//
// Covers the autonomous commutator equations, the closed-form averages for
// pulsed perturbations (constant and commuting with the reference propagator
// before t_i), the truncated remainder series, and the pulsed propagator
//   U(t,t0) = T_1(t)..T_n(t) U_H0(t,t_i) e^{-i(t-t0) eps V_1(t_i)} U_H0^dagger(t0,t_i)
//             T_n^dagger(t0)..T_1^dagger(t0).
// The engine is mesh based and intended for small d (<= 16).

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace kamprop::general {

using Matrix = Eigen::MatrixXcd;

/// Propagator U(t, t0) of a reference Hamiltonian.
using Propagator = std::function<Matrix(double t, double t0)>;
/// Time-dependent operator t -> O(t).
using OperatorFn = std::function<Matrix(double t)>;

bool is_hermitian(const Matrix& m, double tol = 1e-12);

/// Commutator AB - BA.
Matrix commutator(const Matrix& a, const Matrix& b);

/// exp(-i theta h) for Hermitian h, via eigendecomposition (exactly unitary
/// up to rounding).
Matrix exp_hermitian(const Matrix& h, double theta);

/// U(t, t0) = exp(-i (t - t0) h0) for a constant Hermitian h0.
Propagator constant_propagator(const Matrix& h0);

/// Spectrum of a time-independent reference K0, with eigenvalues grouped into
/// degenerate clusters: a new cluster starts where the gap to the previous
/// eigenvalue exceeds rel_gap * (spectral range).
struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Matrix vectors;           // orthonormal columns
    std::vector<int> cluster; // cluster id per eigenvalue
    int cluster_count{0};

    /// Throws std::invalid_argument if k0 is not square, d < 2, or not Hermitian.
    static EigenSystem of(const Matrix& k0, double rel_gap = 1e-9);
    Matrix reconstruct() const;
    Eigen::Index dim() const { return values.size(); }
};

struct AutonomousStep {
    Matrix d;  // time average of V under K0: block-diagonal part over clusters
    Matrix w;  // anti-Hermitian generator, [K0, W] + V = D
};

/// Solves [K0, D] = 0 and [K0, W] + V = D in the eigenbasis of K0:
/// D_jk = V_jk within a cluster, W_jk = -V_jk / (E_j - E_k) across clusters.
AutonomousStep autonomous_average(const EigenSystem& k0, const Matrix& v);

/// Vbar(t) = U_H0(t, t_i) V(t_i) U_H0^dagger(t, t_i); equals V(t_i) for t <= t_i.
Matrix pulsed_vbar(const Propagator& u_h0, const Matrix& v1_ti, double ti, double t);

struct PulsedFirstStep {
    Matrix s1;     // U_H0(t0,t_i) e^{-i(t-t0) eps V1(t_i)} U_H0^dagger(t0,t_i)
    Matrix u_he1;  // U_H0(t,t_i) e^{-i(t-t0) eps V1(t_i)} U_H0^dagger(t0,t_i)
};

PulsedFirstStep pulsed_s1_and_he1(const Propagator& u_h0, const Matrix& v1_ti, double epsilon,
                                  double ti, double t, double t0);

/// Vhat(t) = int_{t_i}^t U(t,u) [V(u) - Vbar(u)] U^dagger(t,u) du by composite
/// Simpson, doubling the mesh until successive estimates agree to tol (relative
/// to max(1, |Vhat|)). Zero for t <= t_i. Throws IntegrationError when the
/// mesh budget is exhausted.
Matrix hatv_general(const Propagator& u, const OperatorFn& v, const OperatorFn& vbar, double ti,
                    double t, double tol = 1e-9);

/// Truncated remainder series
///   V_{p+1} = sum_{k=1}^{K} i^k eps^((k-1) 2^(p-1)) / (k+1)! { k ad^k(Vhat, V) + ad^k(Vhat, D) }.
/// Summation stops early once two consecutive terms fall below 1e-17 of the
/// running sum.
Matrix remainder_truncated(const Matrix& vhat, const Matrix& v, const Matrix& d, double epsilon,
                           int p, int max_terms = 30);

/// Assembles the pulsed propagator from the level transforms T_p (given as
/// functions of time; n = transforms.size()).
Matrix pulsed_propagator_general(std::span<const OperatorFn> transforms, const Propagator& u_h0,
                                 const Matrix& v1_ti, double epsilon, double ti, double t,
                                 double t0);

/// H(t) = H0(t) + eps V1(t) with V1 pulsed at t_i.
struct PulsedProblem {
    Propagator u_h0;
    OperatorFn v1;
    double epsilon{0.0};
    double t_start{0.0};
    double t_end{1.0};
};

struct PulsedHierarchyOptions {
    std::size_t mesh_points = 4001;  // odd, uniform on [t_start, t_end]
    int series_terms = 30;
};

/// Per-level Vhat_p on a uniform mesh. Each level is stored pulled back to t_i,
/// W_p(t) = U(t_i,t) Vhat_p(t) U^dagger(t_i,t), with its derivative, and
/// interpolated by cubic Hermite between mesh points.
class PulsedHierarchy {
public:
    PulsedHierarchy(PulsedProblem problem, int levels, PulsedHierarchyOptions options);

    int levels() const { return levels_; }
    const PulsedProblem& problem() const { return problem_; }
    const std::vector<double>& mesh() const { return mesh_; }

    Matrix v1_ti() const { return v1_ti_; }
    Matrix vhat(int p, double t) const;
    /// T_p(t) = exp(-i eps^(2^(p-1)) Vhat_p(t))
    Matrix transform(int p, double t) const;
    std::vector<OperatorFn> transforms(int levels = -1) const;

    /// Pulsed propagator truncated at `levels` (default: all).
    Matrix propagator(double t, double t0, int levels = -1) const;

private:
    // U(t, t_i) of the level's reference: U_H0 for p = 1, U_He1 for p > 1.
    Matrix level_frame(int p, double t) const;

    PulsedProblem problem_;
    int levels_;
    PulsedHierarchyOptions options_;
    Matrix v1_ti_;
    std::vector<double> mesh_;
    std::vector<std::vector<Matrix>> pulled_;   // [level][mesh] W_p
    std::vector<std::vector<Matrix>> dpulled_;  // [level][mesh] dW_p/dt
};

}  // namespace kamprop::general
