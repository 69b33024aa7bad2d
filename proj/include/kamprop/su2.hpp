// su2.hpp: Pauli-basis algebra for traceless Hermitian 2x2 operators and SU(2) unitaries.
//
// Conventions: sigma_1, sigma_2, sigma_3 are the standard Pauli matrices, basis
// state |+1> is the first column of sigma_3 and |-1> the second.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>

namespace kamprop {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;

/// Real 3-vector v representing the traceless Hermitian operator v . sigma.
struct PauliVector {
    double x{0.0};
    double y{0.0};
    double z{0.0};

    constexpr PauliVector() = default;
    constexpr PauliVector(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    static constexpr PauliVector e1() { return {1.0, 0.0, 0.0}; }
    static constexpr PauliVector e2() { return {0.0, 1.0, 0.0}; }
    static constexpr PauliVector e3() { return {0.0, 0.0, 1.0}; }

    double dot(const PauliVector& o) const { return x * o.x + y * o.y + z * o.z; }
    bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
    bool is_zero() const { return x == 0.0 && y == 0.0 && z == 0.0; }

    PauliVector& operator+=(const PauliVector& o) { x += o.x; y += o.y; z += o.z; return *this; }
    PauliVector& operator-=(const PauliVector& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    PauliVector& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }

    friend PauliVector operator+(PauliVector a, const PauliVector& b) { return a += b; }
    friend PauliVector operator-(PauliVector a, const PauliVector& b) { return a -= b; }
    friend PauliVector operator-(const PauliVector& a) { return {-a.x, -a.y, -a.z}; }
    friend PauliVector operator*(double s, PauliVector a) { return a *= s; }
    friend PauliVector operator*(PauliVector a, double s) { return a *= s; }
    friend bool operator==(const PauliVector&, const PauliVector&) = default;
};

/// The three Pauli matrices, index 0..2 for sigma_1..sigma_3.
const std::array<Mat2, 3>& pauli_matrices();

/// x sigma_1 + y sigma_2 + z sigma_3.
Mat2 pauli_to_matrix(const PauliVector& v);

/// Pauli coordinates of the traceless part of m: v_k = Re tr(m sigma_k) / 2.
PauliVector matrix_to_pauli(const Mat2& m);

/// a x b. Callers supply the 2i of [a.sigma, b.sigma] = 2i (a x b).sigma.
PauliVector cross_commutator(const PauliVector& a, const PauliVector& b);

/// |v|, which equals sqrt(-det(v.sigma)).
double r_norm(const PauliVector& v);

/// Rotates (x, y) by phi in the x -> y sense, z fixed. This is conjugation by
/// exp(-i phi sigma_3 / 2):  exp(-i phi s3/2) s1 exp(+i phi s3/2) = cos(phi) s1 + sin(phi) s2.
PauliVector rotate_z(const PauliVector& v, double phi);

/// Element of SU(2) (or U(2) when built from a general unitary matrix).
/// Construction from a raw matrix checks ||U^dagger U - I||_F <= 1e-12 and
/// | |det U| - 1 | <= 1e-12; products of checked values are trusted.
class Unitary2 {
public:
    static constexpr double kUnitarityTol = 1e-12;

    Unitary2() : m_(Mat2::Identity()) {}

    /// Throws std::invalid_argument if m is not unitary to kUnitarityTol.
    static Unitary2 from_matrix(const Mat2& m);
    static Unitary2 identity() { return Unitary2{}; }

    const Mat2& matrix() const { return m_; }
    cplx operator()(int row, int col) const { return m_(row, col); }

    Unitary2 adjoint() const { return Unitary2(m_.adjoint(), Unchecked{}); }
    cplx determinant() const { return m_.determinant(); }

    /// ||U^dagger U - I||_F
    double unitarity_defect() const;

    friend Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
        return Unitary2(a.m_ * b.m_, Unchecked{});
    }

private:
    struct Unchecked {};
    Unitary2(const Mat2& m, Unchecked) : m_(m) {}

    friend Unitary2 exp_traceless(double theta, const PauliVector& v);

    Mat2 m_;
};

/// exp(-i theta vhat.sigma) = cos(theta) I - i sin(theta) vhat.sigma, vhat = v/|v|.
/// Throws std::invalid_argument("zero axis") when v = 0 and theta != 0.
Unitary2 exp_traceless(double theta, const PauliVector& v);

/// Two-level state (<+1|psi>, <-1|psi>).
struct StateVector2 {
    cplx plus{0.0};
    cplx minus{0.0};

    static StateVector2 lower() { return {cplx{0.0}, cplx{1.0}}; }
    static StateVector2 upper() { return {cplx{1.0}, cplx{0.0}}; }

    double norm() const { return std::sqrt(std::norm(plus) + std::norm(minus)); }
    /// |<+1|psi>|^2
    double p_plus() const { return std::norm(plus); }
};

StateVector2 operator*(const Unitary2& u, const StateVector2& psi);

}  // namespace kamprop
