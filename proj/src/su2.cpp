#include "kamprop/su2.hpp"

#include <stdexcept>

namespace kamprop {

namespace {
constexpr cplx I{0.0, 1.0};
}

const std::array<Mat2, 3>& pauli_matrices() {
    static const std::array<Mat2, 3> sigma = [] {
        std::array<Mat2, 3> s;
        s[0] << 0.0, 1.0, 1.0, 0.0;
        s[1] << 0.0, -I, I, 0.0;
        s[2] << 1.0, 0.0, 0.0, -1.0;
        return s;
    }();
    return sigma;
}

Mat2 pauli_to_matrix(const PauliVector& v) {
    Mat2 m;
    m << cplx{v.z, 0.0}, cplx{v.x, -v.y},
         cplx{v.x, v.y}, cplx{-v.z, 0.0};
    return m;
}

PauliVector matrix_to_pauli(const Mat2& m) {
    return {0.5 * (m(0, 1).real() + m(1, 0).real()),
            0.5 * (m(1, 0).imag() - m(0, 1).imag()),
            0.5 * (m(0, 0).real() - m(1, 1).real())};
}

PauliVector cross_commutator(const PauliVector& a, const PauliVector& b) {
    return {a.y * b.z - a.z * b.y,
            a.z * b.x - a.x * b.z,
            a.x * b.y - a.y * b.x};
}

double r_norm(const PauliVector& v) {
    return std::hypot(v.x, v.y, v.z);
}

PauliVector rotate_z(const PauliVector& v, double phi) {
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Unitary2 Unitary2::from_matrix(const Mat2& m) {
    if (!m.allFinite()) {
        throw std::invalid_argument("Unitary2: non-finite entries");
    }
    const double defect = (m.adjoint() * m - Mat2::Identity()).norm();
    const double det_defect = std::abs(std::abs(m.determinant()) - 1.0);
    if (defect > kUnitarityTol || det_defect > kUnitarityTol) {
        throw std::invalid_argument("Unitary2: matrix is not unitary");
    }
    return Unitary2(m, Unchecked{});
}

double Unitary2::unitarity_defect() const {
    return (m_.adjoint() * m_ - Mat2::Identity()).norm();
}

Unitary2 exp_traceless(double theta, const PauliVector& v) {
    if (theta == 0.0) {
        return Unitary2::identity();
    }
    const double r = r_norm(v);
    if (r == 0.0) {
        throw std::invalid_argument("exp_traceless: zero axis");
    }
    const double c = std::cos(theta);
    const double s = std::sin(theta) / r;
    // cos(theta) I - i s (v.sigma)
    Mat2 m;
    m << cplx{c, -s * v.z}, cplx{-s * v.y, -s * v.x},
         cplx{s * v.y, -s * v.x}, cplx{c, s * v.z};
    return Unitary2(m, Unitary2::Unchecked{});
}

StateVector2 operator*(const Unitary2& u, const StateVector2& psi) {
    return {u(0, 0) * psi.plus + u(0, 1) * psi.minus,
            u(1, 0) * psi.plus + u(1, 1) * psi.minus};
}

}  // namespace kamprop
