#include "kamprop/su2.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <numbers>
#include <stdexcept>

using namespace kamprop;
using test_util::random_pauli;
using test_util::uniform;

namespace {
const cplx I{0.0, 1.0};
}

TEST_CASE("pauli_to_matrix basis vectors") {
    CHECK((pauli_to_matrix(PauliVector::e3()) - pauli_matrices()[2]).norm() == 0.0);
    CHECK((pauli_to_matrix(PauliVector::e1()) - pauli_matrices()[0]).norm() == 0.0);
    const Mat2 s3 = pauli_matrices()[2];
    CHECK(s3(0, 0) == cplx(1.0));
    CHECK(s3(1, 1) == cplx(-1.0));
}

TEST_CASE("pauli_to_matrix of (1,2,3) is traceless with eigenvalues +-sqrt(14)") {
    const Mat2 m = pauli_to_matrix({1.0, 2.0, 3.0});
    CHECK(std::abs(m.trace()) == 0.0);
    CHECK((m - m.adjoint()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Mat2> es(m);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-std::sqrt(14.0)).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(std::sqrt(14.0)).epsilon(1e-14));
}

TEST_CASE("matrix_to_pauli inverts pauli_to_matrix") {
    for (int k = 0; k < 100; ++k) {
        const PauliVector v = random_pauli(3.0);
        const PauliVector w = matrix_to_pauli(pauli_to_matrix(v));
        CHECK(r_norm(v - w) <= 1e-15);
    }
}

TEST_CASE("cross_commutator examples") {
    CHECK(cross_commutator(PauliVector::e1(), PauliVector::e2()) == PauliVector::e3());
    const PauliVector a{0.3, -1.2, 2.5};
    CHECK(cross_commutator(a, a).is_zero());
    // [s1, s2] = 2i s3
    const auto& s = pauli_matrices();
    CHECK((s[0] * s[1] - s[1] * s[0] - 2.0 * I * s[2]).norm() == 0.0);
}

TEST_CASE("commutator homomorphism on 1000 random pairs") {
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const PauliVector a = random_pauli(), b = random_pauli();
        const Mat2 ma = pauli_to_matrix(a), mb = pauli_to_matrix(b);
        const Mat2 direct = ma * mb - mb * ma;
        const Mat2 via = 2.0 * I * pauli_to_matrix(cross_commutator(a, b));
        worst = std::max(worst, (direct - via).norm());
    }
    CHECK(worst <= 1e-13);
}

TEST_CASE("r_norm examples and determinant identity") {
    CHECK(r_norm(PauliVector::e3()) == 1.0);
    CHECK(r_norm({3.0, 4.0, 0.0}) == 5.0);
    for (int k = 0; k < 100; ++k) {
        const PauliVector v = random_pauli(2.0);
        const double det = pauli_to_matrix(v).determinant().real();
        CHECK(r_norm(v) == doctest::Approx(std::sqrt(-det)).epsilon(1e-14));
    }
}

TEST_CASE("exp_traceless examples") {
    const Unitary2 id = exp_traceless(0.0, PauliVector{});
    CHECK((id.matrix() - Mat2::Identity()).norm() == 0.0);
    CHECK((exp_traceless(0.0, {1.0, 2.0, 3.0}).matrix() - Mat2::Identity()).norm() == 0.0);

    const Unitary2 u = exp_traceless(std::numbers::pi / 2, PauliVector::e3());
    CHECK((u.matrix() - (-I * pauli_matrices()[2])).norm() <= 1e-15);

    CHECK_THROWS_WITH_AS(exp_traceless(0.4, PauliVector{}), "exp_traceless: zero axis",
                         std::invalid_argument);
}

TEST_CASE("exp_traceless matches the scaling-and-squaring exponential") {
    double worst = 0.0;
    for (int k = 0; k < 200; ++k) {
        const PauliVector v = random_pauli(2.0);
        const double theta = uniform(-10.0, 10.0);
        const Eigen::MatrixXcd vhat = pauli_to_matrix(v * (1.0 / r_norm(v)));
        const Eigen::MatrixXcd oracle = test_util::expm_oracle(vhat, theta);
        const Unitary2 u = exp_traceless(theta, v);
        worst = std::max(worst, (u.matrix() - oracle).norm());
        CHECK(u.unitarity_defect() <= 1e-12);
        CHECK(std::abs(u.determinant() - 1.0) <= 1e-12);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("rotate_z examples") {
    const PauliVector v{0.2, -0.7, 1.1};
    CHECK(rotate_z(v, 0.0) == v);
    CHECK(r_norm(rotate_z(PauliVector::e1(), std::numbers::pi / 2) - PauliVector::e2()) <= 1e-16);
}

TEST_CASE("rotate_z is conjugation by exp(-i phi sigma_3 / 2)") {
    for (int k = 0; k < 200; ++k) {
        const PauliVector v = random_pauli(2.0);
        const double phi = uniform(-7.0, 7.0);
        const Unitary2 u = exp_traceless(phi / 2, PauliVector::e3());
        const Mat2 conj = u.matrix() * pauli_to_matrix(v) * u.matrix().adjoint();
        CHECK((pauli_to_matrix(rotate_z(v, phi)) - conj).norm() <= 1e-12);
    }
}

TEST_CASE("rotate_z preserves the norm and composes") {
    for (int k = 0; k < 500; ++k) {
        const PauliVector v = random_pauli(5.0);
        const double a = uniform(-10.0, 10.0), b = uniform(-10.0, 10.0);
        CHECK(std::abs(r_norm(rotate_z(v, a)) - r_norm(v)) <= 1e-13);
        CHECK(r_norm(rotate_z(rotate_z(v, a), b) - rotate_z(v, a + b)) <= 1e-12);
    }
}

TEST_CASE("Unitary2 construction checks unitarity") {
    Mat2 m = Mat2::Identity();
    CHECK_NOTHROW(Unitary2::from_matrix(m));
    m(0, 0) = 1.0 + 1e-9;
    CHECK_THROWS_AS(Unitary2::from_matrix(m), std::invalid_argument);
    m(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Unitary2::from_matrix(m), std::invalid_argument);
    // a global phase is still unitary
    CHECK_NOTHROW(Unitary2::from_matrix(std::polar(1.0, 0.3) * Mat2::Identity()));
}

TEST_CASE("Unitary2 products and state application") {
    const Unitary2 a = exp_traceless(0.7, {1.0, 0.5, -0.2});
    const Unitary2 b = exp_traceless(-1.9, {0.0, 0.3, 1.0});
    const Unitary2 ab = a * b;
    CHECK(ab.unitarity_defect() <= 1e-14);
    CHECK(((ab * ab.adjoint()).matrix() - Mat2::Identity()).norm() <= 1e-14);

    // pi pulse about x flips |-1> into -i|+1>
    const StateVector2 psi = exp_traceless(std::numbers::pi / 2, PauliVector::e1()) * StateVector2::lower();
    CHECK(psi.p_plus() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(psi.plus - (-I)) <= 1e-15);
    CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-15));
}
