#include "kamprop/experiments.hpp"
#include "kamprop/kam_general.hpp"
#include "kamprop/kam_su2.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <numbers>

using namespace kamprop;
using std::numbers::pi;
using test_util::uniform;

namespace {

KamHierarchy make(double eps, int n, double area = pi / 2, double tol = 1e-11) {
    return build_hierarchy(KamConfig{eps, n, PulseShape::sine_squared(area), tol, tol * 1e-3});
}

// Composite Simpson of f over [a, b] with an even number of intervals.
template <class F>
PauliVector simpson(F&& f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    PauliVector sum = f(a) + f(b);
    for (int k = 1; k < intervals; ++k) {
        sum += (k % 2 == 1 ? 4.0 : 2.0) * f(a + k * h);
    }
    return sum * (h / 3.0);
}

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("v1_at examples") {
    const PulseShape p = PulseShape::sine_squared(pi / 2);
    CHECK(v1_at(p, 0.0).is_zero());
    CHECK(v1_at(p, -1.0).is_zero());
    // A(1/2) = pi/4 for A = pi/2
    const PauliVector mid = v1_at(p, 0.5);
    CHECK(r_norm(mid - PauliVector{0.0, 1.0, -1.0}) <= 1e-15);
    // A(1) = pi/2
    CHECK(r_norm(v1_at(p, 1.0) - PauliVector{0.0, 0.0, -2.0}) <= 1e-15);
}

TEST_CASE("xi_gamma limits and closed-form points") {
    const XiGamma zero = xi_gamma(0.0);
    CHECK(zero.xi == 0.5);
    CHECK(zero.gamma == doctest::Approx(-1.0 / 3.0).epsilon(1e-16));
    const XiGamma at_pi = xi_gamma(pi);
    CHECK(at_pi.xi == doctest::Approx(-2.0 / (pi * pi)).epsilon(1e-14));
    CHECK(at_pi.gamma == doctest::Approx(-1.0 / (pi * pi)).epsilon(1e-14));
}

TEST_CASE("xi_gamma against high-precision values") {
    struct Row {
        double x, xi, gamma;
    };
    // 40-digit evaluations of the closed forms
    const Row rows[] = {
        {1e-8, 0.4999999999999999875, -0.33333333333333333},
        {0.000999, 0.49999987524988191671, -0.33333330006663451905},
        {0.001, 0.49999987500000694444, -0.33333330000000119048},
        {0.001001, 0.49999987474988197226, -0.33333329993330119525},
        {0.3, 0.48880612360008769082, -0.3303429601354729338},
        {0.5, 0.46918132476989686501, -0.32507406127213313772},
        {0.75, 0.43185411358457157575, -0.31495610872407348622},
        {2.0, 0.10061200427605525095, -0.21769888748999580867},
        {10.0, -0.072792826379701505863, -0.0078466941798751547092},
    };
    for (const Row& r : rows) {
        CAPTURE(r.x);
        const XiGamma v = xi_gamma(r.x);
        CHECK(std::abs(v.xi - r.xi) <= 1e-15 * std::abs(r.xi) + 1e-17);
        CHECK(std::abs(v.gamma - r.gamma) <= 1e-14 * std::abs(r.gamma));
    }
}

TEST_CASE("xi_gamma is continuous across branch switches") {
    // both sides of 1e-3 against the direct closed form in 40 digits
    CHECK(std::abs(xi_gamma(0.999e-3).xi - 0.49999987524988191671) <= 1e-12);
    CHECK(std::abs(xi_gamma(1.001e-3).xi - 0.49999987474988197226) <= 1e-12);
    CHECK(std::abs(xi_gamma(0.999e-3).gamma - -0.33333330006663451905) <= 1e-12);
    CHECK(std::abs(xi_gamma(1.001e-3).gamma - -0.33333329993330119525) <= 1e-12);
    const double t = kXiGammaSeriesThreshold;
    const XiGamma below = xi_gamma(std::nextafter(t, 0.0)), at = xi_gamma(t);
    CHECK(std::abs(below.xi - at.xi) <= 1e-15);
    CHECK(std::abs(below.gamma - at.gamma) <= 1e-15);
}

TEST_CASE("level_prefactor") {
    CHECK(level_prefactor(0.5, 1) == 0.5);
    CHECK(level_prefactor(0.5, 3) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(level_prefactor(0.0, 4) == 0.0);
    CHECK(level_prefactor(1e-3, 12) == 0.0);  // 1e-6144 floors to 0
    CHECK(level_prefactor(0.9, 12) == doctest::Approx(std::pow(0.9, 2048.0)).epsilon(1e-10));
    CHECK_THROWS_AS(level_prefactor(0.5, 0), std::invalid_argument);
}

TEST_CASE("next_level examples") {
    const PauliVector v{0.3, -0.4, 0.8};
    CHECK(r_norm(next_level(v, 2.5 * v, 0.7, 1)) <= 1e-15);
    CHECK(next_level(PauliVector::e3(), 2.0 * PauliVector::e3(), 0.7, 1).is_zero());

    // x -> 0 with unit orthogonal vectors
    const PauliVector a = PauliVector::e1(), b = PauliVector::e2();
    const double eps = 1e-7;
    const PauliVector expected = -cross_commutator(a, b) + (4.0 / 3.0) * eps * cross_commutator(a, cross_commutator(a, b));
    CHECK(r_norm(next_level(b, a, eps, 1) - expected) <= 1e-13);
}

TEST_CASE("next_level matches the K = 30 commutator series") {
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
        const PauliVector v = test_util::random_pauli(2.0);
        const PauliVector vhat = test_util::random_pauli(2.0);
        const int p = 1 + k % 3;
        // keep x = 2 eps^(2^(p-1)) |vhat| below 1
        const double bound = std::pow(0.99 / (2.0 * r_norm(vhat)), 1.0 / std::ldexp(1.0, p - 1));
        const double eps = uniform(0.0, std::min(bound, 3.0));
        const PauliVector resummed = next_level(v, vhat, eps, p);
        const general::Matrix series = general::remainder_truncated(
            pauli_to_matrix(vhat), pauli_to_matrix(v), general::Matrix::Zero(2, 2), eps, p, 30);
        worst = std::max(worst, max_abs(pauli_to_matrix(resummed) - series));
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("hierarchy at eps = 0 is the plain integral of v1") {
    const PulseShape pulse = PulseShape::sine_squared(pi / 2);
    const KamHierarchy h = make(0.0, 1);
    const PauliVector oracle = simpson([&](double u) { return v1_at(pulse, u); }, 0.0, 1.0, 4000);
    CHECK(r_norm(h.vhat(1, 1.0) - oracle) <= 1e-9);
}

TEST_CASE("null pulse gives a vanishing hierarchy") {
    const KamHierarchy h = build_hierarchy(KamConfig{0.8, 4, PulseShape::null_pulse(), 1e-10, 1e-13});
    for (int p = 1; p <= 4; ++p) {
        for (double t : {0.0, 0.3, 1.0}) {
            CHECK(h.vhat(p, t).is_zero());
            CHECK(h.v(p, t).is_zero());
        }
    }
    const Unitary2 u = propagator_lab(h, 0.9, 0.1);
    CHECK((u.matrix() - reference_propagator(0.8, 0.9, 0.1).matrix()).norm() <= 1e-15);
}

TEST_CASE("vhat_2 at eps = 1 against nested Simpson quadrature") {
    // Vhat_p(t) = int_0^t R_z(2 eps (t - u)) v_p(u) du, v_2 = next_level(v_1, vhat_1)
    const double eps = 1.0;
    const PulseShape pulse = PulseShape::sine_squared(pi / 2);
    const int outer = 4000;
    const auto vhat1 = [&](double u) {
        if (u == 0.0) return PauliVector{};
        return simpson([&](double s) { return rotate_z(v1_at(pulse, s), 2.0 * eps * (u - s)); }, 0.0, u,
                       400);
    };
    const auto v2 = [&](double u) { return next_level(v1_at(pulse, u), vhat1(u), eps, 1); };
    const PauliVector oracle =
        simpson([&](double u) { return rotate_z(v2(u), 2.0 * eps * (1.0 - u)); }, 0.0, 1.0, outer);
    const KamHierarchy h = make(eps, 2);
    CHECK(r_norm(h.vhat(2, 1.0) - oracle) <= 1e-6);
    // the first level through the same quadrature
    CHECK(r_norm(h.vhat(1, 0.6) - vhat1(0.6)) <= 1e-9);
}

TEST_CASE("hierarchy vanishes before the pulse") {
    const KamHierarchy h = make(0.7, 5);
    for (int p = 1; p <= 5; ++p) {
        CHECK(h.vhat(p, 0.0).is_zero());
        CHECK(h.vhat(p, -0.5).is_zero());
        CHECK(h.v(p, 0.0).is_zero());
        CHECK(h.v(p, -0.5).is_zero());
        CHECK(h.vhat(p, 0.6).is_finite());
    }
    CHECK_THROWS_AS(h.vhat(6, 0.5), std::out_of_range);
    CHECK_THROWS_AS(h.vhat(0, 0.5), std::out_of_range);
}

TEST_CASE("kam_T examples") {
    const KamHierarchy h = make(0.6, 3);
    for (int p = 1; p <= 3; ++p) {
        CHECK((kam_T(h, p, 0.0).matrix() - Mat2::Identity()).norm() == 0.0);
        for (int k = 0; k < 10; ++k) {
            const double t = uniform(0.0, 1.0);
            const PauliVector vh = h.vhat(p, t);
            const Unitary2 oracle = exp_traceless(level_prefactor(0.6, p) * r_norm(vh), vh);
            CHECK((kam_T(h, p, t).matrix() - oracle.matrix()).norm() <= 1e-14);
        }
    }

    // Vhat_1(t) = (0, 0, t) built from a prescribed trajectory
    const OdeRhs along_z = [](double, std::span<const double>, std::span<double> dy) {
        dy[0] = 0.0;
        dy[1] = 0.0;
        dy[2] = 1.0;
    };
    const double eps = 0.4;
    const KamHierarchy diag(KamConfig{eps, 1, PulseShape::sine_squared(1.0)},
                            integrate(along_z, {0.0, 0.0, 0.0}, 0.0, 1.0));
    const double rho = 0.7;
    const Unitary2 t = kam_T(diag, 1, rho);
    CHECK(std::abs(t(0, 0) - std::polar(1.0, -eps * rho)) <= 1e-14);
    CHECK(std::abs(t(1, 1) - std::polar(1.0, eps * rho)) <= 1e-14);
    CHECK(std::abs(t(0, 1)) <= 1e-15);
}

TEST_CASE("propagator_interaction examples and telescoping") {
    const double eps = 0.9;
    const KamHierarchy h = make(eps, 4);
    const Unitary2 n0 = propagator_interaction(h, 0.8, 0.1, 0);
    CHECK((n0.matrix() - reference_propagator(eps, 0.8, 0.1).matrix()).norm() <= 1e-15);
    CHECK((propagator_interaction(h, 0.37, 0.37).matrix() - Mat2::Identity()).norm() <= 1e-14);
    for (int k = 0; k < 50; ++k) {
        const double t = uniform(-0.2, 1.2), t1 = uniform(-0.2, 1.2), t0 = uniform(-0.2, 1.2);
        const Unitary2 direct = propagator_interaction(h, t, t0);
        const Unitary2 split = propagator_interaction(h, t, t1) * propagator_interaction(h, t1, t0);
        CHECK((direct.matrix() - split.matrix()).norm() <= 1e-12);
    }
    CHECK_THROWS_AS(propagator_interaction(h, 0.5, 0.0, 5), std::out_of_range);
}

TEST_CASE("propagator_lab: eps = 0 pi pulse is exact") {
    const KamHierarchy h = make(0.0, 5);
    for (int n = 0; n <= 5; ++n) {
        const Unitary2 u = propagator_lab(h, 1.0, 0.0, n);
        const Unitary2 expected = exp_traceless(pi / 2, PauliVector::e1());
        CHECK((u.matrix() - expected.matrix()).norm() <= 1e-14);
        CHECK((u * StateVector2::lower()).p_plus() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("propagator_lab: eps = 1, n = 5 against the reference integrator") {
    const PulseShape pulse = PulseShape::sine_squared(pi / 2);
    const KamHierarchy h = make(1.0, 5, pi / 2, 1e-9);
    const StateVector2 psi = propagator_lab(h, 1.0, 0.0) * StateVector2::lower();
    const ReferenceResult ref = reference_state(1.0, pulse, 1e-10);
    CHECK(delta_n(ref.state, psi) <= 1e-4);
}

TEST_CASE("propagators are unitary for every truncation") {
    for (double eps : {0.0, 0.1, 1.0, 5.0, 10.0}) {
        const KamHierarchy h = make(eps, 6, pi / 2, 1e-9);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const double t = uniform(0.0, 1.0), t0 = uniform(0.0, 1.0);
            for (int n = 0; n <= 6; ++n) {
                worst = std::max(worst, propagator_lab(h, t, t0, n).unitarity_defect());
                worst = std::max(worst, propagator_interaction(h, t, t0, n).unitarity_defect());
            }
        }
        CAPTURE(eps);
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("large eps keeps generators finite") {
    const KamHierarchy h = make(10.0, 12, pi / 2, 1e-9);
    for (int p = 1; p <= 12; ++p) {
        CHECK(h.generator(p, 0.7).is_finite());
        CHECK(h.vhat(p, 0.7).is_finite());
    }
}

TEST_CASE("KamConfig validation") {
    CHECK_THROWS_AS(build_hierarchy(KamConfig{-0.1, 2}), std::invalid_argument);
    CHECK_THROWS_AS(build_hierarchy(KamConfig{0.1, 13}), std::invalid_argument);
    CHECK_THROWS_AS(build_hierarchy(KamConfig{NAN, 2}), std::invalid_argument);
    KamConfig c{0.1, 2};
    c.hierarchy_tol = 0.0;
    CHECK_THROWS_AS(build_hierarchy(c), std::invalid_argument);
}
