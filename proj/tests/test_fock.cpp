#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jumpstats/fock.hpp"
#include "jumpstats/lde.hpp"

using namespace jumpstats;
using namespace jumpstats::fock;

namespace {
constexpr double kGammaW = 4.0;
constexpr double kDt = 1e-6;
} // namespace

TEST_CASE("joint step leaves vacuum + ground untouched") {
    SingleModeState psi(3);
    psi.at(1, 0) = 1.0;
    const SingleModeState out = joint_step(psi, kGammaW, kDt);
    CHECK((out.amp - psi.amp).norm() == 0.0);
}

TEST_CASE("joint step absorbs a single photon with the expected amplitude") {
    SingleModeState psi(3);
    psi.at(1, 1) = 1.0; // |g>|1>
    const SingleModeState out = joint_step(psi, kGammaW, kDt);
    const Complex amp = out.at(0, 0);
    CHECK(amp.real() == doctest::Approx(0.0));
    CHECK(amp.imag() == doctest::Approx(-std::sqrt(kGammaW * kDt)).epsilon(1e-14));
}

TEST_CASE("projections recover the linear-order matrices exactly") {
    for (int n : {0, 1, 2, 3}) {
        const KrausSet rec = effective_kraus_single_mode(n, kGammaW, kDt);
        // emission and absorption amplitudes
        CHECK(std::abs(rec.m_e(1, 0) - Complex(0.0, -std::sqrt((n + 1) * kGammaW * kDt))) < 1e-15);
        if (n >= 1) {
            CHECK(std::abs(rec.m_a(0, 1) - Complex(0.0, -std::sqrt(n * kGammaW * kDt))) < 1e-15);
        } else {
            CHECK(rec.m_a.cwiseAbs().maxCoeff() == 0.0);
        }
        CHECK(std::abs(rec.m_e(0, 0)) + std::abs(rec.m_e(0, 1)) + std::abs(rec.m_e(1, 1)) == 0.0);
        // null block equals the linear form at machine precision
        const Operator2 linear = single_mode_null_reference(n, kGammaW, kDt);
        CHECK((rec.m_o - linear).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("single-mode reconstruction matches the closed-form Kraus set") {
    // n = 1 at trajectory scale: the quoted amplitudes 0.06325 and 0.04472
    const KrausSet rec = effective_kraus_single_mode(1, 4.0, 5e-4);
    CHECK(std::abs(rec.m_e(1, 0)) == doctest::Approx(std::sqrt(0.004)).epsilon(1e-12));
    CHECK(std::abs(rec.m_a(0, 1)) == doctest::Approx(std::sqrt(0.002)).epsilon(1e-12));

    for (int n : {0, 1, 2}) {
        const KrausSet projected = effective_kraus_single_mode(n, kGammaW, kDt);
        const KrausSet closed = radiative_kraus(kGammaW, double(n), kDt);
        CHECK((projected.m_a - closed.m_a).cwiseAbs().maxCoeff() < 1e-14);
        CHECK((projected.m_e - closed.m_e).cwiseAbs().maxCoeff() < 1e-14);
        const double bound = std::pow((n + 1) * kGammaW * kDt, 2);
        CHECK((projected.m_o - closed.m_o).cwiseAbs().maxCoeff() < bound);

        const Operator2 total = projected.m_a.adjoint() * projected.m_a +
                                projected.m_e.adjoint() * projected.m_e +
                                projected.m_o.adjoint() * projected.m_o;
        CHECK((total - identity2()).cwiseAbs().maxCoeff() < bound);
    }
}

TEST_CASE("joint step reports truncation leakage instead of silently dropping it") {
    SingleModeState psi(2);
    psi.at(0, 2) = 1.0; // excited emitter at the top field level
    CHECK_THROWS_AS(joint_step(psi, kGammaW, 1e-3), std::runtime_error);
}

TEST_CASE("exact block exponential converges linearly to the truncated step") {
    // relative deviation of the emission amplitude is gamma_w dt (n+1)/6
    SingleModeState psi(4);
    psi.at(0, 2) = 1.0;
    const auto relative_dev = [&](double dt) {
        const SingleModeState lin = joint_step(psi, kGammaW, dt);
        const SingleModeState exact = joint_step_exact(psi, kGammaW, dt);
        const Complex a_lin = lin.at(1, 3);
        const Complex a_exact = exact.at(1, 3);
        return std::abs(a_lin - a_exact) / std::abs(a_lin);
    };
    const double dt0 = 1e-4;
    const double ratio = relative_dev(dt0) / relative_dev(0.5 * dt0);
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.1));
    // and the exact amplitude is the block rotation sine
    const SingleModeState exact = joint_step_exact(psi, kGammaW, dt0);
    CHECK(std::abs(exact.at(1, 3) -
                   Complex(0.0, -std::sin(std::sqrt(kGammaW * dt0 * 3.0)))) < 1e-14);
}

TEST_CASE("two-mode squeezed preparation") {
    const TwoModeSqueezed tm = tmss_prepare(1.0);
    CHECK(tm.r == doctest::Approx(0.881373587019543).epsilon(1e-12));
    CHECK(tm.weights(1) / tm.weights(0) == doctest::Approx(0.5).epsilon(1e-12)); // tanh^2 r
    CHECK(tm.tail < 1e-12);
    CHECK(tm.n_max <= 45); // 45 certainly suffices for the tail bound
    CHECK(tm.mean_occupation() == doctest::Approx(1.0).epsilon(1e-10));

    const TwoModeSqueezed half = tmss_prepare(0.5);
    CHECK(half.r == doctest::Approx(0.6584789484624083).epsilon(1e-12));
    CHECK(half.mean_occupation() == doctest::Approx(0.5).epsilon(1e-10));

    CHECK_THROWS_AS(tmss_prepare(0.0), std::domain_error);
    CHECK_THROWS_AS(tmss_prepare(1.0, 5), std::runtime_error); // tail bound unreachable
}

TEST_CASE("tracing out the reference leaves the thermal-like probe marginal") {
    const TwoModeSqueezed tm = tmss_prepare(1.0);
    const int d = tm.n_max + 1;
    Eigen::MatrixXcd probe = Eigen::MatrixXcd::Zero(d, d);
    // |psi> = sum_n sqrt(P_n) |n, n>: partial trace over the reference is
    // diagonal with weights P_n
    for (int n = 0; n < d; ++n) {
        for (int m = 0; m < d; ++m) {
            if (n == m) probe(n, n) += std::sqrt(tm.weights(n)) * std::sqrt(tm.weights(m));
        }
    }
    for (int n = 0; n < d; ++n) {
        CHECK(probe(n, n).real() == doctest::Approx(tm.weights(n)).epsilon(1e-12));
    }
}

TEST_CASE("TMSS reconstruction recovers the continuous-occupation Kraus set") {
    for (double n_avg : {0.5, 1.0}) {
        const TmssReconstruction rec = effective_kraus_tmss(n_avg, kGammaW, kDt);
        CHECK(rec.dev_a < 1e-10);
        CHECK(rec.dev_e < 1e-10);
        CHECK(rec.dev_o < 10.0 * kGammaW * kDt * kGammaW * kDt);
        CHECK(std::abs(rec.orthogonal_weight) < 1e-12);
        CHECK(rec.norm_defect < 1e-10 + 100.0 * kGammaW * kDt * kGammaW * kDt);
        CHECK(rec.completeness_defect < 1e-9);
        CHECK(rec.tail < 1e-12);
    }
}

TEST_CASE("TMSS null-operator deviation shrinks quadratically in dt") {
    const TmssReconstruction full = effective_kraus_tmss(1.0, kGammaW, kDt);
    const TmssReconstruction half = effective_kraus_tmss(1.0, kGammaW, 0.5 * kDt);
    const double ratio = full.dev_o / half.dev_o;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
}

TEST_CASE("reconstructed Kraus set reproduces the measurement-free generator") {
    const double dt = 1e-4; // large enough that the O(dt^2) defect dominates roundoff
    const auto defect = [&](double step) {
        const TmssReconstruction rec = effective_kraus_tmss(1.0, kGammaW, step);
        const Superoperator4 map = sandwich_superop(rec.kraus.m_a, rec.kraus.m_a.adjoint()) +
                                   sandwich_superop(rec.kraus.m_e, rec.kraus.m_e.adjoint()) +
                                   sandwich_superop(rec.kraus.m_o, rec.kraus.m_o.adjoint());
        ModelParams p;
        p.gamma_m = 0.0;
        p.omega = 0.0; // the reconstruction has no Hamiltonian phase
        p.n_avg = 1.0;
        p.gamma_w = kGammaW;
        p.dt = step;
        const Superoperator4 generator = tilted_generator({0.0, 0.0}, p);
        return (map - (Superoperator4::Identity() + step * generator)).norm();
    };
    CHECK(defect(dt) < 10.0 * kGammaW * dt * kGammaW * dt);
    const double ratio = defect(dt) / defect(0.5 * dt);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}
