// qcore.hpp — Dense complex linear algebra for 2x2 emitter operators and
// 4x4 superoperators: Pauli/ladder constructors, column-stacking
// vectorization, sandwich superoperators, and a small non-Hermitian
// eigensolver with enforced residual contracts.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace jumpstats {

using Complex = std::complex<double>;
using Operator2 = Eigen::Matrix2cd;      // emitter operators; basis |e> = 0, |g> = 1
using DensityMatrix = Eigen::Matrix2cd;  // Hermitian, unit trace, PSD (see assert_valid_density)
using Superoperator4 = Eigen::Matrix4cd; // acts on column-stacked vec(rho)
using Ket2 = Eigen::Vector2cd;
using Vec4 = Eigen::Vector4cd;

// --------------------------- elementary operators ---------------------------

inline Operator2 identity2() { return Operator2::Identity(); }

inline Operator2 sigma_x() {
    Operator2 m;
    m << 0.0, 1.0,
         1.0, 0.0;
    return m;
}

// sigma_plus = |e><g|, sigma_minus = |g><e|
inline Operator2 sigma_plus() {
    Operator2 m = Operator2::Zero();
    m(0, 1) = 1.0;
    return m;
}

inline Operator2 sigma_minus() {
    Operator2 m = Operator2::Zero();
    m(1, 0) = 1.0;
    return m;
}

inline Ket2 ket_e() { return Ket2(1.0, 0.0); }
inline Ket2 ket_g() { return Ket2(0.0, 1.0); }
inline Ket2 ket_plus() { return Ket2(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)); }
inline Ket2 ket_minus() { return Ket2(1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0)); }

inline DensityMatrix projector_e() { return ket_e() * ket_e().adjoint(); }
inline DensityMatrix projector_g() { return ket_g() * ket_g().adjoint(); }

// --------------------------- vectorization ----------------------------------

// Column stacking: vec(rho) = (rho00, rho10, rho01, rho11).
inline Vec4 vec(const Operator2& m) {
    Vec4 v;
    v << m(0, 0), m(1, 0), m(0, 1), m(1, 1);
    return v;
}

inline Operator2 unvec(const Vec4& v) {
    Operator2 m;
    m << v(0), v(2),
         v(1), v(3);
    return m;
}

inline Superoperator4 kron2(const Operator2& a, const Operator2& b) {
    Superoperator4 k;
    k.block<2, 2>(0, 0) = a(0, 0) * b;
    k.block<2, 2>(0, 2) = a(0, 1) * b;
    k.block<2, 2>(2, 0) = a(1, 0) * b;
    k.block<2, 2>(2, 2) = a(1, 1) * b;
    return k;
}

// Superoperator of rho -> A rho B, i.e. vec(A rho B) = (B^T ⊗ A) vec(rho).
inline Superoperator4 sandwich_superop(const Operator2& a, const Operator2& b) {
    return kron2(b.transpose(), a);
}

// --------------------------- density-matrix checks --------------------------

// Smaller eigenvalue of a Hermitian 2x2 matrix.
inline double min_eigenvalue_hermitian(const DensityMatrix& rho) {
    const double half_trace = 0.5 * (rho(0, 0).real() + rho(1, 1).real());
    const double half_gap = 0.5 * (rho(0, 0).real() - rho(1, 1).real());
    return half_trace - std::sqrt(half_gap * half_gap + std::norm(rho(0, 1)));
}

inline bool is_valid_density(const DensityMatrix& rho, double tol = 1e-12) {
    if (!rho.allFinite()) return false;
    if (std::abs(rho(0, 1) - std::conj(rho(1, 0))) > tol) return false;
    if (std::abs(rho(0, 0).imag()) > tol || std::abs(rho(1, 1).imag()) > tol) return false;
    if (std::abs(rho.trace().real() - 1.0) > tol) return false;
    if (min_eigenvalue_hermitian(rho) < -tol) return false;
    return true;
}

inline void assert_valid_density(const DensityMatrix& rho, double tol = 1e-12) {
    if (!is_valid_density(rho, tol)) {
        throw std::runtime_error(
            "invalid density matrix: [" + std::to_string(rho(0, 0).real()) + "+" +
            std::to_string(rho(0, 0).imag()) + "i, " + std::to_string(rho(0, 1).real()) + "+" +
            std::to_string(rho(0, 1).imag()) + "i; " + std::to_string(rho(1, 0).real()) + "+" +
            std::to_string(rho(1, 0).imag()) + "i, " + std::to_string(rho(1, 1).real()) + "+" +
            std::to_string(rho(1, 1).imag()) + "i]");
    }
}

// (1/2)||rho - sigma||_1 for Hermitian arguments.
inline double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
    const DensityMatrix d = rho - sigma;
    const double m = 0.5 * (d(0, 0).real() + d(1, 1).real());
    const double h = 0.5 * (d(0, 0).real() - d(1, 1).real());
    const double disc = std::sqrt(h * h + std::norm(d(0, 1)));
    return 0.5 * (std::abs(m + disc) + std::abs(m - disc));
}

// --------------------------- eigensolver ------------------------------------

struct EigenSolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Leading eigenvalue came out with a significant imaginary part.
struct NonRealLeadingEigenvalue : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Eigensystem4 {
    Vec4 values;
    Superoperator4 vectors; // column k pairs with values(k)
};

// Full eigensystem with enforced contracts: convergence, per-pair residual
// ||(M - λI)v|| <= 1e-9 ||M||, sum(λ) = tr(M) within 1e-9 ||M||, and
// prod(λ) = det(M) within 1e-9 ||M||^4. Violations throw, never return garbage.
inline Eigensystem4 eigensystem4(const Superoperator4& m) {
    if (!m.allFinite()) throw EigenSolveError("eigensystem4: non-finite input matrix");
    Eigen::ComplexEigenSolver<Superoperator4> solver(m, true);
    if (solver.info() != Eigen::Success) {
        throw EigenSolveError("eigensystem4: eigensolver failed to converge");
    }
    Eigensystem4 out{solver.eigenvalues(), solver.eigenvectors()};

    const double scale = m.norm();
    const double tol = 1e-9 * scale;
    for (int k = 0; k < 4; ++k) {
        const Vec4 v = out.vectors.col(k);
        const double residual = (m * v - out.values(k) * v).norm();
        if (residual > tol) {
            throw EigenSolveError("eigensystem4: residual " + std::to_string(residual) +
                                  " exceeds bound " + std::to_string(tol));
        }
    }
    if (std::abs(out.values.sum() - m.trace()) > tol) {
        throw EigenSolveError("eigensystem4: eigenvalue sum does not match trace");
    }
    const Complex prod = out.values(0) * out.values(1) * out.values(2) * out.values(3);
    if (std::abs(prod - m.determinant()) > 1e-9 * scale * scale * scale * scale) {
        throw EigenSolveError("eigensystem4: eigenvalue product does not match determinant");
    }
    return out;
}

inline std::array<Complex, 4> eigenvalues4(const Superoperator4& m) {
    const Eigensystem4 es = eigensystem4(m);
    return {es.values(0), es.values(1), es.values(2), es.values(3)};
}

// Largest real part over the spectrum. The selected eigenvalue is required
// to be real to within 1e-9 (1 + |Re|); a violation is a distinct diagnostic.
inline double leading_real_eigenvalue(const Superoperator4& m) {
    const Eigensystem4 es = eigensystem4(m);
    int lead = 0;
    for (int k = 1; k < 4; ++k) {
        if (es.values(k).real() > es.values(lead).real()) lead = k;
    }
    const Complex lambda = es.values(lead);
    if (std::abs(lambda.imag()) > 1e-9 * (1.0 + std::abs(lambda.real()))) {
        throw NonRealLeadingEigenvalue("leading eigenvalue has imaginary part " +
                                       std::to_string(lambda.imag()));
    }
    return lambda.real();
}

// Null mode of a trace-preserving generator, normalized to a unit-trace
// Hermitian state.
inline DensityMatrix stationary_state(const Superoperator4& generator) {
    const Eigensystem4 es = eigensystem4(generator);
    int best = 0;
    for (int k = 1; k < 4; ++k) {
        if (std::abs(es.values(k)) < std::abs(es.values(best))) best = k;
    }
    DensityMatrix rho = unvec(es.vectors.col(best));
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) {
        throw EigenSolveError("stationary_state: null vector has vanishing trace");
    }
    rho /= tr;
    return rho;
}

} // namespace jumpstats
