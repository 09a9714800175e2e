// fock.hpp — Truncated Fock-space verification of the generalized measurement
// constructions: the joint emitter-field step, single-mode (number-state)
// reconstruction of the radiative Kraus operators, and the two-mode squeezed
// reference-beam reconstruction for arbitrary positive occupation.

#pragma once

#include <Eigen/Dense>

#include "jumpstats/channels.hpp"
#include "jumpstats/qcore.hpp"

namespace jumpstats::fock {

// Emitter ⊗ single field mode; amplitude index (s, n) -> s*(n_max+1) + n with
// s = 0 for |e>, 1 for |g>.
struct SingleModeState {
    int n_max = 0;
    Eigen::VectorXcd amp;

    SingleModeState() = default;
    explicit SingleModeState(int levels) : n_max(levels), amp(Eigen::VectorXcd::Zero(2 * (levels + 1))) {}
    Complex& at(int s, int n) { return amp(s * (n_max + 1) + n); }
    Complex at(int s, int n) const { return amp(s * (n_max + 1) + n); }
    double squared_norm() const { return amp.squaredNorm(); }
};

// Emitter ⊗ probe ⊗ reference; index ((s*(dim)+np)*dim + nr).
struct TwoModeState {
    int n_max = 0; // per-mode truncation level
    Eigen::VectorXcd amp;

    TwoModeState() = default;
    explicit TwoModeState(int levels)
        : n_max(levels), amp(Eigen::VectorXcd::Zero(2 * (levels + 1) * (levels + 1))) {}
    int dim() const { return n_max + 1; }
    Complex& at(int s, int np, int nr) { return amp((s * dim() + np) * dim() + nr); }
    Complex at(int s, int np, int nr) const { return amp((s * dim() + np) * dim() + nr); }
    double squared_norm() const { return amp.squaredNorm(); }
};

// One step of the joint evolution truncated at linear order in dt:
// 1 - i sqrt(gamma_w dt)(sigma+ a + sigma- a†)
//   - (gamma_w dt/2)(|e><e|(a†a + 1) + |g><g| a†a).
// Throws if amplitude would leak past the truncation boundary.
SingleModeState joint_step(const SingleModeState& in, double gamma_w, double dt);
TwoModeState joint_step(const TwoModeState& in, double gamma_w, double dt); // acts on the probe

// Exact interaction exponential, block-diagonal over the excitation number:
// used to demonstrate the convergence of the truncated expansion.
SingleModeState joint_step_exact(const SingleModeState& in, double gamma_w, double dt);

// Emitter operators obtained by evolving |j>|n> and projecting the field onto
// |n-1>, |n+1>, |n|. Jump operators coincide with the closed forms exactly;
// the null operator matches them through the sqrt(1-x) ~ 1 - x/2
// identification, i.e. to (gamma_w dt (n+1))^2 elementwise.
KrausSet effective_kraus_single_mode(int n, double gamma_w, double dt);

// Appendix-style linear-order null operator diag(1-(n+1)e/2, 1-n e/2); the
// single-mode projection equals this at machine precision.
Operator2 single_mode_null_reference(int n, double gamma_w, double dt);

struct TwoModeSqueezed {
    double r = 0.0;          // squeezing parameter, sinh^2 r = <n>
    int n_max = 0;
    Eigen::VectorXd weights; // P_n = (1-q) q^n with q = tanh^2 r, n = 0..n_max
    double tail = 0.0;       // q^{n_max+1}

    double mean_occupation() const;
};

// Smallest truncation level with geometric tail below tail_bound.
int auto_n_max(double n_avg, double tail_bound = 1e-12);

// n_max = 0 selects the automatic truncation level. Throws if the tail bound
// cannot be met at the requested level.
TwoModeSqueezed tmss_prepare(double n_avg, int n_max = 0);

struct TmssReconstruction {
    KrausSet kraus;                 // phase-aligned reconstructed operators
    double dev_a = 0.0;             // max elementwise deviation from the closed forms
    double dev_e = 0.0;
    double dev_o = 0.0;
    double completeness_defect = 0.0; // max elementwise |sum M†M - 1|
    double orthogonal_weight = 0.0;   // weight outside the three outcome subspaces
    double norm_defect = 0.0;         // max |norm^2 - 1| of the evolved basis states
    double tail = 0.0;
    int n_max = 0;
    double r = 0.0;
};

// Prepares the two-mode squeezed state, evolves the probe jointly with the
// emitter, applies the occupation-comparison projections, traces out both
// modes, and extracts the emitter Kraus operators from the outcome maps.
TmssReconstruction effective_kraus_tmss(double n_avg, double gamma_w, double dt, int n_max = 0);

} // namespace jumpstats::fock
