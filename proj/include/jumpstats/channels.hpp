// channels.hpp — The spin measurement channel, the three-outcome radiative
// Kraus set, readout sampling, and the single-step Hamiltonian phase.

#pragma once

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "jumpstats/qcore.hpp"

namespace jumpstats {

// --------------------------- spin measurement --------------------------------

struct SpinChannel {
    double gamma_m = 0.0;        // continuous spin measurement rate
    double dt = 0.0;             // step size
    double warn_strength = 0.05; // eps() above this is outside the weak regime

    double eps() const { return gamma_m * dt; }
    bool exceeds_weak_limit() const { return eps() > warn_strength; }

    void validate() const {
        if (!(gamma_m >= 0.0)) throw std::invalid_argument("SpinChannel: gamma_m must be >= 0");
        if (!(dt > 0.0)) throw std::invalid_argument("SpinChannel: dt must be > 0");
    }
};

// M(r) = (4 eps)^(1/4) pi^(-1/4) exp[-2 eps (r I - sigma_x)^2]; diagonal in the
// sigma_x eigenbasis with eigenvalues (4 eps/pi)^(1/4) e^{-2 eps (r -+ 1)^2}.
inline Operator2 spin_kraus(const SpinChannel& ch, double r) {
    ch.validate();
    const double eps = ch.eps();
    const double pref = std::pow(4.0 * eps / M_PI, 0.25);
    const double c_plus = pref * std::exp(-2.0 * eps * (r - 1.0) * (r - 1.0));
    const double c_minus = pref * std::exp(-2.0 * eps * (r + 1.0) * (r + 1.0));
    // c+ |+><+| + c- |-><-| = (c+ + c-)/2 I + (c+ - c-)/2 sigma_x
    Operator2 m;
    m << 0.5 * (c_plus + c_minus), 0.5 * (c_plus - c_minus),
         0.5 * (c_plus - c_minus), 0.5 * (c_plus + c_minus);
    return m;
}

// Draw a readout from the exact outcome density P(r) = tr{M(r) rho M(r)†}:
// a two-Gaussian mixture, weight <±|rho|±> at mean ±1, variance 1/(8 eps).
inline double sample_readout(const SpinChannel& ch, const DensityMatrix& rho,
                             std::mt19937_64& rng) {
    ch.validate();
    if (ch.gamma_m <= 0.0) {
        throw std::domain_error("sample_readout: undefined at zero measurement strength");
    }
    double w_plus = (ket_plus().adjoint() * rho * ket_plus())(0).real();
    w_plus = std::min(1.0, std::max(0.0, w_plus));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double mean = uniform(rng) < w_plus ? 1.0 : -1.0;
    std::normal_distribution<double> noise(0.0, std::sqrt(1.0 / (8.0 * ch.eps())));
    return mean + noise(rng);
}

// Exact r-average of the spin Kraus update: sigma_x dephasing with coherence
// factor e^{-4 gamma_m dt}, i.e. the Kraus pair {sqrt(p) I, sqrt(1-p) sigma_x}
// with p = (1 + e^{-4 gamma_m dt})/2.
inline DensityMatrix averaged_spin_channel(const SpinChannel& ch, const DensityMatrix& rho) {
    ch.validate();
    const double p = 0.5 * (1.0 + std::exp(-4.0 * ch.gamma_m * ch.dt));
    static const Operator2 sx = sigma_x();
    return p * rho + (1.0 - p) * (sx * rho * sx).eval();
}

// --------------------------- radiative channel -------------------------------

struct KrausSet {
    Operator2 m_a;   // absorption
    Operator2 m_e;   // emission
    Operator2 m_o;   // null event
    double gamma_w = 0.0;
    double n_avg = 0.0;
    double dt = 0.0;

    double eps() const { return gamma_w * dt; }
};

inline KrausSet radiative_kraus(double gamma_w, double n_avg, double dt) {
    if (!(gamma_w > 0.0)) throw std::invalid_argument("radiative_kraus: gamma_w must be > 0");
    if (!(n_avg >= 0.0)) throw std::invalid_argument("radiative_kraus: n_avg must be >= 0");
    if (!(dt > 0.0)) throw std::invalid_argument("radiative_kraus: dt must be > 0");
    const double eps = gamma_w * dt;
    if (!((n_avg + 1.0) * eps < 1.0)) {
        throw std::invalid_argument("radiative_kraus: (n_avg+1)*gamma_w*dt = " +
                                    std::to_string((n_avg + 1.0) * eps) +
                                    " must be < 1 for real null-event amplitudes");
    }
    const Complex mi(0.0, -1.0);
    KrausSet set;
    set.m_e = Operator2::Zero();
    set.m_e(1, 0) = mi * std::sqrt((n_avg + 1.0) * eps);
    set.m_a = Operator2::Zero();
    set.m_a(0, 1) = mi * std::sqrt(n_avg * eps);
    set.m_o = Operator2::Zero();
    set.m_o(0, 0) = std::sqrt(1.0 - (n_avg + 1.0) * eps);
    set.m_o(1, 1) = std::sqrt(1.0 - n_avg * eps);
    set.gamma_w = gamma_w;
    set.n_avg = n_avg;
    set.dt = dt;
    return set;
}

// Conjugation by e^{-i H0 dt} = diag(e^{-i omega dt}, 1): populations fixed,
// e-g coherence rotated by e^{-i omega dt}.
inline DensityMatrix hamiltonian_step(const DensityMatrix& rho, double omega, double dt) {
    const Complex phase = std::exp(Complex(0.0, -omega * dt));
    DensityMatrix out = rho;
    out(0, 1) *= phase;
    out(1, 0) *= std::conj(phase);
    return out;
}

// --------------------------- outcome statistics ------------------------------

struct OutcomeProbabilities {
    double p_a = 0.0;
    double p_e = 0.0;
    double p_o = 0.0;

    double total() const { return p_a + p_e + p_o; }
};

namespace detail {
inline double outcome_probability(const DensityMatrix& rho, const Operator2& m) {
    // tr{M rho M†} = tr{rho (M†M)}
    const double p = (rho * (m.adjoint() * m).eval()).trace().real();
    if (p < -1e-14) {
        throw std::runtime_error("outcome_probabilities: probability " + std::to_string(p) +
                                 " below clamp threshold; state is not a density matrix");
    }
    return std::max(p, 0.0);
}
} // namespace detail

inline OutcomeProbabilities outcome_probabilities(const DensityMatrix& rho, const KrausSet& set) {
    OutcomeProbabilities p;
    p.p_a = detail::outcome_probability(rho, set.m_a);
    p.p_e = detail::outcome_probability(rho, set.m_e);
    p.p_o = detail::outcome_probability(rho, set.m_o);
    return p;
}

} // namespace jumpstats
