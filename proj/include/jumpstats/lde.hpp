// lde.hpp — Large-deviation analytics: tilted generator, scaled cumulant
// generating function (closed form and numerical), count moments, Mandel Q,
// the super- to sub-Poissonian transition point, steady state, and clock
// precision metrics.

#pragma once

#include <optional>

#include "jumpstats/params.hpp"
#include "jumpstats/qcore.hpp"

namespace jumpstats {

struct TiltParams {
    double s_a = 0.0;
    double s_e = 0.0;
};

// Vectorized tilted Lindblad generator W(s_a, s_e): the emission sandwich is
// weighted by e^{-s_e}, the absorption sandwich by e^{-s_a}; at zero tilt it
// is the generator of the unconditional dynamics.
Superoperator4 tilted_generator(const TiltParams& tilts, const ModelParams& params);

// Largest real eigenvalue of W in closed form. Evaluated in a
// cancellation-free rearrangement so finite differences at steps down to
// 1e-6 remain meaningful. Throws std::domain_error if the radicand turns
// negative (cannot happen for real tilts and physical rates).
double scgf_closed_form(const TiltParams& tilts, const ModelParams& params);

struct MomentReport {
    double t = 0.0;
    // per unit time
    double rate_a = 0.0, rate_e = 0.0;
    double var_rate_a = 0.0, var_rate_e = 0.0;
    double cov_rate = 0.0;
    // accumulated over [0, t]
    double mean_a = 0.0, mean_e = 0.0, mean_sum = 0.0;
    double var_a = 0.0, var_e = 0.0, cov_ae = 0.0;
    double var_sum = 0.0; // = var_a + var_e + 2 cov_ae by construction
    // Undefined when the corresponding mean vanishes.
    std::optional<double> q_a, q_e, q_sum;
};

// Closed-form moments of the counting record over [0, t].
MomentReport moments(const ModelParams& params, double t);

// Same report from central finite differences (first, second, mixed) of the
// closed-form SCGF at zero tilt. step must lie in [1e-6, 1e-3].
MomentReport scgf_derivatives_fd(const ModelParams& params, double t, double step = 1e-5);

struct SteadyState {
    double p = 0.0; // excited-state population
    DensityMatrix rho;
};

SteadyState steady_state(const ModelParams& params);

// Mandel Q of the summed absorption+emission record (t-independent).
double q_sum_value(double gamma_m, double gamma_w, double n_avg);

// Spin measurement rate at which the summed statistics turn Poissonian:
// gamma_m* = gamma_w sqrt(n_avg^2 + n_avg) / 2. Throws std::domain_error for
// n_avg <= 0 (no positive root exists).
double transition_rate(double gamma_w, double n_avg);

// Root of q_sum(gamma_m) = 0 located by bisection, to tol on the rate.
double transition_rate_bisection(double gamma_w, double n_avg, double tol = 1e-8);

// gamma_m -> 0 limit of q_sum: (2 n_avg + 1)^{-2}.
double q_sum_asymptote(double n_avg);

enum class JumpKind { absorption, emission };

struct ClockMetrics {
    double relative_error = 0.0;  // sqrt(1+Q)/sqrt(<N>)
    double precision_gain = 0.0;  // 1/(1+Q), relative to a Poisson record
};

ClockMetrics clock_metrics_from_q(double q, double mean);

// Undefined (nullopt) when the requested mean count vanishes.
std::optional<ClockMetrics> clock_metrics(const ModelParams& params, JumpKind kind, double t);

} // namespace jumpstats
