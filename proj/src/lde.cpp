#include "jumpstats/lde.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jumpstats {

namespace {

// Denominator 4 gamma_m + gamma_w (2 n_avg + 1) shared by all closed forms.
double rate_denominator(const ModelParams& p) {
    return 4.0 * p.gamma_m + p.gamma_w * (2.0 * p.n_avg + 1.0);
}

std::optional<double> safe_q(double var, double mean) {
    if (!(mean > 0.0)) return std::nullopt;
    return (var - mean) / mean;
}

} // namespace

Superoperator4 tilted_generator(const TiltParams& tilts, const ModelParams& params) {
    const Operator2 id = identity2();
    const Operator2 sx = sigma_x();
    const Operator2 sp = sigma_plus();
    const Operator2 sm = sigma_minus();
    Operator2 h0 = Operator2::Zero();
    h0(0, 0) = params.omega;

    const Operator2 sp_sm = sp * sm; // |e><e|
    const Operator2 sm_sp = sm * sp; // |g><g|

    Superoperator4 w = Complex(0.0, -1.0) * (sandwich_superop(h0, id) - sandwich_superop(id, h0));
    w -= 2.0 * params.gamma_m * (Superoperator4::Identity() - sandwich_superop(sx, sx));
    w += params.gamma_w * (params.n_avg + 1.0) *
         (std::exp(-tilts.s_e) * sandwich_superop(sm, sp) -
          0.5 * (sandwich_superop(sp_sm, id) + sandwich_superop(id, sp_sm)));
    w += params.gamma_w * params.n_avg *
         (std::exp(-tilts.s_a) * sandwich_superop(sp, sm) -
          0.5 * (sandwich_superop(sm_sp, id) + sandwich_superop(id, sm_sp)));
    return w;
}

double scgf_closed_form(const TiltParams& tilts, const ModelParams& params) {
    const double gm = params.gamma_m;
    const double gw = params.gamma_w;
    const double nav = params.n_avg;
    const double a = 4.0 * gm + gw * (2.0 * nav + 1.0);
    // x is the radicand minus a^2; the constant parts cancel exactly, so the
    // whole tilt dependence sits in expm1 terms and theta loses no digits
    // near zero tilt.
    const double x = 8.0 * gm * gw * (nav + 1.0) * std::expm1(-tilts.s_e) +
                     8.0 * gm * gw * nav * std::expm1(-tilts.s_a) +
                     4.0 * gw * gw * nav * (nav + 1.0) * std::expm1(-tilts.s_a - tilts.s_e);
    const double radicand = a * a + x;
    if (radicand < 0.0) {
        throw std::domain_error("scgf_closed_form: negative radicand " +
                                std::to_string(radicand) + " at s_a=" + std::to_string(tilts.s_a) +
                                ", s_e=" + std::to_string(tilts.s_e));
    }
    return x / (2.0 * (std::sqrt(radicand) + a));
}

MomentReport moments(const ModelParams& params, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("moments: t must be >= 0");
    const double gm = params.gamma_m;
    const double gw = params.gamma_w;
    const double nav = params.n_avg;
    const double xa = nav;
    const double xe = nav + 1.0;
    const double den = rate_denominator(params);
    const double den3 = den * den * den;

    MomentReport r;
    r.t = t;
    r.rate_a = gw * xa * (2.0 * gm + gw * xe) / den;
    r.rate_e = gw * xe * (2.0 * gm + gw * xa) / den;
    r.var_rate_a = r.rate_a - 2.0 * gw * gw * xa * xa * std::pow(2.0 * gm + gw * xe, 2) / den3;
    r.var_rate_e = r.rate_e - 2.0 * gw * gw * xe * xe * std::pow(2.0 * gm + gw * xa, 2) / den3;
    r.cov_rate = gw * gw * xa * xe *
                 (8.0 * gm * gm + 4.0 * gm * (2.0 * gw * nav + gw) +
                  gw * gw * (2.0 * xa * xe + 1.0)) /
                 den3;

    r.mean_a = r.rate_a * t;
    r.mean_e = r.rate_e * t;
    r.mean_sum = r.mean_a + r.mean_e;
    r.var_a = r.var_rate_a * t;
    r.var_e = r.var_rate_e * t;
    r.cov_ae = r.cov_rate * t;
    r.var_sum = r.var_a + r.var_e + 2.0 * r.cov_ae;
    r.q_a = safe_q(r.var_a, r.mean_a);
    r.q_e = safe_q(r.var_e, r.mean_e);
    r.q_sum = safe_q(r.var_sum, r.mean_sum);
    return r;
}

MomentReport scgf_derivatives_fd(const ModelParams& params, double t, double step) {
    if (!(step >= 1e-6 && step <= 1e-3)) {
        throw std::invalid_argument("scgf_derivatives_fd: step must lie in [1e-6, 1e-3]");
    }
    if (!(t >= 0.0)) throw std::invalid_argument("scgf_derivatives_fd: t must be >= 0");
    const auto theta = [&](double sa, double se) {
        return scgf_closed_form({sa, se}, params);
    };
    const double h = step;
    const double t00 = theta(0.0, 0.0);

    MomentReport r;
    r.t = t;
    r.rate_a = -(theta(h, 0.0) - theta(-h, 0.0)) / (2.0 * h);
    r.rate_e = -(theta(0.0, h) - theta(0.0, -h)) / (2.0 * h);
    r.var_rate_a = (theta(h, 0.0) - 2.0 * t00 + theta(-h, 0.0)) / (h * h);
    r.var_rate_e = (theta(0.0, h) - 2.0 * t00 + theta(0.0, -h)) / (h * h);
    // pair evaluations that differ only in s_a, so a tilt the SCGF does not
    // depend on cancels exactly instead of leaving an ulp residue
    r.cov_rate = ((theta(h, h) - theta(-h, h)) + (theta(-h, -h) - theta(h, -h))) / (4.0 * h * h);

    r.mean_a = r.rate_a * t;
    r.mean_e = r.rate_e * t;
    r.mean_sum = r.mean_a + r.mean_e;
    r.var_a = r.var_rate_a * t;
    r.var_e = r.var_rate_e * t;
    r.cov_ae = r.cov_rate * t;
    r.var_sum = r.var_a + r.var_e + 2.0 * r.cov_ae;
    r.q_a = safe_q(r.var_a, r.mean_a);
    r.q_e = safe_q(r.var_e, r.mean_e);
    r.q_sum = safe_q(r.var_sum, r.mean_sum);
    return r;
}

SteadyState steady_state(const ModelParams& params) {
    const double p = (2.0 * params.gamma_m + params.gamma_w * params.n_avg) /
                     (4.0 * params.gamma_m + params.gamma_w * (2.0 * params.n_avg + 1.0));
    SteadyState s;
    s.p = p;
    s.rho = DensityMatrix::Zero();
    s.rho(0, 0) = p;
    s.rho(1, 1) = 1.0 - p;
    return s;
}

double q_sum_value(double gamma_m, double gamma_w, double n_avg) {
    const double xa = n_avg;
    const double xe = n_avg + 1.0;
    const double numerator = -4.0 * gamma_m * gamma_m * gamma_w + xa * xe * std::pow(gamma_w, 3);
    const double denominator = (gamma_m * (2.0 * n_avg + 1.0) + xa * xe * gamma_w) *
                               std::pow(4.0 * gamma_m + (2.0 * n_avg + 1.0) * gamma_w, 2);
    return numerator / denominator;
}

double transition_rate(double gamma_w, double n_avg) {
    if (!(n_avg > 0.0)) {
        throw std::domain_error(
            "transition_rate: no transition for n_avg <= 0 (q_sum has no positive root)");
    }
    return 0.5 * gamma_w * std::sqrt(n_avg * n_avg + n_avg);
}

double transition_rate_bisection(double gamma_w, double n_avg, double tol) {
    if (!(n_avg > 0.0)) {
        throw std::domain_error("transition_rate_bisection: no root for n_avg <= 0");
    }
    double lo = 0.0;                       // q_sum(0) = (2n+1)^{-2} > 0
    double hi = gamma_w * (n_avg + 1.0);
    while (q_sum_value(hi, gamma_w, n_avg) > 0.0) hi *= 2.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (q_sum_value(mid, gamma_w, n_avg) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double q_sum_asymptote(double n_avg) {
    if (!(n_avg >= 0.0)) throw std::invalid_argument("q_sum_asymptote: n_avg must be >= 0");
    const double d = 2.0 * n_avg + 1.0;
    return 1.0 / (d * d);
}

ClockMetrics clock_metrics_from_q(double q, double mean) {
    ClockMetrics m;
    m.relative_error = std::sqrt(1.0 + q) / std::sqrt(mean);
    m.precision_gain = 1.0 / (1.0 + q);
    return m;
}

std::optional<ClockMetrics> clock_metrics(const ModelParams& params, JumpKind kind, double t) {
    const MomentReport r = moments(params, t);
    const double mean = kind == JumpKind::absorption ? r.mean_a : r.mean_e;
    const auto q = kind == JumpKind::absorption ? r.q_a : r.q_e;
    if (!q || !(mean > 0.0)) return std::nullopt;
    return clock_metrics_from_q(*q, mean);
}

} // namespace jumpstats
