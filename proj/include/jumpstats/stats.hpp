// stats.hpp — Streaming, pairwise-mergeable moment accumulators for ensemble
// counting statistics: means, variances (with standard errors via fourth
// central moments), covariance, and Mandel Q with first-order error
// propagation.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "jumpstats/qcore.hpp"

namespace jumpstats {

struct ValueWithError {
    double value = 0.0;
    double std_error = 0.0;
};

// Central moments up to order four (Pebay update/merge formulas). Merge is
// exact in the sense that fold order only changes results at roundoff level.
struct MomentAccumulator {
    long long count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        const double n1 = static_cast<double>(count);
        ++count;
        const double n = static_cast<double>(count);
        const double delta = x - mean;
        const double delta_n = delta / n;
        const double delta_n2 = delta_n * delta_n;
        const double term1 = delta * delta_n * n1;
        mean += delta_n;
        m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
        m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    void merge(const MomentAccumulator& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(other.count);
        const double n = na + nb;
        const double delta = other.mean - mean;
        const double d2 = delta * delta;
        m4 += other.m4 + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n) +
              6.0 * d2 * (na * na * other.m2 + nb * nb * m2) / (n * n) +
              4.0 * delta * (na * other.m3 - nb * m3) / n;
        m3 += other.m3 + d2 * delta * na * nb * (na - nb) / (n * n) +
              3.0 * delta * (na * other.m2 - nb * m2) / n;
        m2 += other.m2 + d2 * na * nb / n;
        mean += delta * nb / n;
        count += other.count;
    }

    std::optional<double> variance() const {
        if (count < 2) return std::nullopt;
        return m2 / static_cast<double>(count - 1);
    }

    std::optional<double> se_mean() const {
        const auto var = variance();
        if (!var) return std::nullopt;
        return std::sqrt(std::max(0.0, *var) / static_cast<double>(count));
    }

    // Standard error of the sample variance from the fourth central moment:
    // Var(s^2) = (m4/n - s^4 (n-3)/(n-1)) / n.
    std::optional<double> se_variance() const {
        if (count < 2) return std::nullopt;
        const double n = static_cast<double>(count);
        const double s2 = m2 / (n - 1.0);
        const double fourth = m4 / n;
        const double var_of_var = (fourth - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
        return std::sqrt(std::max(0.0, var_of_var));
    }
};

struct CovarianceAccumulator {
    long long count = 0;
    double mean_x = 0.0;
    double mean_y = 0.0;
    double comoment = 0.0;

    void add(double x, double y) {
        ++count;
        const double n = static_cast<double>(count);
        const double dx = x - mean_x;
        mean_x += dx / n;
        mean_y += (y - mean_y) / n;
        comoment += dx * (y - mean_y);
    }

    void merge(const CovarianceAccumulator& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(other.count);
        const double n = na + nb;
        const double dx = other.mean_x - mean_x;
        const double dy = other.mean_y - mean_y;
        comoment += other.comoment + dx * dy * na * nb / n;
        mean_x += dx * nb / n;
        mean_y += dy * nb / n;
        count += other.count;
    }

    std::optional<double> covariance() const {
        if (count < 2) return std::nullopt;
        return comoment / static_cast<double>(count - 1);
    }
};

// Q = (var - mean)/mean with the error bar propagated to first order from the
// standard errors of the variance and the mean. Undefined (nullopt) when the
// mean is not positive or the variance does not exist.
inline std::optional<ValueWithError> mandel_q(const MomentAccumulator& acc) {
    const auto var = acc.variance();
    if (!var || !(acc.mean > 0.0)) return std::nullopt;
    const double q = (*var - acc.mean) / acc.mean;
    const double se_v = acc.se_variance().value_or(0.0);
    const double se_m = acc.se_mean().value_or(0.0);
    const double dq_dv = 1.0 / acc.mean;
    const double dq_dm = -*var / (acc.mean * acc.mean);
    const double se = std::sqrt(dq_dv * dq_dv * se_v * se_v + dq_dm * dq_dm * se_m * se_m);
    return ValueWithError{q, se};
}

// Per-time-step joint statistics of the two count observables and their sum.
struct StepStats {
    MomentAccumulator a;
    MomentAccumulator e;
    MomentAccumulator sum;
    CovarianceAccumulator ae;

    void add(double count_a, double count_e) {
        a.add(count_a);
        e.add(count_e);
        sum.add(count_a + count_e);
        ae.add(count_a, count_e);
    }

    void merge(const StepStats& other) {
        a.merge(other.a);
        e.merge(other.e);
        sum.merge(other.sum);
        ae.merge(other.ae);
    }
};

// Ensemble mean of the conditional state at one checkpoint, tracked through
// the three independent real components (rho_ee, Re rho_eg, Im rho_eg).
struct StateMeanAccumulator {
    MomentAccumulator population;
    MomentAccumulator coherence_re;
    MomentAccumulator coherence_im;

    void add(const DensityMatrix& rho) {
        population.add(rho(0, 0).real());
        coherence_re.add(rho(0, 1).real());
        coherence_im.add(rho(0, 1).imag());
    }

    void merge(const StateMeanAccumulator& other) {
        population.merge(other.population);
        coherence_re.merge(other.coherence_re);
        coherence_im.merge(other.coherence_im);
    }

    DensityMatrix mean_density() const {
        DensityMatrix rho;
        const Complex c(coherence_re.mean, coherence_im.mean);
        rho << Complex(population.mean, 0.0), c,
               std::conj(c), Complex(1.0 - population.mean, 0.0);
        return rho;
    }

    // Combined statistical scale of the three estimated components.
    double error_floor() const {
        const double se_p = population.se_mean().value_or(0.0);
        const double se_re = coherence_re.se_mean().value_or(0.0);
        const double se_im = coherence_im.se_mean().value_or(0.0);
        return std::sqrt(se_p * se_p + se_re * se_re + se_im * se_im);
    }
};

} // namespace jumpstats
