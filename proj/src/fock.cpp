#include "jumpstats/fock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jumpstats::fock {

namespace {

constexpr double kLeakTolerance = 1e-10;
constexpr double kTailBound = 1e-12;

const Complex kMinusI(0.0, -1.0);

void check_probe_leak(double amplitude_norm, double coupling, int n_max) {
    if (amplitude_norm * coupling > kLeakTolerance) {
        throw std::runtime_error(
            "joint_step: amplitude would leak past the truncation boundary; raise n_max above " +
            std::to_string(n_max));
    }
}

// Aligns the global phase of a reconstructed operator with a reference by
// rotating its dominant entry onto the reference's.
Operator2 align_phase(const Operator2& m, const Operator2& reference) {
    int ri = 0, rj = 0;
    double best = -1.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            if (std::abs(reference(i, j)) > best) {
                best = std::abs(reference(i, j));
                ri = i;
                rj = j;
            }
        }
    }
    if (best <= 0.0 || std::abs(m(ri, rj)) == 0.0) return m;
    const Complex target_phase = reference(ri, rj) / std::abs(reference(ri, rj));
    const Complex current_phase = m(ri, rj) / std::abs(m(ri, rj));
    return m * (target_phase / current_phase);
}

double max_abs_difference(const Operator2& a, const Operator2& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace

SingleModeState joint_step(const SingleModeState& in, double gamma_w, double dt) {
    const int levels = in.n_max;
    const double eps = gamma_w * dt;
    const double lambda = std::sqrt(eps);
    check_probe_leak(std::abs(in.at(0, levels)), lambda * std::sqrt(levels + 1.0), levels);

    SingleModeState out(levels);
    for (int n = 0; n <= levels; ++n) {
        out.at(0, n) += (1.0 - 0.5 * eps * (n + 1.0)) * in.at(0, n);
        out.at(1, n) += (1.0 - 0.5 * eps * n) * in.at(1, n);
        if (n >= 1) out.at(0, n - 1) += kMinusI * lambda * std::sqrt(double(n)) * in.at(1, n);
        if (n + 1 <= levels)
            out.at(1, n + 1) += kMinusI * lambda * std::sqrt(n + 1.0) * in.at(0, n);
    }
    return out;
}

SingleModeState joint_step_exact(const SingleModeState& in, double gamma_w, double dt) {
    const int levels = in.n_max;
    const double lambda = std::sqrt(gamma_w * dt);
    check_probe_leak(std::abs(in.at(0, levels)), lambda * std::sqrt(levels + 1.0), levels);

    // The interaction conserves excitation number: it rotates each pair
    // {|e,n>, |g,n+1>} through an angle lambda sqrt(n+1) and leaves |g,0>
    // untouched.
    SingleModeState out(levels);
    out.at(1, 0) = in.at(1, 0);
    for (int n = 0; n < levels; ++n) {
        const double angle = lambda * std::sqrt(n + 1.0);
        const double c = std::cos(angle);
        const Complex s = kMinusI * std::sin(angle);
        out.at(0, n) = c * in.at(0, n) + s * in.at(1, n + 1);
        out.at(1, n + 1) = s * in.at(0, n) + c * in.at(1, n + 1);
    }
    out.at(0, levels) += std::cos(lambda * std::sqrt(levels + 1.0)) * in.at(0, levels);
    return out;
}

TwoModeState joint_step(const TwoModeState& in, double gamma_w, double dt) {
    const int levels = in.n_max;
    const double eps = gamma_w * dt;
    const double lambda = std::sqrt(eps);
    double boundary = 0.0;
    for (int nr = 0; nr <= levels; ++nr) boundary = std::max(boundary, std::abs(in.at(0, levels, nr)));
    check_probe_leak(boundary, lambda * std::sqrt(levels + 1.0), levels);

    TwoModeState out(levels);
    for (int nr = 0; nr <= levels; ++nr) {
        for (int np = 0; np <= levels; ++np) {
            out.at(0, np, nr) += (1.0 - 0.5 * eps * (np + 1.0)) * in.at(0, np, nr);
            out.at(1, np, nr) += (1.0 - 0.5 * eps * np) * in.at(1, np, nr);
            if (np >= 1)
                out.at(0, np - 1, nr) += kMinusI * lambda * std::sqrt(double(np)) * in.at(1, np, nr);
            if (np + 1 <= levels)
                out.at(1, np + 1, nr) += kMinusI * lambda * std::sqrt(np + 1.0) * in.at(0, np, nr);
        }
    }
    return out;
}

KrausSet effective_kraus_single_mode(int n, double gamma_w, double dt) {
    if (n < 0) throw std::invalid_argument("effective_kraus_single_mode: n must be >= 0");
    const int levels = n + 2;

    Operator2 m_a = Operator2::Zero();
    Operator2 m_e = Operator2::Zero();
    Operator2 m_o = Operator2::Zero();
    for (int j = 0; j < 2; ++j) {
        SingleModeState psi(levels);
        psi.at(j, n) = 1.0;
        const SingleModeState evolved = joint_step(psi, gamma_w, dt);
        for (int i = 0; i < 2; ++i) {
            if (n >= 1) m_a(i, j) = evolved.at(i, n - 1);
            m_e(i, j) = evolved.at(i, n + 1);
            m_o(i, j) = evolved.at(i, n);
        }
    }
    KrausSet set;
    set.m_a = m_a;
    set.m_e = m_e;
    set.m_o = m_o;
    set.gamma_w = gamma_w;
    set.n_avg = static_cast<double>(n);
    set.dt = dt;
    return set;
}

Operator2 single_mode_null_reference(int n, double gamma_w, double dt) {
    Operator2 m = Operator2::Zero();
    m(0, 0) = 1.0 - 0.5 * gamma_w * dt * (n + 1.0);
    m(1, 1) = 1.0 - 0.5 * gamma_w * dt * n;
    return m;
}

double TwoModeSqueezed::mean_occupation() const {
    double total = 0.0;
    for (int n = 0; n <= n_max; ++n) total += n * weights(n);
    return total;
}

int auto_n_max(double n_avg, double tail_bound) {
    if (!(n_avg > 0.0)) throw std::domain_error("auto_n_max: n_avg must be > 0");
    const double q = n_avg / (n_avg + 1.0); // tanh^2 of the squeezing parameter
    int n = 0;
    double tail = q;
    while (tail >= tail_bound) {
        ++n;
        tail *= q;
    }
    return n;
}

TwoModeSqueezed tmss_prepare(double n_avg, int n_max) {
    if (!(n_avg > 0.0)) throw std::domain_error("tmss_prepare: n_avg must be > 0");
    TwoModeSqueezed tm;
    tm.r = std::asinh(std::sqrt(n_avg));
    const double q = n_avg / (n_avg + 1.0);
    tm.n_max = n_max > 0 ? n_max : auto_n_max(n_avg, kTailBound);
    tm.weights = Eigen::VectorXd::Zero(tm.n_max + 1);
    double w = 1.0 - q;
    for (int n = 0; n <= tm.n_max; ++n) {
        tm.weights(n) = w;
        w *= q;
    }
    tm.tail = std::pow(q, tm.n_max + 1);
    if (tm.tail >= kTailBound) {
        throw std::runtime_error("tmss_prepare: truncation tail " + std::to_string(tm.tail) +
                                 " at n_max=" + std::to_string(tm.n_max) +
                                 " exceeds 1e-12; suggest n_max=" +
                                 std::to_string(auto_n_max(n_avg, kTailBound)));
    }
    return tm;
}

TmssReconstruction effective_kraus_tmss(double n_avg, double gamma_w, double dt, int n_max) {
    const TwoModeSqueezed tm = tmss_prepare(n_avg, n_max);
    // One spare probe level above the populated range absorbs the emission
    // amplitude without boundary loss.
    const int levels = tm.n_max + 1;

    // The truncated weights sum to 1 - tail; rescale so the prepared state is
    // a unit vector, otherwise the missing tail shows up as a dt-independent
    // floor in the null-operator deviation.
    const double weight_norm = tm.weights.sum();

    TwoModeState evolved[2];
    for (int j = 0; j < 2; ++j) {
        TwoModeState psi(levels);
        for (int n = 0; n <= tm.n_max; ++n)
            psi.at(j, n, n) = std::sqrt(tm.weights(n) / weight_norm);
        evolved[j] = joint_step(psi, gamma_w, dt);
    }

    TmssReconstruction rec;
    rec.tail = tm.tail;
    rec.n_max = tm.n_max;
    rec.r = tm.r;
    for (int j = 0; j < 2; ++j) {
        rec.norm_defect =
            std::max(rec.norm_defect, std::abs(evolved[j].squared_norm() - 1.0));
    }
    const double norm_allowance = 1e-10 + 100.0 * gamma_w * dt * gamma_w * dt;
    if (rec.norm_defect > norm_allowance) {
        throw std::runtime_error("effective_kraus_tmss: norm defect " +
                                 std::to_string(rec.norm_defect) +
                                 " beyond the linear-order allowance");
    }

    // Outcome subspaces compare probe against reference occupation:
    // absorption (np = nr - 1), emission (np = nr + 1), null (np = nr).
    const auto choi = [&](int probe_offset) {
        Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
        for (int j = 0; j < 2; ++j) {
            for (int jp = 0; jp < 2; ++jp) {
                for (int i = 0; i < 2; ++i) {
                    for (int ip = 0; ip < 2; ++ip) {
                        Complex sum = 0.0;
                        for (int nr = 0; nr <= levels; ++nr) {
                            const int np = nr + probe_offset;
                            if (np < 0 || np > levels) continue;
                            sum += evolved[j].at(i, np, nr) * std::conj(evolved[jp].at(ip, np, nr));
                        }
                        c(j * 2 + i, jp * 2 + ip) = sum;
                    }
                }
            }
        }
        return c;
    };

    const auto extract_kraus = [](const Eigen::Matrix4cd& c) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(c);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("effective_kraus_tmss: Choi eigensolver failed");
        }
        const double lambda = solver.eigenvalues()(3);
        const Eigen::Vector4cd v = solver.eigenvectors().col(3);
        Operator2 m;
        const double scale = std::sqrt(std::max(lambda, 0.0));
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) m(i, j) = scale * v(j * 2 + i);
        }
        return m;
    };

    const KrausSet reference = radiative_kraus(gamma_w, n_avg, dt);
    rec.kraus.m_a = align_phase(extract_kraus(choi(-1)), reference.m_a);
    rec.kraus.m_e = align_phase(extract_kraus(choi(+1)), reference.m_e);
    rec.kraus.m_o = align_phase(extract_kraus(choi(0)), reference.m_o);
    rec.kraus.gamma_w = gamma_w;
    rec.kraus.n_avg = n_avg;
    rec.kraus.dt = dt;

    rec.dev_a = max_abs_difference(rec.kraus.m_a, reference.m_a);
    rec.dev_e = max_abs_difference(rec.kraus.m_e, reference.m_e);
    rec.dev_o = max_abs_difference(rec.kraus.m_o, reference.m_o);

    const Operator2 completeness = rec.kraus.m_a.adjoint() * rec.kraus.m_a +
                                   rec.kraus.m_e.adjoint() * rec.kraus.m_e +
                                   rec.kraus.m_o.adjoint() * rec.kraus.m_o;
    rec.completeness_defect = max_abs_difference(completeness, identity2());

    // Weight outside the three subspaces for an equal-superposition emitter.
    TwoModeState plus(levels);
    for (int n = 0; n <= tm.n_max; ++n) {
        plus.at(0, n, n) = std::sqrt(0.5 * tm.weights(n) / weight_norm);
        plus.at(1, n, n) = std::sqrt(0.5 * tm.weights(n) / weight_norm);
    }
    const TwoModeState evolved_plus = joint_step(plus, gamma_w, dt);
    double inside = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int nr = 0; nr <= levels; ++nr) {
            for (int offset = -1; offset <= 1; ++offset) {
                const int np = nr + offset;
                if (np < 0 || np > levels) continue;
                inside += std::norm(evolved_plus.at(i, np, nr));
            }
        }
    }
    rec.orthogonal_weight = evolved_plus.squared_norm() - inside;
    return rec;
}

} // namespace jumpstats::fock
