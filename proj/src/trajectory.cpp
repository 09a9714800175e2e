#include "jumpstats/trajectory.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "jumpstats/channels.hpp"
#include "jumpstats/lde.hpp"

namespace jumpstats {

namespace {

// Fixed partition size: the accumulator fold runs over blocks in index order,
// so the result is independent of worker count and scheduling.
constexpr long long kBlockSize = 256;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 1));
}

enum class Outcome { absorption, emission, null_event };

// Per-trajectory state machine: spin channel, radiative outcome, Hamiltonian
// phase, in that order (the rightmost operator of the composed step acts
// first).
class Stepper {
  public:
    Stepper(const ModelParams& params, long long index, const DensityMatrix& rho0,
            bool check_states)
        : spin_{params.gamma_m, params.dt, 0.05},
          kraus_(radiative_kraus(params.gamma_w, params.n_avg, params.dt)),
          omega_(params.omega),
          dt_(params.dt),
          mode_(params.mode),
          check_(check_states),
          index_(index),
          rng_(stream_seed(params.seed, static_cast<std::uint64_t>(index))),
          rho_(rho0) {}

    const DensityMatrix& state() const { return rho_; }
    std::uint32_t count_a() const { return n_a_; }
    std::uint32_t count_e() const { return n_e_; }

    void step() {
        if (mode_ == SpinMode::conditional && spin_.gamma_m > 0.0) {
            const double r = sample_readout(spin_, rho_, rng_);
            const Operator2 m = spin_kraus(spin_, r);
            apply_normalized(m, "spin readout update");
        } else if (mode_ == SpinMode::semi_conditional) {
            rho_ = averaged_spin_channel(spin_, rho_);
        }
        // gamma_m == 0 in conditional mode: no measurement, identity channel.

        const OutcomeProbabilities p = outcome_probabilities(rho_, kraus_);
        const double total = p.total();
        if (!(total > 0.0)) {
            throw TrajectoryError(index_, "total outcome probability " + std::to_string(total) +
                                              " is not positive; state diag = (" +
                                              std::to_string(rho_(0, 0).real()) + ", " +
                                              std::to_string(rho_(1, 1).real()) + ")");
        }
        const double u = uniform_(rng_) * total;
        if (u < p.p_a) {
            apply_normalized(kraus_.m_a, "absorption update");
            ++n_a_;
        } else if (u < p.p_a + p.p_e) {
            apply_normalized(kraus_.m_e, "emission update");
            ++n_e_;
        } else {
            apply_normalized(kraus_.m_o, "null update");
        }

        rho_ = hamiltonian_step(rho_, omega_, dt_);
        if (check_) assert_valid_density(rho_);
    }

  private:
    void apply_normalized(const Operator2& m, const char* what) {
        rho_ = (m * rho_ * m.adjoint()).eval();
        const double tr = rho_.trace().real();
        if (!(tr > 0.0)) {
            throw TrajectoryError(index_, std::string(what) + ": normalization " +
                                              std::to_string(tr) + " is not positive");
        }
        rho_ /= tr;
    }

    SpinChannel spin_;
    KrausSet kraus_;
    double omega_;
    double dt_;
    SpinMode mode_;
    bool check_;
    long long index_;
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    DensityMatrix rho_;
    std::uint32_t n_a_ = 0;
    std::uint32_t n_e_ = 0;
};

std::vector<int> make_checkpoints(int steps, int stride) {
    std::vector<int> points;
    if (stride <= 0) return points;
    for (int k = stride; k <= steps; k += stride) points.push_back(k);
    if (points.empty() || points.back() != steps) points.push_back(steps);
    return points;
}

EnsembleStats make_empty_stats(const ModelParams& params, const EnsembleOptions& options) {
    EnsembleStats stats;
    stats.steps = params.steps;
    stats.dt = params.dt;
    stats.per_step.assign(static_cast<std::size_t>(params.steps), StepStats{});
    stats.checkpoint_steps = make_checkpoints(params.steps, options.state_stride);
    stats.states.assign(stats.checkpoint_steps.size(), StateMeanAccumulator{});
    return stats;
}

// Runs trajectories [first, last) into a block-local accumulator.
void accumulate_block(const ModelParams& params, const EnsembleOptions& options,
                      const DensityMatrix& rho0, long long first, long long last,
                      EnsembleStats& block) {
    for (long long idx = first; idx < last; ++idx) {
        Stepper stepper(params, idx, rho0, options.check_states);
        std::size_t checkpoint = 0;
        for (int k = 1; k <= params.steps; ++k) {
            stepper.step();
            block.per_step[static_cast<std::size_t>(k - 1)].add(
                static_cast<double>(stepper.count_a()), static_cast<double>(stepper.count_e()));
            if (checkpoint < block.checkpoint_steps.size() &&
                block.checkpoint_steps[checkpoint] == k) {
                block.states[checkpoint].add(stepper.state());
                ++checkpoint;
            }
        }
    }
}

} // namespace

void EnsembleStats::merge(const EnsembleStats& other) {
    if (other.per_step.empty()) return;
    if (per_step.empty()) {
        *this = other;
        return;
    }
    if (other.steps != steps || other.checkpoint_steps != checkpoint_steps) {
        throw std::invalid_argument("EnsembleStats::merge: incompatible layouts");
    }
    for (std::size_t k = 0; k < per_step.size(); ++k) per_step[k].merge(other.per_step[k]);
    for (std::size_t c = 0; c < states.size(); ++c) states[c].merge(other.states[c]);
}

CountRecord run_trajectory(const ModelParams& params, long long index) {
    params.validate();
    const DensityMatrix rho0 = steady_state(params).rho;
    Stepper stepper(params, index, rho0, false);
    CountRecord record;
    record.trajectory_index = index;
    record.n_a.reserve(static_cast<std::size_t>(params.steps));
    record.n_e.reserve(static_cast<std::size_t>(params.steps));
    for (int k = 0; k < params.steps; ++k) {
        stepper.step();
        record.n_a.push_back(stepper.count_a());
        record.n_e.push_back(stepper.count_e());
    }
    return record;
}

EnsembleStats run_ensemble(const ModelParams& params, const EnsembleOptions& options) {
    params.validate();
    const DensityMatrix rho0 = options.initial_state.value_or(steady_state(params).rho);
    if (options.initial_state) assert_valid_density(*options.initial_state);

    const long long n_blocks = (params.trajectories + kBlockSize - 1) / kBlockSize;
    std::vector<EnsembleStats> blocks(static_cast<std::size_t>(n_blocks));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_blocks));
    std::atomic<long long> next{0};

    const auto work = [&]() {
        for (long long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1)) {
            try {
                EnsembleStats local = make_empty_stats(params, options);
                const long long first = b * kBlockSize;
                const long long last = std::min(params.trajectories, first + kBlockSize);
                accumulate_block(params, options, rho0, first, last, local);
                blocks[static_cast<std::size_t>(b)] = std::move(local);
            } catch (...) {
                errors[static_cast<std::size_t>(b)] = std::current_exception();
            }
        }
    };

    int workers = options.workers > 0
                      ? options.workers
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = static_cast<int>(std::min<long long>(workers, n_blocks));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    for (const auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }

    EnsembleStats total = make_empty_stats(params, options);
    for (auto& block : blocks) total.merge(block);
    return total;
}

std::optional<ValueWithError> empirical_mandel_q(const EnsembleStats& stats, Observable which,
                                                 int step) {
    if (step < 1 || step > stats.steps) {
        throw std::out_of_range("empirical_mandel_q: step out of range");
    }
    const StepStats& s = stats.per_step[static_cast<std::size_t>(step - 1)];
    switch (which) {
        case Observable::absorption: return mandel_q(s.a);
        case Observable::emission: return mandel_q(s.e);
        case Observable::sum: return mandel_q(s.sum);
    }
    return std::nullopt;
}

DensityMatrix integrate_master_rk4(const ModelParams& params, const DensityMatrix& rho0,
                                   double t, int substeps) {
    if (!(substeps > 0)) throw std::invalid_argument("integrate_master_rk4: substeps must be > 0");
    const Superoperator4 generator = tilted_generator({0.0, 0.0}, params);
    const double h = t / substeps;
    Vec4 v = vec(rho0);
    for (int k = 0; k < substeps; ++k) {
        const Vec4 k1 = generator * v;
        const Vec4 k2 = generator * (v + 0.5 * h * k1).eval();
        const Vec4 k3 = generator * (v + 0.5 * h * k2).eval();
        const Vec4 k4 = generator * (v + h * k3).eval();
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return unvec(v);
}

ConsistencyReport unconditional_consistency(const ModelParams& params,
                                            const EnsembleOptions& options) {
    EnsembleOptions opts = options;
    if (opts.state_stride <= 0) opts.state_stride = std::max(1, params.steps / 20);
    const EnsembleStats stats = run_ensemble(params, opts);

    const DensityMatrix rho0 = opts.initial_state.value_or(steady_state(params).rho);
    ConsistencyReport report;
    for (std::size_t c = 0; c < stats.checkpoint_steps.size(); ++c) {
        const int k = stats.checkpoint_steps[c];
        const double t = stats.time_at(k);
        const DensityMatrix reference = integrate_master_rk4(params, rho0, t, k);
        const double dist = trace_distance(stats.states[c].mean_density(), reference);
        report.times.push_back(t);
        report.trace_distances.push_back(dist);
        report.error_floors.push_back(stats.states[c].error_floor());
        report.max_trace_distance = std::max(report.max_trace_distance, dist);
    }
    if (!report.trace_distances.empty()) {
        report.final_trace_distance = report.trace_distances.back();
        report.final_error_floor = report.error_floors.back();
    }
    return report;
}

} // namespace jumpstats
