// trajectory.hpp — Conditional quantum trajectories, reproducible parallel
// ensembles with streaming statistics, the empirical Mandel Q estimator, and
// the consistency check of the ensemble average against the unconditional
// master equation.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "jumpstats/params.hpp"
#include "jumpstats/qcore.hpp"
#include "jumpstats/stats.hpp"

namespace jumpstats {

// Cumulative jump counts after each step, k = 1..steps.
struct CountRecord {
    long long trajectory_index = 0;
    std::vector<std::uint32_t> n_a;
    std::vector<std::uint32_t> n_e;
};

struct TrajectoryError : std::runtime_error {
    long long trajectory_index;
    TrajectoryError(long long index, const std::string& what)
        : std::runtime_error("trajectory " + std::to_string(index) + ": " + what),
          trajectory_index(index) {}
};

// One conditional trajectory, initialized in the unconditional steady state.
// Deterministic in (params.seed, index).
CountRecord run_trajectory(const ModelParams& params, long long index);

struct EnsembleOptions {
    int workers = 0;                          // 0 = hardware concurrency
    int state_stride = 0;                     // 0 = no state checkpoints
    bool check_states = false;                // re-validate the state after every step
    std::optional<DensityMatrix> initial_state; // default: steady state
};

struct EnsembleStats {
    int steps = 0;
    double dt = 0.0;
    std::vector<StepStats> per_step;            // index k-1 holds time k*dt
    std::vector<int> checkpoint_steps;          // 1-based step indices with state stats
    std::vector<StateMeanAccumulator> states;   // parallel to checkpoint_steps

    long long trajectories() const { return per_step.empty() ? 0 : per_step.front().a.count; }
    double time_at(int step) const { return step * dt; }
    void merge(const EnsembleStats& other);
};

// Statistics over params.trajectories independent trajectories. The result is
// a pure function of params: the trajectory partition and the accumulator
// fold order are fixed, so any worker count produces bit-identical output.
EnsembleStats run_ensemble(const ModelParams& params, const EnsembleOptions& options = {});

enum class Observable { absorption, emission, sum };

// Empirical Mandel Q at one time step (1-based), with propagated error bar.
std::optional<ValueWithError> empirical_mandel_q(const EnsembleStats& stats, Observable which,
                                                 int step);

// Fixed-step RK4 integration of the unconditional master equation.
DensityMatrix integrate_master_rk4(const ModelParams& params, const DensityMatrix& rho0,
                                   double t, int substeps);

struct ConsistencyReport {
    std::vector<double> times;
    std::vector<double> trace_distances;
    std::vector<double> error_floors;       // statistical scale of the ensemble mean
    double max_trace_distance = 0.0;
    double final_trace_distance = 0.0;
    double final_error_floor = 0.0;
};

// Compares the ensemble-averaged conditional state against direct integration
// of the unconditional master equation at ~20 checkpoints.
ConsistencyReport unconditional_consistency(const ModelParams& params,
                                            const EnsembleOptions& options = {});

} // namespace jumpstats
