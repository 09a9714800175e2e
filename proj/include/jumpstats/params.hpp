// params.hpp — Physical rates and discretization shared by the trajectory
// and large-deviation modules.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace jumpstats {

// semi_conditional: radiative outcomes are sampled, spin readouts are
// averaged exactly (sigma_x dephasing). conditional: spin readouts are
// sampled as well.
enum class SpinMode { semi_conditional, conditional };

struct ModelParams {
    double omega = 1.0;     // emitter splitting
    double gamma_w = 4.0;   // spontaneous emission rate
    double gamma_m = 1.0;   // spin measurement rate
    double n_avg = 1.0;     // mean environment occupation
    double dt = 5e-4;
    int steps = 2000;
    long long trajectories = 20000;
    std::uint64_t seed = 12345;
    SpinMode mode = SpinMode::semi_conditional;

    double total_time() const { return steps * dt; }

    // Physics preconditions. The shipped-configuration policy n_avg <= 1 is
    // enforced at the config layer, not here.
    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("params: dt must be > 0");
        if (!(steps > 0)) throw std::invalid_argument("params: steps must be > 0");
        if (!(trajectories > 0)) throw std::invalid_argument("params: trajectories must be > 0");
        if (!(gamma_w > 0.0)) throw std::invalid_argument("params: gamma_w must be > 0");
        if (!(gamma_m >= 0.0)) throw std::invalid_argument("params: gamma_m must be >= 0");
        if (!(n_avg >= 0.0)) throw std::invalid_argument("params: n_avg must be >= 0");
        const double strength = (n_avg + 1.0) * gamma_w * dt;
        if (strength > 0.05) {
            throw std::invalid_argument(
                "params: (n_avg+1)*gamma_w*dt = " + std::to_string(strength) +
                " exceeds 0.05; the linear-order Kraus set requires a smaller dt");
        }
    }

    bool exceeds_default_occupation() const { return n_avg > 1.0; }
};

inline const char* to_string(SpinMode mode) {
    return mode == SpinMode::semi_conditional ? "semi" : "conditional";
}

} // namespace jumpstats
