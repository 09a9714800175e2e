// config.hpp — Run configuration: JSON file plus flat flag overrides, strict
// key validation, and the single gamma_m sweep axis.

#pragma once

#include <string>
#include <vector>

#include "jumpstats/params.hpp"

namespace jumpstats {

struct RunConfig {
    ModelParams params;                 // gamma_m is taken from the sweep below
    std::vector<double> gamma_m = {0.0, 1.0, 2.0, 2.83, 4.0, 6.0};
    std::string out;                    // empty = per-command default
    int decimate = 20;
    int workers = 0;                    // 0 = hardware concurrency
    bool allow_large_n_avg = false;
    // scgf command
    double s_max = 0.5;
    int s_points = 11;
    // verify-appendix command
    double fock_dt = 1e-6;
    int fock_n_max = 0;                 // 0 = automatic truncation

    // Full validation including the shipped-configuration occupation policy.
    void validate() const;
};

// Strict parse: unknown keys are rejected, every constraint violation names
// the key and the bound.
RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text); // same, from a JSON string

} // namespace jumpstats
