// commands.hpp — The four user-facing commands. Each returns a process exit
// code: 0 success, 2 numerical tolerance breach in diagnostic/verify modes.
// Configuration errors throw and map to exit code 1 in the CLI.

#pragma once

#include "jumpstats/config.hpp"

namespace jumpstats {

// Analytic sweep: one row per (gamma_m, time point) with the full closed-form
// moment report; annotates the transition rate when the sweep crosses it.
int cmd_theory(const RunConfig& config);

// Monte Carlo sweep with standard errors next to the matching analytic
// columns; exit status reflects final-time agreement (diagnostic mode).
int cmd_simulate(const RunConfig& config);

// theta over a tilt grid, closed form next to the numerical eigenvalue.
int cmd_scgf(const RunConfig& config);

// Truncated Fock-space reconstruction checks; nonzero exit on tolerance
// breach.
int cmd_verify_appendix(const RunConfig& config);

} // namespace jumpstats
