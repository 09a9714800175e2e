// jumpstats CLI: theory / simulate / verify-appendix / scgf subcommands over
// a JSON config with flat flag overrides. Exit codes: 0 success, 1 usage or
// configuration error, 2 numerical tolerance breach in diagnostic modes.

#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumpstats/commands.hpp"
#include "jumpstats/config.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::vector<double> gamma_m;
    double omega = 0, gamma_w = 0, n_avg = 0, dt = 0;
    long long steps = 0, trajectories = 0;
    std::uint64_t seed = 0;
    std::string mode, out;
    int decimate = 0, workers = 0;
    bool allow_large_n_avg = false;

    CLI::Option* opt_gamma_m = nullptr;
    CLI::Option* opt_omega = nullptr;
    CLI::Option* opt_gamma_w = nullptr;
    CLI::Option* opt_n_avg = nullptr;
    CLI::Option* opt_dt = nullptr;
    CLI::Option* opt_steps = nullptr;
    CLI::Option* opt_trajectories = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_mode = nullptr;
    CLI::Option* opt_out = nullptr;
    CLI::Option* opt_decimate = nullptr;
    CLI::Option* opt_workers = nullptr;
    CLI::Option* opt_allow = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
    f.opt_gamma_m = cmd->add_option("--gamma-m", f.gamma_m,
                                    "spin measurement rate(s); a list defines the sweep axis");
    f.opt_omega = cmd->add_option("--omega", f.omega, "emitter splitting");
    f.opt_gamma_w = cmd->add_option("--gamma-w", f.gamma_w, "spontaneous emission rate");
    f.opt_n_avg = cmd->add_option("--n-avg", f.n_avg, "mean environment occupation");
    f.opt_dt = cmd->add_option("--dt", f.dt, "time step");
    f.opt_steps = cmd->add_option("--steps", f.steps, "number of time steps");
    f.opt_trajectories = cmd->add_option("--trajectories", f.trajectories, "ensemble size");
    f.opt_seed = cmd->add_option("--seed", f.seed, "master RNG seed");
    f.opt_mode = cmd->add_option("--mode", f.mode, "spin treatment: semi | conditional")
                     ->check(CLI::IsMember({"semi", "conditional"}));
    f.opt_out = cmd->add_option("--out", f.out, "output CSV path");
    f.opt_decimate = cmd->add_option("--decimate", f.decimate, "emit every k-th time step");
    f.opt_workers = cmd->add_option("--workers", f.workers, "worker threads (0 = hardware)");
    f.opt_allow = cmd->add_flag("--allow-large-n-avg", f.allow_large_n_avg,
                                "permit n_avg > 1 despite degraded closed-form agreement");
}

jumpstats::RunConfig build_config(const CommonFlags& f) {
    jumpstats::RunConfig cfg;
    if (!f.config_path.empty()) cfg = jumpstats::parse_config_file(f.config_path);
    if (f.opt_gamma_m->count()) cfg.gamma_m = f.gamma_m;
    if (f.opt_omega->count()) cfg.params.omega = f.omega;
    if (f.opt_gamma_w->count()) cfg.params.gamma_w = f.gamma_w;
    if (f.opt_n_avg->count()) cfg.params.n_avg = f.n_avg;
    if (f.opt_dt->count()) cfg.params.dt = f.dt;
    if (f.opt_steps->count()) cfg.params.steps = static_cast<int>(f.steps);
    if (f.opt_trajectories->count()) cfg.params.trajectories = f.trajectories;
    if (f.opt_seed->count()) cfg.params.seed = f.seed;
    if (f.opt_mode->count()) {
        cfg.params.mode = f.mode == "semi" ? jumpstats::SpinMode::semi_conditional
                                           : jumpstats::SpinMode::conditional;
    }
    if (f.opt_out->count()) cfg.out = f.out;
    if (f.opt_decimate->count()) cfg.decimate = f.decimate;
    if (f.opt_workers->count()) cfg.workers = f.workers;
    if (f.opt_allow->count()) cfg.allow_large_n_avg = true;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counting statistics of a measurement-driven two-level emitter"};
    app.require_subcommand(1);

    CommonFlags theory_flags, simulate_flags, scgf_flags, verify_flags;

    CLI::App* theory = app.add_subcommand("theory", "closed-form moment sweep to CSV");
    add_common_flags(theory, theory_flags);

    CLI::App* simulate = app.add_subcommand(
        "simulate", "Monte Carlo trajectory ensemble sweep with analytic comparison columns");
    add_common_flags(simulate, simulate_flags);

    CLI::App* scgf = app.add_subcommand("scgf", "dump theta over a tilt grid");
    add_common_flags(scgf, scgf_flags);
    double s_max = 0;
    long long s_points = 0;
    CLI::Option* opt_s_max = scgf->add_option("--s-max", s_max, "tilt grid half-width");
    CLI::Option* opt_s_points = scgf->add_option("--s-points", s_points, "tilt grid points per axis");

    CLI::App* verify =
        app.add_subcommand("verify-appendix", "truncated Fock-space reconstruction checks");
    add_common_flags(verify, verify_flags);
    double fock_dt = 0;
    long long fock_n_max = 0;
    CLI::Option* opt_fock_dt = verify->add_option("--fock-dt", fock_dt, "verification time step");
    CLI::Option* opt_fock_n_max =
        verify->add_option("--fock-n-max", fock_n_max, "truncation level (0 = automatic)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (theory->parsed()) return jumpstats::cmd_theory(build_config(theory_flags));
        if (simulate->parsed()) return jumpstats::cmd_simulate(build_config(simulate_flags));
        if (scgf->parsed()) {
            jumpstats::RunConfig cfg = build_config(scgf_flags);
            if (opt_s_max->count()) cfg.s_max = s_max;
            if (opt_s_points->count()) cfg.s_points = static_cast<int>(s_points);
            return jumpstats::cmd_scgf(cfg);
        }
        if (verify->parsed()) {
            jumpstats::RunConfig cfg = build_config(verify_flags);
            if (opt_fock_dt->count()) cfg.fock_dt = fock_dt;
            if (opt_fock_n_max->count()) cfg.fock_n_max = static_cast<int>(fock_n_max);
            return jumpstats::cmd_verify_appendix(cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
