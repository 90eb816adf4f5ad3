// Command-line front end: simulate | optimize | enhance | verify.
// Exit codes: 0 ok, 1 verify failure, 2 config error, 3 solver error,
// 4 optimizer non-convergence, 5 enhancement verdict false.

#include "radopt/adjoint.hpp"
#include "radopt/config.hpp"
#include "radopt/csv.hpp"
#include "radopt/enhancement.hpp"
#include "radopt/errors.hpp"
#include "radopt/report.hpp"
#include "radopt/verify.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace {

namespace fs = std::filesystem;
using namespace radopt;

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<uint64_t> seed;
};

LoadedConfig load_with_overrides(const CommonArgs& args) {
    LoadedConfig cfg = load_config(args.config_path);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (args.seed) cfg.opt.seed = *args.seed;
    return cfg;
}

fs::path ensure_out_dir(const LoadedConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

int run_simulate(const CommonArgs& args, const std::string& u0_path) {
    LoadedConfig cfg = load_with_overrides(args);
    Scenario sc = scenario_from_config(cfg);
    InitialDatum u0 = u0_path.empty()
                          ? InitialDatum{ScalarField(sc.grid, cfg.mass_m / sc.grid.total_volume),
                                         cfg.mass_m}
                          : load_datum_csv(u0_path, sc.grid);

    Trajectory traj = solve_forward(u0, sc);
    fs::path dir = ensure_out_dir(cfg);
    save_trajectory_csv((dir / "trajectory.csv").string(), traj);
    save_state_csv((dir / "final_state.csv").string(), traj.final_state(), "u");
    write_budget_report((dir / "budget_report.txt").string(), mass_budget_report(traj),
                        cfg.config_hash, sc.notes);
    if (cfg.snapshots > 0) {
        int k = std::max(1, traj.n_steps / cfg.snapshots);
        int written = 0;
        for (int n = k; n <= traj.n_steps && written < cfg.snapshots; n += k, ++written) {
            char name[48];
            snprintf(name, sizeof name, "state_%06d.csv", n);
            save_state_csv((dir / name).string(), traj.state_at(n, sc), "u");
        }
    }
    std::cout << "final mass " << format_double(traj.final_mass()) << " after " << traj.n_steps
              << " steps (dt " << format_double(traj.dt) << ")\n";
    return 0;
}

int run_optimize(const CommonArgs& args, const std::string& direction) {
    LoadedConfig cfg = load_with_overrides(args);
    Scenario sc = scenario_from_config(cfg);
    Direction dir = direction == "min" ? Direction::minimize : Direction::maximize;

    OptResult res = multistart(sc, cfg.mass_m, cfg.opt, dir);
    fs::path out = ensure_out_dir(cfg);
    save_datum_csv((out / "optimal_u0.csv").string(), res.best_u0);
    save_trace_csv((out / "trace.csv").string(), res);
    write_cluster_report((out / "cluster_report.txt").string(), res, cfg.config_hash, sc.notes);
    save_state_csv((out / "gradient.csv").string(), gradient(res.best_u0, sc).gradient, "g");

    std::cout << (dir == Direction::maximize ? "max" : "min (heuristic infimum bound)")
              << " value " << format_double(res.best_value) << "\n";
    bool any_converged = false;
    for (char c : res.start_converged) any_converged = any_converged || c != 0;
    return any_converged ? 0 : 4;
}

int run_enhance(const CommonArgs& args) {
    LoadedConfig cfg = load_with_overrides(args);
    Scenario sc = scenario_from_config(cfg);
    EnhancementReport rep = enhancement_compare(sc, cfg.mass_m, cfg.opt);

    fs::path out = ensure_out_dir(cfg);
    write_enhancement_report((out / "enhancement_report.txt").string(), rep, cfg.config_hash);
    write_enhancement_sweep_csv((out / "enhancement_sweep.csv").string(), {rep});

    std::cout << "inf-side estimate " << format_double(rep.inf_side_estimate)
              << ", max-side value " << format_double(rep.max_side_value) << ", inequality "
              << (rep.inequality_holds ? "holds" : "fails") << "\n";
    return rep.inequality_holds ? 0 : 5;
}

int run_verify(const std::string& level_name) {
    VerifyLevel level = level_name == "full" ? VerifyLevel::full : VerifyLevel::quick;
    std::vector<CheckResult> checks = run_verification(level);
    bool all = true;
    size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    for (const auto& c : checks) {
        all = all && c.pass;
        printf("%-*s  %s  %s\n", static_cast<int>(width), c.name.c_str(),
               c.pass ? "PASS" : "FAIL", c.detail.c_str());
    }
    printf("%s\n", all ? "all checks passed" : "verification FAILED");
    if (!all) {
        for (const auto& c : checks)
            if (!c.pass) {
                printf("first failing check: %s\n", c.name.c_str());
                break;
            }
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"reaction-advection-diffusion terminal-mass toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string u0_path, direction = "max", level = "quick";

    auto add_common = [&](CLI::App* cmd, bool needs_config) {
        if (needs_config)
            cmd->add_option("--config", args.config_path, "scenario file")->required();
        cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", args.seed, "seed override");
    };

    CLI::App* sim = app.add_subcommand("simulate", "run one forward solve");
    add_common(sim, true);
    sim->add_option("--u0", u0_path, "initial datum CSV (header u0)");

    CLI::App* opt = app.add_subcommand("optimize", "multistart optimization of the terminal mass");
    add_common(opt, true);
    opt->add_option("--direction", direction, "max or min")
        ->check(CLI::IsMember({"max", "min"}));

    CLI::App* enh = app.add_subcommand("enhance", "advection enhancement comparison");
    add_common(enh, true);

    CLI::App* ver = app.add_subcommand("verify", "run the invariant suite");
    ver->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return run_simulate(args, u0_path);
        if (opt->parsed()) return run_optimize(args, direction);
        if (enh->parsed()) return run_enhance(args);
        if (ver->parsed()) return run_verify(level);
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
