#include "radopt/verify.hpp"

#include "radopt/adjoint.hpp"
#include "radopt/enhancement.hpp"
#include "radopt/errors.hpp"
#include "radopt/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace radopt {

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[200];
    snprintf(buf, sizeof buf, pattern, a, b, c);
    return buf;
}

} // namespace

Scenario random_tangential_scenario_1d(uint64_t seed, int n_cells) {
    uint64_t st = derive_seed(seed, 0xa11);
    const double extent = 1.0;
    Grid grid = build_grid(1, std::vector<double>{extent}, std::vector<int>{n_cells});

    double sigma = 0.02 + 0.23 * uniform01(st);
    DiffusionModel diff = constant_diffusion(sigma);

    int which = static_cast<int>(uniform01(st) * 3.0);
    ReactionModel reaction;
    if (which == 0) {
        reaction = builtin_reaction("zero");
    } else if (which == 1) {
        reaction = builtin_reaction("logistic");
    } else {
        double r0 = uniform01(st);
        double r1 = 2.0 * uniform01(st);
        reaction = heterogeneous_logistic(
            [r0, r1](Point p) { return r0 + r1 * p.x * (1.0 - p.x); }, r0 + 0.25 * r1);
    }

    // Tangential by construction: the x(1-x) factor vanishes at both ends.
    double amp = uniform01(st);
    double c0 = 2.0 * uniform01(st) - 1.0;
    double c1 = 2.0 * uniform01(st) - 1.0;
    int k = 1 + static_cast<int>(uniform01(st) * 3.0);
    const double pi = 3.14159265358979323846;
    auto q = [=](Point p) {
        return amp * p.x * (1.0 - p.x) * (c0 + c1 * std::cos(k * pi * p.x));
    };
    auto dq = [=](Point p) {
        return amp * ((1.0 - 2.0 * p.x) * (c0 + c1 * std::cos(k * pi * p.x)) -
                      p.x * (1.0 - p.x) * c1 * k * pi * std::sin(k * pi * p.x));
    };
    double A = 3.0 * uniform01(st);
    VelocityField vel = make_velocity(grid, q, {}, A, BoundaryPolicy::require_tangential, dq);

    SolverConfig solver;
    solver.T = 0.1 + 0.15 * uniform01(st);
    solver.dt_target = 2e-3 + 6e-3 * uniform01(st);
    double m = (0.1 + 0.8 * uniform01(st)) * grid.total_volume;
    return make_scenario(grid, diff, std::move(vel), std::move(reaction), solver, m);
}

bool box_preservation_holds(uint64_t seed, int n_scenarios, int n_cells, std::string* detail) {
    for (int i = 0; i < n_scenarios; ++i) {
        Scenario sc = random_tangential_scenario_1d(derive_seed(seed, static_cast<uint64_t>(i)),
                                                    n_cells);
        InitialDatum u0 = random_admissible(derive_seed(seed, 9000 + static_cast<uint64_t>(i)),
                                            sc.mass_m, sc.grid);
        Trajectory traj = solve_forward(u0, sc);
        for (const ScalarField& state : traj.checkpoints)
            for (double v : state.values)
                if (!(v >= 0.0) || !(v <= 1.0)) {
                    if (detail) *detail = fmt("scenario %g: state value %.17g escapes [0,1]",
                                              static_cast<double>(i), v);
                    return false;
                }
    }
    if (detail) *detail = fmt("%g random scenarios stayed in [0,1] exactly",
                              static_cast<double>(n_scenarios));
    return true;
}

bool order_preservation_holds(const StepFn& stepper, uint64_t seed, int n_pairs,
                              std::string* detail) {
    for (int i = 0; i < n_pairs; ++i) {
        Scenario sc = random_tangential_scenario_1d(derive_seed(seed, 500 + static_cast<uint64_t>(i)),
                                                    16);
        uint64_t st = derive_seed(seed, 700 + static_cast<uint64_t>(i));
        ScalarField lo(sc.grid), hi(sc.grid);
        for (size_t c = 0; c < lo.values.size(); ++c) {
            lo.values[c] = 0.65 * uniform01(st);
            hi.values[c] = std::min(1.0, lo.values[c] + 0.05 + 0.25 * uniform01(st));
        }
        const double dt = effective_dt(sc);
        const int n_steps = step_count(sc);
        for (int n = 0; n < n_steps; ++n) {
            lo = stepper(lo, n * dt, dt, sc);
            hi = stepper(hi, n * dt, dt, sc);
            for (size_t c = 0; c < lo.values.size(); ++c)
                if (lo.values[c] > hi.values[c]) {
                    if (detail)
                        *detail = fmt("pair %g: ordering violated by %.3e at step %g",
                                      static_cast<double>(i), lo.values[c] - hi.values[c],
                                      static_cast<double>(n));
                    return false;
                }
        }
    }
    if (detail)
        *detail = fmt("%g ordered pairs stayed ordered cellwise", static_cast<double>(n_pairs));
    return true;
}

namespace {

CheckResult check_projection() {
    CheckResult r{"projection", true, ""};
    // Hand-solved shift-and-clamp case: v=(1.2,0.4,0.2,0.0), m=0.5 on a
    // 4-cell unit interval gives tau = 2/15.
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{4});
    ScalarField v(g);
    v.values = {1.2, 0.4, 0.2, 0.0};
    InitialDatum p = project_capped_simplex(v, 0.5);
    const double expect[4] = {1.0, 0.4 + 2.0 / 15.0, 0.2 + 2.0 / 15.0, 2.0 / 15.0};
    for (int i = 0; i < 4; ++i)
        if (std::abs(p.field.values[static_cast<size_t>(i)] - expect[i]) > 1e-9) {
            r.pass = false;
            r.detail = fmt("KKT case: cell %g got %.12g", i, p.field.values[static_cast<size_t>(i)]);
            return r;
        }
    // Idempotence and non-expansiveness on random pairs.
    uint64_t st = derive_seed(42, 0);
    for (int trial = 0; trial < 50; ++trial) {
        ScalarField a(g), b(g);
        for (size_t c = 0; c < 4; ++c) {
            a.values[c] = 3.0 * uniform01(st) - 1.0;
            b.values[c] = 3.0 * uniform01(st) - 1.0;
        }
        double m = 0.1 + 0.85 * uniform01(st);
        InitialDatum pa = project_capped_simplex(a, m);
        InitialDatum pb = project_capped_simplex(b, m);
        InitialDatum paa = project_capped_simplex(pa.field, m);
        double moved = 0.0, da = 0.0, dp = 0.0;
        for (size_t c = 0; c < 4; ++c) {
            moved = std::max(moved, std::abs(paa.field.values[c] - pa.field.values[c]));
            double x = a.values[c] - b.values[c];
            double y = pa.field.values[c] - pb.field.values[c];
            da += x * x;
            dp += y * y;
        }
        if (moved > 1e-9 || dp > da * (1.0 + 1e-12)) {
            r.pass = false;
            r.detail = fmt("idempotence moved %.3e / expansion %.17g > %.17g", moved, dp, da);
            return r;
        }
    }
    r.detail = "KKT case, idempotence, non-expansiveness";
    return r;
}

CheckResult check_conservation() {
    CheckResult r{"conservation", true, ""};
    {
        Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{16});
        SolverConfig s;
        s.T = 1.0;
        s.dt_target = 1e-2;
        Scenario sc = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                    builtin_reaction("zero"), s, 0.5);
        InitialDatum u0 = random_admissible(7, 0.5, g);
        double drift = std::abs(terminal_mass(u0, sc) - 0.5);
        if (drift > 1e-12 * g.total_volume) {
            r.pass = false;
            r.detail = fmt("1D drift %.3e", drift);
            return r;
        }
    }
    {
        Grid g = build_grid(2, std::vector<double>{1.0, 0.8}, std::vector<int>{12, 10});
        SolverConfig s;
        s.T = 0.5;
        s.dt_target = 1e-2;
        Scenario sc = make_scenario(g, constant_diffusion(0.15), zero_velocity(g),
                                    builtin_reaction("zero"), s, 0.3 * g.total_volume);
        ScalarField f(g);
        const double pi = 3.14159265358979323846;
        for (int c = 0; c < g.cell_count(); ++c) {
            Point p = g.center_of(c);
            f.values[static_cast<size_t>(c)] =
                0.3 + 0.2 * std::cos(pi * p.x) * std::cos(pi * p.y / 0.8);
        }
        InitialDatum u0{f, integrate(f)};
        double drift = std::abs(terminal_mass(u0, sc) - u0.mass_m);
        if (drift > 1e-12 * g.total_volume) {
            r.pass = false;
            r.detail = fmt("2D drift %.3e", drift);
            return r;
        }
    }
    r.detail = "mass constant to 1e-12 * |Omega| in 1D and 2D";
    return r;
}

CheckResult check_logistic_reduction() {
    CheckResult r{"logistic_ode_reduction", true, ""};
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{8});
    SolverConfig s;
    s.T = 1.0;
    s.dt_target = 1e-3;
    Scenario sc = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                builtin_reaction("logistic"), s, 0.5);
    InitialDatum u0{ScalarField(g, 0.5), 0.5};
    double got = terminal_mass(u0, sc) / g.total_volume;
    double exact = 1.0 / (1.0 + std::exp(-1.0));
    double err = std::abs(got - exact);
    r.pass = err <= 5e-3;
    r.detail = fmt("|I_T/|Omega| - 1/(1+e^-1)| = %.3e (tol 5e-3)", err);
    return r;
}

CheckResult check_gradient() {
    CheckResult r{"gradient_fd", true, ""};
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        Scenario sc = random_tangential_scenario_1d(derive_seed(1234, static_cast<uint64_t>(i)), 12);
        uint64_t st = derive_seed(77, static_cast<uint64_t>(i));
        ScalarField f(sc.grid);
        for (double& x : f.values) x = 0.2 + 0.6 * uniform01(st);
        InitialDatum u0{f, integrate(f)};
        GradientResult gr = gradient(u0, sc);
        gr.fd_check = fd_check_gradient(u0, sc, gr, 3, 1e-5, 55 + static_cast<uint64_t>(i));
        worst = std::max(worst, gr.fd_check->max_rel_error);
    }
    r.pass = worst <= 1e-6;
    r.detail = fmt("max relative FD mismatch %.3e (tol 1e-6)", worst);
    return r;
}

CheckResult check_concavity() {
    CheckResult r{"concavity", true, ""};
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{8});
    SolverConfig s;
    s.T = 0.4;
    s.dt_target = 4e-3;
    Scenario sc = make_scenario(g, constant_diffusion(0.08), zero_velocity(g),
                                builtin_reaction("logistic"), s, 0.5);
    ConcavityReport rep = concavity_probe(sc, 0.5, 10, 2024);
    r.pass = rep.min_gap >= -1e-9;
    r.detail = fmt("min concavity gap %.3e (tol -1e-9)", rep.min_gap);
    return r;
}

// Exhaustive search of the 0.05-lattice inside the constraint set on a 4-cell
// grid; the mass constraint is exact in integer lattice units.
double lattice_search_max(const Scenario& sc, double m, double step, bool minimize = false) {
    const int per_cell = static_cast<int>(std::llround(1.0 / step));
    const int total = static_cast<int>(std::llround(m / (sc.grid.cell_volume * step)));
    double best = minimize ? 1e300 : -1e300;
    ScalarField f(sc.grid);
    for (int a = 0; a <= per_cell; ++a)
        for (int b = 0; b <= per_cell; ++b)
            for (int c = 0; c <= per_cell; ++c) {
                int d = total - a - b - c;
                if (d < 0 || d > per_cell) continue;
                f.values = {a * step, b * step, c * step, d * step};
                double val = terminal_mass(InitialDatum{f, m}, sc);
                best = minimize ? std::min(best, val) : std::max(best, val);
            }
    return best;
}

Scenario oracle_scenario() {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{4});
    SolverConfig s;
    s.T = 0.5;
    s.dt_target = 1e-2;
    return make_scenario(g, constant_diffusion(0.05), zero_velocity(g),
                         builtin_reaction("logistic"), s, 0.5);
}

CheckResult check_optimizer_oracle() {
    CheckResult r{"optimizer_lattice_oracle", true, ""};
    Scenario sc = oracle_scenario();
    OptConfig cfg;
    cfg.stop_tol = 1e-10;
    OptResult opt = maximize(sc, 0.5, cfg);
    double lattice = lattice_search_max(sc, 0.5, 0.05);
    double gap = std::abs(opt.best_value - lattice);
    r.pass = gap <= 2e-3 && opt.best_value >= lattice - 1e-9;
    r.detail = fmt("optimizer %.9g vs lattice %.9g, gap %.3e (tol 2e-3)", opt.best_value, lattice,
                   gap);
    return r;
}

CheckResult check_ledger() {
    CheckResult r{"mass_budget_ledger", true, ""};
    double worst = 0.0;
    for (int i = 0; i < 8; ++i) {
        Scenario sc = random_tangential_scenario_1d(derive_seed(31337, static_cast<uint64_t>(i)),
                                                    16);
        InitialDatum u0 = random_admissible(derive_seed(4, static_cast<uint64_t>(i)), sc.mass_m,
                                            sc.grid);
        MassBudgetReport b = mass_budget_report(solve_forward(u0, sc));
        worst = std::max(worst, b.max_ledger_residual / sc.grid.total_volume);
    }
    // q = 0: final mass must equal m plus the accumulated reaction exactly.
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{16});
    SolverConfig s;
    s.T = 0.5;
    s.dt_target = 5e-3;
    Scenario sc = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                builtin_reaction("logistic"), s, 0.5);
    MassBudgetReport b = mass_budget_report(solve_forward(random_admissible(9, 0.5, g), sc));
    double defect = std::abs(b.final_mass - (b.initial_mass + b.cum_reaction));
    worst = std::max(worst, defect / g.total_volume);
    r.pass = worst <= 1e-12;
    r.detail = fmt("worst ledger residual %.3e per |Omega| (tol 1e-12)", worst);
    return r;
}

CheckResult check_order() {
    CheckResult r{"order_preservation", true, ""};
    StepFn production = [](const ScalarField& u, double t, double dt, const Scenario& sc) {
        return step(u, t, dt, sc);
    };
    r.pass = order_preservation_holds(production, 99, 8, &r.detail);
    return r;
}

CheckResult check_box() {
    CheckResult r{"box_preservation", true, ""};
    r.pass = box_preservation_holds(17, 25, 16, &r.detail);
    return r;
}

CheckResult check_threshold() {
    CheckResult r{"threshold_formula", true, ""};
    if (threshold_amplitude(1.0, 1.0, 0.5, -1.0) != 2.0) {
        r.pass = false;
        r.detail = "threshold_amplitude(1,1,0.5,-1) != 2";
        return r;
    }
    uint64_t st = derive_seed(5150, 0);
    for (int i = 0; i < 40; ++i) {
        double M = 0.1 + uniform01(st), W = 0.5 + uniform01(st), m = 0.1 + uniform01(st);
        double alpha = -(0.1 + uniform01(st));
        double c = 0.5 + 2.0 * uniform01(st);
        double base = threshold_amplitude(M, W, m, alpha);
        double sM = threshold_amplitude(c * M, W, m, alpha);
        double sm = threshold_amplitude(M, W, c * m, alpha);
        if (std::abs(sM - c * base) > 1e-12 * std::abs(sM) ||
            std::abs(sm - base / c) > 1e-12 * std::abs(sm)) {
            r.pass = false;
            r.detail = "homogeneity violated beyond round-off";
            return r;
        }
    }
    bool threw = false;
    try {
        threshold_amplitude(1.0, 1.0, 0.5, 0.2);
    } catch (const HypothesisError&) {
        threw = true;
    }
    r.pass = threw;
    r.detail = threw ? "value, homogeneity, sign guard" : "alpha >= 0 did not raise";
    return r;
}

CheckResult check_monotonicity() {
    CheckResult r{"mass_monotonicity", true, ""};
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{16});
    SolverConfig s;
    s.T = 0.5;
    s.dt_target = 5e-3;
    Scenario up = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                builtin_reaction("logistic"), s, 0.5);
    Scenario down = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                  builtin_reaction("convex_negative"), s, 0.5);
    InitialDatum u0 = random_admissible(12, 0.5, g);
    bool inc = monotonicity_check(solve_forward(u0, up));
    bool dec = monotonicity_check(solve_forward(u0, down));
    r.pass = inc && !dec;
    r.detail = fmt("nonnegative reaction monotone: %g, negative reaction monotone: %g",
                   inc ? 1.0 : 0.0, dec ? 1.0 : 0.0);
    return r;
}

CheckResult check_heat_eigenmode(bool full) {
    CheckResult r{"heat_eigenmode", true, ""};
    const double pi = 3.14159265358979323846;
    const double sigma = 0.1, T = 0.5;
    auto error_for = [&](int n, double dt) {
        Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{n});
        SolverConfig s;
        s.T = T;
        s.dt_target = dt;
        Scenario sc = make_scenario(g, constant_diffusion(sigma), zero_velocity(g),
                                    builtin_reaction("zero"), s, 0.5);
        ScalarField f(g);
        for (int i = 0; i < n; ++i)
            f.values[static_cast<size_t>(i)] = 0.5 + 0.5 * std::cos(pi * g.center(i).x);
        Trajectory traj = solve_forward(InitialDatum{f, integrate(f)}, sc);
        double decay = std::exp(-sigma * pi * pi * T);
        double err = 0.0;
        for (int i = 0; i < n; ++i)
            err = std::max(err, std::abs(traj.final_state().values[static_cast<size_t>(i)] -
                                         (0.5 + 0.5 * decay * std::cos(pi * g.center(i).x))));
        return err;
    };
    if (!full) {
        double err = error_for(16, 1e-3);
        r.pass = err <= 1.0 * (1e-3 + 1.0 / 256.0);
        r.detail = fmt("max pointwise error %.3e at h=1/16, dt=1e-3", err);
        return r;
    }
    double e8 = error_for(8, 1e-4), e16 = error_for(16, 1e-4), e32 = error_for(32, 1e-4);
    double r1 = std::log2(e8 / e16), r2 = std::log2(e16 / e32);
    bool bound = e8 <= 1.0 * (1e-4 + 1.0 / 64.0) && e16 <= 1.0 * (1e-4 + 1.0 / 256.0) &&
                 e32 <= 1.0 * (1e-4 + 1.0 / 1024.0);
    r.pass = bound && r1 >= 1.8 && r2 >= 1.8;
    r.detail = fmt("spatial rates %.2f, %.2f (need >= 1.8)", r1, r2);
    return r;
}

CheckResult check_dt_halving() {
    CheckResult r{"logistic_dt_halving", true, ""};
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{8});
    auto run = [&](double dt) {
        SolverConfig s;
        s.T = 1.0;
        s.dt_target = dt;
        Scenario sc = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                    builtin_reaction("logistic"), s, 0.5);
        return terminal_mass(InitialDatum{ScalarField(g, 0.5), 0.5}, sc) / g.total_volume;
    };
    double exact = 1.0 / (1.0 + std::exp(-1.0));
    double e1 = std::abs(run(1e-3) - exact);
    double e2 = std::abs(run(5e-4) - exact);
    double ratio = e1 / e2;
    r.pass = e1 <= 5e-3 && ratio >= 1.7 && ratio <= 2.35;
    r.detail = fmt("errors %.3e -> %.3e, ratio %.3f (first order)", e1, e2, ratio);
    return r;
}

CheckResult check_advection_discrepancy() {
    CheckResult r{"advection_discrepancy_rate", true, ""};
    const double pi = 3.14159265358979323846;
    // q with a nonvanishing third derivative, so the face-difference and
    // analytic divergences genuinely differ at O(h^2).
    auto run = [&](int n) {
        Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{n});
        auto q = [pi](Point p) { double s = std::sin(pi * p.x); return s * s; };
        auto dq = [pi](Point p) { return pi * std::sin(2.0 * pi * p.x); };
        VelocityField v = make_velocity(g, q, {}, 1.0, BoundaryPolicy::require_tangential, dq);
        SolverConfig s;
        s.T = 0.2;
        s.dt_target = 1e-3;
        Scenario sc = make_scenario(g, constant_diffusion(0.1), std::move(v),
                                    builtin_reaction("logistic"), s, 0.5);
        // same smooth initial profile at every resolution
        ScalarField f(g);
        for (int i = 0; i < n; ++i)
            f.values[static_cast<size_t>(i)] = 0.5 + 0.3 * std::cos(2.0 * pi * g.center(i).x);
        InitialDatum u0{f, integrate(f)};
        return mass_budget_report(solve_forward(u0, sc)).advection_discrepancy;
    };
    double d16 = run(16), d32 = run(32), d64 = run(64);
    double r1 = std::log2(d16 / d32), r2 = std::log2(d32 / d64);
    r.pass = r1 >= 0.9 && r2 >= 0.9;
    r.detail = fmt("discrepancy rates %.2f, %.2f (need >= 0.9)", r1, r2);
    return r;
}

CheckResult check_uniqueness_cluster() {
    CheckResult r{"uniqueness_multistart", true, ""};
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{16});
    SolverConfig s;
    s.T = 0.5;
    s.dt_target = 2e-3;
    Scenario sc = make_scenario(g, constant_diffusion(0.1), zero_velocity(g),
                                builtin_reaction("logistic"), s, 0.5);
    OptConfig cfg;
    cfg.multistart_k = 8;
    cfg.stop_tol = 1e-9;
    cfg.seed = 321;
    OptResult res = multistart(sc, 0.5, cfg);
    r.pass = res.max_pairwise_l1 <= 1e-3 * g.total_volume;
    r.detail = fmt("max pairwise L1 distance %.3e (tol 1e-3 * |Omega|)", res.max_pairwise_l1);
    return r;
}

} // namespace

std::vector<CheckResult> run_verification(VerifyLevel level) {
    std::vector<CheckResult> out;
    out.push_back(check_projection());
    out.push_back(check_box());
    out.push_back(check_order());
    out.push_back(check_conservation());
    out.push_back(check_logistic_reduction());
    out.push_back(check_heat_eigenmode(level == VerifyLevel::full));
    out.push_back(check_gradient());
    out.push_back(check_concavity());
    out.push_back(check_optimizer_oracle());
    out.push_back(check_ledger());
    out.push_back(check_threshold());
    out.push_back(check_monotonicity());
    if (level == VerifyLevel::full) {
        out.push_back(check_dt_halving());
        out.push_back(check_advection_discrepancy());
        out.push_back(check_uniqueness_cluster());
    }
    return out;
}

} // namespace radopt
