#include "radopt/solver.hpp"

#include "radopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace radopt {

AdvectionOperator build_advection(const VelocityField& v, const Grid& grid) {
    const int n0 = grid.n[0], n1 = grid.n[1];
    const double hx = grid.h[0], hy = grid.h[1];
    const double A = v.amplitude_A;
    const size_t count = static_cast<size_t>(grid.cell_count());

    AdvectionOperator op;
    op.grid = grid;
    op.a_self.assign(count, 0.0);
    op.a_xm.assign(count, 0.0);
    op.a_xp.assign(count, 0.0);
    op.a_ym.assign(count, 0.0);
    op.a_yp.assign(count, 0.0);
    op.source.assign(count, 0.0);

    // Effective transport velocity is -A*q (the advection enters the equation
    // as -q . grad u). Boundary faces are forced to zero under the tangential
    // policy; the validated normal components are below 1e-12 anyway.
    const bool tangential = v.policy == BoundaryPolicy::require_tangential;
    op.face_vx.assign(v.face_qx.size(), 0.0);
    for (int iy = 0; iy < n1; ++iy)
        for (int fx = 0; fx <= n0; ++fx) {
            size_t f = static_cast<size_t>(fx + (n0 + 1) * iy);
            bool boundary = fx == 0 || fx == n0;
            op.face_vx[f] = (boundary && tangential) ? 0.0 : -A * v.face_qx[f];
        }
    if (grid.dim == 2) {
        op.face_vy.assign(v.face_qy.size(), 0.0);
        for (int fy = 0; fy <= n1; ++fy)
            for (int ix = 0; ix < n0; ++ix) {
                size_t f = static_cast<size_t>(ix + n0 * fy);
                bool boundary = fy == 0 || fy == n1;
                op.face_vy[f] = (boundary && tangential) ? 0.0 : -A * v.face_qy[f];
            }
    }

    op.active = false;
    for (double w : op.face_vx) op.active = op.active || w != 0.0;
    for (double w : op.face_vy) op.active = op.active || w != 0.0;

    // Upwind fluxes G = v * u_up on faces, divergence source s = div v on
    // cells. Inflow through a boundary face carries ghost value 0, so its
    // flux term drops out entirely.
    for (int iy = 0; iy < n1; ++iy) {
        for (int ix = 0; ix < n0; ++ix) {
            const size_t c = static_cast<size_t>(grid.index(ix, iy));
            const double vW = op.face_vx[static_cast<size_t>(ix + (n0 + 1) * iy)];
            const double vE = op.face_vx[static_cast<size_t>(ix + 1 + (n0 + 1) * iy)];
            double s = (vE - vW) / hx;

            // -G_E / hx
            if (vE > 0.0)
                op.a_self[c] -= vE / hx;
            else if (ix < n0 - 1)
                op.a_xp[c] -= vE / hx;
            // + G_W / hx
            if (vW > 0.0) {
                if (ix > 0) op.a_xm[c] += vW / hx;
            } else {
                op.a_self[c] += vW / hx;
            }

            if (grid.dim == 2) {
                const double vS = op.face_vy[static_cast<size_t>(ix + n0 * iy)];
                const double vN = op.face_vy[static_cast<size_t>(ix + n0 * (iy + 1))];
                s += (vN - vS) / hy;
                if (vN > 0.0)
                    op.a_self[c] -= vN / hy;
                else if (iy < n1 - 1)
                    op.a_yp[c] -= vN / hy;
                if (vS > 0.0) {
                    if (iy > 0) op.a_ym[c] += vS / hy;
                } else {
                    op.a_self[c] += vS / hy;
                }
            }
            op.source[c] = s;
            op.a_self[c] += s;
        }
    }

    op.cfl_denom = 0.0;
    for (size_t c = 0; c < count; ++c) op.cfl_denom = std::max(op.cfl_denom, -op.a_self[c]);
    return op;
}

void AdvectionOperator::apply(const std::vector<double>& u, std::vector<double>& out) const {
    const int n0 = grid.n[0];
    out.assign(u.size(), 0.0);
    for (size_t c = 0; c < u.size(); ++c) {
        double acc = a_self[c] * u[c];
        if (a_xm[c] != 0.0) acc += a_xm[c] * u[c - 1];
        if (a_xp[c] != 0.0) acc += a_xp[c] * u[c + 1];
        if (a_ym[c] != 0.0) acc += a_ym[c] * u[c - static_cast<size_t>(n0)];
        if (a_yp[c] != 0.0) acc += a_yp[c] * u[c + static_cast<size_t>(n0)];
        out[c] = acc;
    }
}

void AdvectionOperator::apply_transpose(const std::vector<double>& p,
                                        std::vector<double>& out) const {
    const int n0 = grid.n[0];
    out.assign(p.size(), 0.0);
    for (size_t c = 0; c < p.size(); ++c) {
        out[c] += a_self[c] * p[c];
        if (a_xm[c] != 0.0) out[c - 1] += a_xm[c] * p[c];
        if (a_xp[c] != 0.0) out[c + 1] += a_xp[c] * p[c];
        if (a_ym[c] != 0.0) out[c - static_cast<size_t>(n0)] += a_ym[c] * p[c];
        if (a_yp[c] != 0.0) out[c + static_cast<size_t>(n0)] += a_yp[c] * p[c];
    }
}

double AdvectionOperator::boundary_flux_rate(const std::vector<double>& u) const {
    // Net advective mass rate into the domain: -(sum over boundary faces of
    // outward flux * face area). Outflow faces carry the upwind (interior)
    // value; inflow faces carry ghost value 0.
    const int n0 = grid.n[0], n1 = grid.n[1];
    const double area_x = grid.dim == 2 ? grid.h[1] : 1.0;
    double rate = 0.0;
    for (int iy = 0; iy < n1; ++iy) {
        double vL = face_vx[static_cast<size_t>(0 + (n0 + 1) * iy)];
        if (vL < 0.0) rate += vL * u[static_cast<size_t>(grid.index(0, iy))] * area_x;
        double vR = face_vx[static_cast<size_t>(n0 + (n0 + 1) * iy)];
        if (vR > 0.0) rate -= vR * u[static_cast<size_t>(grid.index(n0 - 1, iy))] * area_x;
    }
    if (grid.dim == 2) {
        const double area_y = grid.h[0];
        for (int ix = 0; ix < n0; ++ix) {
            double vB = face_vy[static_cast<size_t>(ix + n0 * 0)];
            if (vB < 0.0) rate += vB * u[static_cast<size_t>(grid.index(ix, 0))] * area_y;
            double vT = face_vy[static_cast<size_t>(ix + n0 * n1)];
            if (vT > 0.0) rate -= vT * u[static_cast<size_t>(grid.index(ix, n1 - 1))] * area_y;
        }
    }
    return rate;
}

Scenario make_scenario(const Grid& grid, DiffusionModel diffusion, VelocityField velocity,
                       ReactionModel reaction, SolverConfig solver, double mass_m) {
    if (!(solver.T > 0.0)) throw ConfigError("final time T must be positive");
    if (!(solver.dt_target > 0.0)) throw ConfigError("dt_target must be positive");
    if (solver.checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
    if (!(mass_m > 0.0) || mass_m > grid.total_volume * (1.0 + 1e-15))
        throw ConfigError("mass constraint m must satisfy 0 < m <= |Omega|");

    Scenario s;
    s.grid = grid;
    s.diffusion = std::move(diffusion);
    s.velocity = std::move(velocity);
    s.reaction = std::move(reaction);
    s.solver = solver;
    s.mass_m = mass_m;

    auto diffusion_issues = check_diffusion_hypotheses(s.diffusion, grid);
    if (!diffusion_issues.empty()) throw HypothesisError(diffusion_issues.front());

    s.field_report = validate_field(s.velocity, grid); // throws on tangential violation
    for (const auto& w : s.field_report.warnings) s.notes.push_back(w);
    s.notes.push_back(s.velocity.policy == BoundaryPolicy::require_tangential
                          ? "boundary_policy = require_tangential"
                          : "boundary_policy = allow_nonzero_normal (advective outflow uses "
                            "upwind cell values; inflow carries ghost value 0)");

    auto reaction_issues = check_reaction_hypotheses(s.reaction, grid, solver.T);
    for (const auto& issue : reaction_issues) {
        // f(0)=f(1)=0 failures break the box-preservation contract.
        if (issue.find("must vanish") != std::string::npos) throw HypothesisError(issue);
        s.notes.push_back(issue);
    }

    s.advection = build_advection(s.velocity, grid);
    s.faces = face_diffusivities(s.diffusion, grid);
    return s;
}

double effective_dt(const Scenario& s) {
    double dt = s.solver.dt_target;
    if (s.reaction.lipschitz_M > 0.0) dt = std::min(dt, 0.9 / s.reaction.lipschitz_M);
    if (s.advection.cfl_denom > 0.0) dt = std::min(dt, 0.9 / s.advection.cfl_denom);
    int n = static_cast<int>(std::ceil(s.solver.T / dt - 1e-12));
    return s.solver.T / std::max(1, n);
}

int step_count(const Scenario& s) {
    return static_cast<int>(std::llround(s.solver.T / effective_dt(s)));
}

namespace {

struct StepWorkspace {
    std::vector<double> adv, rhs, solved;
};

// One IMEX step with ledger entries. u is overwritten with the new state.
void step_in_place(std::vector<double>& u, double t, double dt, const Scenario& sc,
                   const ImplicitDiffusion& diffusion, StepWorkspace& ws, StepBudget* budget) {
    const Grid& g = sc.grid;
    const double vol = g.cell_volume;
    const size_t count = u.size();

    // Explicit upwind advection: u <- u + dt * K u.
    if (sc.advection.active) {
        sc.advection.apply(u, ws.adv);
        if (budget) {
            double src = 0.0;
            double cont = 0.0;
            for (size_t c = 0; c < count; ++c) {
                src += sc.advection.source[c] * u[c];
                cont += sc.velocity.divergence.values[c] * u[c];
            }
            budget->advection_contrib = vol * src;
            budget->continuum_advection = -sc.velocity.amplitude_A * vol * cont;
            budget->boundary_flux = sc.advection.boundary_flux_rate(u);
        }
        for (size_t c = 0; c < count; ++c) u[c] += dt * ws.adv[c];
    } else if (budget) {
        budget->advection_contrib = budget->boundary_flux = budget->continuum_advection = 0.0;
    }

    // Explicit reaction: u <- u + dt * f(t, x, u).
    if (sc.reaction.lipschitz_M > 0.0) {
        double sum_f = 0.0, comp = 0.0;
        for (size_t c = 0; c < count; ++c) {
            double f = sc.reaction.eval(t, g.center_of(static_cast<int>(c)), u[c]);
            double s2 = sum_f + f;
            comp += (std::abs(sum_f) >= std::abs(f)) ? (sum_f - s2) + f : (f - s2) + sum_f;
            sum_f = s2;
            u[c] += dt * f;
        }
        if (budget) budget->reaction_contrib = vol * (sum_f + comp);
    } else if (budget) {
        budget->reaction_contrib = 0.0;
    }

    // Implicit zero-flux diffusion, clamped against rounding overshoot.
    ws.rhs = u;
    double mass_before = 0.0;
    if (budget) mass_before = vol * compensated_sum(ws.rhs);
    diffusion.solve(ws.rhs, u, sc.solver.linear_tol, 40 * static_cast<int>(count) + 200);
    for (double& x : u) x = std::min(1.0, std::max(0.0, x));
    if (budget) budget->diffusion_flux = (vol * compensated_sum(u) - mass_before) / dt;
}

void require_box(const std::vector<double>& u) {
    for (double x : u)
        if (!(x >= 0.0) || !(x <= 1.0))
            throw ConfigError("initial datum has values outside [0,1]");
}

} // namespace

ScalarField step(const ScalarField& u, double t, double dt, const Scenario& scenario) {
    require_box(u.values);
    ImplicitDiffusion diffusion(scenario.grid, scenario.faces, dt);
    StepWorkspace ws;
    ScalarField out = u;
    step_in_place(out.values, t, dt, scenario, diffusion, ws, nullptr);
    return out;
}

Trajectory solve_forward(const InitialDatum& u0, const Scenario& scenario) {
    if (!(u0.field.grid == scenario.grid))
        throw ConfigError("initial datum lives on a different grid than the scenario");
    require_box(u0.field.values);

    const double dt = effective_dt(scenario);
    const int n_steps = step_count(scenario);
    const int ck = scenario.solver.checkpoint_every;

    Trajectory traj;
    traj.grid = scenario.grid;
    traj.dt = dt;
    traj.n_steps = n_steps;
    traj.checkpoint_every = ck;
    traj.masses.reserve(static_cast<size_t>(n_steps) + 1);
    traj.budget.resize(static_cast<size_t>(n_steps));

    ImplicitDiffusion diffusion(scenario.grid, scenario.faces, dt);
    StepWorkspace ws;
    std::vector<double> u = u0.field.values;

    auto store = [&](int step_index, const std::vector<double>& state) {
        traj.checkpoint_steps.push_back(step_index);
        ScalarField f(scenario.grid);
        f.values = state;
        traj.checkpoints.push_back(std::move(f));
    };

    traj.masses.push_back(scenario.grid.cell_volume * compensated_sum(u));
    store(0, u);
    for (int n = 0; n < n_steps; ++n) {
        step_in_place(u, n * dt, dt, scenario, diffusion, ws, &traj.budget[static_cast<size_t>(n)]);
        traj.masses.push_back(scenario.grid.cell_volume * compensated_sum(u));
        if ((n + 1) % ck == 0 || n + 1 == n_steps) store(n + 1, u);
    }
    return traj;
}

ScalarField Trajectory::state_at(int step_index, const Scenario& scenario) const {
    // Latest stored checkpoint at or before the requested step.
    size_t k = 0;
    for (size_t i = 0; i < checkpoint_steps.size(); ++i)
        if (checkpoint_steps[i] <= step_index) k = i;
    ScalarField state = checkpoints[k];
    if (checkpoint_steps[k] == step_index) return state;

    ImplicitDiffusion diffusion(scenario.grid, scenario.faces, dt);
    StepWorkspace ws;
    for (int n = checkpoint_steps[k]; n < step_index; ++n)
        step_in_place(state.values, n * dt, dt, scenario, diffusion, ws, nullptr);
    return state;
}

double terminal_mass(const InitialDatum& u0, const Scenario& scenario) {
    return solve_forward(u0, scenario).final_mass();
}

MassBudgetReport mass_budget_report(const Trajectory& traj) {
    MassBudgetReport r;
    r.initial_mass = traj.masses.front();
    r.final_mass = traj.masses.back();
    r.mass_gain = r.final_mass - r.initial_mass;

    std::vector<double> adv, rea, dif, bdy, cont;
    adv.reserve(traj.budget.size());
    for (const StepBudget& b : traj.budget) {
        adv.push_back(traj.dt * b.advection_contrib);
        rea.push_back(traj.dt * b.reaction_contrib);
        dif.push_back(traj.dt * b.diffusion_flux);
        bdy.push_back(traj.dt * b.boundary_flux);
        cont.push_back(traj.dt * b.continuum_advection);
    }
    r.cum_advection = compensated_sum(adv);
    r.cum_reaction = compensated_sum(rea);
    r.cum_diffusion = compensated_sum(dif);
    r.cum_boundary = compensated_sum(bdy);
    r.cum_continuum_advection = compensated_sum(cont);
    r.advection_discrepancy = std::abs(r.cum_advection - r.cum_continuum_advection);

    for (size_t n = 0; n < traj.budget.size(); ++n) {
        const StepBudget& b = traj.budget[n];
        double lhs = traj.masses[n + 1] - traj.masses[n];
        double rhs = traj.dt * (b.advection_contrib + b.reaction_contrib + b.diffusion_flux +
                                b.boundary_flux);
        r.max_ledger_residual = std::max(r.max_ledger_residual, std::abs(lhs - rhs));
    }
    return r;
}

} // namespace radopt
