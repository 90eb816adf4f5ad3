#ifndef RADOPT_SOLVER_HPP
#define RADOPT_SOLVER_HPP

#include "radopt/admissible.hpp"
#include "radopt/grid.hpp"
#include "radopt/linsolve.hpp"
#include "radopt/models.hpp"

#include <string>
#include <vector>

namespace radopt {

struct SolverConfig {
    double T = 1.0;
    double dt_target = 1e-3;
    int checkpoint_every = 1;
    double linear_tol = 1e-10;
};

// Per-step mass rates. The step update is written so that
//   mass(u^{n+1}) - mass(u^n)
//     = dt * (advection + reaction + diffusion + boundary)
// closes to rounding. advection_contrib is the divergence-source part
// (the discrete counterpart of -A * integral (div q) u), boundary_flux the
// advective mass rate through boundary faces, diffusion_flux the realized
// rate of the implicit solve (zero up to solver rounding under zero-flux
// boundaries).
struct StepBudget {
    double advection_contrib = 0.0;
    double reaction_contrib = 0.0;
    double diffusion_flux = 0.0;
    double boundary_flux = 0.0;
    double continuum_advection = 0.0; // -A * quadrature of (div q) u, analytic divergence
};

struct Trajectory {
    Grid grid;
    double dt = 0.0;
    int n_steps = 0;
    int checkpoint_every = 1;
    std::vector<int> checkpoint_steps;   // step indices of stored states
    std::vector<ScalarField> checkpoints;
    std::vector<double> masses;          // per step, size n_steps + 1
    std::vector<StepBudget> budget;      // per step, size n_steps

    const ScalarField& final_state() const { return checkpoints.back(); }
    double final_mass() const { return masses.back(); }
    // State at an arbitrary step index; replays from the nearest checkpoint
    // when checkpoint_every > 1.
    ScalarField state_at(int step, const struct Scenario& scenario) const;
};

// Explicit upwind advection operator in flux-plus-divergence-source form,
// precomputed as a 5-point stencil. Off-diagonal entries are nonnegative, so
// u + dt*K u is a convex combination of neighbor values whenever
// dt * cfl_denom <= 1.
struct AdvectionOperator {
    Grid grid;
    bool active = false;
    std::vector<double> a_self, a_xm, a_xp, a_ym, a_yp;
    std::vector<double> source;  // per-cell effective divergence of -A*q
    std::vector<double> face_vx; // effective transport velocity -A*q at faces
    std::vector<double> face_vy;
    double cfl_denom = 0.0;      // max over cells of -a_self (clipped at 0)

    void apply(const std::vector<double>& u, std::vector<double>& out) const;
    void apply_transpose(const std::vector<double>& p, std::vector<double>& out) const;
    // Advective mass rate through boundary faces for the state u (positive
    // when mass enters the domain).
    double boundary_flux_rate(const std::vector<double>& u) const;
};

AdvectionOperator build_advection(const VelocityField& v, const Grid& grid);

// Scenario: everything a forward solve needs, cross-validated on construction.
struct Scenario {
    Grid grid;
    DiffusionModel diffusion;
    VelocityField velocity;
    ReactionModel reaction;
    SolverConfig solver;
    double mass_m = 0.0;
    FieldReport field_report;
    std::vector<std::string> notes; // policy and hypothesis records

    AdvectionOperator advection; // derived
    FaceDiffusivity faces;       // derived
};

// Runs validate_field and the sampled hypothesis checks; hard-fails (throws)
// only on violations that break the solver's contracts (non-positive
// diffusivity, f not vanishing at 0/1, tangential policy violated); all other
// findings are recorded in notes.
Scenario make_scenario(const Grid& grid, DiffusionModel diffusion, VelocityField velocity,
                       ReactionModel reaction, SolverConfig solver, double mass_m);

// Time step satisfying the monotonicity caps and dividing T exactly.
double effective_dt(const Scenario& s);
int step_count(const Scenario& s);

// One IMEX step: explicit upwind advection, explicit reaction, implicit
// zero-flux diffusion. Input values must lie in [0,1].
ScalarField step(const ScalarField& u, double t, double dt, const Scenario& scenario);

Trajectory solve_forward(const InitialDatum& u0, const Scenario& scenario);

double terminal_mass(const InitialDatum& u0, const Scenario& scenario);

struct MassBudgetReport {
    double initial_mass = 0.0;
    double final_mass = 0.0;
    double mass_gain = 0.0;       // final - initial
    double cum_advection = 0.0;   // sum dt * advection_contrib
    double cum_reaction = 0.0;
    double cum_diffusion = 0.0;
    double cum_boundary = 0.0;
    double cum_continuum_advection = 0.0; // sum dt * (-A integral (div q) u)
    double advection_discrepancy = 0.0;   // |cum_advection - cum_continuum_advection|
    double max_ledger_residual = 0.0;     // worst per-step closure defect
};

MassBudgetReport mass_budget_report(const Trajectory& traj);

} // namespace radopt

#endif
