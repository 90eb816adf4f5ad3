#include "radopt/adjoint.hpp"

#include "radopt/errors.hpp"

#include <algorithm>
#include <cmath>

namespace radopt {

GradientResult gradient(const InitialDatum& u0, const Scenario& scenario) {
    Trajectory traj = solve_forward(u0, scenario);
    return gradient(u0, scenario, traj);
}

GradientResult gradient(const InitialDatum&, const Scenario& scenario, const Trajectory& traj) {
    const Grid& g = scenario.grid;
    const double dt = traj.dt;
    const size_t count = static_cast<size_t>(g.cell_count());

    ImplicitDiffusion diffusion(g, scenario.faces, dt);
    const int cg_iters = 40 * static_cast<int>(count) + 200;

    // Terminal condition: the objective integral(u(T)) has the all-ones field
    // as its function-space derivative.
    std::vector<double> p(count, 1.0);
    std::vector<double> z(count), ku(count), kt(count);

    // Walk checkpoint segments backwards; within a segment the pre-step
    // states are recomputed forward once and consumed in reverse.
    for (size_t seg = traj.checkpoint_steps.size() - 1; seg-- > 0;) {
        const int seg_begin = traj.checkpoint_steps[seg];
        const int seg_end = traj.checkpoint_steps[seg + 1];
        std::vector<std::vector<double>> states;
        states.reserve(static_cast<size_t>(seg_end - seg_begin));
        states.push_back(traj.checkpoints[seg].values);
        {
            ScalarField replay = traj.checkpoints[seg];
            for (int n = seg_begin; n + 1 < seg_end; ++n) {
                replay = step(replay, n * dt, dt, scenario);
                states.push_back(replay.values);
            }
        }
        for (int n = seg_end - 1; n >= seg_begin; --n) {
            const std::vector<double>& un = states[static_cast<size_t>(n - seg_begin)];
            // Transpose of the implicit diffusion: same symmetric solve.
            diffusion.solve(p, z, scenario.solver.linear_tol, cg_iters);
            // Reaction linearized at the post-advection state.
            if (scenario.reaction.lipschitz_M > 0.0) {
                std::vector<double> ustar = un;
                if (scenario.advection.active) {
                    scenario.advection.apply(un, ku);
                    for (size_t c = 0; c < count; ++c) ustar[c] += dt * ku[c];
                }
                const double t = n * dt;
                for (size_t c = 0; c < count; ++c)
                    z[c] *= 1.0 + dt * scenario.reaction.deriv(t, g.center_of(static_cast<int>(c)),
                                                               ustar[c]);
            }
            // Transpose of u + dt*K u.
            if (scenario.advection.active) {
                scenario.advection.apply_transpose(z, kt);
                for (size_t c = 0; c < count; ++c) p[c] = z[c] + dt * kt[c];
            } else {
                p = z;
            }
        }
    }

    GradientResult out;
    out.gradient = ScalarField(g);
    out.gradient.values = std::move(p);
    out.objective = traj.final_mass();
    for (double v : out.gradient.values)
        if (!std::isfinite(v)) throw SolverError("adjoint produced a non-finite gradient value");
    return out;
}

FdCheckReport fd_check_gradient(const InitialDatum& u0, const Scenario& scenario,
                                const GradientResult& g, int n_directions, double eps,
                                uint64_t seed) {
    FdCheckReport rep;
    rep.n_directions = n_directions;
    rep.eps = eps;

    const size_t count = u0.field.values.size();
    for (int d = 0; d < n_directions; ++d) {
        uint64_t state = derive_seed(seed, static_cast<uint64_t>(d) + 101);
        std::vector<double> delta(count);
        for (size_t c = 0; c < count; ++c) {
            double x = uniform01(state) - 0.5;
            // Keep the probes inside the box so the solver contract holds.
            double lo = u0.field.values[c], hi = 1.0 - u0.field.values[c];
            if (std::min(lo, hi) < 2.0 * eps) x = 0.0;
            delta[c] = x;
        }

        auto shifted = [&](double sgn) {
            InitialDatum v;
            v.field = u0.field;
            for (size_t c = 0; c < count; ++c) v.field.values[c] += sgn * eps * delta[c];
            v.mass_m = integrate(v.field);
            return terminal_mass(v, scenario);
        };
        double fd = (shifted(+1.0) - shifted(-1.0)) / (2.0 * eps);

        double directional = 0.0;
        for (size_t c = 0; c < count; ++c) directional += g.gradient.values[c] * delta[c];
        directional *= u0.field.grid.cell_volume;

        double rel = std::abs(fd - directional) / std::max(std::abs(directional), 1e-10);
        rep.max_rel_error = std::max(rep.max_rel_error, rel);
    }
    return rep;
}

} // namespace radopt
