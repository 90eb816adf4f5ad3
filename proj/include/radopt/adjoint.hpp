#ifndef RADOPT_ADJOINT_HPP
#define RADOPT_ADJOINT_HPP

#include "radopt/solver.hpp"

#include <cstdint>
#include <optional>

namespace radopt {

struct FdCheckReport {
    int n_directions = 0;
    double eps = 0.0;
    double max_rel_error = 0.0;
};

// gradient is the field p0 with directional derivative
// I_T(u0 + eps*delta) - I_T(u0) = eps * integral(p0 * delta) + O(eps^2).
struct GradientResult {
    ScalarField gradient;
    double objective = 0.0;
    std::optional<FdCheckReport> fd_check;
};

// Exact gradient of the discrete objective: reverse sweep applying the
// transpose of each forward substep (the implicit diffusion solve is
// symmetric, so the same solve serves both directions), with segment replay
// between checkpoints when checkpoint_every > 1.
GradientResult gradient(const InitialDatum& u0, const Scenario& scenario);
GradientResult gradient(const InitialDatum& u0, const Scenario& scenario, const Trajectory& traj);

// Central finite differences along deterministic random directions, kept away
// from the box bounds. Directions with |integral(p0*delta)| below floor are
// skipped in the relative-error maximum.
FdCheckReport fd_check_gradient(const InitialDatum& u0, const Scenario& scenario,
                                const GradientResult& g, int n_directions, double eps,
                                uint64_t seed);

} // namespace radopt

#endif
