#ifndef RADOPT_ADMISSIBLE_HPP
#define RADOPT_ADMISSIBLE_HPP

#include "radopt/grid.hpp"

#include <cstdint>

namespace radopt {

// A point of the constraint set: values in [0,1] with fixed total integral m.
struct InitialDatum {
    ScalarField field;
    double mass_m = 0.0;
};

// Euclidean projection onto {0 <= u <= 1, integral u = m}: u_i =
// clamp(v_i + tau, 0, 1) with the shift tau found by bisection on the mass
// mismatch. Throws ConfigError when m <= 0 or m > |Omega|.
InitialDatum project_capped_simplex(const ScalarField& v, double m);

// Feasibility check without projecting (used when loading data from files).
bool is_admissible(const ScalarField& u, double m, double mass_tol_factor = 1e-10);

// Deterministic i.i.d. uniform draw projected onto the constraint set.
InitialDatum random_admissible(uint64_t seed, double m, const Grid& grid);

// Small deterministic RNG helpers shared by sampling code.
uint64_t derive_seed(uint64_t seed, uint64_t stream);
double uniform01(uint64_t& state); // splitmix64 stream, values in [0,1)

} // namespace radopt

#endif
