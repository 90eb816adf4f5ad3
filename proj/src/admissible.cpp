#include "radopt/admissible.hpp"

#include "radopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace radopt {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Mass of clamp(v + tau) minus m; continuous, piecewise linear, nondecreasing.
double mass_mismatch(const ScalarField& v, double tau, double m) {
    double s = 0.0, comp = 0.0;
    for (double x : v.values) {
        double u = clamp01(x + tau);
        double t = s + u;
        comp += (std::abs(s) >= u) ? (s - t) + u : (u - t) + s;
        s = t;
    }
    return v.grid.cell_volume * (s + comp) - m;
}

} // namespace

InitialDatum project_capped_simplex(const ScalarField& v, double m) {
    const double omega = v.grid.total_volume;
    if (!(m > 0.0) || m > omega * (1.0 + 1e-15)) {
        char buf[128];
        snprintf(buf, sizeof buf,
                 "infeasible mass constraint m = %.17g: need 0 < m <= |Omega| = %.17g", m, omega);
        throw ConfigError(buf);
    }

    // Guard against non-finite inputs; any finite v keeps the bracket finite.
    for (double x : v.values)
        if (!std::isfinite(x)) throw ConfigError("projection input has a non-finite value");

    // Exact bracket on the raw input: at tau = -max(v) every clamped value
    // is 0, at tau = 1 - min(v) every clamped value is 1. Pre-clamping v to a
    // fixed range would change the projection whenever the optimal shift
    // leaves that range, so the bisection runs on v as given.
    double lo = -max_value(v);      // mismatch(lo) = -m < 0
    double hi = 1.0 - min_value(v); // mismatch(hi) = |Omega| - m >= 0
    double tau = hi;
    if (mass_mismatch(v, hi, m) > 0.0) {
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            double g = mass_mismatch(v, mid, m);
            tau = mid;
            if (std::abs(g) <= 1e-12) break;
            (g < 0.0 ? lo : hi) = mid;
        }
    }

    InitialDatum out;
    out.field = ScalarField(v.grid);
    for (size_t i = 0; i < v.values.size(); ++i) out.field.values[i] = clamp01(v.values[i] + tau);
    out.mass_m = m;
    return out;
}

bool is_admissible(const ScalarField& u, double m, double mass_tol_factor) {
    for (double x : u.values)
        if (!(x >= 0.0) || !(x <= 1.0)) return false;
    return std::abs(integrate(u) - m) <= mass_tol_factor * u.grid.total_volume;
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double uniform01(uint64_t& state) {
    // splitmix64 step; top 53 bits give a uniform double in [0,1).
    state += 0x9E3779B97F4A7C15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

InitialDatum random_admissible(uint64_t seed, double m, const Grid& grid) {
    ScalarField v(grid);
    uint64_t state = derive_seed(seed, 0x5eed);
    for (double& x : v.values) x = uniform01(state);
    return project_capped_simplex(v, m);
}

} // namespace radopt
