#ifndef RADOPT_OPTIMIZER_HPP
#define RADOPT_OPTIMIZER_HPP

#include "radopt/adjoint.hpp"
#include "radopt/solver.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace radopt {

struct OptConfig {
    int max_iters = 500;
    double step0 = 1.0;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
    double stop_tol = 1e-8; // fixed-point residual per unit |Omega|
    int multistart_k = 8;
    uint64_t seed = 0;
};

enum class Direction { maximize, minimize };

struct TracePoint {
    int iter = 0;
    double value = 0.0;    // I_T at the iterate
    double residual = 0.0; // ||u - P(u + step0*g)||_1 / |Omega|
    double step_size = 0.0;
};

struct OptResult {
    InitialDatum best_u0;
    double best_value = 0.0;
    bool converged = false;
    int iterations = 0;
    Direction direction = Direction::maximize;
    std::vector<TracePoint> trace;

    // Multistart extras.
    std::vector<double> start_values;
    std::vector<char> start_converged;
    std::vector<std::vector<double>> cluster_l1; // pairwise L1 distances of optima
    double max_pairwise_l1 = 0.0;
    bool value_tie = false; // equal values reached by distant optima (flat objective)
    std::string note;
};

// Projected gradient ascent with Armijo backtracking on I_T (or -I_T).
OptResult optimize_from(const InitialDatum& start, const Scenario& scenario, const OptConfig& cfg,
                        Direction dir);

// Single run from the uniform feasible datum u0 = m/|Omega|.
OptResult maximize(const Scenario& scenario, double m, const OptConfig& cfg);
// Same machinery on -I_T; the result is a heuristic upper bound on
// inf I_T over the constraint set, refined by multistart.
OptResult minimize(const Scenario& scenario, double m, const OptConfig& cfg);

// maximize (or minimize) from multistart_k random admissible starts, run
// concurrently and merged deterministically by start index.
OptResult multistart(const Scenario& scenario, double m, const OptConfig& cfg,
                     Direction dir = Direction::maximize);

struct ConcavitySample {
    double lambda = 0.0;
    double value_a = 0.0;
    double value_b = 0.0;
    double value_mix = 0.0;
    double gap = 0.0; // I_T(mix) - lambda*I_T(a) - (1-lambda)*I_T(b)
};

struct ConcavityReport {
    std::vector<ConcavitySample> samples;
    double min_gap = 0.0;
};

ConcavityReport concavity_probe(const Scenario& scenario, double m, int n_pairs, uint64_t seed);

} // namespace radopt

#endif
