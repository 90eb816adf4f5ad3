#ifndef RADOPT_VERIFY_HPP
#define RADOPT_VERIFY_HPP

#include "radopt/solver.hpp"

#include <functional>
#include <string>
#include <vector>

namespace radopt {

enum class VerifyLevel { quick, full };

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

// Random desk-scale 1D scenario: mixed reactions (zero / logistic /
// heterogeneous logistic), random tangential velocity, random diffusivity.
// Deterministic in the seed.
Scenario random_tangential_scenario_1d(uint64_t seed, int n_cells);

using StepFn =
    std::function<ScalarField(const ScalarField&, double, double, const Scenario&)>;

// Evolves random ordered pairs u0 <= v0 with the supplied stepper and checks
// cellwise ordering of every intermediate state. Parameterized so a
// deliberately broken stepper can be used to confirm the check has teeth.
bool order_preservation_holds(const StepFn& stepper, uint64_t seed, int n_pairs,
                              std::string* detail = nullptr);

bool box_preservation_holds(uint64_t seed, int n_scenarios, int n_cells,
                            std::string* detail = nullptr);

// Runs the cross-module invariant suite; quick stays on 4-16 cell grids,
// full adds the refinement studies.
std::vector<CheckResult> run_verification(VerifyLevel level);

} // namespace radopt

#endif
