#include "radopt/optimizer.hpp"

#include "radopt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace radopt {

namespace {

InitialDatum project_shifted(const ScalarField& u, const ScalarField& g, double scale, double m) {
    ScalarField v = u;
    for (size_t c = 0; c < v.values.size(); ++c) v.values[c] += scale * g.values[c];
    return project_capped_simplex(v, m);
}

} // namespace

OptResult optimize_from(const InitialDatum& start, const Scenario& scenario, const OptConfig& cfg,
                        Direction dir) {
    if (!(cfg.step0 > 0.0) || !(cfg.armijo_c > 0.0) || !(cfg.stop_tol > 0.0) ||
        !(cfg.backtrack_factor > 0.0) || !(cfg.backtrack_factor < 1.0) || cfg.max_iters < 1)
        throw ConfigError("optimizer config out of range");
    if (std::abs(start.mass_m - scenario.mass_m) > 1e-12 * scenario.grid.total_volume)
        throw ConfigError("initial datum mass does not match the scenario constraint");

    const double omega = scenario.grid.total_volume;
    const double sign = dir == Direction::maximize ? 1.0 : -1.0;
    const double m = start.mass_m;

    OptResult res;
    res.direction = dir;

    InitialDatum u = start;
    Trajectory traj = solve_forward(u, scenario);
    double value = traj.final_mass();
    double last_step = 0.0;
    // Accepted steps may grow between iterations (Armijo still guards every
    // step); the stopping residual always probes at the fixed step0.
    double trial_step = cfg.step0;
    const double max_step = cfg.step0 * 1048576.0;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        GradientResult gr = gradient(u, scenario, traj);
        ScalarField dir_grad = gr.gradient;
        for (double& x : dir_grad.values) x *= sign;

        InitialDatum probe = project_shifted(u.field, dir_grad, cfg.step0, m);
        double residual = l1_distance(u.field, probe.field) / omega;
        res.trace.push_back({iter, value, residual, last_step});
        if (residual <= cfg.stop_tol) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        int backtracks = 0;
        double s = std::min(max_step, trial_step / cfg.backtrack_factor);
        for (int bt = 0; bt < 80 && !accepted; ++bt, s *= cfg.backtrack_factor, ++backtracks) {
            InitialDatum cand = project_shifted(u.field, dir_grad, s, m);
            double gain_pred = 0.0;
            for (size_t c = 0; c < cand.field.values.size(); ++c)
                gain_pred += dir_grad.values[c] * (cand.field.values[c] - u.field.values[c]);
            gain_pred *= scenario.grid.cell_volume;
            if (gain_pred <= 0.0) continue; // no progress at this step size
            Trajectory cand_traj = solve_forward(cand, scenario);
            double cand_value = cand_traj.final_mass();
            if (sign * (cand_value - value) >= cfg.armijo_c * gain_pred) {
                u = std::move(cand);
                traj = std::move(cand_traj);
                value = cand_value;
                last_step = s;
                // expand next trial only after a clean first-trial accept,
                // otherwise restart the search at the accepted size
                trial_step = std::max(backtracks == 0 ? s : s * cfg.backtrack_factor,
                                      1e-12 * cfg.step0);
                accepted = true;
            }
        }
        res.iterations = iter + 1;
        if (!accepted) break; // line search exhausted: no ascent direction left
    }

    res.best_u0 = std::move(u);
    res.best_value = value;
    return res;
}

namespace {

InitialDatum uniform_datum(const Scenario& scenario, double m) {
    ScalarField f(scenario.grid, m / scenario.grid.total_volume);
    return InitialDatum{std::move(f), m};
}

} // namespace

namespace {

void require_matching_mass(const Scenario& scenario, double m) {
    if (std::abs(m - scenario.mass_m) > 1e-12 * scenario.grid.total_volume)
        throw ConfigError("optimization mass differs from the scenario constraint");
}

} // namespace

OptResult maximize(const Scenario& scenario, double m, const OptConfig& cfg) {
    require_matching_mass(scenario, m);
    return optimize_from(uniform_datum(scenario, m), scenario, cfg, Direction::maximize);
}

OptResult minimize(const Scenario& scenario, double m, const OptConfig& cfg) {
    require_matching_mass(scenario, m);
    OptResult r = optimize_from(uniform_datum(scenario, m), scenario, cfg, Direction::minimize);
    r.note = "heuristic upper bound on the infimum (projected descent, no certificate)";
    return r;
}

OptResult multistart(const Scenario& scenario, double m, const OptConfig& cfg, Direction dir) {
    require_matching_mass(scenario, m);
    if (cfg.multistart_k < 2) throw ConfigError("multistart needs multistart_k >= 2");

    std::vector<std::future<OptResult>> jobs;
    jobs.reserve(static_cast<size_t>(cfg.multistart_k));
    for (int k = 0; k < cfg.multistart_k; ++k) {
        uint64_t sk = derive_seed(cfg.seed, static_cast<uint64_t>(k));
        jobs.push_back(std::async(std::launch::async, [&, sk] {
            InitialDatum start = random_admissible(sk, m, scenario.grid);
            return optimize_from(start, scenario, cfg, dir);
        }));
    }
    std::vector<OptResult> runs;
    runs.reserve(jobs.size());
    for (auto& j : jobs) runs.push_back(j.get());

    // Deterministic merge in start order.
    size_t best = 0;
    const double sign = dir == Direction::maximize ? 1.0 : -1.0;
    for (size_t k = 1; k < runs.size(); ++k)
        if (sign * runs[k].best_value > sign * runs[best].best_value) best = k;

    OptResult merged = runs[best];
    merged.start_values.clear();
    merged.start_converged.clear();
    for (const auto& r : runs) {
        merged.start_values.push_back(r.best_value);
        merged.start_converged.push_back(r.converged ? 1 : 0);
    }
    merged.cluster_l1.assign(runs.size(), std::vector<double>(runs.size(), 0.0));
    merged.max_pairwise_l1 = 0.0;
    for (size_t i = 0; i < runs.size(); ++i)
        for (size_t j = i + 1; j < runs.size(); ++j) {
            double d = l1_distance(runs[i].best_u0.field, runs[j].best_u0.field);
            merged.cluster_l1[i][j] = merged.cluster_l1[j][i] = d;
            merged.max_pairwise_l1 = std::max(merged.max_pairwise_l1, d);
        }

    double vmin = *std::min_element(merged.start_values.begin(), merged.start_values.end());
    double vmax = *std::max_element(merged.start_values.begin(), merged.start_values.end());
    // tied values reached by optima further apart than the clustering
    // tolerance indicate a flat direction of the objective
    merged.value_tie = (vmax - vmin) <= 1e-9 * std::max(1.0, std::abs(vmax)) &&
                       merged.max_pairwise_l1 > 1e-3 * scenario.grid.total_volume;
    if (merged.value_tie)
        merged.note = "optima values tie while the optima differ in L1: flat objective direction";
    return merged;
}

ConcavityReport concavity_probe(const Scenario& scenario, double m, int n_pairs, uint64_t seed) {
    require_matching_mass(scenario, m);
    if (n_pairs < 1) throw ConfigError("concavity_probe needs n_pairs >= 1");
    ConcavityReport rep;
    rep.samples.reserve(static_cast<size_t>(n_pairs));
    for (int i = 0; i < n_pairs; ++i) {
        InitialDatum a = random_admissible(derive_seed(seed, 2 * static_cast<uint64_t>(i)), m,
                                           scenario.grid);
        InitialDatum b = random_admissible(derive_seed(seed, 2 * static_cast<uint64_t>(i) + 1), m,
                                           scenario.grid);
        uint64_t st = derive_seed(seed, 1000003 + static_cast<uint64_t>(i));
        double lambda = 0.01 + 0.98 * uniform01(st);

        InitialDatum mix;
        mix.field = ScalarField(scenario.grid);
        for (size_t c = 0; c < mix.field.values.size(); ++c)
            mix.field.values[c] = lambda * a.field.values[c] + (1.0 - lambda) * b.field.values[c];
        mix.mass_m = m;

        ConcavitySample s;
        s.lambda = lambda;
        s.value_a = terminal_mass(a, scenario);
        s.value_b = terminal_mass(b, scenario);
        s.value_mix = terminal_mass(mix, scenario);
        s.gap = s.value_mix - lambda * s.value_a - (1.0 - lambda) * s.value_b;
        rep.samples.push_back(s);
        rep.min_gap = i == 0 ? s.gap : std::min(rep.min_gap, s.gap);
    }
    return rep;
}

} // namespace radopt
