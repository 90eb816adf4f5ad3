#include "radopt/report.hpp"

#include "radopt/csv.hpp"
#include "radopt/errors.hpp"

#include <fstream>

namespace radopt {

namespace {

std::ofstream open_report(const std::string& path, const std::string& config_hash) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
    out << "config_hash = " << config_hash << "\n";
    return out;
}

void write_notes(std::ofstream& out, const std::vector<std::string>& notes) {
    for (const auto& n : notes) out << "note = " << n << "\n";
}

} // namespace

void write_budget_report(const std::string& path, const MassBudgetReport& r,
                         const std::string& config_hash, const std::vector<std::string>& notes) {
    std::ofstream out = open_report(path, config_hash);
    write_notes(out, notes);
    out << "initial_mass = " << format_double(r.initial_mass) << "\n";
    out << "final_mass = " << format_double(r.final_mass) << "\n";
    out << "mass_gain = " << format_double(r.mass_gain) << "\n";
    out << "cum_advection = " << format_double(r.cum_advection) << "\n";
    out << "cum_reaction = " << format_double(r.cum_reaction) << "\n";
    out << "cum_diffusion = " << format_double(r.cum_diffusion) << "\n";
    out << "cum_boundary = " << format_double(r.cum_boundary) << "\n";
    out << "cum_continuum_advection = " << format_double(r.cum_continuum_advection) << "\n";
    out << "advection_discrepancy = " << format_double(r.advection_discrepancy) << "\n";
    out << "max_ledger_residual = " << format_double(r.max_ledger_residual) << "\n";
}

void write_cluster_report(const std::string& path, const OptResult& r,
                          const std::string& config_hash, const std::vector<std::string>& notes) {
    std::ofstream out = open_report(path, config_hash);
    write_notes(out, notes);
    out << "direction = " << (r.direction == Direction::maximize ? "max" : "min") << "\n";
    if (r.direction == Direction::minimize)
        out << "interpretation = heuristic upper bound on the infimum\n";
    out << "best_value = " << format_double(r.best_value) << "\n";
    out << "starts = " << r.start_values.size() << "\n";
    for (size_t k = 0; k < r.start_values.size(); ++k)
        out << "start_" << k << " = " << format_double(r.start_values[k]) << " converged="
            << (r.start_converged[k] ? "yes" : "no") << "\n";
    out << "max_pairwise_l1 = " << format_double(r.max_pairwise_l1) << "\n";
    out << "value_tie = " << (r.value_tie ? "yes" : "no") << "\n";
    if (!r.note.empty()) out << "note = " << r.note << "\n";
    for (size_t i = 0; i < r.cluster_l1.size(); ++i)
        for (size_t j = i + 1; j < r.cluster_l1.size(); ++j)
            out << "l1_" << i << "_" << j << " = " << format_double(r.cluster_l1[i][j]) << "\n";
}

void write_enhancement_report(const std::string& path, const EnhancementReport& r,
                              const std::string& config_hash) {
    std::ofstream out = open_report(path, config_hash);
    out << "policy_note = " << r.policy_note << "\n";
    for (const auto& n : r.hypothesis_notes) out << "hypothesis_note = " << n << "\n";
    out << "alpha = " << format_double(r.alpha) << "\n";
    out << "lipschitz_M = " << format_double(r.lipschitz_M) << "\n";
    out << "omega_volume = " << format_double(r.omega_volume) << "\n";
    out << "m = " << format_double(r.m) << "\n";
    out << "A_threshold = " << format_double(r.A_threshold) << "\n";
    out << "A_used = " << format_double(r.A_used) << "\n";
    out << "inf_side_estimate = " << format_double(r.inf_side_estimate) << "\n";
    out << "max_side_value = " << format_double(r.max_side_value) << "\n";
    out << "inequality_holds = " << (r.inequality_holds ? "yes" : "no") << "\n";
    out << "monotone_mass = " << (r.monotone_mass ? "yes" : "no") << "\n";
    out << "drift_identity_value = " << format_double(r.drift_identity_value) << "\n";
    out << "proof_chain_bound = " << format_double(r.proof_chain_bound) << "\n";
    out << "proof_chain_ordered = " << (r.proof_chain_ordered ? "yes" : "no") << "\n";
    out << "advected_mass_gain = " << format_double(r.budget_advected.mass_gain) << "\n";
    out << "advected_cum_advection = " << format_double(r.budget_advected.cum_advection) << "\n";
    out << "advected_cum_reaction = " << format_double(r.budget_advected.cum_reaction) << "\n";
    out << "advected_cum_boundary = " << format_double(r.budget_advected.cum_boundary) << "\n";
    out << "plain_mass_gain = " << format_double(r.budget_plain.mass_gain) << "\n";
    out << "plain_cum_reaction = " << format_double(r.budget_plain.cum_reaction) << "\n";
}

void write_enhancement_sweep_csv(const std::string& path,
                                 const std::vector<EnhancementReport>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
    out << "A,inf_estimate,max_value,verdict\n";
    for (const auto& r : rows)
        out << format_double(r.A_used) << "," << format_double(r.inf_side_estimate) << ","
            << format_double(r.max_side_value) << "," << (r.inequality_holds ? "holds" : "fails")
            << "\n";
}

} // namespace radopt
