#ifndef RADOPT_REPORT_HPP
#define RADOPT_REPORT_HPP

#include "radopt/enhancement.hpp"
#include "radopt/optimizer.hpp"
#include "radopt/solver.hpp"

#include <string>
#include <vector>

namespace radopt {

// Flat key-value text reports. Every report carries the config hash and the
// policy/hypothesis notes of the scenario it came from.
void write_budget_report(const std::string& path, const MassBudgetReport& r,
                         const std::string& config_hash, const std::vector<std::string>& notes);

void write_cluster_report(const std::string& path, const OptResult& r,
                          const std::string& config_hash, const std::vector<std::string>& notes);

void write_enhancement_report(const std::string& path, const EnhancementReport& r,
                              const std::string& config_hash);

// One sweep row per amplitude: A,inf_estimate,max_value,verdict.
void write_enhancement_sweep_csv(const std::string& path,
                                 const std::vector<EnhancementReport>& rows);

} // namespace radopt

#endif
