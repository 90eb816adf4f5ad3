#ifndef RADOPT_CSV_HPP
#define RADOPT_CSV_HPP

#include "radopt/admissible.hpp"
#include "radopt/grid.hpp"
#include "radopt/optimizer.hpp"
#include "radopt/solver.hpp"

#include <string>

namespace radopt {

// All CSV output is locale-free %.17g so identical runs produce identical
// bytes; readers use strtod-compatible parsing.
std::string format_double(double v);

// One value per line under a "u0" header.
void save_datum_csv(const std::string& path, const InitialDatum& u);
InitialDatum load_datum_csv(const std::string& path, const Grid& grid);

// Columns x[,y],<value_name>.
void save_state_csv(const std::string& path, const ScalarField& f, const std::string& value_name);

// Columns t,mass,advection_contrib,reaction_contrib,boundary_flux.
void save_trajectory_csv(const std::string& path, const Trajectory& traj);

// Columns iter,value,residual,step_size.
void save_trace_csv(const std::string& path, const OptResult& r);

} // namespace radopt

#endif
