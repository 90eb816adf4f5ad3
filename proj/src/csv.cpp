#include "radopt/csv.hpp"

#include "radopt/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace radopt {

std::string format_double(double v) {
    char buf[40];
    snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot open \"" + path + "\" for writing");
    return out;
}

} // namespace

void save_datum_csv(const std::string& path, const InitialDatum& u) {
    std::ofstream out = open_out(path);
    out << "u0\n";
    for (double v : u.field.values) out << format_double(v) << "\n";
}

InitialDatum load_datum_csv(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open initial datum file \"" + path + "\"");
    std::string line;
    if (!std::getline(in, line) || line != "u0")
        throw ConfigError("\"" + path + "\": expected header line \"u0\"");

    InitialDatum u;
    u.field = ScalarField(grid);
    size_t row = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (row >= u.field.values.size())
            throw ConfigError("\"" + path + "\" line " + std::to_string(lineno) +
                              ": more values than grid cells (" +
                              std::to_string(u.field.values.size()) + ")");
        char* end = nullptr;
        double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0')
            throw ConfigError("\"" + path + "\" line " + std::to_string(lineno) +
                              ": not a number: \"" + line + "\"");
        if (!(v >= 0.0) || !(v <= 1.0))
            throw ConfigError("\"" + path + "\" line " + std::to_string(lineno) +
                              ": value " + format_double(v) + " outside [0,1]");
        u.field.values[row++] = v;
    }
    if (row != u.field.values.size())
        throw ConfigError("\"" + path + "\": got " + std::to_string(row) + " values, grid has " +
                          std::to_string(u.field.values.size()) + " cells");
    u.mass_m = integrate(u.field);
    return u;
}

void save_state_csv(const std::string& path, const ScalarField& f, const std::string& value_name) {
    std::ofstream out = open_out(path);
    const Grid& g = f.grid;
    if (g.dim == 1) {
        out << "x," << value_name << "\n";
        for (int ix = 0; ix < g.n[0]; ++ix)
            out << format_double(g.center(ix).x) << ","
                << format_double(f.values[static_cast<size_t>(ix)]) << "\n";
        return;
    }
    out << "x,y," << value_name << "\n";
    for (int iy = 0; iy < g.n[1]; ++iy)
        for (int ix = 0; ix < g.n[0]; ++ix) {
            Point p = g.center(ix, iy);
            out << format_double(p.x) << "," << format_double(p.y) << ","
                << format_double(f.values[static_cast<size_t>(g.index(ix, iy))]) << "\n";
        }
}

void save_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,mass,advection_contrib,reaction_contrib,boundary_flux\n";
    out << "0," << format_double(traj.masses[0]) << ",0,0,0\n";
    for (int n = 0; n < traj.n_steps; ++n) {
        const StepBudget& b = traj.budget[static_cast<size_t>(n)];
        out << format_double((n + 1) * traj.dt) << ","
            << format_double(traj.masses[static_cast<size_t>(n) + 1]) << ","
            << format_double(b.advection_contrib) << "," << format_double(b.reaction_contrib)
            << "," << format_double(b.boundary_flux) << "\n";
    }
}

void save_trace_csv(const std::string& path, const OptResult& r) {
    std::ofstream out = open_out(path);
    out << "iter,value,residual,step_size\n";
    for (const TracePoint& t : r.trace)
        out << t.iter << "," << format_double(t.value) << "," << format_double(t.residual) << ","
            << format_double(t.step_size) << "\n";
}

} // namespace radopt
