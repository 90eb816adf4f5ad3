#ifndef RADOPT_MODELS_HPP
#define RADOPT_MODELS_HPP

#include "radopt/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace radopt {

// Reaction term f(t,x,u) with the bounds the solver relies on:
// f(t,x,0) = f(t,x,1) = 0 and |df/du| <= lipschitz_M on u in [0,1].
struct ReactionModel {
    std::string name;
    std::function<double(double, Point, double)> eval;  // f(t, x, u)
    std::function<double(double, Point, double)> deriv; // df/du
    double lipschitz_M = 0.0;
    bool strictly_concave = false;
    bool nonnegative_on_unit = false;
    bool autonomous = true;
};

ReactionModel builtin_reaction(const std::string& name); // zero | logistic | convex_negative
ReactionModel heterogeneous_logistic(std::function<double(Point)> rate, double rate_max);

enum class BoundaryPolicy { require_tangential, allow_nonzero_normal };

// Velocity field q sampled on a grid: per-cell vectors for diagnostics and
// per-face normal components for upwinding. amplitude_A scales q in the
// advection term. The divergence field uses the analytic closure when one is
// supplied and central differences of q otherwise.
struct VelocityField {
    Grid grid;
    std::function<double(Point)> qx, qy;
    std::optional<std::function<double(Point)>> div_closure;
    double amplitude_A = 0.0;
    BoundaryPolicy policy = BoundaryPolicy::require_tangential;

    std::vector<double> cell_qx, cell_qy; // per cell
    std::vector<double> face_qx;          // (n0+1) x n1 normal components
    std::vector<double> face_qy;          // n0 x (n1+1), empty in 1D
    ScalarField divergence;               // per cell

    int xface_index(int fx, int iy) const { return fx + (grid.n[0] + 1) * iy; }
    int yface_index(int ix, int fy) const { return ix + grid.n[0] * fy; }

    // Divergence of q at an arbitrary point (analytic or central differences).
    double divergence_at(Point p) const;
};

VelocityField make_velocity(const Grid& grid, std::function<double(Point)> qx,
                            std::function<double(Point)> qy, double amplitude_A,
                            BoundaryPolicy policy,
                            std::optional<std::function<double(Point)>> divergence = {});

VelocityField zero_velocity(const Grid& grid);

// Scalar diffusivity: a positive constant sigma or a field D(x), with the
// uniform lower bound theta recorded for hypothesis checks.
struct DiffusionModel {
    enum class Kind { constant, variable };
    Kind kind = Kind::constant;
    double sigma = 1.0;
    std::function<double(Point)> D;
    double theta = 0.0;

    double value_at(Point p) const { return kind == Kind::constant ? sigma : D(p); }
};

DiffusionModel constant_diffusion(double sigma);
DiffusionModel variable_diffusion(std::function<double(Point)> D, double theta);

// Sampled diagnostics of a velocity field over cells and face centers.
struct FieldReport {
    double alpha = 0.0;               // max divergence
    double div_bound_B = 0.0;         // max |divergence|
    double sup_q_gamma = 0.0;         // max |q|
    double max_boundary_normal = 0.0; // max |q . nu| over boundary faces
    double divergence_integral = 0.0;
    std::vector<std::string> warnings;
};

// Throws ConfigError when boundary_policy = require_tangential is violated
// beyond 1e-12. Warns (in the report) when alpha < 0 is combined with a
// tangential boundary, which the divergence theorem rules out on any box.
FieldReport validate_field(const VelocityField& q, const Grid& grid);

// Sampled hypothesis checks on a reaction model; returns human-readable
// violations (empty = all sampled checks passed).
std::vector<std::string> check_reaction_hypotheses(const ReactionModel& f, const Grid& grid,
                                                   double t_final);

std::vector<std::string> check_diffusion_hypotheses(const DiffusionModel& d, const Grid& grid);

} // namespace radopt

#endif
