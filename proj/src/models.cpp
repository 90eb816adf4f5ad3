#include "radopt/models.hpp"

#include "radopt/errors.hpp"

#include <cmath>
#include <cstdio>

namespace radopt {

ReactionModel builtin_reaction(const std::string& name) {
    ReactionModel m;
    m.name = name;
    if (name == "zero") {
        m.eval = [](double, Point, double) { return 0.0; };
        m.deriv = [](double, Point, double) { return 0.0; };
        m.lipschitz_M = 0.0;
        m.strictly_concave = false; // affine, not strictly
        m.nonnegative_on_unit = true;
    } else if (name == "logistic") {
        m.eval = [](double, Point, double u) { return u * (1.0 - u); };
        m.deriv = [](double, Point, double u) { return 1.0 - 2.0 * u; };
        m.lipschitz_M = 1.0;
        m.strictly_concave = true;
        m.nonnegative_on_unit = true;
    } else if (name == "convex_negative") {
        m.eval = [](double, Point, double u) { return u * (u - 1.0); };
        m.deriv = [](double, Point, double u) { return 2.0 * u - 1.0; };
        m.lipschitz_M = 1.0;
        m.strictly_concave = false;
        m.nonnegative_on_unit = false;
    } else {
        throw ConfigError("unknown reaction model \"" + name + "\"");
    }
    return m;
}

ReactionModel heterogeneous_logistic(std::function<double(Point)> rate, double rate_max) {
    if (!(rate_max >= 0.0))
        throw ConfigError("heterogeneous_logistic: rate bound must be nonnegative");
    ReactionModel m;
    m.name = "heterogeneous_logistic";
    m.eval = [rate](double, Point p, double u) { return rate(p) * u * (1.0 - u); };
    m.deriv = [rate](double, Point p, double u) { return rate(p) * (1.0 - 2.0 * u); };
    m.lipschitz_M = rate_max; // sup_x r(x) * sup_u |1-2u|
    m.strictly_concave = true;
    m.nonnegative_on_unit = true;
    return m;
}

namespace {

void sample_faces(const Grid& g, VelocityField& v) {
    const int n0 = g.n[0], n1 = g.n[1];
    v.face_qx.assign(static_cast<size_t>((n0 + 1) * n1), 0.0);
    for (int iy = 0; iy < n1; ++iy) {
        double py = g.dim == 2 ? (iy + 0.5) * g.h[1] : 0.0;
        for (int fx = 0; fx <= n0; ++fx)
            v.face_qx[static_cast<size_t>(v.xface_index(fx, iy))] = v.qx({fx * g.h[0], py});
    }
    if (g.dim == 2) {
        v.face_qy.assign(static_cast<size_t>(n0 * (n1 + 1)), 0.0);
        for (int fy = 0; fy <= n1; ++fy)
            for (int ix = 0; ix < n0; ++ix)
                v.face_qy[static_cast<size_t>(v.yface_index(ix, fy))] =
                    v.qy({(ix + 0.5) * g.h[0], fy * g.h[1]});
    }
}

} // namespace

double VelocityField::divergence_at(Point p) const {
    if (div_closure) return (*div_closure)(p);
    // Central differences with half-cell offsets; q closures are defined on
    // all of R^dim so boundary-adjacent evaluations are fine.
    double d = (qx({p.x + 0.5 * grid.h[0], p.y}) - qx({p.x - 0.5 * grid.h[0], p.y})) / grid.h[0];
    if (grid.dim == 2)
        d += (qy({p.x, p.y + 0.5 * grid.h[1]}) - qy({p.x, p.y - 0.5 * grid.h[1]})) / grid.h[1];
    return d;
}

VelocityField make_velocity(const Grid& grid, std::function<double(Point)> qx,
                            std::function<double(Point)> qy, double amplitude_A,
                            BoundaryPolicy policy,
                            std::optional<std::function<double(Point)>> divergence) {
    if (!(amplitude_A >= 0.0)) throw ConfigError("velocity amplitude A must be nonnegative");
    VelocityField v;
    v.grid = grid;
    v.qx = std::move(qx);
    if (grid.dim == 2 && qy)
        v.qy = std::move(qy);
    else
        v.qy = [](Point) { return 0.0; };
    v.div_closure = std::move(divergence);
    v.amplitude_A = amplitude_A;
    v.policy = policy;

    const int count = grid.cell_count();
    v.cell_qx.resize(static_cast<size_t>(count));
    v.cell_qy.assign(static_cast<size_t>(count), 0.0);
    v.divergence = ScalarField(grid);
    for (int c = 0; c < count; ++c) {
        Point p = grid.center_of(c);
        v.cell_qx[static_cast<size_t>(c)] = v.qx(p);
        if (grid.dim == 2) v.cell_qy[static_cast<size_t>(c)] = v.qy(p);
        v.divergence.values[static_cast<size_t>(c)] = v.divergence_at(p);
    }
    sample_faces(grid, v);
    return v;
}

VelocityField zero_velocity(const Grid& grid) {
    auto zero = [](Point) { return 0.0; };
    return make_velocity(grid, zero, zero, 0.0, BoundaryPolicy::require_tangential, zero);
}

FieldReport validate_field(const VelocityField& q, const Grid& grid) {
    if (!(q.grid == grid)) throw ConfigError("validate_field: velocity sampled on a different grid");
    FieldReport r;
    bool first = true;
    auto consider_div = [&](double d) {
        if (first) {
            r.alpha = d;
            first = false;
        } else {
            r.alpha = std::max(r.alpha, d);
        }
        r.div_bound_B = std::max(r.div_bound_B, std::abs(d));
    };

    const int n0 = grid.n[0], n1 = grid.n[1];
    for (int c = 0; c < grid.cell_count(); ++c) {
        consider_div(q.divergence.values[static_cast<size_t>(c)]);
        double speed = std::hypot(q.cell_qx[static_cast<size_t>(c)], q.cell_qy[static_cast<size_t>(c)]);
        r.sup_q_gamma = std::max(r.sup_q_gamma, speed);
    }
    // Divergence and speed also sampled at face centers so boundary values
    // (where the closed-domain max of div q can sit) are seen.
    for (int iy = 0; iy < n1; ++iy) {
        double py = grid.dim == 2 ? (iy + 0.5) * grid.h[1] : 0.0;
        for (int fx = 0; fx <= n0; ++fx) {
            Point p{fx * grid.h[0], py};
            consider_div(q.divergence_at(p));
            r.sup_q_gamma = std::max(r.sup_q_gamma, std::hypot(q.qx(p), grid.dim == 2 ? q.qy(p) : 0.0));
            if (fx == 0 || fx == n0)
                r.max_boundary_normal =
                    std::max(r.max_boundary_normal,
                             std::abs(q.face_qx[static_cast<size_t>(q.xface_index(fx, iy))]));
        }
    }
    if (grid.dim == 2) {
        for (int fy = 0; fy <= n1; ++fy) {
            for (int ix = 0; ix < n0; ++ix) {
                Point p{(ix + 0.5) * grid.h[0], fy * grid.h[1]};
                consider_div(q.divergence_at(p));
                r.sup_q_gamma = std::max(r.sup_q_gamma, std::hypot(q.qx(p), q.qy(p)));
                if (fy == 0 || fy == n1)
                    r.max_boundary_normal =
                        std::max(r.max_boundary_normal,
                                 std::abs(q.face_qy[static_cast<size_t>(q.yface_index(ix, fy))]));
            }
        }
    }
    r.divergence_integral = integrate(q.divergence);

    if (q.policy == BoundaryPolicy::require_tangential && r.max_boundary_normal > 1e-12) {
        char buf[160];
        snprintf(buf, sizeof buf,
                 "boundary policy require_tangential violated: max |q.nu| = %.3e at a boundary face",
                 r.max_boundary_normal);
        throw ConfigError(buf);
    }
    if (r.alpha < 0.0 && q.policy == BoundaryPolicy::require_tangential) {
        r.warnings.push_back(
            "velocity has max div q < 0 together with q.nu = 0 on the boundary; the divergence "
            "theorem forces integral(div q) = 0 on a box, so these cannot both hold in the "
            "continuum. Sampled values are reported as-is.");
    }
    return r;
}

std::vector<std::string> check_reaction_hypotheses(const ReactionModel& f, const Grid& grid,
                                                   double t_final) {
    std::vector<std::string> issues;
    const double times[] = {0.0, 0.5 * t_final, t_final};
    char buf[160];

    // f(t,x,0) = f(t,x,1) = 0 at every cell and a few times.
    for (double t : times) {
        for (int c = 0; c < grid.cell_count(); ++c) {
            Point p = grid.center_of(c);
            double f0 = f.eval(t, p, 0.0), f1 = f.eval(t, p, 1.0);
            if (std::abs(f0) > 1e-12 || std::abs(f1) > 1e-12) {
                snprintf(buf, sizeof buf,
                         "reaction \"%s\": f(t,x,0)=%.3e, f(t,x,1)=%.3e at t=%g (must vanish)",
                         f.name.c_str(), f0, f1, t);
                issues.emplace_back(buf);
                return issues; // one violation is enough to disqualify
            }
        }
    }

    // |df/du| <= M on a u-lattice, sampled over cells.
    double worst = 0.0;
    for (int c = 0; c < grid.cell_count(); ++c) {
        Point p = grid.center_of(c);
        for (int k = 0; k <= 100; ++k)
            worst = std::max(worst, std::abs(f.deriv(0.0, p, 0.01 * k)));
    }
    if (worst > f.lipschitz_M * (1.0 + 1e-9) + 1e-12) {
        snprintf(buf, sizeof buf, "reaction \"%s\": sampled |df/du| = %.6g exceeds declared M = %.6g",
                 f.name.c_str(), worst, f.lipschitz_M);
        issues.emplace_back(buf);
    }

    // Strict concavity via second divided differences on sampled triples.
    if (f.strictly_concave) {
        Point p = grid.center_of(0);
        for (int a = 0; a <= 96; a += 4) {
            for (int b = a + 2; b <= 98; b += 4) {
                for (int cidx = b + 2; cidx <= 100; cidx += 4) {
                    double ua = 0.01 * a, ub = 0.01 * b, uc = 0.01 * cidx;
                    double d1 = (f.eval(0.0, p, ub) - f.eval(0.0, p, ua)) / (ub - ua);
                    double d2 = (f.eval(0.0, p, uc) - f.eval(0.0, p, ub)) / (uc - ub);
                    if ((d2 - d1) / (uc - ua) >= 0.0) {
                        snprintf(buf, sizeof buf,
                                 "reaction \"%s\": flagged strictly concave but second divided "
                                 "difference at (%.2f,%.2f,%.2f) is nonnegative",
                                 f.name.c_str(), ua, ub, uc);
                        issues.emplace_back(buf);
                        return issues;
                    }
                }
            }
        }
    }
    return issues;
}

std::vector<std::string> check_diffusion_hypotheses(const DiffusionModel& d, const Grid& grid) {
    std::vector<std::string> issues;
    char buf[160];
    if (d.kind == DiffusionModel::Kind::constant) {
        if (!(d.sigma > 0.0)) {
            snprintf(buf, sizeof buf, "diffusivity sigma = %.6g must be positive", d.sigma);
            issues.emplace_back(buf);
        }
        return issues;
    }
    if (!(d.theta > 0.0)) {
        issues.emplace_back("variable diffusivity needs a positive lower bound theta");
        return issues;
    }
    for (int c = 0; c < grid.cell_count(); ++c) {
        double v = d.D(grid.center_of(c));
        if (!(v >= d.theta)) {
            Point p = grid.center_of(c);
            snprintf(buf, sizeof buf, "diffusivity D(%.4g,%.4g) = %.6g below theta = %.6g", p.x, p.y,
                     v, d.theta);
            issues.emplace_back(buf);
            return issues;
        }
    }
    return issues;
}

DiffusionModel constant_diffusion(double sigma) {
    if (!(sigma > 0.0)) throw ConfigError("constant diffusivity must be positive");
    DiffusionModel d;
    d.kind = DiffusionModel::Kind::constant;
    d.sigma = sigma;
    d.theta = sigma;
    return d;
}

DiffusionModel variable_diffusion(std::function<double(Point)> D, double theta) {
    if (!(theta > 0.0)) throw ConfigError("variable diffusivity needs theta > 0");
    DiffusionModel d;
    d.kind = DiffusionModel::Kind::variable;
    d.D = std::move(D);
    d.sigma = 0.0;
    d.theta = theta;
    return d;
}

} // namespace radopt
