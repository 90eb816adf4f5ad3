#include "radopt/adjoint.hpp"
#include "radopt/verify.hpp"

#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

using namespace radopt;

namespace {

// ---------------------------------------------------------------------------
// Independent forward-mode oracle for 4-cell 1D scenarios: dual numbers pushed
// through a from-scratch re-implementation of the scheme (upwind fluxes plus
// divergence source, explicit reaction, implicit diffusion via a dual Thomas
// sweep with one constant-mode refinement, clamp). Shares no code with the
// production stepper.
// ---------------------------------------------------------------------------

struct Dual {
    double v = 0.0; // value
    double d = 0.0; // derivative
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual operator*(double a, Dual b) { return {a * b.v, a * b.d}; }
Dual operator+(double a, Dual b) { return {a + b.v, b.d}; }
Dual dmin(Dual a, double b) { return a.v <= b ? a : Dual{b, 0.0}; }
Dual dmax(Dual a, double b) { return a.v >= b ? a : Dual{b, 0.0}; }

using DualVec = std::vector<Dual>;

struct OracleSetup {
    int n = 4;
    double h = 0.25;
    double sigma = 0.0;
    double dt = 0.0;
    int steps = 0;
    std::vector<double> face_v; // transport velocity -A*q at faces, n+1 entries
    bool logistic = false;
};

DualVec oracle_step(const OracleSetup& os, const DualVec& u) {
    const int n = os.n;
    DualVec out = u;

    // upwind advection in flux + divergence-source form
    DualVec adv(static_cast<size_t>(n), Dual{0, 0});
    for (int i = 0; i < n; ++i) {
        double vW = os.face_v[static_cast<size_t>(i)];
        double vE = os.face_v[static_cast<size_t>(i + 1)];
        Dual GE{0, 0}, GW{0, 0};
        if (vE > 0.0)
            GE = vE * u[static_cast<size_t>(i)];
        else if (i < n - 1)
            GE = vE * u[static_cast<size_t>(i + 1)];
        if (vW > 0.0) {
            if (i > 0) GW = vW * u[static_cast<size_t>(i - 1)];
        } else {
            GW = vW * u[static_cast<size_t>(i)];
        }
        double s = (vE - vW) / os.h;
        adv[static_cast<size_t>(i)] =
            (-1.0 / os.h) * (GE - GW) + s * u[static_cast<size_t>(i)];
    }
    for (int i = 0; i < n; ++i)
        out[static_cast<size_t>(i)] = out[static_cast<size_t>(i)] + os.dt * adv[static_cast<size_t>(i)];

    // explicit logistic reaction
    if (os.logistic)
        for (int i = 0; i < n; ++i) {
            Dual w = out[static_cast<size_t>(i)];
            out[static_cast<size_t>(i)] = w + os.dt * (w * (1.0 + (-1.0) * w));
        }

    // implicit diffusion: dual Thomas sweep on (I - dt*L), zero-flux ends
    const double c = os.dt * os.sigma / (os.h * os.h);
    std::vector<double> diag(static_cast<size_t>(n), 1.0 + 2.0 * c);
    diag[0] = diag[static_cast<size_t>(n - 1)] = 1.0 + c;
    std::vector<double> lower(static_cast<size_t>(n), -c), upper(static_cast<size_t>(n), -c);

    auto thomas = [&](const DualVec& b) {
        DualVec x(static_cast<size_t>(n));
        std::vector<double> gam(static_cast<size_t>(n), 0.0);
        double beta = diag[0];
        x[0] = b[0] / Dual{beta, 0.0};
        for (int i = 1; i < n; ++i) {
            gam[static_cast<size_t>(i)] = upper[static_cast<size_t>(i - 1)] / beta;
            beta = diag[static_cast<size_t>(i)] - lower[static_cast<size_t>(i)] * gam[static_cast<size_t>(i)];
            x[static_cast<size_t>(i)] =
                (b[static_cast<size_t>(i)] - Dual{lower[static_cast<size_t>(i)], 0.0} * x[static_cast<size_t>(i - 1)]) /
                Dual{beta, 0.0};
        }
        for (int i = n - 2; i >= 0; --i)
            x[static_cast<size_t>(i)] =
                x[static_cast<size_t>(i)] - Dual{gam[static_cast<size_t>(i + 1)], 0.0} * x[static_cast<size_t>(i + 1)];
        return x;
    };
    DualVec x = thomas(out);

    // one refinement step along the constant mode (mass-exact solve)
    Dual mean_r{0, 0};
    for (int i = 0; i < n; ++i) {
        Dual Ax = Dual{diag[static_cast<size_t>(i)], 0.0} * x[static_cast<size_t>(i)];
        if (i > 0) Ax = Ax + Dual{-c, 0.0} * x[static_cast<size_t>(i - 1)];
        if (i < n - 1) Ax = Ax + Dual{-c, 0.0} * x[static_cast<size_t>(i + 1)];
        mean_r = mean_r + (out[static_cast<size_t>(i)] - Ax);
    }
    mean_r = (1.0 / n) * mean_r;
    for (int i = 0; i < n; ++i)
        x[static_cast<size_t>(i)] = dmin(dmax(x[static_cast<size_t>(i)] + mean_r, 0.0), 1.0);
    return x;
}

// dI_T/du0_j via one dual forward pass per coordinate.
std::vector<double> oracle_gradient(const OracleSetup& os, const std::vector<double>& u0) {
    std::vector<double> grad(u0.size(), 0.0);
    for (size_t j = 0; j < u0.size(); ++j) {
        DualVec u(u0.size());
        for (size_t i = 0; i < u0.size(); ++i) u[i] = {u0[i], i == j ? 1.0 : 0.0};
        for (int s = 0; s < os.steps; ++s) u = oracle_step(os, u);
        Dual mass{0, 0};
        for (const Dual& x : u) mass = mass + x;
        grad[j] = os.h * mass.d; // d(objective)/du0_j
    }
    return grad;
}

} // namespace

TEST_CASE("f=0, q=0: the gradient is the all-ones field") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{24});
    SolverConfig s;
    s.T = 0.4;
    s.dt_target = 5e-3;
    Scenario sc = make_scenario(g, constant_diffusion(0.12), zero_velocity(g),
                                builtin_reaction("zero"), s, 0.5);
    GradientResult gr = gradient(random_admissible(1, 0.5, g), sc);
    for (double v : gr.gradient.values) CHECK(std::abs(v - 1.0) <= 1e-12);
    CHECK(std::abs(gr.objective - 0.5) <= 1e-12);
}

TEST_CASE("adjoint matches central finite differences") {
    double worst = 0.0;
    for (uint64_t seed = 0; seed < 4; ++seed) {
        Scenario sc = random_tangential_scenario_1d(seed + 40, 12);
        uint64_t st = derive_seed(seed, 9);
        ScalarField f(sc.grid);
        for (double& x : f.values) x = 0.25 + 0.5 * uniform01(st);
        InitialDatum u0{f, integrate(f)};
        GradientResult gr = gradient(u0, sc);
        FdCheckReport fd = fd_check_gradient(u0, sc, gr, 5, 1e-5, seed);
        worst = std::max(worst, fd.max_rel_error);
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("Taylor remainder decays quadratically in the step size") {
    Scenario sc = random_tangential_scenario_1d(77, 10);
    InitialDatum u0 = random_admissible(3, sc.mass_m, sc.grid);
    // pull strictly inside the box so u0 + eps*delta stays admissible-valued
    for (double& x : u0.field.values) x = 0.15 + 0.7 * x;
    u0.mass_m = integrate(u0.field);

    GradientResult gr = gradient(u0, sc);
    uint64_t st = derive_seed(99, 0);
    ScalarField delta(sc.grid);
    double mean = 0.0;
    for (double& x : delta.values) {
        x = uniform01(st) - 0.5;
        mean += x;
    }
    for (double& x : delta.values) x -= mean / static_cast<double>(delta.values.size());

    double directional = 0.0;
    for (size_t c = 0; c < delta.values.size(); ++c)
        directional += gr.gradient.values[c] * delta.values[c];
    directional *= sc.grid.cell_volume;

    double prev_remainder = 0.0;
    bool first = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        InitialDatum shifted = u0;
        for (size_t c = 0; c < delta.values.size(); ++c)
            shifted.field.values[c] += eps * delta.values[c];
        shifted.mass_m = integrate(shifted.field);
        double remainder =
            std::abs(terminal_mass(shifted, sc) - gr.objective - eps * directional);
        if (!first) {
            // halving-by-10 in eps must shrink the remainder ~100x; allow slack
            CHECK(remainder <= prev_remainder / 20.0 + 1e-14);
        }
        prev_remainder = remainder;
        first = false;
    }
}

TEST_CASE("dual-number oracle agrees to 1e-12 on a 4-cell grid") {
    const int n = 4;
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{n});
    auto q = [](Point p) { return -p.x; };
    auto dq = [](Point) { return -1.0; };
    const double A = 0.8, sigma = 0.07;
    VelocityField vel = make_velocity(g, q, {}, A, BoundaryPolicy::allow_nonzero_normal, dq);
    SolverConfig s;
    s.T = 0.1;
    s.dt_target = 0.02;
    Scenario sc = make_scenario(g, constant_diffusion(sigma), std::move(vel),
                                builtin_reaction("logistic"), s, 0.5);

    OracleSetup os;
    os.n = n;
    os.h = g.h[0];
    os.sigma = sigma;
    os.dt = effective_dt(sc);
    os.steps = step_count(sc);
    os.logistic = true;
    os.face_v.resize(static_cast<size_t>(n + 1));
    for (int fx = 0; fx <= n; ++fx) os.face_v[static_cast<size_t>(fx)] = -A * q({fx * g.h[0], 0.0});

    std::vector<double> u0 = {0.55, 0.7, 0.45, 0.3};
    ScalarField f(g);
    f.values = u0;
    GradientResult gr = gradient(InitialDatum{f, integrate(f)}, sc);
    std::vector<double> oracle = oracle_gradient(os, u0);

    for (int j = 0; j < n; ++j) {
        // oracle returns d(I_T)/du0_j; the adjoint field satisfies
        // d(I_T)/du0_j = cell_volume * p0_j
        double adjoint_dj = g.cell_volume * gr.gradient.values[static_cast<size_t>(j)];
        CHECK(std::abs(adjoint_dj - oracle[static_cast<size_t>(j)]) <= 1e-12);
    }
}

TEST_CASE("gradient with sparse checkpoints equals dense checkpoints") {
    Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{10});
    auto q = [](Point p) { return 0.5 * p.x * (1.0 - p.x); };
    SolverConfig dense;
    dense.T = 0.25;
    dense.dt_target = 5e-3;
    SolverConfig sparse = dense;
    sparse.checkpoint_every = 7;

    VelocityField v1 = make_velocity(g, q, {}, 1.2, BoundaryPolicy::require_tangential);
    VelocityField v2 = make_velocity(g, q, {}, 1.2, BoundaryPolicy::require_tangential);
    Scenario sc1 = make_scenario(g, constant_diffusion(0.1), std::move(v1),
                                 builtin_reaction("logistic"), dense, 0.5);
    Scenario sc2 = make_scenario(g, constant_diffusion(0.1), std::move(v2),
                                 builtin_reaction("logistic"), sparse, 0.5);

    InitialDatum u0 = random_admissible(17, 0.5, g);
    GradientResult g1 = gradient(u0, sc1);
    GradientResult g2 = gradient(u0, sc2);
    CHECK(g1.gradient.values == g2.gradient.values);
    CHECK(g1.objective == g2.objective);
}

TEST_CASE("gradient vs finite differences in 2D and with variable diffusivity") {
    const double pi = 3.14159265358979323846;

    SUBCASE("2D cellular flow") {
        Grid g = build_grid(2, std::vector<double>{1.0, 1.0}, std::vector<int>{8, 8});
        auto qx = [pi](Point p) { return std::sin(pi * p.x) * pi * std::cos(pi * p.y); };
        auto qy = [pi](Point p) { return -pi * std::cos(pi * p.x) * std::sin(pi * p.y); };
        VelocityField v = make_velocity(g, qx, qy, 1.0, BoundaryPolicy::require_tangential);
        SolverConfig s;
        s.T = 0.1;
        s.dt_target = 5e-3;
        Scenario sc = make_scenario(g, constant_diffusion(0.08), std::move(v),
                                    builtin_reaction("logistic"), s, 0.5);
        uint64_t st = derive_seed(500, 0);
        ScalarField f(g);
        for (double& x : f.values) x = 0.3 + 0.4 * uniform01(st);
        InitialDatum u0{f, integrate(f)};
        GradientResult gr = gradient(u0, sc);
        FdCheckReport fd = fd_check_gradient(u0, sc, gr, 4, 1e-5, 42);
        CHECK(fd.max_rel_error <= 1e-6);
    }

    SUBCASE("variable diffusivity") {
        Grid g = build_grid(1, std::vector<double>{1.0}, std::vector<int>{12});
        auto D = [pi](Point p) { return 0.05 + 0.15 * std::sin(pi * p.x) * std::sin(pi * p.x); };
        SolverConfig s;
        s.T = 0.3;
        s.dt_target = 5e-3;
        Scenario sc = make_scenario(g, variable_diffusion(D, 0.05), zero_velocity(g),
                                    builtin_reaction("logistic"), s, 0.5);
        uint64_t st = derive_seed(501, 0);
        ScalarField f(g);
        for (double& x : f.values) x = 0.3 + 0.4 * uniform01(st);
        InitialDatum u0{f, integrate(f)};
        GradientResult gr = gradient(u0, sc);
        FdCheckReport fd = fd_check_gradient(u0, sc, gr, 4, 1e-5, 43);
        CHECK(fd.max_rel_error <= 1e-6);
    }
}
