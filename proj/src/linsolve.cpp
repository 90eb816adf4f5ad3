#include "radopt/linsolve.hpp"

#include "radopt/errors.hpp"

#include <cmath>
#include <cstdio>

namespace radopt {

FaceDiffusivity face_diffusivities(const DiffusionModel& d, const Grid& grid) {
    const int n0 = grid.n[0], n1 = grid.n[1];
    FaceDiffusivity f;
    f.x.assign(static_cast<size_t>((n0 + 1) * n1), 0.0);
    if (grid.dim == 2) f.y.assign(static_cast<size_t>(n0 * (n1 + 1)), 0.0);

    auto cell_value = [&](int ix, int iy) { return d.value_at(grid.center(ix, iy)); };
    auto harmonic = [](double a, double b) { return 2.0 * a * b / (a + b); };

    for (int iy = 0; iy < n1; ++iy)
        for (int fx = 1; fx < n0; ++fx)
            f.x[static_cast<size_t>(fx + (n0 + 1) * iy)] =
                d.kind == DiffusionModel::Kind::constant
                    ? d.sigma
                    : harmonic(cell_value(fx - 1, iy), cell_value(fx, iy));
    if (grid.dim == 2)
        for (int fy = 1; fy < n1; ++fy)
            for (int ix = 0; ix < n0; ++ix)
                f.y[static_cast<size_t>(ix + n0 * fy)] =
                    d.kind == DiffusionModel::Kind::constant
                        ? d.sigma
                        : harmonic(cell_value(ix, fy - 1), cell_value(ix, fy));
    return f;
}

ImplicitDiffusion::ImplicitDiffusion(const Grid& grid, const FaceDiffusivity& faces, double dt)
    : grid_(grid), faces_(&faces), dt_(dt) {
    const int n0 = grid.n[0], n1 = grid.n[1];
    const double cx = dt / (grid.h[0] * grid.h[0]);
    const double cy = grid.dim == 2 ? dt / (grid.h[1] * grid.h[1]) : 0.0;
    diag_.assign(static_cast<size_t>(grid.cell_count()), 1.0);
    for (int iy = 0; iy < n1; ++iy) {
        for (int ix = 0; ix < n0; ++ix) {
            double s = faces.x[static_cast<size_t>(ix + (n0 + 1) * iy)] +
                       faces.x[static_cast<size_t>(ix + 1 + (n0 + 1) * iy)];
            double v = 1.0 + cx * s;
            if (grid.dim == 2)
                v += cy * (faces.y[static_cast<size_t>(ix + n0 * iy)] +
                           faces.y[static_cast<size_t>(ix + n0 * (iy + 1))]);
            diag_[static_cast<size_t>(grid.index(ix, iy))] = v;
        }
    }
    if (grid.dim == 1) {
        sub_.assign(static_cast<size_t>(n0), 0.0);
        sup_.assign(static_cast<size_t>(n0), 0.0);
        for (int fx = 1; fx < n0; ++fx) {
            double c = -cx * faces.x[static_cast<size_t>(fx)];
            sup_[static_cast<size_t>(fx - 1)] = c; // couples fx-1 <- fx
            sub_[static_cast<size_t>(fx)] = c;     // couples fx <- fx-1
        }
    }
}

void ImplicitDiffusion::apply(const std::vector<double>& x, std::vector<double>& out) const {
    const int n0 = grid_.n[0], n1 = grid_.n[1];
    const double cx = dt_ / (grid_.h[0] * grid_.h[0]);
    const double cy = grid_.dim == 2 ? dt_ / (grid_.h[1] * grid_.h[1]) : 0.0;
    out.assign(x.size(), 0.0);
    for (int iy = 0; iy < n1; ++iy) {
        for (int ix = 0; ix < n0; ++ix) {
            const int c = grid_.index(ix, iy);
            double acc = x[static_cast<size_t>(c)];
            double dW = faces_->x[static_cast<size_t>(ix + (n0 + 1) * iy)];
            double dE = faces_->x[static_cast<size_t>(ix + 1 + (n0 + 1) * iy)];
            if (ix > 0) acc -= cx * dW * (x[static_cast<size_t>(c - 1)] - x[static_cast<size_t>(c)]);
            if (ix < n0 - 1) acc -= cx * dE * (x[static_cast<size_t>(c + 1)] - x[static_cast<size_t>(c)]);
            if (grid_.dim == 2) {
                double dS = faces_->y[static_cast<size_t>(ix + n0 * iy)];
                double dN = faces_->y[static_cast<size_t>(ix + n0 * (iy + 1))];
                if (iy > 0) acc -= cy * dS * (x[static_cast<size_t>(c - n0)] - x[static_cast<size_t>(c)]);
                if (iy < n1 - 1) acc -= cy * dN * (x[static_cast<size_t>(c + n0)] - x[static_cast<size_t>(c)]);
            }
            out[static_cast<size_t>(c)] = acc;
        }
    }
}

namespace {

double mean(const std::vector<double>& v) {
    return compensated_sum(v) / static_cast<double>(v.size());
}

} // namespace

void ImplicitDiffusion::solve_tridiag(const std::vector<double>& b, std::vector<double>& x) const {
    const size_t n = b.size();
    x.assign(n, 0.0);
    std::vector<double> gamma(n, 0.0);
    double beta = diag_[0];
    x[0] = b[0] / beta;
    for (size_t i = 1; i < n; ++i) {
        gamma[i] = sup_[i - 1] / beta;
        beta = diag_[i] - sub_[i] * gamma[i];
        x[i] = (b[i] - sub_[i] * x[i - 1]) / beta;
    }
    for (size_t i = n - 1; i-- > 0;) x[i] -= gamma[i + 1] * x[i + 1];
}

void ImplicitDiffusion::solve_cg(const std::vector<double>& b, std::vector<double>& x,
                                 double rel_tol, int max_iters) const {
    const size_t n = b.size();
    // Constant-mode deflation: A*1 = 1 and A maps the zero-mean subspace to
    // itself, so the mean of the solution equals the mean of b exactly. CG
    // runs on the zero-mean part only; projections keep rounding from leaking
    // back into the constant mode. This is what makes the implicit step
    // conserve mass to rounding rather than to the CG tolerance.
    const double beta_mean = mean(b);
    std::vector<double> r(n), z(n), p(n), Ap(n);
    x.assign(n, 0.0);
    double bnorm_full = 0.0;
    for (double v : b) bnorm_full += v * v;
    bnorm_full = std::sqrt(bnorm_full);
    for (size_t i = 0; i < n; ++i) r[i] = b[i] - beta_mean;

    double bnorm = 0.0;
    for (double v : r) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    // The achievable residual is limited by rounding relative to the full
    // right-hand side, not its zero-mean part; near-uniform states would
    // otherwise demand sub-eps absolute residuals.
    const double target = std::max(rel_tol * bnorm, 64.0 * 1.1e-16 * bnorm_full);
    if (bnorm <= target) {
        for (size_t i = 0; i < n; ++i) x[i] = beta_mean;
        return;
    }

    auto precondition = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (size_t i = 0; i < n; ++i) out[i] = in[i] / diag_[i];
        double mu = mean(out);
        for (double& v : out) v -= mu;
    };

    precondition(r, z);
    p = z;
    double rz = 0.0;
    for (size_t i = 0; i < n; ++i) rz += r[i] * z[i];

    double rnorm = bnorm;
    for (int it = 0; it < max_iters; ++it) {
        apply(p, Ap);
        double pAp = 0.0;
        for (size_t i = 0; i < n; ++i) pAp += p[i] * Ap[i];
        double alpha = rz / pAp;
        for (size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        double rr = 0.0;
        for (double v : r) rr += v * v;
        rnorm = std::sqrt(rr);
        if (rnorm <= target) {
            double mu = mean(x); // remove rounding drift from the deflated part
            for (size_t i = 0; i < n; ++i) x[i] += beta_mean - mu;
            return;
        }
        precondition(r, z);
        double rz_new = 0.0;
        for (size_t i = 0; i < n; ++i) rz_new += r[i] * z[i];
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    char buf[160];
    snprintf(buf, sizeof buf,
             "diffusion CG did not reach tolerance: |r| = %.3e, target %.3e after %d iterations",
             rnorm, target, max_iters);
    throw SolverError(buf);
}

void ImplicitDiffusion::solve(const std::vector<double>& b, std::vector<double>& x, double rel_tol,
                              int max_iters) const {
    if (grid_.dim == 1) {
        solve_tridiag(b, x);
        // One refinement step along the constant mode: since 1^T A = 1^T, the
        // mass defect of the computed solution is exactly 1^T r.
        std::vector<double> Ax(x.size());
        apply(x, Ax);
        std::vector<double> r(x.size());
        for (size_t i = 0; i < x.size(); ++i) r[i] = b[i] - Ax[i];
        double mu = mean(r);
        for (double& v : x) v += mu;
        return;
    }
    solve_cg(b, x, rel_tol, max_iters);
}

} // namespace radopt
