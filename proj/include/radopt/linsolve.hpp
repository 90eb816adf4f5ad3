#ifndef RADOPT_LINSOLVE_HPP
#define RADOPT_LINSOLVE_HPP

#include "radopt/grid.hpp"
#include "radopt/models.hpp"

#include <vector>

namespace radopt {

// Face diffusivities of a diffusion model on a grid. Interior x-faces get the
// harmonic mean of the adjacent cell values (flux continuity); boundary faces
// are zero, which is exactly the zero-flux condition.
struct FaceDiffusivity {
    std::vector<double> x; // (n0+1) * n1
    std::vector<double> y; // n0 * (n1+1), empty in 1D
};

FaceDiffusivity face_diffusivities(const DiffusionModel& d, const Grid& grid);

// Backward-Euler diffusion operator A = I - dt*L where L is the zero-flux
// finite-volume Laplacian. A is a symmetric M-matrix with A*1 = 1, so the
// exact solve preserves both the [min,max] range and the total mass.
class ImplicitDiffusion {
public:
    ImplicitDiffusion(const Grid& grid, const FaceDiffusivity& faces, double dt);

    void apply(const std::vector<double>& x, std::vector<double>& out) const;

    // Solves A x = b. 1D: direct tridiagonal sweep plus one constant-mode
    // refinement step. 2D: Jacobi-preconditioned CG with the constant mode
    // deflated and handled exactly. Throws SolverError when CG stalls.
    void solve(const std::vector<double>& b, std::vector<double>& x, double rel_tol,
               int max_iters) const;

    double dt() const { return dt_; }

private:
    Grid grid_;
    const FaceDiffusivity* faces_;
    double dt_;
    std::vector<double> diag_;                    // diagonal of A
    std::vector<double> sub_, sup_;               // 1D tridiagonal bands
    void solve_tridiag(const std::vector<double>& b, std::vector<double>& x) const;
    void solve_cg(const std::vector<double>& b, std::vector<double>& x, double rel_tol,
                  int max_iters) const;
};

} // namespace radopt

#endif
