#ifndef RADOPT_GRID_HPP
#define RADOPT_GRID_HPP

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace radopt {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Uniform cell-centered finite-volume mesh of an interval (dim=1) or a
// rectangle (dim=2). Cells are indexed ix + n[0]*iy, centers at
// ((ix+0.5)h[0], (iy+0.5)h[1]).
struct Grid {
    int dim = 1;
    std::array<double, 2> extents{1.0, 1.0};
    std::array<int, 2> n{1, 1};
    std::array<double, 2> h{1.0, 1.0};
    double cell_volume = 1.0;
    double total_volume = 1.0;

    int cell_count() const { return n[0] * n[1]; }
    int index(int ix, int iy = 0) const { return ix + n[0] * iy; }
    Point center(int ix, int iy = 0) const {
        return {(ix + 0.5) * h[0], dim == 2 ? (iy + 0.5) * h[1] : 0.0};
    }
    Point center_of(int cell) const { return center(cell % n[0], cell / n[0]); }

    bool operator==(const Grid&) const = default;
};

Grid build_grid(int dim, std::span<const double> extents, std::span<const int> resolutions);

// One value per cell of a grid. Carries its grid by value; grids are tiny.
struct ScalarField {
    Grid grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double fill = 0.0)
        : grid(g), values(static_cast<size_t>(g.cell_count()), fill) {}

    size_t size() const { return values.size(); }
    double& operator[](size_t i) { return values[i]; }
    double operator[](size_t i) const { return values[i]; }
};

// Midpoint quadrature of the field over the domain (compensated sum).
double integrate(const ScalarField& f);

// Compensated sum of raw values (no cell-volume factor).
double compensated_sum(std::span<const double> v);

double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);
double max_value(const ScalarField& f);

// L1 distance in the function-space sense: cell_volume * sum |a-b|.
double l1_distance(const ScalarField& a, const ScalarField& b);
double l2_inner(const ScalarField& a, const ScalarField& b); // cell_volume * sum a*b

} // namespace radopt

#endif
