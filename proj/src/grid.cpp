#include "radopt/grid.hpp"

#include "radopt/errors.hpp"

#include <cmath>
#include <string>

namespace radopt {

Grid build_grid(int dim, std::span<const double> extents, std::span<const int> resolutions) {
    if (dim != 1 && dim != 2)
        throw ConfigError("build_grid: dim must be 1 or 2, got " + std::to_string(dim));
    if (extents.size() != static_cast<size_t>(dim) || resolutions.size() != static_cast<size_t>(dim))
        throw ConfigError("build_grid: need exactly one extent and one resolution per axis");

    Grid g;
    g.dim = dim;
    g.n = {1, 1};
    g.extents = {1.0, 1.0};
    g.h = {1.0, 1.0};
    for (int a = 0; a < dim; ++a) {
        if (!(extents[a] > 0.0))
            throw ConfigError("build_grid: extent on axis " + std::to_string(a) + " must be positive");
        if (resolutions[a] < 2)
            throw ConfigError("build_grid: resolution on axis " + std::to_string(a) +
                              " must be at least 2, got " + std::to_string(resolutions[a]));
        g.extents[a] = extents[a];
        g.n[a] = resolutions[a];
        g.h[a] = extents[a] / resolutions[a];
    }
    g.cell_volume = (dim == 1) ? g.h[0] : g.h[0] * g.h[1];
    g.total_volume = g.cell_volume * g.cell_count();
    return g;
}

double compensated_sum(std::span<const double> v) {
    // Neumaier variant of Kahan summation.
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double integrate(const ScalarField& f) {
    return f.grid.cell_volume * compensated_sum(f.values);
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

double min_value(const ScalarField& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double x : f.values) m = std::min(m, x);
    return m;
}

double max_value(const ScalarField& f) {
    double m = f.values.empty() ? 0.0 : f.values[0];
    for (double x : f.values) m = std::max(m, x);
    return m;
}

double l1_distance(const ScalarField& a, const ScalarField& b) {
    double s = 0.0, comp = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        double x = std::abs(a.values[i] - b.values[i]);
        double t = s + x;
        comp += (std::abs(s) >= x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return a.grid.cell_volume * (s + comp);
}

double l2_inner(const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return a.grid.cell_volume * s;
}

} // namespace radopt
