#pragma once

#include <span>
#include <vector>

namespace surrde {

// Uniform B-spline grid over [-1,1] with `intervals` segments, extended by
// `degree` knots on each side (pykan layout: intervals + degree basis
// functions of the given degree).
struct SplineGrid {
    int intervals = 5;
    int degree = 5;
    std::vector<double> knots;  // intervals + 2*degree + 1, nondecreasing

    static SplineGrid uniform(int intervals, int degree);

    int num_basis() const { return intervals + degree; }
    double domain_lower() const { return -1.0; }
    double domain_upper() const { return 1.0; }

    // Cox-de Boor values of all basis functions at x. Inputs outside [-1,1]
    // are clamped to the domain edge; returns true when clamping happened.
    bool basis(double x, std::span<double> out) const;

    // Values plus d/dx. The derivative is reported as 0 when x was clamped
    // (the spline term is constant beyond the grid).
    bool basis_and_derivative(double x, std::span<double> out, std::span<double> dout) const;
};

}  // namespace surrde
