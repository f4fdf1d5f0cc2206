#include "surrde/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace surrde {

SplineGrid SplineGrid::uniform(int intervals, int degree) {
    if (intervals < 1) throw std::invalid_argument("SplineGrid: intervals must be >= 1");
    if (degree < 0) throw std::invalid_argument("SplineGrid: degree must be >= 0");
    SplineGrid g;
    g.intervals = intervals;
    g.degree = degree;
    const double h = 2.0 / intervals;
    const int total = intervals + 2 * degree + 1;
    g.knots.resize(static_cast<std::size_t>(total));
    for (int i = 0; i < total; ++i) g.knots[static_cast<std::size_t>(i)] = -1.0 + (i - degree) * h;
    return g;
}

namespace {

// Degree elevation up to `upto`, writing each level over the previous one.
// work must hold intervals + 2*degree entries.
void cox_de_boor(const std::vector<double>& knots, double x, int upto, std::span<double> work) {
    const std::size_t n0 = knots.size() - 1;
    for (std::size_t i = 0; i < n0; ++i)
        work[i] = (knots[i] <= x && x < knots[i + 1]) ? 1.0 : 0.0;
    for (int d = 1; d <= upto; ++d) {
        const std::size_t nd = n0 - static_cast<std::size_t>(d);
        for (std::size_t i = 0; i < nd; ++i) {
            const double left = (x - knots[i]) / (knots[i + d] - knots[i]) * work[i];
            const double right =
                (knots[i + d + 1] - x) / (knots[i + d + 1] - knots[i + 1]) * work[i + 1];
            work[i] = left + right;
        }
    }
}

}  // namespace

bool SplineGrid::basis(double x, std::span<double> out) const {
    const int nb = num_basis();
    if (out.size() != static_cast<std::size_t>(nb))
        throw std::invalid_argument("SplineGrid::basis: bad output size");
    const bool clamped = x < -1.0 || x > 1.0;
    const double xc = std::clamp(x, -1.0, 1.0);

    std::vector<double> work(knots.size() - 1);
    cox_de_boor(knots, xc, degree, work);
    std::copy_n(work.begin(), nb, out.begin());
    return clamped;
}

bool SplineGrid::basis_and_derivative(double x, std::span<double> out,
                                      std::span<double> dout) const {
    const int nb = num_basis();
    if (out.size() != static_cast<std::size_t>(nb) || dout.size() != static_cast<std::size_t>(nb))
        throw std::invalid_argument("SplineGrid::basis_and_derivative: bad output size");
    const bool clamped = x < -1.0 || x > 1.0;
    const double xc = std::clamp(x, -1.0, 1.0);

    if (degree == 0) {
        std::vector<double> work(knots.size() - 1);
        cox_de_boor(knots, xc, 0, work);
        std::copy_n(work.begin(), nb, out.begin());
        std::fill(dout.begin(), dout.end(), 0.0);
        return clamped;
    }

    std::vector<double> work(knots.size() - 1);
    cox_de_boor(knots, xc, degree - 1, work);

    // B'_{i,k} = k * (B_{i,k-1}/(t_{i+k}-t_i) - B_{i+1,k-1}/(t_{i+k+1}-t_{i+1}))
    const double k = static_cast<double>(degree);
    for (int i = 0; i < nb; ++i) {
        const std::size_t ui = static_cast<std::size_t>(i);
        const std::size_t ud = static_cast<std::size_t>(degree);
        dout[ui] = clamped ? 0.0
                           : k * (work[ui] / (knots[ui + ud] - knots[ui]) -
                                  work[ui + 1] / (knots[ui + ud + 1] - knots[ui + 1]));
    }

    // one more elevation step for the values themselves
    const std::size_t nd = knots.size() - 1 - static_cast<std::size_t>(degree);
    for (std::size_t i = 0; i < nd; ++i) {
        const std::size_t ud = static_cast<std::size_t>(degree);
        const double left = (xc - knots[i]) / (knots[i + ud] - knots[i]) * work[i];
        const double right =
            (knots[i + ud + 1] - xc) / (knots[i + ud + 1] - knots[i + 1]) * work[i + 1];
        out[i] = left + right;
    }
    return clamped;
}

}  // namespace surrde
