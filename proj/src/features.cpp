#include "surrde/features.hpp"

#include <algorithm>
#include <cmath>

#include "surrde/kernels.hpp"

namespace surrde {

namespace {

constexpr double kEps = 1e-12;

double distance(std::span<const double> a, std::span<const double> b) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double diff = a[j] - b[j];
        d2 += diff * diff;
    }
    return std::sqrt(d2);
}

// Pearson correlation with the degenerate-population convention of 0.
double correlation(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= static_cast<double>(n);
    mean_b /= static_cast<double>(n);
    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0) return 0.0;
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

}  // namespace

OptState extract_state(const de::Population& pop, const RunProgress& progress, double lower,
                       double upper) {
    const std::size_t np = pop.size();
    const std::size_t dim = pop.dim();
    const double diameter = (upper - lower) * std::sqrt(static_cast<double>(dim));

    OptState state;

    state.s[0] = kernels::mean_pairwise_distance(pop.xs) / diameter;

    const auto [lo, hi] = std::minmax_element(pop.ys.begin(), pop.ys.end());
    double mean_y = 0.0;
    for (double y : pop.ys) mean_y += y;
    mean_y /= static_cast<double>(np);
    double var_y = 0.0;
    for (double y : pop.ys) var_y += (y - mean_y) * (y - mean_y);
    var_y /= static_cast<double>(np);
    state.s[1] = std::sqrt(var_y) / (*hi - *lo + kEps);

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < dim; ++j) centroid[j] += pop.xs(i, j);
    for (double& c : centroid) c /= static_cast<double>(np);
    state.s[2] = distance(centroid, pop.xs.row(pop.best_idx)) / diameter;

    std::vector<double> dist_best(np), dist_star(np);
    for (std::size_t i = 0; i < np; ++i) {
        dist_best[i] = distance(pop.xs.row(i), pop.xs.row(pop.best_idx));
        dist_star[i] = distance(pop.xs.row(i), pop.best_x);
    }
    state.s[3] = correlation(pop.ys, dist_best);
    state.s[4] = correlation(pop.ys, dist_star);

    const double improvement = progress.best_prev_gen - progress.best_now;
    state.s[5] = std::clamp(improvement / (std::abs(progress.best_prev_gen) + kEps), -1.0, 1.0);

    state.s[6] = static_cast<double>(progress.fes) / static_cast<double>(progress.max_fes);
    state.s[7] = static_cast<double>(progress.stagnation_gens) /
                 static_cast<double>(std::max<std::int64_t>(progress.total_gens, 1));

    const double total_gain = progress.best_init - progress.best_now;
    state.s[8] = total_gain / (total_gain + kEps);

    return state;
}

}  // namespace surrde
