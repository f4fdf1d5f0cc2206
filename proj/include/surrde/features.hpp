#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "surrde/de.hpp"
#include "surrde/matrix.hpp"

namespace surrde {

// 9-dimensional optimization state fed to the meta-policy. All features are
// dimension-free ratios so one trained policy transfers across problem
// dimensions.
struct OptState {
    std::array<double, 9> s{};

    std::span<const double> view() const { return {s.data(), s.size()}; }
};

struct RunProgress {
    std::int64_t fes = 0;
    std::int64_t max_fes = 1;
    std::int64_t stagnation_gens = 0;  // generations since the last best-so-far improvement
    std::int64_t total_gens = 1;       // generation budget of the run
    double best_init = 0.0;            // best-so-far after initialization
    double best_prev_gen = 0.0;        // best-so-far before the last step
    double best_now = 0.0;             // current best-so-far
};

// s1 mean pairwise distance / domain diameter
// s2 std(ys) / (max(ys) - min(ys) + eps)
// s3 |centroid - x_best| / diameter
// s4 corr(y_i, |x_i - x_best|)
// s5 corr(y_i, |x_i - x*_so_far|)
// s6 (best_prev - best_now) / (|best_prev| + eps), clipped to [-1, 1]
// s7 fes / max_fes
// s8 stagnation_gens / total_gens
// s9 (best_init - best_now) / (best_init - best_now + eps)
OptState extract_state(const de::Population& pop, const RunProgress& progress, double lower,
                       double upper);

}  // namespace surrde
