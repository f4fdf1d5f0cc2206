#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "surrde/features.hpp"
#include "surrde/rng.hpp"

using namespace surrde;

namespace {

de::Population population_from(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& ys) {
    de::Population pop;
    pop.xs = Matrix(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) pop.xs(i, j) = rows[i][j];
    pop.ys = ys;
    pop.best_idx = static_cast<std::size_t>(
        std::min_element(ys.begin(), ys.end()) - ys.begin());
    pop.best_x.assign(pop.xs.row(pop.best_idx).begin(), pop.xs.row(pop.best_idx).end());
    pop.best_y = ys[pop.best_idx];
    return pop;
}

RunProgress default_progress(double best) {
    RunProgress p;
    p.fes = 100;
    p.max_fes = 1000;
    p.stagnation_gens = 2;
    p.total_gens = 10;
    p.best_init = best + 1.0;
    p.best_prev_gen = best + 0.5;
    p.best_now = best;
    return p;
}

}  // namespace

TEST_CASE("degenerate population zeroes the dispersion and correlation features") {
    const std::vector<double> row{1.0, -2.0};
    auto pop = population_from({row, row, row, row, row}, {3.0, 3.0, 3.0, 3.0, 3.0});
    const auto state = extract_state(pop, default_progress(3.0), -5.0, 5.0);
    CHECK(state.s[0] == 0.0);
    CHECK(state.s[1] == 0.0);
    CHECK(state.s[2] == 0.0);
    CHECK(state.s[3] == 0.0);
    CHECK(state.s[4] == 0.0);
}

TEST_CASE("progress features") {
    auto pop = population_from({{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}, {2.0, 0.0}, {0.0, 2.0}},
                               {1.0, 1.0, 2.0, 4.0, 4.0});
    auto progress = default_progress(1.0);
    progress.fes = progress.max_fes;  // budget exhausted
    const auto state = extract_state(pop, progress, -5.0, 5.0);
    CHECK(state.s[6] == 1.0);
    CHECK(state.s[7] == doctest::Approx(0.2));
}

TEST_CASE("fitness distance correlation is high for a ring around the optimum") {
    // best at the center, the rest on a ring; fitness grows with distance
    std::vector<std::vector<double>> rows{{0.0, 0.0}};
    std::vector<double> ys{0.0};
    Rng rng(5);
    for (int i = 0; i < 20; ++i) {
        const double angle = rng.uniform(0.0, 2.0 * M_PI);
        const double radius = 1.0 + 0.2 * i;
        rows.push_back({radius * std::cos(angle), radius * std::sin(angle)});
        ys.push_back(radius * radius);
    }
    auto pop = population_from(rows, ys);
    const auto state = extract_state(pop, default_progress(0.0), -5.0, 5.0);
    CHECK(state.s[3] > 0.9);
    CHECK(state.s[4] > 0.9);
}

TEST_CASE("state is invariant under population permutation") {
    Rng rng(6);
    std::vector<std::vector<double>> rows;
    std::vector<double> ys;
    for (int i = 0; i < 12; ++i) {
        rows.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
        ys.push_back(rng.uniform(0.0, 10.0));
    }
    auto pop = population_from(rows, ys);
    const auto base = extract_state(pop, default_progress(*std::min_element(ys.begin(), ys.end())),
                                    -5.0, 5.0);

    // rotate the member order
    std::rotate(rows.begin(), rows.begin() + 5, rows.end());
    std::rotate(ys.begin(), ys.begin() + 5, ys.end());
    auto rotated = population_from(rows, ys);
    const auto permuted = extract_state(
        rotated, default_progress(*std::min_element(ys.begin(), ys.end())), -5.0, 5.0);

    for (int i = 0; i < 9; ++i) CHECK(base.s[static_cast<std::size_t>(i)] ==
                                      doctest::Approx(permuted.s[static_cast<std::size_t>(i)])
                                          .epsilon(1e-12));
}

TEST_CASE("all features stay finite and inside their declared ranges") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::vector<double>> rows;
        std::vector<double> ys;
        const int np = 5 + static_cast<int>(rng.randint(10));
        for (int i = 0; i < np; ++i) {
            rows.push_back({rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0)});
            ys.push_back(rng.uniform(-3.0, 100.0));
        }
        auto pop = population_from(rows, ys);
        RunProgress progress;
        progress.fes = static_cast<std::int64_t>(rng.randint(1000)) + 1;
        progress.max_fes = 1000;
        progress.stagnation_gens = static_cast<std::int64_t>(rng.randint(10));
        progress.total_gens = 10;
        progress.best_now = pop.best_y;
        progress.best_prev_gen = pop.best_y + rng.uniform(0.0, 1.0);
        progress.best_init = progress.best_prev_gen + rng.uniform(0.0, 1.0);

        const auto state = extract_state(pop, progress, -5.0, 5.0);
        for (double v : state.s) CHECK(std::isfinite(v));
        for (int i : {0, 1, 2, 6, 7, 8}) {
            CHECK(state.s[static_cast<std::size_t>(i)] >= 0.0);
            CHECK(state.s[static_cast<std::size_t>(i)] <= 1.0);
        }
        for (int i : {3, 4, 5}) {
            CHECK(state.s[static_cast<std::size_t>(i)] >= -1.0);
            CHECK(state.s[static_cast<std::size_t>(i)] <= 1.0);
        }
    }
}
