#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "surrde/matrix.hpp"
#include "surrde/rng.hpp"

namespace surrde::de {

enum class MutationOp {
    rand1 = 0,
    best1 = 1,
    current_to_rand = 2,
    current_to_pbest = 3,
    current_to_best = 4,
};

const std::string& mutation_op_name(MutationOp op);

struct MutationConfig {
    MutationOp op = MutationOp::rand1;
    double strength = 0.5;  // F
};

inline constexpr int kNumActions = 15;
inline constexpr double kStrengthLevels[3] = {0.1, 0.5, 0.9};

// Action a = 3 * op_index + F_index, ops in declaration order, F in (0.1, 0.5, 0.9).
MutationConfig decode_action(int action);
int encode_action(const MutationConfig& cfg);

struct Population {
    Matrix xs;               // NP x dim, always inside bounds
    std::vector<double> ys;  // fitness under the run's evaluator
    std::size_t best_idx = 0;
    std::vector<double> best_x;  // best-so-far over the whole run
    double best_y = 0.0;

    std::size_t size() const { return xs.rows; }
    std::size_t dim() const { return xs.cols; }
};

// Batch fitness function; either a surrogate or a true problem.
using Evaluator = std::function<std::vector<double>(const Matrix&)>;

Population initialize_population(std::size_t np, std::size_t dim, double lower, double upper,
                                 const Evaluator& evaluate, Rng& rng);

// Donor vectors under the canonical formulas; r indices are distinct from
// each other and from the target index.
Matrix mutate(const Population& pop, const MutationConfig& cfg, Rng& rng,
              double pbest_fraction = 0.1);

// Binomial crossover (Cr, guaranteed j_rand), clamp to bounds, greedy 1-to-1
// selection, best-so-far update. Returns the evaluations consumed (= NP).
std::size_t crossover_select(Population& pop, const Matrix& donors, const Evaluator& evaluate,
                             Rng& rng, double lower, double upper, double cr = 0.7);

}  // namespace surrde::de
