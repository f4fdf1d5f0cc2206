#include "surrde/de.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace surrde::de {

namespace {
const std::string kOpNames[] = {"rand1", "best1", "current_to_rand", "current_to_pbest",
                                "current_to_best"};
}

const std::string& mutation_op_name(MutationOp op) { return kOpNames[static_cast<int>(op)]; }

MutationConfig decode_action(int action) {
    if (action < 0 || action >= kNumActions)
        throw std::invalid_argument("decode_action: action out of range");
    MutationConfig cfg;
    cfg.op = static_cast<MutationOp>(action / 3);
    cfg.strength = kStrengthLevels[action % 3];
    return cfg;
}

int encode_action(const MutationConfig& cfg) {
    for (int f = 0; f < 3; ++f)
        if (kStrengthLevels[f] == cfg.strength) return 3 * static_cast<int>(cfg.op) + f;
    throw std::invalid_argument("encode_action: strength not in {0.1, 0.5, 0.9}");
}

Population initialize_population(std::size_t np, std::size_t dim, double lower, double upper,
                                 const Evaluator& evaluate, Rng& rng) {
    if (np < 5) throw std::invalid_argument("initialize_population: NP must be >= 5");
    Population pop;
    pop.xs = Matrix(np, dim);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = 0; j < dim; ++j) pop.xs(i, j) = rng.uniform(lower, upper);
    pop.ys = evaluate(pop.xs);
    pop.best_idx = static_cast<std::size_t>(
        std::min_element(pop.ys.begin(), pop.ys.end()) - pop.ys.begin());
    pop.best_x.assign(pop.xs.row(pop.best_idx).begin(), pop.xs.row(pop.best_idx).end());
    pop.best_y = pop.ys[pop.best_idx];
    return pop;
}

namespace {

// Draws `count` indices from [0, np), distinct from each other and from `self`.
void draw_distinct(std::size_t np, std::size_t self, std::span<std::size_t> out, Rng& rng) {
    for (std::size_t k = 0; k < out.size(); ++k) {
        for (;;) {
            const std::size_t candidate = static_cast<std::size_t>(rng.randint(np));
            bool clash = candidate == self;
            for (std::size_t p = 0; p < k && !clash; ++p) clash = out[p] == candidate;
            if (!clash) {
                out[k] = candidate;
                break;
            }
        }
    }
}

}  // namespace

Matrix mutate(const Population& pop, const MutationConfig& cfg, Rng& rng,
              double pbest_fraction) {
    const std::size_t np = pop.size();
    const std::size_t dim = pop.dim();
    if (np < 5) throw std::invalid_argument("mutate: NP must be >= 5");
    const double f = cfg.strength;

    // indices sorted by fitness, for pbest selection
    std::vector<std::size_t> by_fitness;
    std::size_t n_pbest = 0;
    if (cfg.op == MutationOp::current_to_pbest) {
        by_fitness.resize(np);
        std::iota(by_fitness.begin(), by_fitness.end(), std::size_t{0});
        std::sort(by_fitness.begin(), by_fitness.end(), [&](std::size_t a, std::size_t b) {
            if (pop.ys[a] != pop.ys[b]) return pop.ys[a] < pop.ys[b];
            return a < b;
        });
        n_pbest = static_cast<std::size_t>(
            std::ceil(pbest_fraction * static_cast<double>(np)));
        n_pbest = std::max<std::size_t>(1, std::min(n_pbest, np));
    }

    Matrix donors(np, dim);
    std::size_t r[3];
    for (std::size_t i = 0; i < np; ++i) {
        const auto xi = pop.xs.row(i);
        auto donor = donors.row(i);
        switch (cfg.op) {
            case MutationOp::rand1: {
                draw_distinct(np, i, {r, 3}, rng);
                const auto x1 = pop.xs.row(r[0]), x2 = pop.xs.row(r[1]), x3 = pop.xs.row(r[2]);
                for (std::size_t j = 0; j < dim; ++j) donor[j] = x1[j] + f * (x2[j] - x3[j]);
                break;
            }
            case MutationOp::best1: {
                draw_distinct(np, i, {r, 2}, rng);
                const auto xb = pop.xs.row(pop.best_idx);
                const auto x1 = pop.xs.row(r[0]), x2 = pop.xs.row(r[1]);
                for (std::size_t j = 0; j < dim; ++j) donor[j] = xb[j] + f * (x1[j] - x2[j]);
                break;
            }
            case MutationOp::current_to_rand: {
                draw_distinct(np, i, {r, 3}, rng);
                const auto x1 = pop.xs.row(r[0]), x2 = pop.xs.row(r[1]), x3 = pop.xs.row(r[2]);
                for (std::size_t j = 0; j < dim; ++j)
                    donor[j] = xi[j] + f * (x1[j] - xi[j]) + f * (x2[j] - x3[j]);
                break;
            }
            case MutationOp::current_to_pbest: {
                const std::size_t pbest = by_fitness[static_cast<std::size_t>(rng.randint(n_pbest))];
                draw_distinct(np, i, {r, 2}, rng);
                const auto xp = pop.xs.row(pbest);
                const auto x1 = pop.xs.row(r[0]), x2 = pop.xs.row(r[1]);
                for (std::size_t j = 0; j < dim; ++j)
                    donor[j] = xi[j] + f * (xp[j] - xi[j]) + f * (x1[j] - x2[j]);
                break;
            }
            case MutationOp::current_to_best: {
                draw_distinct(np, i, {r, 2}, rng);
                const auto xb = pop.xs.row(pop.best_idx);
                const auto x1 = pop.xs.row(r[0]), x2 = pop.xs.row(r[1]);
                for (std::size_t j = 0; j < dim; ++j)
                    donor[j] = xi[j] + f * (xb[j] - xi[j]) + f * (x1[j] - x2[j]);
                break;
            }
        }
    }
    return donors;
}

std::size_t crossover_select(Population& pop, const Matrix& donors, const Evaluator& evaluate,
                             Rng& rng, double lower, double upper, double cr) {
    const std::size_t np = pop.size();
    const std::size_t dim = pop.dim();
    if (donors.rows != np || donors.cols != dim)
        throw std::invalid_argument("crossover_select: donor shape mismatch");

    Matrix trials(np, dim);
    for (std::size_t i = 0; i < np; ++i) {
        const std::size_t j_rand = static_cast<std::size_t>(rng.randint(dim));
        for (std::size_t j = 0; j < dim; ++j) {
            const bool take = j == j_rand || rng.uniform() < cr;
            const double v = take ? donors(i, j) : pop.xs(i, j);
            trials(i, j) = std::clamp(v, lower, upper);
        }
    }

    const auto trial_ys = evaluate(trials);
    for (std::size_t i = 0; i < np; ++i) {
        if (trial_ys[i] <= pop.ys[i]) {
            for (std::size_t j = 0; j < dim; ++j) pop.xs(i, j) = trials(i, j);
            pop.ys[i] = trial_ys[i];
        }
        if (trial_ys[i] < pop.best_y) {
            pop.best_y = trial_ys[i];
            pop.best_x.assign(trials.row(i).begin(), trials.row(i).end());
        }
    }
    pop.best_idx = static_cast<std::size_t>(
        std::min_element(pop.ys.begin(), pop.ys.end()) - pop.ys.begin());
    return np;
}

}  // namespace surrde::de
