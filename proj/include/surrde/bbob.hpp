#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "surrde/matrix.hpp"

namespace surrde::bbob {

// The 24 noiseless BBOB functions, in suite order.
enum class FunctionId : int {
    sphere = 1,
    ellipsoidal = 2,
    rastrigin = 3,
    buche_rastrigin = 4,
    linear_slope = 5,
    attractive_sector = 6,
    step_ellipsoidal = 7,
    rosenbrock_original = 8,
    rosenbrock_rotated = 9,
    ellipsoidal_high_cond = 10,
    discus = 11,
    bent_cigar = 12,
    sharp_ridge = 13,
    different_powers = 14,
    rastrigin_f15 = 15,
    weierstrass = 16,
    schaffers = 17,
    schaffers_high_cond = 18,
    composite_grie_rosen = 19,
    schwefel = 20,
    gallagher_101peaks = 21,
    gallagher_21peaks = 22,
    katsuura = 23,
    lunacek_bi_rastrigin = 24,
};

inline constexpr int kNumFunctions = 24;

const std::string& function_name(FunctionId id);
FunctionId function_from_name(const std::string& name);

struct ProblemSpec {
    FunctionId function = FunctionId::sphere;
    int dim = 10;
    std::optional<std::vector<double>> shift;  // optimum shift in x-space
    std::optional<Matrix> rotation;            // orthogonal, z = R^T (x - shift)
    double lower = -5.0;
    double upper = 5.0;
    std::uint64_t seed = 0;  // drives function-internal randomness (Gallagher peaks)

    void validate() const;

    // Flat key=value text round trip; shift/rotation are written inline.
    std::string to_text() const;
    static ProblemSpec from_text(const std::string& text);
};

struct BudgetExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EvalCounter {
    std::int64_t consumed = 0;
    std::int64_t budget = -1;  // <0: unlimited

    void charge(std::int64_t n) {
        if (budget >= 0 && consumed + n > budget)
            throw BudgetExhausted("evaluation budget exhausted");
        consumed += n;
    }
    std::int64_t remaining() const { return budget < 0 ? INT64_MAX : budget - consumed; }
};

// One BBOB objective with its precomputed internal data. Reported values are
// gaps to the optimum: f(x_opt) == 0 for every function.
class Problem {
public:
    explicit Problem(ProblemSpec spec);

    double evaluate(std::span<const double> x);

    // Evaluate without touching the counter; used internally and by batch kernels.
    double evaluate_uncounted(std::span<const double> x) const;

    const ProblemSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    double lower() const { return spec_.lower; }
    double upper() const { return spec_.upper; }

    EvalCounter& counter() { return counter_; }
    const EvalCounter& counter() const { return counter_; }
    void set_budget(std::int64_t budget) { counter_.budget = budget; }

    // Location of the global optimum in x-space (shift/rotation applied).
    std::vector<double> optimum_location() const;

    // Internal Gallagher data, exposed for inspection and reference oracles.
    const Matrix& peak_locations() const { return peaks_; }
    const Matrix& peak_scales() const { return peak_scales_; }
    const std::vector<double>& peak_weights() const { return peak_weights_; }

private:
    double raw_eval(std::span<const double> z) const;

    ProblemSpec spec_;
    EvalCounter counter_;
    std::vector<double> optimum_raw_;  // optimum in z-space

    // Gallagher internals (empty for other functions).
    Matrix peaks_;        // n_peaks x dim
    Matrix peak_scales_;  // n_peaks x dim diagonal conditioning
    std::vector<double> peak_weights_;
};

// The fixed 16/8 train/test split (dim=10, transforms off).
std::pair<std::vector<ProblemSpec>, std::vector<ProblemSpec>> make_split();

enum class OodMode { shift_rotate_10d, plain_30d };

// Derives an out-of-distribution variant of a 10D untransformed test problem.
ProblemSpec apply_ood(const ProblemSpec& p, OodMode mode, std::uint64_t seed);

}  // namespace surrde::bbob
