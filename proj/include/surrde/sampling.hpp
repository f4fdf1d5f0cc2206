#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "surrde/bbob.hpp"
#include "surrde/matrix.hpp"

namespace surrde {

// Affine map raw objective -> [0,1]. Identity (and flagged) when the sampled
// values are constant.
struct YNorm {
    double y_min = 0.0;
    double y_max = 1.0;
    bool constant = false;

    double apply(double y) const { return constant ? y : (y - y_min) / (y_max - y_min); }
    double invert(double t) const { return constant ? t : y_min + t * (y_max - y_min); }
};

// Affine map raw coordinates -> [-1,1]^dim, bounds mapping exactly to +-1.
struct XNorm {
    double lower = -5.0;
    double upper = 5.0;

    double apply(double x) const { return 2.0 * (x - lower) / (upper - lower) - 1.0; }
    double invert(double u) const { return lower + (u + 1.0) * 0.5 * (upper - lower); }
};

// The surrogate training dataset D_f: LHS points, objective values and the
// normalization fitted from them, plus a reproducible 90/10 train/holdout split.
struct SampleSet {
    Matrix xs;               // N x dim, raw coordinates
    std::vector<double> ys;  // N raw objective values
    XNorm x_norm;
    YNorm y_norm;
    std::uint64_t seed = 0;
    std::vector<std::size_t> train_idx;
    std::vector<std::size_t> holdout_idx;

    std::size_t size() const { return ys.size(); }
    std::size_t dim() const { return xs.cols; }

    // Row i mapped to [-1,1]^dim.
    std::vector<double> normalized_x(std::size_t i) const;
};

// Latin Hypercube Sample: per dimension, one point in each of n equal strata,
// jittered uniformly inside its stratum, strata independently permuted.
Matrix lhs_sample(int dim, std::size_t n, double lower, double upper, std::uint64_t seed);

// Builds D_f by evaluating the problem at n LHS points. These are the only
// true-function evaluations the surrogate pipeline consumes.
SampleSet build_dataset(bbob::Problem& problem, std::size_t n, std::uint64_t seed,
                        double holdout_fraction = 0.1);

// CSV persistence: one header line, then one "x...,y" row per sample.
void save_sample_set(const SampleSet& set, const std::string& path);
SampleSet load_sample_set(const std::string& path);

}  // namespace surrde
