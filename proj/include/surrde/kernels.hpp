#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "surrde/bbob.hpp"
#include "surrde/matrix.hpp"
#include "surrde/network.hpp"

namespace surrde::kernels {

// Data-parallel inner loops of the toolkit. Each kernel has an OpenMP
// implementation and a plain serial reference. All parallel kernels produce
// the same bits for any thread count: outputs go to independent slots, and
// floating-point reductions run over fixed-size blocks summed in block order.
// Forward, evaluate and pair-count kernels match their serial reference
// exactly; the blocked gradient reduction differs from the naive serial sum
// only by rounding (tests compare at 1e-12).

// --- problem evaluation ----------------------------------------------------

// ys[i] = f(xs row i). The counter is charged once with xs.rows.
std::vector<double> batch_evaluate(bbob::Problem& problem, const Matrix& xs);
std::vector<double> batch_evaluate_serial(bbob::Problem& problem, const Matrix& xs);

// --- network forward/backward ----------------------------------------------

// out(i, :) = net(xs row i)
void batch_forward(const Network& net, const Matrix& xs, Matrix& out);
void batch_forward_serial(const Network& net, const Matrix& xs, Matrix& out);

// Scalar-output convenience wrapper.
std::vector<double> batch_forward_scalar(const Network& net, const Matrix& xs);

// grad += sum_i dparams of sample i, with upstream dL/dy in dy(i, :).
// Per-sample tangents are summed block by block in index order.
void accumulate_gradients(const Network& net, const Matrix& xs, const Matrix& dy,
                          std::span<double> grad);
void accumulate_gradients_serial(const Network& net, const Matrix& xs, const Matrix& dy,
                                 std::span<double> grad);

// --- population / pair statistics ------------------------------------------

double mean_pairwise_distance(const Matrix& xs);
double mean_pairwise_distance_serial(const Matrix& xs);

struct PairCounts {
    std::int64_t concordant = 0;  // prediction orders the pair like the truth
    std::int64_t valid = 0;       // pairs with strictly distinct true values
};

PairCounts count_concordant_pairs(std::span<const double> y_true, std::span<const double> y_pred);
PairCounts count_concordant_pairs_serial(std::span<const double> y_true,
                                         std::span<const double> y_pred);

}  // namespace surrde::kernels
