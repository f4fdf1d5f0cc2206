#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "surrde/network.hpp"
#include "surrde/sampling.hpp"

namespace surrde {

enum class OptimizerKind { adam, sgd };

// Surrogate Learning Stage configuration. Defaults are the paper-scale
// values; desk presets shrink the epoch counts.
struct SlsConfig {
    std::size_t batch_size = 100;
    int t_mse = 300;
    int t_roa = 1000;
    int t_mix = 1000;  // lambda decay horizon, = t_roa by default
    double lr = 0.01;
    OptimizerKind optimizer = OptimizerKind::adam;
    // Holdout order accuracy is recorded every epoch.
};

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;  // dL/d prediction, per element
};

// (1/N) sum 1/2 (y - yhat)^2
LossGrad mse_loss(std::span<const double> y_true, std::span<const double> y_pred);

// ROA loss on a batch sorted by true value descending: per element
// lambda * 1/2 (y_i - yhat_i)^2 + OC_i, averaged over the batch, where
// OC_i = 1/2 (|y_{i-1} - yhat_i| + |yhat_i - y_{i+1}|) and boundary elements
// keep only their existing neighbor term.
LossGrad roa_loss(std::span<const double> y_true_sorted, std::span<const double> y_pred,
                  double lambda);

// Order-correction term of one element, exposed for the loss tests.
double oc_term(std::span<const double> y_true_sorted, std::span<const double> y_pred,
               std::size_t i);

// Lambda after `epoch` full epochs of multiplicative decay
// lambda <- lambda * (1 - e / t_mix), starting from 1; clamped at 0.
double lambda_after_epoch(int epoch, int t_mix);

struct EpochStats {
    int epoch = 0;            // 1-based, continuous across both phases
    std::string phase;        // "mse" or "roa"
    double mse = 0.0;         // mean over batches, normalized targets
    double oc = 0.0;          // mean OC part (0 during the MSE phase)
    double lambda = 1.0;
    double order_acc = 0.0;   // holdout pairwise order accuracy
};

struct TrainedSurrogate {
    std::unique_ptr<Network> network;
    XNorm x_norm;
    YNorm y_norm;
    std::string problem_name;
    std::uint64_t seed = 0;
    double final_mse = 0.0;
    double final_order_acc = 0.0;
    std::vector<EpochStats> history;

    double predict(std::span<const double> x_raw) const;
    std::vector<double> predict_batch(const Matrix& xs_raw) const;

    TrainedSurrogate clone() const;
};

// Alg. "surrogate model training": t_mse epochs of minibatch MSE, then t_roa
// epochs of ROA on batches sorted by true value descending, lambda decaying
// multiplicatively per epoch. Throws on non-finite loss.
TrainedSurrogate train_surrogate(const SampleSet& dataset, std::unique_ptr<Network> net,
                                 const SlsConfig& cfg, std::uint64_t seed);

// Fraction of unordered holdout pairs with strictly distinct true values
// whose predicted order matches the true order.
double order_accuracy(std::span<const double> y_true, std::span<const double> y_pred);
double order_accuracy(const TrainedSurrogate& model, const SampleSet& set,
                      std::span<const std::size_t> indices);

// Checkpoint: network block plus normalization and metadata.
void save_surrogate(const TrainedSurrogate& model, const std::string& path);
TrainedSurrogate load_surrogate(const std::string& path);

// Per-epoch loss curve CSV: epoch,phase,mse,oc,lambda,order_acc
void write_history_csv(const TrainedSurrogate& model, std::ostream& out);

}  // namespace surrde
