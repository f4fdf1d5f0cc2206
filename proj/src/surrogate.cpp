#include "surrde/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "surrde/kernels.hpp"
#include "surrde/rng.hpp"

namespace surrde {

namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

LossGrad mse_loss(std::span<const double> y_true, std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size() || y_true.empty())
        throw std::invalid_argument("mse_loss: bad batch");
    const double n = static_cast<double>(y_true.size());
    LossGrad out;
    out.grad.assign(y_true.size(), 0.0);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double err = y_true[i] - y_pred[i];
        out.loss += 0.5 * err * err;
        out.grad[i] = -err / n;
    }
    out.loss /= n;
    return out;
}

double oc_term(std::span<const double> y_true_sorted, std::span<const double> y_pred,
               std::size_t i) {
    const std::size_t n = y_true_sorted.size();
    double oc = 0.0;
    if (i > 0) oc += 0.5 * std::abs(y_true_sorted[i - 1] - y_pred[i]);
    if (i + 1 < n) oc += 0.5 * std::abs(y_pred[i] - y_true_sorted[i + 1]);
    return oc;
}

LossGrad roa_loss(std::span<const double> y_true_sorted, std::span<const double> y_pred,
                  double lambda) {
    const std::size_t n = y_true_sorted.size();
    if (n != y_pred.size() || n < 2) throw std::invalid_argument("roa_loss: bad batch");
    if (lambda < 0.0) throw std::invalid_argument("roa_loss: negative lambda");

    LossGrad out;
    out.grad.assign(n, 0.0);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double err = y_true_sorted[i] - y_pred[i];
        double loss_i = lambda * 0.5 * err * err;
        double grad_i = -lambda * err;
        if (i > 0) {
            loss_i += 0.5 * std::abs(y_true_sorted[i - 1] - y_pred[i]);
            grad_i += 0.5 * sign0(y_pred[i] - y_true_sorted[i - 1]);
        }
        if (i + 1 < n) {
            loss_i += 0.5 * std::abs(y_pred[i] - y_true_sorted[i + 1]);
            grad_i += 0.5 * sign0(y_pred[i] - y_true_sorted[i + 1]);
        }
        out.loss += loss_i;
        out.grad[i] = grad_i * inv_n;
    }
    out.loss *= inv_n;
    return out;
}

double lambda_after_epoch(int epoch, int t_mix) {
    if (t_mix < 1) throw std::invalid_argument("lambda_after_epoch: t_mix must be >= 1");
    double lambda = 1.0;
    for (int e = 1; e <= epoch; ++e) {
        const double factor = 1.0 - static_cast<double>(e) / static_cast<double>(t_mix);
        lambda *= factor;
        if (lambda <= 0.0) return 0.0;
    }
    return lambda;
}

double order_accuracy(std::span<const double> y_true, std::span<const double> y_pred) {
    const auto counts = kernels::count_concordant_pairs(y_true, y_pred);
    if (counts.valid == 0) return 0.0;
    return static_cast<double>(counts.concordant) / static_cast<double>(counts.valid);
}

double order_accuracy(const TrainedSurrogate& model, const SampleSet& set,
                      std::span<const std::size_t> indices) {
    if (indices.size() < 2) throw std::invalid_argument("order_accuracy: need >= 2 points");
    Matrix xs(indices.size(), set.dim());
    std::vector<double> truth(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto i = indices[r];
        for (std::size_t j = 0; j < set.dim(); ++j) xs(r, j) = set.xs(i, j);
        truth[r] = set.ys[i];
    }
    const auto preds = model.predict_batch(xs);
    return order_accuracy(truth, preds);
}

double TrainedSurrogate::predict(std::span<const double> x_raw) const {
    std::vector<double> u(x_raw.size());
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = x_norm.apply(x_raw[j]);
    return y_norm.invert(network->forward_scalar(u));
}

std::vector<double> TrainedSurrogate::predict_batch(const Matrix& xs_raw) const {
    Matrix normalized(xs_raw.rows, xs_raw.cols);
    for (std::size_t i = 0; i < xs_raw.rows; ++i)
        for (std::size_t j = 0; j < xs_raw.cols; ++j) normalized(i, j) = x_norm.apply(xs_raw(i, j));
    auto out = kernels::batch_forward_scalar(*network, normalized);
    for (double& v : out) v = y_norm.invert(v);
    return out;
}

TrainedSurrogate TrainedSurrogate::clone() const {
    TrainedSurrogate copy;
    copy.network = network->clone();
    copy.x_norm = x_norm;
    copy.y_norm = y_norm;
    copy.problem_name = problem_name;
    copy.seed = seed;
    copy.final_mse = final_mse;
    copy.final_order_acc = final_order_acc;
    copy.history = history;
    return copy;
}

namespace {

struct BatchBuffers {
    Matrix xs;                    // batch x dim, normalized inputs
    std::vector<double> targets;  // normalized true values
    Matrix dy;                    // batch x 1 upstream gradient
};

void fill_batch(const SampleSet& data, std::span<const std::size_t> idx, BatchBuffers& buf) {
    const std::size_t dim = data.dim();
    buf.xs = Matrix(idx.size(), dim);
    buf.targets.resize(idx.size());
    buf.dy = Matrix(idx.size(), 1);
    for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t j = 0; j < dim; ++j) buf.xs(r, j) = data.x_norm.apply(data.xs(idx[r], j));
        buf.targets[r] = data.y_norm.apply(data.ys[idx[r]]);
    }
}

}  // namespace

TrainedSurrogate train_surrogate(const SampleSet& dataset, std::unique_ptr<Network> net,
                                 const SlsConfig& cfg, std::uint64_t seed) {
    if (dataset.train_idx.size() < 2) throw std::invalid_argument("train_surrogate: dataset too small");
    if (net->input_dim() != static_cast<int>(dataset.dim()))
        throw std::invalid_argument("train_surrogate: network input dim mismatch");
    if (cfg.batch_size < 2) throw std::invalid_argument("train_surrogate: batch_size must be >= 2");

    TrainedSurrogate model;
    model.x_norm = dataset.x_norm;
    model.y_norm = dataset.y_norm;
    model.seed = seed;

    Rng rng(split_seed(seed, 0x515));
    AdamState adam(net->num_params());
    std::vector<double> grad(net->num_params(), 0.0);
    std::vector<std::size_t> order = dataset.train_idx;
    BatchBuffers buf;

    const bool has_holdout = dataset.holdout_idx.size() >= 2;
    auto holdout_accuracy = [&](Network& n) {
        if (!has_holdout) return 0.0;
        TrainedSurrogate view;
        view.network = n.clone();
        view.x_norm = dataset.x_norm;
        view.y_norm = dataset.y_norm;
        return order_accuracy(view, dataset, dataset.holdout_idx);
    };

    auto apply_update = [&](Network& n) {
        if (cfg.optimizer == OptimizerKind::adam)
            adam_step(n.params(), grad, adam, cfg.lr);
        else
            sgd_step(n.params(), grad, cfg.lr);
        n.project_params();
    };

    int epoch_counter = 0;
    double lambda = 1.0;
    double last_mse = 0.0;

    for (int phase = 0; phase < 2; ++phase) {
        const bool roa_phase = phase == 1;
        const int epochs = roa_phase ? cfg.t_roa : cfg.t_mse;
        if (roa_phase) lambda = 1.0;

        for (int epoch = 1; epoch <= epochs; ++epoch) {
            rng.shuffle(order);
            double sum_mse = 0.0, sum_oc = 0.0;
            std::size_t batches = 0;

            for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
                const std::size_t end = std::min(start + cfg.batch_size, order.size());
                std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(start),
                                             order.begin() + static_cast<std::ptrdiff_t>(end));
                if (idx.size() < 2) continue;
                if (roa_phase) {
                    // descending true value; ties broken by sample index
                    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                        if (dataset.ys[a] != dataset.ys[b]) return dataset.ys[a] > dataset.ys[b];
                        return a < b;
                    });
                }
                fill_batch(dataset, idx, buf);
                const auto preds = kernels::batch_forward_scalar(*net, buf.xs);

                LossGrad lg;
                const auto mse_part = mse_loss(buf.targets, preds);
                if (roa_phase) {
                    lg = roa_loss(buf.targets, preds, lambda);
                    sum_oc += lg.loss - lambda * mse_part.loss;
                } else {
                    lg = mse_part;
                }
                sum_mse += mse_part.loss;
                ++batches;

                if (!std::isfinite(lg.loss))
                    throw std::runtime_error("train_surrogate: loss diverged (non-finite) at epoch " +
                                             std::to_string(epoch_counter + 1));

                std::fill(grad.begin(), grad.end(), 0.0);
                for (std::size_t r = 0; r < idx.size(); ++r) buf.dy(r, 0) = lg.grad[r];
                kernels::accumulate_gradients(*net, buf.xs, buf.dy, grad);
                apply_update(*net);
            }

            ++epoch_counter;
            EpochStats stats;
            stats.epoch = epoch_counter;
            stats.phase = roa_phase ? "roa" : "mse";
            stats.mse = batches ? sum_mse / static_cast<double>(batches) : 0.0;
            stats.oc = batches ? sum_oc / static_cast<double>(batches) : 0.0;
            stats.lambda = roa_phase ? lambda : 1.0;
            stats.order_acc = holdout_accuracy(*net);
            model.history.push_back(stats);
            last_mse = stats.mse;

            if (roa_phase) {
                const double factor = 1.0 - static_cast<double>(epoch) / static_cast<double>(cfg.t_mix);
                lambda = std::max(0.0, lambda * factor);
            }
        }
    }

    model.final_mse = last_mse;
    model.final_order_acc = model.history.empty() ? holdout_accuracy(*net)
                                                  : model.history.back().order_acc;
    model.network = std::move(net);
    if (model.history.empty() && has_holdout) {
        TrainedSurrogate view;
        view.network = model.network->clone();
        view.x_norm = dataset.x_norm;
        view.y_norm = dataset.y_norm;
        model.final_order_acc = order_accuracy(view, dataset, dataset.holdout_idx);
    }
    return model;
}

void save_surrogate(const TrainedSurrogate& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "surrde-surrogate v1\n";
    out.precision(17);
    out << "problem " << (model.problem_name.empty() ? "-" : model.problem_name) << "\n";
    out << "seed " << model.seed << "\n";
    out << "xnorm " << model.x_norm.lower << " " << model.x_norm.upper << "\n";
    out << "ynorm " << model.y_norm.y_min << " " << model.y_norm.y_max << " "
        << (model.y_norm.constant ? 1 : 0) << "\n";
    out << "final_mse " << model.final_mse << "\n";
    out << "final_order_acc " << model.final_order_acc << "\n";
    save_network(*model.network, out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

TrainedSurrogate load_surrogate(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "surrde-surrogate v1")
        throw std::runtime_error("bad surrogate checkpoint header: " + path);

    TrainedSurrogate model;
    auto expect = [&](const std::string& key) {
        if (!std::getline(in, line) || line.rfind(key + " ", 0) != 0)
            throw std::runtime_error("bad surrogate checkpoint field: " + key);
        return std::istringstream(line.substr(key.size() + 1));
    };
    {
        auto is = expect("problem");
        is >> model.problem_name;
        if (model.problem_name == "-") model.problem_name.clear();
    }
    expect("seed") >> model.seed;
    {
        auto is = expect("xnorm");
        is >> model.x_norm.lower >> model.x_norm.upper;
    }
    {
        auto is = expect("ynorm");
        int c;
        is >> model.y_norm.y_min >> model.y_norm.y_max >> c;
        model.y_norm.constant = c != 0;
    }
    expect("final_mse") >> model.final_mse;
    expect("final_order_acc") >> model.final_order_acc;
    model.network = load_network(in);
    return model;
}

void write_history_csv(const TrainedSurrogate& model, std::ostream& out) {
    out << "epoch,phase,mse,oc,lambda,order_acc\n";
    out.precision(17);
    for (const auto& s : model.history)
        out << s.epoch << "," << s.phase << "," << s.mse << "," << s.oc << "," << s.lambda << ","
            << s.order_acc << "\n";
}

}  // namespace surrde
