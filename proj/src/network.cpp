#include "surrde/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "surrde/rng.hpp"

namespace surrde {

namespace {
const std::string kArchNames[] = {"kan", "mlp", "rbf"};
}

const std::string& arch_name(Arch a) { return kArchNames[static_cast<int>(a)]; }

Arch arch_from_name(const std::string& name) {
    for (int i = 0; i < 3; ++i)
        if (kArchNames[i] == name) return static_cast<Arch>(i);
    throw std::invalid_argument("unknown architecture: " + name);
}

double silu(double x) { return x / (1.0 + std::exp(-x)); }

double silu_derivative(double x) {
    const double s = 1.0 / (1.0 + std::exp(-x));
    return s * (1.0 + x * (1.0 - s));
}

double Network::forward_scalar(std::span<const double> x) const {
    if (output_dim() != 1) throw std::logic_error("forward_scalar on multi-output network");
    Tape tape;
    double y = 0.0;
    forward(x, tape, {&y, 1});
    return y;
}

// ---------------------------------------------------------------------------
// KAN

KanNetwork::KanNetwork(std::vector<int> dims, int grid_intervals, int spline_degree, Rng& rng)
    : dims_(std::move(dims)), grid_(SplineGrid::uniform(grid_intervals, spline_degree)) {
    if (dims_.size() < 2) throw std::invalid_argument("KanNetwork: need at least two dims");
    for (int d : dims_)
        if (d < 1) throw std::invalid_argument("KanNetwork: bad layer dim");

    const int nb = grid_.num_basis();
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const std::size_t edges =
            static_cast<std::size_t>(dims_[l]) * static_cast<std::size_t>(dims_[l + 1]);
        total += edges * static_cast<std::size_t>(nb) + 2 * edges;
    }
    params_.assign(total, 0.0);

    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const auto view = layer_view(l);
        const std::size_t edges = static_cast<std::size_t>(view.in) * view.out;
        for (std::size_t e = 0; e < edges * static_cast<std::size_t>(nb); ++e)
            params_[view.coeff + e] = rng.normal(0.0, 0.1);
        for (std::size_t e = 0; e < edges; ++e) {
            params_[view.w_b + e] = 1.0;
            params_[view.w_s + e] = 1.0;
        }
    }
}

KanNetwork::LayerView KanNetwork::layer_view(std::size_t layer) const {
    const int nb = grid_.num_basis();
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l) {
        const std::size_t edges =
            static_cast<std::size_t>(dims_[l]) * static_cast<std::size_t>(dims_[l + 1]);
        offset += edges * static_cast<std::size_t>(nb) + 2 * edges;
    }
    LayerView view;
    view.in = dims_[layer];
    view.out = dims_[layer + 1];
    const std::size_t edges = static_cast<std::size_t>(view.in) * view.out;
    view.coeff = offset;
    view.w_b = offset + edges * static_cast<std::size_t>(nb);
    view.w_s = view.w_b + edges;
    return view;
}

void KanNetwork::forward(std::span<const double> x, Tape& tape, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(dims_.front()) ||
        y.size() != static_cast<std::size_t>(dims_.back()))
        throw std::invalid_argument("KanNetwork::forward: dimension mismatch");

    const int nb = grid_.num_basis();
    tape.kan.resize(num_layers());
    std::vector<double> cur(x.begin(), x.end());

    for (std::size_t l = 0; l < num_layers(); ++l) {
        const auto view = layer_view(l);
        auto& rec = tape.kan[l];
        const std::size_t in = static_cast<std::size_t>(view.in);
        const std::size_t out = static_cast<std::size_t>(view.out);
        rec.input = cur;
        rec.basis.assign(in * static_cast<std::size_t>(nb), 0.0);
        rec.dbasis.assign(in * static_cast<std::size_t>(nb), 0.0);
        rec.silu_val.resize(in);
        rec.silu_der.resize(in);
        rec.spline_val.assign(out * in, 0.0);

        for (std::size_t i = 0; i < in; ++i) {
            grid_.basis_and_derivative(cur[i],
                                       {rec.basis.data() + i * nb, static_cast<std::size_t>(nb)},
                                       {rec.dbasis.data() + i * nb, static_cast<std::size_t>(nb)});
            rec.silu_val[i] = silu(cur[i]);
            rec.silu_der[i] = silu_derivative(cur[i]);
        }

        std::vector<double> next(out, 0.0);
        for (std::size_t j = 0; j < out; ++j) {
            double h = 0.0;
            for (std::size_t i = 0; i < in; ++i) {
                const std::size_t edge = j * in + i;
                const double* c = params_.data() + view.coeff + edge * static_cast<std::size_t>(nb);
                const double* b = rec.basis.data() + i * static_cast<std::size_t>(nb);
                double spl = 0.0;
                for (int m = 0; m < nb; ++m) spl += c[m] * b[m];
                rec.spline_val[edge] = spl;
                h += params_[view.w_b + edge] * rec.silu_val[i] +
                     params_[view.w_s + edge] * spl;
            }
            next[j] = h;
        }
        cur = std::move(next);
    }
    std::copy(cur.begin(), cur.end(), y.begin());
}

void KanNetwork::backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                          std::span<double> dx) const {
    if (tape.kan.size() != num_layers()) throw std::invalid_argument("KanNetwork::backward: stale tape");
    if (grad.size() != params_.size()) throw std::invalid_argument("KanNetwork::backward: bad grad size");

    const int nb = grid_.num_basis();
    std::vector<double> delta(dy.begin(), dy.end());

    for (std::size_t l = num_layers(); l-- > 0;) {
        const auto view = layer_view(l);
        const auto& rec = tape.kan[l];
        const std::size_t in = static_cast<std::size_t>(view.in);
        const std::size_t out = static_cast<std::size_t>(view.out);
        std::vector<double> delta_in(in, 0.0);

        for (std::size_t i = 0; i < in; ++i) {
            const double* b = rec.basis.data() + i * static_cast<std::size_t>(nb);
            const double* db = rec.dbasis.data() + i * static_cast<std::size_t>(nb);
            double acc_spline_dx = 0.0;  // sum_j dh_j w_s c . dB
            double acc_silu = 0.0;       // sum_j dh_j w_b
            for (std::size_t j = 0; j < out; ++j) {
                const std::size_t edge = j * in + i;
                const double dh = delta[j];
                if (dh == 0.0) continue;
                const double* c = params_.data() + view.coeff + edge * static_cast<std::size_t>(nb);
                double* gc = grad.data() + view.coeff + edge * static_cast<std::size_t>(nb);
                const double ws = params_[view.w_s + edge];
                const double dh_ws = dh * ws;
                double cdb = 0.0;
                for (int m = 0; m < nb; ++m) {
                    gc[m] += dh_ws * b[m];
                    cdb += c[m] * db[m];
                }
                grad[view.w_b + edge] += dh * rec.silu_val[i];
                grad[view.w_s + edge] += dh * rec.spline_val[edge];
                acc_spline_dx += dh_ws * cdb;
                acc_silu += dh * params_[view.w_b + edge];
            }
            delta_in[i] = acc_silu * rec.silu_der[i] + acc_spline_dx;
        }
        delta = std::move(delta_in);
    }
    if (!dx.empty()) {
        if (dx.size() != delta.size()) throw std::invalid_argument("KanNetwork::backward: bad dx size");
        std::copy(delta.begin(), delta.end(), dx.begin());
    }
}

std::unique_ptr<Network> KanNetwork::clone() const { return std::make_unique<KanNetwork>(*this); }

std::string KanNetwork::descriptor() const {
    std::ostringstream os;
    os << "kan dims";
    for (int d : dims_) os << " " << d;
    os << " grid " << grid_.intervals << " " << grid_.degree;
    return os.str();
}

// ---------------------------------------------------------------------------
// MLP

MlpNetwork::MlpNetwork(std::vector<int> dims, Rng& rng) : dims_(std::move(dims)) {
    if (dims_.size() < 2) throw std::invalid_argument("MlpNetwork: need at least two dims");
    for (int d : dims_)
        if (d < 1) throw std::invalid_argument("MlpNetwork: bad layer dim");

    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < dims_.size(); ++l)
        total += static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + static_cast<std::size_t>(dims_[l + 1]);
    params_.assign(total, 0.0);

    for (std::size_t l = 0; l + 1 < dims_.size(); ++l) {
        const auto view = layer_view(l);
        const double scale = std::sqrt(2.0 / static_cast<double>(view.in));
        const std::size_t n_w = static_cast<std::size_t>(view.in) * view.out;
        for (std::size_t w = 0; w < n_w; ++w) params_[view.weights + w] = rng.normal(0.0, scale);
    }
}

MlpNetwork::LayerView MlpNetwork::layer_view(std::size_t layer) const {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < layer; ++l)
        offset += static_cast<std::size_t>(dims_[l]) * dims_[l + 1] + static_cast<std::size_t>(dims_[l + 1]);
    LayerView view;
    view.in = dims_[layer];
    view.out = dims_[layer + 1];
    view.weights = offset;
    view.bias = offset + static_cast<std::size_t>(view.in) * view.out;
    return view;
}

void MlpNetwork::forward(std::span<const double> x, Tape& tape, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(dims_.front()) ||
        y.size() != static_cast<std::size_t>(dims_.back()))
        throw std::invalid_argument("MlpNetwork::forward: dimension mismatch");

    tape.mlp.resize(num_layers());
    std::vector<double> cur(x.begin(), x.end());
    for (std::size_t l = 0; l < num_layers(); ++l) {
        const auto view = layer_view(l);
        auto& rec = tape.mlp[l];
        rec.input = cur;
        rec.pre.assign(static_cast<std::size_t>(view.out), 0.0);
        for (int j = 0; j < view.out; ++j) {
            const double* w = params_.data() + view.weights + static_cast<std::size_t>(j) * view.in;
            double z = params_[view.bias + static_cast<std::size_t>(j)];
            for (int i = 0; i < view.in; ++i) z += w[i] * cur[static_cast<std::size_t>(i)];
            rec.pre[static_cast<std::size_t>(j)] = z;
        }
        const bool last = l + 1 == num_layers();
        cur.resize(static_cast<std::size_t>(view.out));
        for (int j = 0; j < view.out; ++j) {
            const double z = rec.pre[static_cast<std::size_t>(j)];
            cur[static_cast<std::size_t>(j)] = last ? z : (z > 0.0 ? z : 0.0);
        }
    }
    std::copy(cur.begin(), cur.end(), y.begin());
}

void MlpNetwork::backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                          std::span<double> dx) const {
    if (tape.mlp.size() != num_layers()) throw std::invalid_argument("MlpNetwork::backward: stale tape");
    if (grad.size() != params_.size()) throw std::invalid_argument("MlpNetwork::backward: bad grad size");

    std::vector<double> delta(dy.begin(), dy.end());
    for (std::size_t l = num_layers(); l-- > 0;) {
        const auto view = layer_view(l);
        const auto& rec = tape.mlp[l];
        const bool last = l + 1 == num_layers();
        // through the activation
        if (!last) {
            for (int j = 0; j < view.out; ++j)
                if (rec.pre[static_cast<std::size_t>(j)] <= 0.0) delta[static_cast<std::size_t>(j)] = 0.0;
        }
        std::vector<double> delta_in(static_cast<std::size_t>(view.in), 0.0);
        for (int j = 0; j < view.out; ++j) {
            const double dz = delta[static_cast<std::size_t>(j)];
            grad[view.bias + static_cast<std::size_t>(j)] += dz;
            if (dz == 0.0) continue;
            const std::size_t w_off = view.weights + static_cast<std::size_t>(j) * view.in;
            for (int i = 0; i < view.in; ++i) {
                grad[w_off + static_cast<std::size_t>(i)] += dz * rec.input[static_cast<std::size_t>(i)];
                delta_in[static_cast<std::size_t>(i)] += dz * params_[w_off + static_cast<std::size_t>(i)];
            }
        }
        delta = std::move(delta_in);
    }
    if (!dx.empty()) {
        if (dx.size() != delta.size()) throw std::invalid_argument("MlpNetwork::backward: bad dx size");
        std::copy(delta.begin(), delta.end(), dx.begin());
    }
}

std::unique_ptr<Network> MlpNetwork::clone() const { return std::make_unique<MlpNetwork>(*this); }

std::string MlpNetwork::descriptor() const {
    std::ostringstream os;
    os << "mlp dims";
    for (int d : dims_) os << " " << d;
    return os.str();
}

// ---------------------------------------------------------------------------
// RBF

RbfNetwork::RbfNetwork(int dim, int centers, Rng& rng) : dim_(dim), centers_(centers) {
    if (dim < 1 || centers < 1) throw std::invalid_argument("RbfNetwork: bad shape");
    const std::size_t n = static_cast<std::size_t>(centers) * dim_ + 2 * static_cast<std::size_t>(centers) + 1;
    params_.assign(n, 0.0);
    for (int c = 0; c < centers_; ++c) {
        for (int d = 0; d < dim_; ++d)
            params_[static_cast<std::size_t>(c) * dim_ + static_cast<std::size_t>(d)] = rng.uniform(-1.0, 1.0);
    }
    auto w = widths();
    for (double& v : w) v = 1.0;
    auto wt = weights();
    for (double& v : wt) v = rng.normal(0.0, 0.1);
}

std::span<double> RbfNetwork::widths() {
    return {params_.data() + static_cast<std::size_t>(centers_) * dim_, static_cast<std::size_t>(centers_)};
}

std::span<double> RbfNetwork::weights() {
    return {params_.data() + static_cast<std::size_t>(centers_) * dim_ + centers_,
            static_cast<std::size_t>(centers_)};
}

double& RbfNetwork::bias() { return params_.back(); }

void RbfNetwork::init_from_data(std::span<const double> xs, std::size_t n, Rng& rng) {
    if (n < static_cast<std::size_t>(centers_))
        throw std::invalid_argument("RbfNetwork::init_from_data: fewer samples than centers");
    auto perm = rng.permutation(n);
    for (int c = 0; c < centers_; ++c) {
        const double* row = xs.data() + perm[static_cast<std::size_t>(c)] * dim_;
        std::copy_n(row, dim_, params_.data() + static_cast<std::size_t>(c) * dim_);
    }
    // width = median nearest-center distance
    std::vector<double> nearest(static_cast<std::size_t>(centers_), 0.0);
    for (int c = 0; c < centers_; ++c) {
        double best = 0.0;
        bool first = true;
        for (int o = 0; o < centers_; ++o) {
            if (o == c) continue;
            double d2 = 0.0;
            for (int d = 0; d < dim_; ++d) {
                const double diff = params_[static_cast<std::size_t>(c) * dim_ + d] -
                                    params_[static_cast<std::size_t>(o) * dim_ + d];
                d2 += diff * diff;
            }
            if (first || d2 < best) {
                best = d2;
                first = false;
            }
        }
        nearest[static_cast<std::size_t>(c)] = std::sqrt(best);
    }
    std::vector<double> sorted = nearest;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[sorted.size() / 2];
    if (median <= 0.0) median = 1.0;
    auto w = widths();
    for (double& v : w) v = median;
}

void RbfNetwork::forward(std::span<const double> x, Tape& tape, std::span<double> y) const {
    if (x.size() != static_cast<std::size_t>(dim_) || y.size() != 1)
        throw std::invalid_argument("RbfNetwork::forward: dimension mismatch");
    auto& rec = tape.rbf;
    rec.input.assign(x.begin(), x.end());
    rec.sqdist.resize(static_cast<std::size_t>(centers_));
    rec.kernel.resize(static_cast<std::size_t>(centers_));

    const double* widths = params_.data() + static_cast<std::size_t>(centers_) * dim_;
    const double* weights = widths + centers_;
    double out = params_.back();
    for (int c = 0; c < centers_; ++c) {
        const double* center = params_.data() + static_cast<std::size_t>(c) * dim_;
        double d2 = 0.0;
        for (int d = 0; d < dim_; ++d) {
            const double diff = x[static_cast<std::size_t>(d)] - center[d];
            d2 += diff * diff;
        }
        const double s = widths[c];
        const double k = std::exp(-d2 / (2.0 * s * s));
        rec.sqdist[static_cast<std::size_t>(c)] = d2;
        rec.kernel[static_cast<std::size_t>(c)] = k;
        out += weights[c] * k;
    }
    y[0] = out;
}

void RbfNetwork::backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                          std::span<double> dx) const {
    const auto& rec = tape.rbf;
    if (rec.kernel.size() != static_cast<std::size_t>(centers_))
        throw std::invalid_argument("RbfNetwork::backward: stale tape");
    if (grad.size() != params_.size()) throw std::invalid_argument("RbfNetwork::backward: bad grad size");

    const double g = dy[0];
    const double* widths = params_.data() + static_cast<std::size_t>(centers_) * dim_;
    const double* weights = widths + centers_;
    const std::size_t widths_off = static_cast<std::size_t>(centers_) * dim_;
    const std::size_t weights_off = widths_off + static_cast<std::size_t>(centers_);

    if (!dx.empty()) std::fill(dx.begin(), dx.end(), 0.0);
    grad[params_.size() - 1] += g;  // bias
    for (int c = 0; c < centers_; ++c) {
        const double k = rec.kernel[static_cast<std::size_t>(c)];
        const double s = widths[c];
        grad[weights_off + static_cast<std::size_t>(c)] += g * k;
        const double common = g * weights[c] * k;
        const double inv_s2 = 1.0 / (s * s);
        const double* center = params_.data() + static_cast<std::size_t>(c) * dim_;
        for (int d = 0; d < dim_; ++d) {
            const double diff = rec.input[static_cast<std::size_t>(d)] - center[d];
            const double dcenter = common * diff * inv_s2;
            grad[static_cast<std::size_t>(c) * dim_ + static_cast<std::size_t>(d)] += dcenter;
            if (!dx.empty()) dx[static_cast<std::size_t>(d)] -= dcenter;
        }
        grad[widths_off + static_cast<std::size_t>(c)] +=
            common * rec.sqdist[static_cast<std::size_t>(c)] / (s * s * s);
    }
}

void RbfNetwork::project_params() {
    auto w = widths();
    for (double& v : w) v = std::max(v, 1e-6);
}

std::unique_ptr<Network> RbfNetwork::clone() const { return std::make_unique<RbfNetwork>(*this); }

std::string RbfNetwork::descriptor() const {
    std::ostringstream os;
    os << "rbf dim " << dim_ << " centers " << centers_;
    return os.str();
}

// ---------------------------------------------------------------------------
// Optimizers

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               double lr) {
    if (params.size() != grad.size()) throw std::invalid_argument("adam_step: size mismatch");
    if (state.m.size() != params.size()) throw std::invalid_argument("adam_step: stale state");
    state.step += 1;
    const double b1 = state.beta1, b2 = state.beta2;
    const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = state.m[i] / bias1;
        const double vhat = state.v[i] / bias2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

void sgd_step(std::span<double> params, std::span<const double> grad, double lr) {
    if (params.size() != grad.size()) throw std::invalid_argument("sgd_step: size mismatch");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_network(const Network& net, std::ostream& out) {
    out << "surrde-network v1\n";
    out << net.descriptor() << "\n";
    out << "params " << net.num_params() << "\n";
    char buf[40];
    for (double v : net.params()) {
        std::snprintf(buf, sizeof buf, "%a", v);
        out << buf << "\n";
    }
}

std::unique_ptr<Network> load_network(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "surrde-network v1")
        throw std::runtime_error("bad network checkpoint header");
    if (!std::getline(in, line)) throw std::runtime_error("missing architecture descriptor");

    std::istringstream desc(line);
    std::string arch;
    desc >> arch;
    Rng rng(0);  // placeholder init, parameters are overwritten below
    std::unique_ptr<Network> net;
    if (arch == "kan") {
        std::string tok;
        desc >> tok;  // "dims"
        std::vector<int> dims;
        while (desc >> tok) {
            if (tok == "grid") break;
            dims.push_back(std::stoi(tok));
        }
        int g, k;
        desc >> g >> k;
        net = std::make_unique<KanNetwork>(dims, g, k, rng);
    } else if (arch == "mlp") {
        std::string tok;
        desc >> tok;
        std::vector<int> dims;
        int v;
        while (desc >> v) dims.push_back(v);
        net = std::make_unique<MlpNetwork>(dims, rng);
    } else if (arch == "rbf") {
        std::string tok;
        int dim, centers;
        desc >> tok >> dim >> tok >> centers;
        net = std::make_unique<RbfNetwork>(dim, centers, rng);
    } else {
        throw std::runtime_error("unknown architecture in checkpoint: " + arch);
    }

    if (!std::getline(in, line) || line.rfind("params ", 0) != 0)
        throw std::runtime_error("missing params header");
    const std::size_t count = std::stoul(line.substr(7));
    if (count != net->num_params()) throw std::runtime_error("checkpoint parameter count mismatch");
    auto params = net->params();
    for (std::size_t i = 0; i < count; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated checkpoint");
        params[i] = std::strtod(line.c_str(), nullptr);
    }
    return net;
}

}  // namespace surrde
