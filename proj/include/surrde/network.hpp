#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "surrde/spline.hpp"

namespace surrde {

class Rng;

enum class Arch { kan, mlp, rbf };

const std::string& arch_name(Arch a);
Arch arch_from_name(const std::string& name);

// Per-sample activation record filled by forward() and consumed by
// backward(). Layout is architecture-specific.
struct Tape {
    struct KanLayer {
        std::vector<double> input;       // in
        std::vector<double> basis;       // in * nb
        std::vector<double> dbasis;      // in * nb, zeroed where input clamped
        std::vector<double> silu_val;    // in
        std::vector<double> silu_der;    // in
        std::vector<double> spline_val;  // out * in
    };
    struct MlpLayer {
        std::vector<double> input;  // in
        std::vector<double> pre;    // out, pre-activation
    };
    struct Rbf {
        std::vector<double> input;   // dim
        std::vector<double> sqdist;  // centers
        std::vector<double> kernel;  // centers
    };
    std::vector<KanLayer> kan;
    std::vector<MlpLayer> mlp;
    Rbf rbf;
};

// A trainable feed-forward network with a flat parameter vector and manual
// forward/backward. One instance is mutated by exactly one trainer at a time;
// forward/backward are const and reentrant given separate tapes.
class Network {
public:
    virtual ~Network() = default;

    virtual Arch arch() const = 0;
    virtual int input_dim() const = 0;
    virtual int output_dim() const = 0;

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::size_t num_params() const { return params_.size(); }

    virtual void forward(std::span<const double> x, Tape& tape, std::span<double> y) const = 0;

    // Accumulates dL/dparams into grad (same length as params) given dL/dy.
    // When dx is non-empty, also writes dL/dx.
    virtual void backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                          std::span<double> dx = {}) const = 0;

    // Keeps parameter invariants after an optimizer step (e.g. RBF widths > 0).
    virtual void project_params() {}

    virtual std::unique_ptr<Network> clone() const = 0;

    // One-line architecture descriptor, first line of a checkpoint.
    virtual std::string descriptor() const = 0;

    double forward_scalar(std::span<const double> x) const;

protected:
    std::vector<double> params_;
};

// KAN: every edge is w_b * silu(x) + w_s * sum_m c_m B_m(x) on a fixed
// uniform spline grid over [-1,1]; node values are plain sums of edges.
class KanNetwork final : public Network {
public:
    KanNetwork(std::vector<int> dims, int grid_intervals, int spline_degree, Rng& rng);

    Arch arch() const override { return Arch::kan; }
    int input_dim() const override { return dims_.front(); }
    int output_dim() const override { return dims_.back(); }
    void forward(std::span<const double> x, Tape& tape, std::span<double> y) const override;
    void backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                  std::span<double> dx = {}) const override;
    std::unique_ptr<Network> clone() const override;
    std::string descriptor() const override;

    const SplineGrid& grid() const { return grid_; }
    const std::vector<int>& dims() const { return dims_; }

    // Offsets of the coeff / w_b / w_s blocks of one layer in the flat vector.
    struct LayerView {
        std::size_t coeff;
        std::size_t w_b;
        std::size_t w_s;
        int in, out;
    };
    LayerView layer_view(std::size_t layer) const;
    std::size_t num_layers() const { return dims_.size() - 1; }

private:
    std::vector<int> dims_;
    SplineGrid grid_;
};

// Plain MLP, ReLU on hidden layers, linear output.
class MlpNetwork final : public Network {
public:
    MlpNetwork(std::vector<int> dims, Rng& rng);

    Arch arch() const override { return Arch::mlp; }
    int input_dim() const override { return dims_.front(); }
    int output_dim() const override { return dims_.back(); }
    void forward(std::span<const double> x, Tape& tape, std::span<double> y) const override;
    void backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                  std::span<double> dx = {}) const override;
    std::unique_ptr<Network> clone() const override;
    std::string descriptor() const override;

    const std::vector<int>& dims() const { return dims_; }

    struct LayerView {
        std::size_t weights;
        std::size_t bias;
        int in, out;
    };
    LayerView layer_view(std::size_t layer) const;
    std::size_t num_layers() const { return dims_.size() - 1; }

private:
    std::vector<int> dims_;
};

// Gaussian RBF with trainable centers, per-center widths, output weights and
// bias. Scalar output.
class RbfNetwork final : public Network {
public:
    RbfNetwork(int dim, int centers, Rng& rng);

    Arch arch() const override { return Arch::rbf; }
    int input_dim() const override { return dim_; }
    int output_dim() const override { return 1; }
    void forward(std::span<const double> x, Tape& tape, std::span<double> y) const override;
    void backward(const Tape& tape, std::span<const double> dy, std::span<double> grad,
                  std::span<double> dx = {}) const override;
    void project_params() override;
    std::unique_ptr<Network> clone() const override;
    std::string descriptor() const override;

    int num_centers() const { return centers_; }
    std::span<double> center(int c) { return {params_.data() + static_cast<std::size_t>(c) * dim_, static_cast<std::size_t>(dim_)}; }
    std::span<double> widths();
    std::span<double> weights();
    double& bias();

    // Centers = a random subset of rows of xs (n x dim, already in the net's
    // input scale); widths = median nearest-center distance.
    void init_from_data(std::span<const double> xs, std::size_t n, Rng& rng);

private:
    int dim_;
    int centers_;
};

double silu(double x);
double silu_derivative(double x);

struct AdamState {
    std::vector<double> m, v;
    std::int64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t n = 0) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               double lr);

void sgd_step(std::span<double> params, std::span<const double> grad, double lr);

// Checkpointing: version line, architecture descriptor, then the flat
// parameter vector in hexfloat (exact round trip).
void save_network(const Network& net, std::ostream& out);
std::unique_ptr<Network> load_network(std::istream& in);

}  // namespace surrde
