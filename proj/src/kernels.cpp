#include "surrde/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "surrde/parallel.hpp"

namespace surrde::kernels {

namespace {

// ptrdiff loop indices keep MSVC-style signed OpenMP clauses happy and avoid
// sign-compare noise.
using Index = std::ptrdiff_t;

}  // namespace

// --- problem evaluation ----------------------------------------------------

std::vector<double> batch_evaluate_serial(bbob::Problem& problem, const Matrix& xs) {
    std::vector<double> ys(xs.rows, 0.0);
    for (std::size_t i = 0; i < xs.rows; ++i) ys[i] = problem.evaluate_uncounted(xs.row(i));
    problem.counter().charge(static_cast<std::int64_t>(xs.rows));
    return ys;
}

std::vector<double> batch_evaluate(bbob::Problem& problem, const Matrix& xs) {
    std::vector<double> ys(xs.rows, 0.0);
    const bbob::Problem& view = problem;
    const Index n = static_cast<Index>(xs.rows);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < n; ++i)
        ys[static_cast<std::size_t>(i)] = view.evaluate_uncounted(xs.row(static_cast<std::size_t>(i)));
    problem.counter().charge(static_cast<std::int64_t>(xs.rows));
    return ys;
}

// --- network forward/backward ----------------------------------------------

void batch_forward_serial(const Network& net, const Matrix& xs, Matrix& out) {
    if (out.rows != xs.rows || out.cols != static_cast<std::size_t>(net.output_dim()))
        throw std::invalid_argument("batch_forward: bad output shape");
    Tape tape;
    for (std::size_t i = 0; i < xs.rows; ++i) net.forward(xs.row(i), tape, out.row(i));
}

void batch_forward(const Network& net, const Matrix& xs, Matrix& out) {
    if (out.rows != xs.rows || out.cols != static_cast<std::size_t>(net.output_dim()))
        throw std::invalid_argument("batch_forward: bad output shape");
    const Index n = static_cast<Index>(xs.rows);
#pragma omp parallel
    {
        Tape tape;
#pragma omp for schedule(static)
        for (Index i = 0; i < n; ++i) {
            const std::size_t u = static_cast<std::size_t>(i);
            net.forward(xs.row(u), tape, out.row(u));
        }
    }
}

std::vector<double> batch_forward_scalar(const Network& net, const Matrix& xs) {
    Matrix out(xs.rows, 1);
    batch_forward(net, xs, out);
    return out.data;
}

void accumulate_gradients_serial(const Network& net, const Matrix& xs, const Matrix& dy,
                                 std::span<double> grad) {
    if (dy.rows != xs.rows || dy.cols != static_cast<std::size_t>(net.output_dim()))
        throw std::invalid_argument("accumulate_gradients: bad dy shape");
    if (grad.size() != net.num_params())
        throw std::invalid_argument("accumulate_gradients: bad grad size");
    Tape tape;
    std::vector<double> y(static_cast<std::size_t>(net.output_dim()));
    for (std::size_t i = 0; i < xs.rows; ++i) {
        net.forward(xs.row(i), tape, y);
        net.backward(tape, dy.row(i), grad);
    }
}

void accumulate_gradients(const Network& net, const Matrix& xs, const Matrix& dy,
                          std::span<double> grad) {
    if (dy.rows != xs.rows || dy.cols != static_cast<std::size_t>(net.output_dim()))
        throw std::invalid_argument("accumulate_gradients: bad dy shape");
    if (grad.size() != net.num_params())
        throw std::invalid_argument("accumulate_gradients: bad grad size");

    const std::size_t n = xs.rows;
    const std::size_t n_blocks = block_count(n);
    Matrix partial(n_blocks, net.num_params());

    const Index nb = static_cast<Index>(n_blocks);
#pragma omp parallel
    {
        Tape tape;
        std::vector<double> y(static_cast<std::size_t>(net.output_dim()));
#pragma omp for schedule(static)
        for (Index b = 0; b < nb; ++b) {
            const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
            const std::size_t hi = std::min(lo + kReduceBlock, n);
            auto slot = partial.row(static_cast<std::size_t>(b));
            for (std::size_t i = lo; i < hi; ++i) {
                net.forward(xs.row(i), tape, y);
                net.backward(tape, dy.row(i), slot);
            }
        }
    }
    for (std::size_t b = 0; b < n_blocks; ++b) {
        auto slot = partial.row(b);
        for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += slot[p];
    }
}

// --- population / pair statistics ------------------------------------------

namespace {

double row_distance(const Matrix& xs, std::size_t a, std::size_t b) {
    double d2 = 0.0;
    const double* ra = xs.data.data() + a * xs.cols;
    const double* rb = xs.data.data() + b * xs.cols;
    for (std::size_t j = 0; j < xs.cols; ++j) {
        const double diff = ra[j] - rb[j];
        d2 += diff * diff;
    }
    return std::sqrt(d2);
}

}  // namespace

double mean_pairwise_distance_serial(const Matrix& xs) {
    const std::size_t n = xs.rows;
    if (n < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double partial = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) partial += row_distance(xs, i, j);
        total += partial;
    }
    return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

double mean_pairwise_distance(const Matrix& xs) {
    const std::size_t n = xs.rows;
    if (n < 2) return 0.0;
    std::vector<double> partials(n, 0.0);
    const Index ni = static_cast<Index>(n);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < ni; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        double partial = 0.0;
        for (std::size_t j = u + 1; j < n; ++j) partial += row_distance(xs, u, j);
        partials[u] = partial;
    }
    double total = 0.0;
    for (double p : partials) total += p;
    return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

PairCounts count_concordant_pairs_serial(std::span<const double> y_true,
                                         std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("count_concordant_pairs: size mismatch");
    PairCounts counts;
    const std::size_t n = y_true.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dt = y_true[i] - y_true[j];
            if (dt == 0.0) continue;
            ++counts.valid;
            const double dp = y_pred[i] - y_pred[j];
            if (dt * dp > 0.0) ++counts.concordant;
        }
    }
    return counts;
}

PairCounts count_concordant_pairs(std::span<const double> y_true,
                                  std::span<const double> y_pred) {
    if (y_true.size() != y_pred.size())
        throw std::invalid_argument("count_concordant_pairs: size mismatch");
    const Index n = static_cast<Index>(y_true.size());
    std::int64_t concordant = 0, valid = 0;
#pragma omp parallel for schedule(static) reduction(+ : concordant, valid)
    for (Index i = 0; i < n; ++i) {
        const std::size_t u = static_cast<std::size_t>(i);
        for (std::size_t j = u + 1; j < y_true.size(); ++j) {
            const double dt = y_true[u] - y_true[j];
            if (dt == 0.0) continue;
            ++valid;
            const double dp = y_pred[u] - y_pred[j];
            if (dt * dp > 0.0) ++concordant;
        }
    }
    return PairCounts{concordant, valid};
}

}  // namespace surrde::kernels
