#include "surrde/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "surrde/kernels.hpp"
#include "surrde/rng.hpp"

namespace surrde {

std::vector<double> SampleSet::normalized_x(std::size_t i) const {
    std::vector<double> u(xs.cols);
    for (std::size_t j = 0; j < xs.cols; ++j) u[j] = x_norm.apply(xs(i, j));
    return u;
}

Matrix lhs_sample(int dim, std::size_t n, double lower, double upper, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("lhs_sample: dim must be >= 1");
    if (n < 1) throw std::invalid_argument("lhs_sample: n must be >= 1");
    if (!(lower < upper)) throw std::invalid_argument("lhs_sample: bad bounds");

    Rng rng(seed);
    Matrix xs(n, static_cast<std::size_t>(dim));
    const double width = (upper - lower) / static_cast<double>(n);
    for (std::size_t j = 0; j < static_cast<std::size_t>(dim); ++j) {
        auto strata = rng.permutation(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform();
            xs(i, j) = lower + (static_cast<double>(strata[i]) + u) * width;
        }
    }
    return xs;
}

SampleSet build_dataset(bbob::Problem& problem, std::size_t n, std::uint64_t seed,
                        double holdout_fraction) {
    if (n < 2) throw std::invalid_argument("build_dataset: need at least 2 samples");

    SampleSet set;
    set.seed = seed;
    set.x_norm = XNorm{problem.lower(), problem.upper()};
    set.xs = lhs_sample(problem.dim(), n, problem.lower(), problem.upper(),
                        split_seed(seed, 0x1fa));
    set.ys = kernels::batch_evaluate(problem, set.xs);

    auto [lo, hi] = std::minmax_element(set.ys.begin(), set.ys.end());
    if (*hi > *lo) {
        set.y_norm = YNorm{*lo, *hi, false};
    } else {
        set.y_norm = YNorm{0.0, 1.0, true};
    }

    auto order = Rng(split_seed(seed, 0x1fb)).permutation(n);
    const std::size_t n_holdout = static_cast<std::size_t>(std::floor(holdout_fraction * n));
    set.holdout_idx.assign(order.begin(), order.begin() + n_holdout);
    set.train_idx.assign(order.begin() + n_holdout, order.end());
    std::sort(set.holdout_idx.begin(), set.holdout_idx.end());
    std::sort(set.train_idx.begin(), set.train_idx.end());
    return set;
}

void save_sample_set(const SampleSet& set, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.precision(17);
    out << "# dim=" << set.dim() << " n=" << set.size() << " lower=" << set.x_norm.lower
        << " upper=" << set.x_norm.upper << " y_min=" << set.y_norm.y_min
        << " y_max=" << set.y_norm.y_max << " y_const=" << (set.y_norm.constant ? 1 : 0)
        << " seed=" << set.seed << "\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t j = 0; j < set.dim(); ++j) out << set.xs(i, j) << ",";
        out << set.ys[i] << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

SampleSet load_sample_set(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string header;
    std::getline(in, header);
    if (header.empty() || header[0] != '#') throw std::runtime_error("bad sample file header");

    auto field = [&](const std::string& key) {
        const auto pos = header.find(key + "=");
        if (pos == std::string::npos) throw std::runtime_error("missing header field: " + key);
        return header.substr(pos + key.size() + 1);
    };
    SampleSet set;
    const std::size_t dim = std::stoul(field("dim"));
    const std::size_t n = std::stoul(field("n"));
    set.x_norm.lower = std::stod(field("lower"));
    set.x_norm.upper = std::stod(field("upper"));
    set.y_norm.y_min = std::stod(field("y_min"));
    set.y_norm.y_max = std::stod(field("y_max"));
    set.y_norm.constant = std::stoi(field("y_const")) != 0;
    set.seed = std::stoull(field("seed"));

    set.xs = Matrix(n, dim);
    set.ys.assign(n, 0.0);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw std::runtime_error("truncated sample file");
        std::istringstream ls(line);
        std::string cell;
        for (std::size_t j = 0; j < dim; ++j) {
            if (!std::getline(ls, cell, ',')) throw std::runtime_error("bad sample row");
            set.xs(i, j) = std::stod(cell);
        }
        if (!std::getline(ls, cell)) throw std::runtime_error("bad sample row");
        set.ys[i] = std::stod(cell);
    }

    auto order = Rng(split_seed(set.seed, 0x1fb)).permutation(n);
    const std::size_t n_holdout = static_cast<std::size_t>(std::floor(0.1 * n));
    set.holdout_idx.assign(order.begin(), order.begin() + n_holdout);
    set.train_idx.assign(order.begin() + n_holdout, order.end());
    std::sort(set.holdout_idx.begin(), set.holdout_idx.end());
    std::sort(set.train_idx.begin(), set.train_idx.end());
    return set;
}

}  // namespace surrde
