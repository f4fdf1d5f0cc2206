#include <doctest.h>

#include <cmath>

#include "surrde/kernels.hpp"
#include "surrde/parallel.hpp"
#include "surrde/rng.hpp"

using namespace surrde;

namespace {

Matrix random_points(std::size_t n, std::size_t dim, Rng& rng, double lo = -5.0, double hi = 5.0) {
    Matrix xs(n, dim);
    for (double& v : xs.data) v = rng.uniform(lo, hi);
    return xs;
}

}  // namespace

TEST_CASE("batch_evaluate matches the serial reference exactly") {
    bbob::ProblemSpec spec;
    spec.function = bbob::FunctionId::rastrigin;
    spec.dim = 4;
    bbob::Problem a(spec), b(spec);
    Rng rng(1);
    const auto xs = random_points(333, 4, rng);

    const auto par = kernels::batch_evaluate(a, xs);
    const auto ser = kernels::batch_evaluate_serial(b, xs);
    CHECK(par == ser);
    CHECK(a.counter().consumed == 333);
    CHECK(b.counter().consumed == 333);
}

TEST_CASE("batch_forward matches the serial reference exactly") {
    Rng rng(2);
    KanNetwork net({3, 5, 1}, 5, 5, rng);
    const auto xs = random_points(257, 3, rng, -1.0, 1.0);

    Matrix par(xs.rows, 1), ser(xs.rows, 1);
    kernels::batch_forward(net, xs, par);
    kernels::batch_forward_serial(net, xs, ser);
    CHECK(par.data == ser.data);
}

TEST_CASE("blocked gradient accumulation matches the serial reference") {
    Rng rng(3);
    MlpNetwork net({4, 16, 2}, rng);
    const std::size_t n = 3 * kReduceBlock + 7;  // exercises a partial tail block
    const auto xs = random_points(n, 4, rng, -1.0, 1.0);
    Matrix dy(n, 2);
    for (double& v : dy.data) v = rng.uniform(-1.0, 1.0);

    std::vector<double> par(net.num_params(), 0.0), ser(net.num_params(), 0.0);
    kernels::accumulate_gradients(net, xs, dy, par);
    kernels::accumulate_gradients_serial(net, xs, dy, ser);

    double scale = 1e-6;
    for (double g : ser) scale = std::max(scale, std::abs(g));
    for (std::size_t i = 0; i < par.size(); ++i)
        CHECK(std::abs(par[i] - ser[i]) <= 1e-12 * scale);
}

TEST_CASE("blocked gradient accumulation is invariant to the thread count") {
    Rng rng(4);
    MlpNetwork net({4, 8, 1}, rng);
    const auto xs = random_points(200, 4, rng, -1.0, 1.0);
    Matrix dy(200, 1);
    for (double& v : dy.data) v = rng.uniform(-1.0, 1.0);

    const int saved = num_threads();
    std::vector<double> one(net.num_params(), 0.0), many(net.num_params(), 0.0);
    set_num_threads(1);
    kernels::accumulate_gradients(net, xs, dy, one);
    set_num_threads(4);
    kernels::accumulate_gradients(net, xs, dy, many);
    set_num_threads(saved);
    CHECK(one == many);
}

TEST_CASE("mean pairwise distance matches the serial reference exactly") {
    Rng rng(5);
    const auto xs = random_points(150, 6, rng);
    CHECK(kernels::mean_pairwise_distance(xs) == kernels::mean_pairwise_distance_serial(xs));

    SUBCASE("degenerate sizes") {
        const Matrix empty(0, 6);
        CHECK(kernels::mean_pairwise_distance(empty) == 0.0);
        const Matrix single(1, 6);
        CHECK(kernels::mean_pairwise_distance(single) == 0.0);
    }
    SUBCASE("two points give their distance") {
        Matrix two(2, 1);
        two(0, 0) = 1.0;
        two(1, 0) = 4.0;
        CHECK(kernels::mean_pairwise_distance(two) == 3.0);
    }
}

TEST_CASE("pair counting matches the serial reference exactly") {
    Rng rng(6);
    std::vector<double> t(300), p(300);
    for (auto& v : t) v = rng.uniform(0.0, 10.0);
    for (auto& v : p) v = rng.uniform(0.0, 10.0);
    const auto a = kernels::count_concordant_pairs(t, p);
    const auto b = kernels::count_concordant_pairs_serial(t, p);
    CHECK(a.concordant == b.concordant);
    CHECK(a.valid == b.valid);
    CHECK(a.valid == 300 * 299 / 2);
}

TEST_CASE("pair counting skips ties in the truth and counts prediction ties as discordant") {
    const std::vector<double> t{1.0, 1.0, 2.0};
    const std::vector<double> p{5.0, 6.0, 6.0};
    const auto counts = kernels::count_concordant_pairs(t, p);
    // pair (0,1): tied truth, skipped; (0,2): concordant; (1,2): tied prediction
    CHECK(counts.valid == 2);
    CHECK(counts.concordant == 1);
}
