// Times the OpenMP kernels against their serial references.
//
// Usage: bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "surrde/kernels.hpp"
#include "surrde/parallel.hpp"
#include "surrde/rng.hpp"

using namespace surrde;
using clock_type = std::chrono::steady_clock;

namespace {

template <typename Fn>
double time_ms(Fn&& fn, int repeats) {
    fn();  // warm up
    const auto t0 = clock_type::now();
    for (int r = 0; r < repeats; ++r) fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %10.3f ms   parallel %10.3f ms   speedup %5.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    const int threads = argc > 1 ? std::atoi(argv[1]) : 4;
    set_num_threads(threads);
    std::printf("openmp %s, %d worker thread(s)\n", openmp_enabled() ? "enabled" : "disabled",
                threads);

    Rng rng(42);

    {
        bbob::ProblemSpec spec;
        spec.function = bbob::FunctionId::gallagher_101peaks;
        spec.dim = 10;
        bbob::Problem a(spec), b(spec);
        Matrix xs(20000, 10);
        for (double& v : xs.data) v = rng.uniform(-5.0, 5.0);
        const double ser = time_ms([&] { kernels::batch_evaluate_serial(a, xs); }, 5);
        const double par = time_ms([&] { kernels::batch_evaluate(b, xs); }, 5);
        report("batch_evaluate (gallagher)", ser, par);
    }

    {
        Rng net_rng(1);
        KanNetwork net({10, 10, 1}, 5, 5, net_rng);
        Matrix xs(5000, 10);
        for (double& v : xs.data) v = rng.uniform(-1.0, 1.0);
        Matrix out(xs.rows, 1);
        const double ser = time_ms([&] { kernels::batch_forward_serial(net, xs, out); }, 5);
        const double par = time_ms([&] { kernels::batch_forward(net, xs, out); }, 5);
        report("batch_forward (kan 10-10-1)", ser, par);
    }

    {
        Rng net_rng(2);
        KanNetwork net({10, 10, 1}, 5, 5, net_rng);
        Matrix xs(2000, 10);
        for (double& v : xs.data) v = rng.uniform(-1.0, 1.0);
        Matrix dy(xs.rows, 1);
        for (double& v : dy.data) v = rng.uniform(-1.0, 1.0);
        std::vector<double> grad(net.num_params());
        const double ser = time_ms(
            [&] {
                std::fill(grad.begin(), grad.end(), 0.0);
                kernels::accumulate_gradients_serial(net, xs, dy, grad);
            },
            5);
        const double par = time_ms(
            [&] {
                std::fill(grad.begin(), grad.end(), 0.0);
                kernels::accumulate_gradients(net, xs, dy, grad);
            },
            5);
        report("accumulate_gradients (kan)", ser, par);
    }

    {
        Matrix xs(2000, 10);
        for (double& v : xs.data) v = rng.uniform(-5.0, 5.0);
        const double ser = time_ms([&] { kernels::mean_pairwise_distance_serial(xs); }, 3);
        const double par = time_ms([&] { kernels::mean_pairwise_distance(xs); }, 3);
        report("mean_pairwise_distance", ser, par);
    }

    {
        std::vector<double> t(20000), p(20000);
        for (auto& v : t) v = rng.uniform(0.0, 1.0);
        for (auto& v : p) v = rng.uniform(0.0, 1.0);
        const double ser = time_ms([&] { kernels::count_concordant_pairs_serial(t, p); }, 3);
        const double par = time_ms([&] { kernels::count_concordant_pairs(t, p); }, 3);
        report("count_concordant_pairs", ser, par);
    }

    return 0;
}
