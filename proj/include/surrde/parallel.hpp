#pragma once

#include <cstddef>

namespace surrde {

// Global worker count used by the OpenMP kernels. 1 means fully serial.
void set_num_threads(int n);
int num_threads();

// True when compiled with OpenMP support.
bool openmp_enabled();

// The batched kernels split work into fixed-size blocks and reduce the
// per-block partials in block order, so floating-point results are
// bit-identical for any thread count.
inline constexpr std::size_t kReduceBlock = 64;

inline std::size_t block_count(std::size_t n, std::size_t block = kReduceBlock) {
    return (n + block - 1) / block;
}

}  // namespace surrde
