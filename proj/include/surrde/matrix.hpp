#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace surrde {

class Rng;

// Dense row-major matrix of doubles. Deliberately minimal; the numeric
// kernels in this project are hand-rolled loops.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

// y = M x
std::vector<double> matvec(const Matrix& m, std::span<const double> x);
// y = M^T x
std::vector<double> matvec_transposed(const Matrix& m, std::span<const double> x);

Matrix transpose(const Matrix& m);

// Haar-uniform random orthogonal matrix: QR decomposition (Householder) of a
// Gaussian matrix with the sign of R's diagonal folded into Q.
Matrix random_orthogonal(std::size_t dim, Rng& rng);

// max_ij |(M^T M - I)_ij|, used to check orthogonality.
double orthogonality_error(const Matrix& m);

}  // namespace surrde
