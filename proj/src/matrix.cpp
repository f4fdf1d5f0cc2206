#include "surrde/matrix.hpp"

#include <cmath>
#include <stdexcept>

#include "surrde/rng.hpp"

namespace surrde {

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
    if (x.size() != m.cols) throw std::invalid_argument("matvec: dimension mismatch");
    std::vector<double> y(m.rows, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        double acc = 0.0;
        const double* row = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

std::vector<double> matvec_transposed(const Matrix& m, std::span<const double> x) {
    if (x.size() != m.rows) throw std::invalid_argument("matvec_transposed: dimension mismatch");
    std::vector<double> y(m.cols, 0.0);
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double* row = m.data.data() + i * m.cols;
        for (std::size_t j = 0; j < m.cols; ++j) y[j] += row[j] * x[i];
    }
    return y;
}

Matrix transpose(const Matrix& m) {
    Matrix t(m.cols, m.rows);
    for (std::size_t i = 0; i < m.rows; ++i)
        for (std::size_t j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
    return t;
}

Matrix random_orthogonal(std::size_t dim, Rng& rng) {
    const std::size_t n = dim;
    Matrix a(n, n);
    for (double& v : a.data) v = rng.normal();

    // Householder QR in place; Q accumulated explicitly.
    Matrix q(n, n);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;

    std::vector<double> v(n);
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += a(i, k) * a(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = a(k, k) >= 0.0 ? -norm : norm;
        double vnorm2 = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            v[i] = a(i, k);
            if (i == k) v[i] -= alpha;
            vnorm2 += v[i] * v[i];
        }
        if (vnorm2 == 0.0) continue;
        // A <- (I - 2 v v^T / v^T v) A, same for Q columns.
        for (std::size_t j = k; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * a(i, j);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) a(i, j) -= f * v[i];
        }
        for (std::size_t j = 0; j < n; ++j) {
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += v[i] * q(j, i);
            const double f = 2.0 * dot / vnorm2;
            for (std::size_t i = k; i < n; ++i) q(j, i) -= f * v[i];
        }
    }

    // Fold sign(diag(R)) into Q so the distribution is Haar-uniform.
    for (std::size_t j = 0; j < n; ++j) {
        if (a(j, j) < 0.0)
            for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
    return q;
}

double orthogonality_error(const Matrix& m) {
    double worst = 0.0;
    for (std::size_t i = 0; i < m.cols; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            double dot = 0.0;
            for (std::size_t k = 0; k < m.rows; ++k) dot += m(k, i) * m(k, j);
            const double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot - target));
        }
    }
    return worst;
}

}  // namespace surrde
