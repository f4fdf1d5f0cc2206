#pragma once

// Independent scalar re-implementation of the 24 benchmark functions, written
// per-point from the published definitions. Used only as a test oracle; it
// shares no evaluation code with the library (Gallagher peak data, which is
// generated randomly per instance, is read back through accessors).

#include <cmath>
#include <vector>

#include "surrde/bbob.hpp"

namespace bbob_ref {

inline double osz(double x) {
    if (x == 0.0) return 0.0;
    const double xhat = std::log(std::fabs(x));
    const double s = x > 0.0 ? 1.0 : -1.0;
    const double c1 = x > 0.0 ? 10.0 : 5.5;
    const double c2 = x > 0.0 ? 7.9 : 3.1;
    return s * std::exp(xhat + 0.049 * (std::sin(c1 * xhat) + std::sin(c2 * xhat)));
}

inline double frac(int i, int dim) { return dim > 1 ? double(i) / double(dim - 1) : 0.0; }

inline double asy(double x, double beta, int i, int dim) {
    if (x <= 0.0) return x;
    return std::pow(x, 1.0 + beta * frac(i, dim) * std::sqrt(x));
}

inline double lam(double alpha, int i, int dim) { return std::pow(alpha, 0.5 * frac(i, dim)); }

inline double pen(double zi) {
    const double a = std::fabs(zi) - 5.0;
    return a > 0.0 ? a * a : 0.0;
}

inline double pen_sum(const std::vector<double>& z) {
    double s = 0.0;
    for (double v : z) s += pen(v);
    return s;
}

inline double eval(const surrde::bbob::Problem& p, const std::vector<double>& z) {
    using surrde::bbob::FunctionId;
    const int D = int(z.size());
    const double pi2 = 2.0 * M_PI;

    switch (p.spec().function) {
        case FunctionId::sphere: {
            double f = 0.0;
            for (int i = 0; i < D; ++i) f += z[i] * z[i];
            return f;
        }
        case FunctionId::ellipsoidal:
        case FunctionId::ellipsoidal_high_cond: {
            double f = 0.0;
            for (int i = 0; i < D; ++i) {
                const double t = osz(z[i]);
                f += std::pow(10.0, 6.0 * frac(i, D)) * t * t;
            }
            return f;
        }
        case FunctionId::rastrigin:
        case FunctionId::rastrigin_f15: {
            double cs = 0.0, sq = 0.0;
            for (int i = 0; i < D; ++i) {
                const double s = lam(10.0, i, D) * asy(osz(z[i]), 0.2, i, D);
                cs += std::cos(pi2 * s);
                sq += s * s;
            }
            return 10.0 * (D - cs) + sq;
        }
        case FunctionId::buche_rastrigin: {
            double cs = 0.0, sq = 0.0;
            for (int i = 0; i < D; ++i) {
                const double t = osz(z[i]);
                double s = std::pow(10.0, 0.5 * frac(i, D)) * t;
                if (t > 0.0 && (i + 1) % 2 == 1) s *= 10.0;
                cs += std::cos(pi2 * s);
                sq += s * s;
            }
            return 10.0 * (D - cs) + sq + 100.0 * pen_sum(z);
        }
        case FunctionId::linear_slope: {
            double f = 0.0;
            for (int i = 0; i < D; ++i) {
                const double s = std::pow(10.0, frac(i, D));
                const double zi = z[i] < 5.0 ? z[i] : 5.0;
                f += 5.0 * std::fabs(s) - s * zi;
            }
            return f;
        }
        case FunctionId::attractive_sector: {
            double sum = 0.0;
            for (int i = 0; i < D; ++i) {
                const double s = lam(10.0, i, D) * z[i];
                const double h = s > 0.0 ? 100.0 : 1.0;
                sum += h * h * s * s;
            }
            return std::pow(osz(sum), 0.9);
        }
        case FunctionId::step_ellipsoidal: {
            double sum = 0.0, zhat0 = 0.0;
            for (int i = 0; i < D; ++i) {
                const double zhat = lam(10.0, i, D) * z[i];
                if (i == 0) zhat0 = zhat;
                double zt;
                if (std::fabs(zhat) > 0.5)
                    zt = std::floor(0.5 + zhat);
                else
                    zt = std::floor(0.5 + 10.0 * zhat) / 10.0;
                sum += std::pow(10.0, 2.0 * frac(i, D)) * zt * zt;
            }
            const double a = std::fabs(zhat0) / 1e4;
            return 0.1 * (a > sum ? a : sum) + pen_sum(z);
        }
        case FunctionId::rosenbrock_original:
        case FunctionId::rosenbrock_rotated: {
            const double c = std::fmax(1.0, std::sqrt(double(D)) / 8.0);
            const double off = p.spec().function == FunctionId::rosenbrock_original ? 1.0 : 0.5;
            double f = 0.0;
            for (int i = 0; i + 1 < D; ++i) {
                const double wi = c * z[i] + off;
                const double wn = c * z[i + 1] + off;
                f += 100.0 * std::pow(wi * wi - wn, 2.0) + std::pow(wi - 1.0, 2.0);
            }
            return f;
        }
        case FunctionId::discus: {
            double f = 1e6 * osz(z[0]) * osz(z[0]);
            for (int i = 1; i < D; ++i) f += osz(z[i]) * osz(z[i]);
            return f;
        }
        case FunctionId::bent_cigar: {
            double f = asy(z[0], 0.5, 0, D) * asy(z[0], 0.5, 0, D);
            for (int i = 1; i < D; ++i) {
                const double s = asy(z[i], 0.5, i, D);
                f += 1e6 * s * s;
            }
            return f;
        }
        case FunctionId::sharp_ridge: {
            double tail = 0.0;
            for (int i = 1; i < D; ++i) {
                const double s = lam(10.0, i, D) * z[i];
                tail += s * s;
            }
            const double head = lam(10.0, 0, D) * z[0];
            return head * head + 100.0 * std::sqrt(tail);
        }
        case FunctionId::different_powers: {
            double f = 0.0;
            for (int i = 0; i < D; ++i) f += std::pow(std::fabs(z[i]), 2.0 + 4.0 * frac(i, D));
            return std::sqrt(f);
        }
        case FunctionId::weierstrass: {
            double f0 = 0.0;
            for (int k = 0; k <= 11; ++k) f0 += std::pow(0.5, k) * std::cos(M_PI * std::pow(3.0, k));
            double outer = 0.0;
            for (int i = 0; i < D; ++i) {
                const double zi = lam(0.01, i, D) * osz(z[i]);
                for (int k = 0; k <= 11; ++k)
                    outer += std::pow(0.5, k) * std::cos(pi2 * std::pow(3.0, k) * (zi + 0.5));
            }
            const double core = outer / D - f0;
            return 10.0 * std::pow(core, 3.0) + 10.0 / D * pen_sum(z);
        }
        case FunctionId::schaffers:
        case FunctionId::schaffers_high_cond: {
            const double alpha = p.spec().function == FunctionId::schaffers ? 10.0 : 1000.0;
            if (D < 2) return 10.0 * pen_sum(z);
            double acc = 0.0;
            for (int i = 0; i + 1 < D; ++i) {
                const double a = lam(alpha, i, D) * asy(z[i], 0.5, i, D);
                const double b = lam(alpha, i + 1, D) * asy(z[i + 1], 0.5, i + 1, D);
                const double v = std::sqrt(a * a + b * b);
                acc += std::sqrt(v) + std::sqrt(v) * std::pow(std::sin(50.0 * std::pow(v, 0.2)), 2.0);
            }
            acc /= D - 1.0;
            return acc * acc + 10.0 * pen_sum(z);
        }
        case FunctionId::composite_grie_rosen: {
            if (D < 2) return 10.0;
            const double c = std::fmax(1.0, std::sqrt(double(D)) / 8.0);
            double acc = 0.0;
            for (int i = 0; i + 1 < D; ++i) {
                const double wi = c * z[i] + 0.5;
                const double wn = c * z[i + 1] + 0.5;
                const double s = 100.0 * std::pow(wi * wi - wn, 2.0) + std::pow(wi - 1.0, 2.0);
                acc += s / 4000.0 - std::cos(s);
            }
            return 10.0 / (D - 1.0) * acc + 10.0;
        }
        case FunctionId::schwefel: {
            const double mu = 4.2096874633;
            std::vector<double> xhat(z.size()), zhat(z.size());
            for (int i = 0; i < D; ++i) xhat[i] = 2.0 * z[i];
            zhat[0] = xhat[0];
            for (int i = 1; i < D; ++i) zhat[i] = xhat[i] + 0.25 * (xhat[i - 1] - mu);
            double f = 0.0, penalty = 0.0;
            for (int i = 0; i < D; ++i) {
                const double zi = 100.0 * (lam(10.0, i, D) * (zhat[i] - mu) + mu);
                f -= zi * std::sin(std::sqrt(std::fabs(zi)));
                penalty += pen(zi / 100.0);
            }
            return f / (100.0 * D) + 4.189828872724339 + 100.0 * penalty;
        }
        case FunctionId::gallagher_101peaks:
        case FunctionId::gallagher_21peaks: {
            const auto& peaks = p.peak_locations();
            const auto& scales = p.peak_scales();
            const auto& w = p.peak_weights();
            double best = 0.0;
            for (std::size_t q = 0; q < w.size(); ++q) {
                double quad = 0.0;
                for (int j = 0; j < D; ++j) {
                    const double d = z[j] - peaks(q, j);
                    quad += scales(q, j) * d * d;
                }
                const double v = w[q] * std::exp(-quad / (2.0 * D));
                if (v > best) best = v;
            }
            return std::pow(osz(10.0 - best), 2.0) + pen_sum(z);
        }
        case FunctionId::katsuura: {
            double prod = 1.0;
            for (int i = 0; i < D; ++i) {
                const double s = lam(100.0, i, D) * z[i];
                double inner = 0.0;
                for (int j = 1; j <= 32; ++j) {
                    const double v = std::pow(2.0, j) * s;
                    inner += std::fabs(v - std::floor(0.5 + v)) / std::pow(2.0, j);
                }
                prod *= std::pow(1.0 + (i + 1) * inner, 10.0 / std::pow(double(D), 1.2));
            }
            return 10.0 / (D * double(D)) * prod - 10.0 / (D * double(D)) + pen_sum(z);
        }
        case FunctionId::lunacek_bi_rastrigin: {
            const double mu0 = 2.5, d = 1.0;
            const double s = 1.0 - 1.0 / (2.0 * std::sqrt(double(D) + 20.0) - 8.2);
            const double mu1 = -std::sqrt((mu0 * mu0 - d) / s);
            double s0 = 0.0, s1 = 0.0, cs = 0.0;
            for (int i = 0; i < D; ++i) {
                const double xh = 2.0 * z[i];
                s0 += (xh - mu0) * (xh - mu0);
                s1 += (xh - mu1) * (xh - mu1);
                cs += std::cos(pi2 * lam(100.0, i, D) * (xh - mu0));
            }
            const double first = s0 < d * D + s * s1 ? s0 : d * D + s * s1;
            return first + 10.0 * (D - cs) + 1e4 * pen_sum(z);
        }
    }
    return 0.0;
}

}  // namespace bbob_ref
