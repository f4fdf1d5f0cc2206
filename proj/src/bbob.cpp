#include "surrde/bbob.hpp"

#include <array>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "surrde/rng.hpp"

namespace surrde::bbob {

namespace {

const std::array<std::string, kNumFunctions> kNames = {
    "Sphere",
    "Ellipsoidal",
    "Rastrigin",
    "BucheRastrigin",
    "LinearSlope",
    "AttractiveSector",
    "StepEllipsoidal",
    "Rosenbrock_original",
    "Rosenbrock_rotated",
    "Ellipsoidal_high_cond",
    "Discus",
    "BentCigar",
    "SharpRidge",
    "DifferentPowers",
    "Rastrigin_F15",
    "Weierstrass",
    "Schaffers",
    "Schaffers_high_cond",
    "Composite_Grie_rosen",
    "Schwefel",
    "Gallagher_101Peaks",
    "Gallagher_21Peaks",
    "Katsuura",
    "Lunacek_bi_Rastrigin",
};

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Oscillation transform T_osz, applied coordinate-wise.
double t_osz(double v) {
    if (v == 0.0) return 0.0;
    const double xhat = std::log(std::abs(v));
    const double c1 = v > 0.0 ? 10.0 : 5.5;
    const double c2 = v > 0.0 ? 7.9 : 3.1;
    return sign(v) * std::exp(xhat + 0.049 * (std::sin(c1 * xhat) + std::sin(c2 * xhat)));
}

// Per-coordinate exponent (i-1)/(D-1), with the D=1 convention of 0.
double coord_exp(std::size_t i, std::size_t dim) {
    return dim > 1 ? static_cast<double>(i) / static_cast<double>(dim - 1) : 0.0;
}

// Asymmetry transform T_asy^beta.
void t_asy(std::vector<double>& z, double beta) {
    const std::size_t dim = z.size();
    for (std::size_t i = 0; i < dim; ++i) {
        if (z[i] > 0.0) z[i] = std::pow(z[i], 1.0 + beta * coord_exp(i, dim) * std::sqrt(z[i]));
    }
}

// Diagonal of the conditioning matrix Lambda^alpha.
double lambda_diag(double alpha, std::size_t i, std::size_t dim) {
    return std::pow(alpha, 0.5 * coord_exp(i, dim));
}

double boundary_penalty(std::span<const double> z) {
    double pen = 0.0;
    for (double v : z) {
        const double excess = std::abs(v) - 5.0;
        if (excess > 0.0) pen += excess * excess;
    }
    return pen;
}

constexpr double kSchwefelMu = 4.2096874633;
constexpr double kSchwefelOffset = 4.189828872724339;
constexpr double kLunacekMu0 = 2.5;

// Weierstrass f0 = sum_k 2^-k cos(pi 3^k); every 3^k is odd so each cosine is -1.
double weierstrass_f0() {
    double f0 = 0.0;
    double half_pow = 1.0;
    for (int k = 0; k <= 11; ++k) {
        f0 -= half_pow;
        half_pow *= 0.5;
    }
    return f0;
}

}  // namespace

const std::string& function_name(FunctionId id) {
    const int idx = static_cast<int>(id) - 1;
    if (idx < 0 || idx >= kNumFunctions) throw std::invalid_argument("bad FunctionId");
    return kNames[static_cast<std::size_t>(idx)];
}

FunctionId function_from_name(const std::string& name) {
    for (int i = 0; i < kNumFunctions; ++i) {
        if (kNames[static_cast<std::size_t>(i)] == name) return static_cast<FunctionId>(i + 1);
    }
    throw std::invalid_argument("unknown BBOB function name: " + name);
}

void ProblemSpec::validate() const {
    if (dim < 1) throw std::invalid_argument("ProblemSpec: dim must be >= 1");
    if (!(lower < upper)) throw std::invalid_argument("ProblemSpec: bad bounds");
    if (shift) {
        if (static_cast<int>(shift->size()) != dim)
            throw std::invalid_argument("ProblemSpec: shift dimension mismatch");
        for (double v : *shift)
            if (v < lower || v > upper) throw std::invalid_argument("ProblemSpec: shift outside bounds");
    }
    if (rotation) {
        if (rotation->rows != static_cast<std::size_t>(dim) || rotation->cols != static_cast<std::size_t>(dim))
            throw std::invalid_argument("ProblemSpec: rotation shape mismatch");
        if (orthogonality_error(*rotation) > 1e-9)
            throw std::invalid_argument("ProblemSpec: rotation not orthogonal");
    }
}

Problem::Problem(ProblemSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    const std::size_t dim = static_cast<std::size_t>(spec_.dim);
    optimum_raw_.assign(dim, 0.0);

    switch (spec_.function) {
        case FunctionId::linear_slope:
            optimum_raw_.assign(dim, 5.0);
            break;
        case FunctionId::rosenbrock_rotated:
        case FunctionId::composite_grie_rosen: {
            const double c = std::max(1.0, std::sqrt(static_cast<double>(dim)) / 8.0);
            optimum_raw_.assign(dim, 0.5 / c);
            break;
        }
        case FunctionId::schwefel:
            optimum_raw_.assign(dim, kSchwefelMu / 2.0);
            break;
        case FunctionId::lunacek_bi_rastrigin:
            optimum_raw_.assign(dim, kLunacekMu0 / 2.0);
            break;
        case FunctionId::gallagher_101peaks:
        case FunctionId::gallagher_21peaks: {
            const bool is101 = spec_.function == FunctionId::gallagher_101peaks;
            const std::size_t n_peaks = is101 ? 101 : 21;
            const double cond_first = is101 ? std::sqrt(1000.0) : 1000.0;
            const double opt_range = is101 ? 4.0 : 3.92;
            Rng rng(split_seed(spec_.seed, 0x6a11 ^ static_cast<std::uint64_t>(spec_.function)));

            peaks_ = Matrix(n_peaks, dim);
            peak_scales_ = Matrix(n_peaks, dim);
            peak_weights_.assign(n_peaks, 0.0);

            peak_weights_[0] = 10.0;
            for (std::size_t p = 1; p < n_peaks; ++p)
                peak_weights_[p] =
                    1.1 + 8.0 * static_cast<double>(p - 1) / static_cast<double>(n_peaks - 2);

            // Condition numbers: fixed for the global peak, a random permutation
            // of a log-uniform ladder for the rest.
            std::vector<double> conditions(n_peaks, cond_first);
            {
                auto perm = rng.permutation(n_peaks - 1);
                for (std::size_t p = 1; p < n_peaks; ++p)
                    conditions[p] = std::pow(
                        1000.0, 2.0 * static_cast<double>(perm[p - 1]) / static_cast<double>(n_peaks - 2));
            }
            for (std::size_t p = 0; p < n_peaks; ++p) {
                auto perm = rng.permutation(dim);
                for (std::size_t j = 0; j < dim; ++j) {
                    const double e = coord_exp(perm[j], dim) - 0.5;
                    peak_scales_(p, j) = std::pow(conditions[p], e);
                }
            }
            for (std::size_t p = 0; p < n_peaks; ++p) {
                const double range = p == 0 ? opt_range : 4.9;
                for (std::size_t j = 0; j < dim; ++j) peaks_(p, j) = rng.uniform(-range, range);
            }
            for (std::size_t j = 0; j < dim; ++j) optimum_raw_[j] = peaks_(0, j);
            break;
        }
        default:
            break;  // optimum at the origin
    }
}

double Problem::evaluate(std::span<const double> x) {
    const double value = evaluate_uncounted(x);
    counter_.charge(1);
    return value;
}

double Problem::evaluate_uncounted(std::span<const double> x) const {
    if (x.size() != static_cast<std::size_t>(spec_.dim))
        throw std::invalid_argument("Problem::evaluate: dimension mismatch");
    if (!spec_.shift && !spec_.rotation) return raw_eval(x);

    std::vector<double> z(x.begin(), x.end());
    if (spec_.shift)
        for (std::size_t i = 0; i < z.size(); ++i) z[i] -= (*spec_.shift)[i];
    if (spec_.rotation) z = matvec_transposed(*spec_.rotation, z);
    return raw_eval(z);
}

std::vector<double> Problem::optimum_location() const {
    std::vector<double> x = optimum_raw_;
    if (spec_.rotation) x = matvec(*spec_.rotation, x);
    if (spec_.shift)
        for (std::size_t i = 0; i < x.size(); ++i) x[i] += (*spec_.shift)[i];
    return x;
}

double Problem::raw_eval(std::span<const double> zin) const {
    const std::size_t dim = zin.size();
    const double dimd = static_cast<double>(dim);

    switch (spec_.function) {
        case FunctionId::sphere: {
            double f = 0.0;
            for (double v : zin) f += v * v;
            return f;
        }
        case FunctionId::ellipsoidal:
        case FunctionId::ellipsoidal_high_cond: {
            double f = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double s = t_osz(zin[i]);
                f += std::pow(10.0, 6.0 * coord_exp(i, dim)) * s * s;
            }
            return f;
        }
        case FunctionId::rastrigin:
        case FunctionId::rastrigin_f15: {
            std::vector<double> s(zin.begin(), zin.end());
            for (double& v : s) v = t_osz(v);
            t_asy(s, 0.2);
            double sum_cos = 0.0, sum_sq = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double v = lambda_diag(10.0, i, dim) * s[i];
                sum_cos += std::cos(2.0 * M_PI * v);
                sum_sq += v * v;
            }
            return 10.0 * (dimd - sum_cos) + sum_sq;
        }
        case FunctionId::buche_rastrigin: {
            double sum_cos = 0.0, sum_sq = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                double s = std::pow(10.0, 0.5 * coord_exp(i, dim)) * t_osz(zin[i]);
                if (s > 0.0 && i % 2 == 0) s *= 10.0;  // odd coordinates, 1-based
                sum_cos += std::cos(2.0 * M_PI * s);
                sum_sq += s * s;
            }
            return 10.0 * (dimd - sum_cos) + sum_sq + 100.0 * boundary_penalty(zin);
        }
        case FunctionId::linear_slope: {
            double f = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double s = std::pow(10.0, coord_exp(i, dim));
                const double z = zin[i] < 5.0 ? zin[i] : 5.0;
                f += s * (5.0 - z);
            }
            return f;
        }
        case FunctionId::attractive_sector: {
            double sum = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double s = lambda_diag(10.0, i, dim) * zin[i];
                const double h = s > 0.0 ? 100.0 : 1.0;
                sum += h * s * h * s;
            }
            return std::pow(t_osz(sum), 0.9);
        }
        case FunctionId::step_ellipsoidal: {
            double zhat1 = 0.0, sum = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double zhat = lambda_diag(10.0, i, dim) * zin[i];
                if (i == 0) zhat1 = zhat;
                const double ztilde = std::abs(zhat) > 0.5 ? std::floor(0.5 + zhat)
                                                           : std::floor(0.5 + 10.0 * zhat) / 10.0;
                sum += std::pow(10.0, 2.0 * coord_exp(i, dim)) * ztilde * ztilde;
            }
            return 0.1 * std::max(std::abs(zhat1) * 1e-4, sum) + boundary_penalty(zin);
        }
        case FunctionId::rosenbrock_original:
        case FunctionId::rosenbrock_rotated: {
            const double c = std::max(1.0, std::sqrt(dimd) / 8.0);
            const double offset = spec_.function == FunctionId::rosenbrock_original ? 1.0 : 0.5;
            double f = 0.0;
            double prev = c * zin[0] + offset;
            for (std::size_t i = 1; i < dim; ++i) {
                const double cur = c * zin[i] + offset;
                const double a = prev * prev - cur;
                const double b = prev - 1.0;
                f += 100.0 * a * a + b * b;
                prev = cur;
            }
            return f;
        }
        case FunctionId::discus: {
            double f = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double s = t_osz(zin[i]);
                f += (i == 0 ? 1e6 : 1.0) * s * s;
            }
            return f;
        }
        case FunctionId::bent_cigar: {
            std::vector<double> s(zin.begin(), zin.end());
            t_asy(s, 0.5);
            double f = 0.0;
            for (std::size_t i = 0; i < dim; ++i) f += (i == 0 ? 1.0 : 1e6) * s[i] * s[i];
            return f;
        }
        case FunctionId::sharp_ridge: {
            double tail = 0.0;
            const double head = lambda_diag(10.0, 0, dim) * zin[0];
            for (std::size_t i = 1; i < dim; ++i) {
                const double s = lambda_diag(10.0, i, dim) * zin[i];
                tail += s * s;
            }
            return head * head + 100.0 * std::sqrt(tail);
        }
        case FunctionId::different_powers: {
            double f = 0.0;
            for (std::size_t i = 0; i < dim; ++i)
                f += std::pow(std::abs(zin[i]), 2.0 + 4.0 * coord_exp(i, dim));
            return std::sqrt(f);
        }
        case FunctionId::weierstrass: {
            const double f0 = weierstrass_f0();
            double outer = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double z = lambda_diag(0.01, i, dim) * t_osz(zin[i]);
                double inner = 0.0;
                double half_pow = 1.0, three_pow = 1.0;
                for (int k = 0; k <= 11; ++k) {
                    inner += half_pow * std::cos(2.0 * M_PI * three_pow * (z + 0.5));
                    half_pow *= 0.5;
                    three_pow *= 3.0;
                }
                outer += inner;
            }
            const double core = outer / dimd - f0;
            return 10.0 * core * core * core + 10.0 / dimd * boundary_penalty(zin);
        }
        case FunctionId::schaffers:
        case FunctionId::schaffers_high_cond: {
            const double alpha = spec_.function == FunctionId::schaffers ? 10.0 : 1000.0;
            std::vector<double> s(zin.begin(), zin.end());
            t_asy(s, 0.5);
            for (std::size_t i = 0; i < dim; ++i) s[i] *= lambda_diag(alpha, i, dim);
            if (dim < 2) return 10.0 * boundary_penalty(zin);
            double acc = 0.0;
            for (std::size_t i = 0; i + 1 < dim; ++i) {
                const double v = std::sqrt(s[i] * s[i] + s[i + 1] * s[i + 1]);
                const double sv = std::sin(50.0 * std::pow(v, 0.2));
                acc += std::sqrt(v) * (1.0 + sv * sv);
            }
            acc /= dimd - 1.0;
            return acc * acc + 10.0 * boundary_penalty(zin);
        }
        case FunctionId::composite_grie_rosen: {
            if (dim < 2) return 10.0;
            const double c = std::max(1.0, std::sqrt(dimd) / 8.0);
            double acc = 0.0;
            double prev = c * zin[0] + 0.5;
            for (std::size_t i = 1; i < dim; ++i) {
                const double cur = c * zin[i] + 0.5;
                const double a = prev * prev - cur;
                const double b = prev - 1.0;
                const double s = 100.0 * a * a + b * b;
                acc += s / 4000.0 - std::cos(s);
                prev = cur;
            }
            return 10.0 / (dimd - 1.0) * acc + 10.0;
        }
        case FunctionId::schwefel: {
            std::vector<double> zhat(dim);
            for (std::size_t i = 0; i < dim; ++i) zhat[i] = 2.0 * zin[i];
            for (std::size_t i = dim; i-- > 1;)
                zhat[i] += 0.25 * (zhat[i - 1] - kSchwefelMu);
            double f = 0.0, pen = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double z = 100.0 * (lambda_diag(10.0, i, dim) * (zhat[i] - kSchwefelMu) + kSchwefelMu);
                f -= z * std::sin(std::sqrt(std::abs(z)));
                const double excess = std::abs(z / 100.0) - 5.0;
                if (excess > 0.0) pen += excess * excess;
            }
            return f / (100.0 * dimd) + kSchwefelOffset + 100.0 * pen;
        }
        case FunctionId::gallagher_101peaks:
        case FunctionId::gallagher_21peaks: {
            double best = 0.0;
            for (std::size_t p = 0; p < peak_weights_.size(); ++p) {
                double quad = 0.0;
                for (std::size_t j = 0; j < dim; ++j) {
                    const double d = zin[j] - peaks_(p, j);
                    quad += peak_scales_(p, j) * d * d;
                }
                const double v = peak_weights_[p] * std::exp(-quad / (2.0 * dimd));
                best = std::max(best, v);
            }
            const double core = t_osz(10.0 - best);
            return core * core + boundary_penalty(zin);
        }
        case FunctionId::katsuura: {
            double prod = 1.0;
            const double expo = 10.0 / std::pow(dimd, 1.2);
            for (std::size_t i = 0; i < dim; ++i) {
                const double s = lambda_diag(100.0, i, dim) * zin[i];
                double inner = 0.0;
                double two_pow = 2.0;
                for (int j = 1; j <= 32; ++j) {
                    const double v = two_pow * s;
                    inner += std::abs(v - std::floor(0.5 + v)) / two_pow;
                    two_pow *= 2.0;
                }
                prod *= std::pow(1.0 + (static_cast<double>(i) + 1.0) * inner, expo);
            }
            const double scale = 10.0 / (dimd * dimd);
            return scale * prod - scale + boundary_penalty(zin);
        }
        case FunctionId::lunacek_bi_rastrigin: {
            const double d = 1.0;
            const double s = 1.0 - 1.0 / (2.0 * std::sqrt(dimd + 20.0) - 8.2);
            const double mu1 = -std::sqrt((kLunacekMu0 * kLunacekMu0 - d) / s);
            double sum0 = 0.0, sum1 = 0.0, sum_cos = 0.0;
            for (std::size_t i = 0; i < dim; ++i) {
                const double xhat = 2.0 * zin[i];
                sum0 += (xhat - kLunacekMu0) * (xhat - kLunacekMu0);
                sum1 += (xhat - mu1) * (xhat - mu1);
                const double z = lambda_diag(100.0, i, dim) * (xhat - kLunacekMu0);
                sum_cos += std::cos(2.0 * M_PI * z);
            }
            return std::min(sum0, d * dimd + s * sum1) + 10.0 * (dimd - sum_cos) +
                   1e4 * boundary_penalty(zin);
        }
    }
    throw std::logic_error("unreachable");
}

std::pair<std::vector<ProblemSpec>, std::vector<ProblemSpec>> make_split() {
    const std::array<FunctionId, 16> train_ids = {
        FunctionId::sphere,          FunctionId::ellipsoidal,
        FunctionId::rastrigin,       FunctionId::buche_rastrigin,
        FunctionId::linear_slope,    FunctionId::attractive_sector,
        FunctionId::step_ellipsoidal, FunctionId::rosenbrock_original,
        FunctionId::rosenbrock_rotated, FunctionId::ellipsoidal_high_cond,
        FunctionId::discus,          FunctionId::bent_cigar,
        FunctionId::sharp_ridge,     FunctionId::different_powers,
        FunctionId::rastrigin_f15,   FunctionId::schwefel,
    };
    const std::array<FunctionId, 8> test_ids = {
        FunctionId::weierstrass,        FunctionId::schaffers,
        FunctionId::schaffers_high_cond, FunctionId::composite_grie_rosen,
        FunctionId::gallagher_101peaks, FunctionId::gallagher_21peaks,
        FunctionId::katsuura,           FunctionId::lunacek_bi_rastrigin,
    };
    std::vector<ProblemSpec> train, test;
    for (FunctionId id : train_ids) train.push_back(ProblemSpec{.function = id, .dim = 10});
    for (FunctionId id : test_ids) test.push_back(ProblemSpec{.function = id, .dim = 10});
    return {train, test};
}

ProblemSpec apply_ood(const ProblemSpec& p, OodMode mode, std::uint64_t seed) {
    if (p.dim != 10 || p.shift || p.rotation)
        throw std::invalid_argument("apply_ood: expected a 10D untransformed problem");
    ProblemSpec out = p;
    switch (mode) {
        case OodMode::plain_30d:
            out.dim = 30;
            return out;
        case OodMode::shift_rotate_10d: {
            Rng rng(split_seed(seed, 0x00d));
            std::vector<double> shift(10);
            for (double& v : shift) v = rng.uniform(-4.0, 4.0);
            out.shift = std::move(shift);
            out.rotation = random_orthogonal(10, rng);
            return out;
        }
    }
    throw std::invalid_argument("apply_ood: unknown mode");
}

std::string ProblemSpec::to_text() const {
    std::ostringstream os;
    os.precision(17);
    os << "function=" << function_name(function) << "\n";
    os << "dim=" << dim << "\n";
    os << "seed=" << seed << "\n";
    if (shift) {
        os << "shift=";
        for (std::size_t i = 0; i < shift->size(); ++i) os << (i ? " " : "") << (*shift)[i];
        os << "\n";
    }
    if (rotation) {
        os << "rotation=";
        for (std::size_t i = 0; i < rotation->data.size(); ++i)
            os << (i ? " " : "") << rotation->data[i];
        os << "\n";
    }
    return os.str();
}

ProblemSpec ProblemSpec::from_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("ProblemSpec: bad line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    ProblemSpec spec;
    spec.function = function_from_name(kv.at("function"));
    spec.dim = std::stoi(kv.at("dim"));
    spec.seed = std::stoull(kv.at("seed"));
    const std::size_t dim = static_cast<std::size_t>(spec.dim);
    if (kv.count("shift")) {
        std::istringstream vs(kv.at("shift"));
        std::vector<double> shift(dim);
        for (double& v : shift) vs >> v;
        spec.shift = std::move(shift);
    }
    if (kv.count("rotation")) {
        std::istringstream vs(kv.at("rotation"));
        Matrix rot(dim, dim);
        for (double& v : rot.data) vs >> v;
        spec.rotation = std::move(rot);
    }
    return spec;
}

}  // namespace surrde::bbob
