#include "aequiv/scaling.hpp"

#include "aequiv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace aeq {

Filter named_filter(const std::string& name) {
    if (name == "haar") return {"haar", {0.70710678118654752, 0.70710678118654752}};
    if (name == "db2")
        return {"db2",
                {0.48296291314453414, 0.83651630373780791, 0.22414386804201338, -0.12940952255126038}};
    if (name == "db3")
        return {"db3",
                {0.33267055295008262, 0.80689150931109258, 0.45987750211849157, -0.13501102001025459,
                 -0.085441273882026662, 0.035226291885709537}};
    throw Error(ErrorKind::InvalidArgument, "unknown filter '" + name + "'");
}

Filter filter_from_json(const nlohmann::json& j) {
    require(j.is_array() && !j.empty(), ErrorKind::Io, "filter must be a nonempty JSON array");
    Filter f{"custom", j.get<std::vector<double>>()};
    return f;
}

namespace {

void check_normalization(const Filter& filter) {
    require(filter.length() >= 2, ErrorKind::DegenerateFilter, "filter needs at least two taps");
    double sum = std::accumulate(filter.taps.begin(), filter.taps.end(), 0.0);
    require(std::abs(sum - std::numbers::sqrt2) < 1e-10, ErrorKind::DegenerateFilter,
            "filter taps must sum to sqrt(2)");
}

}  // namespace

std::vector<double> scaling_values_at_integers(const Filter& filter) {
    check_normalization(filter);
    const int N = static_cast<int>(filter.length());
    const int size = N - 1;
    RMat m = RMat::Zero(size, size);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) {
            int t = 2 * i - j;
            if (t >= 0 && t < N) m(i, j) = std::numbers::sqrt2 * filter.taps[static_cast<std::size_t>(t)];
        }
    m -= RMat::Identity(size, size);
    Eigen::JacobiSVD<RMat> svd(m, Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();  // descending
    const double tol = 1e-10;
    if (sv(size - 1) > tol) throw Error(ErrorKind::DegenerateFilter, "refinement matrix has no eigenvalue 1");
    if (size >= 2 && sv(size - 2) <= 1e-8)
        throw Error(ErrorKind::DegenerateFilter, "eigenvalue 1 of the refinement matrix is not simple");
    RVec v = svd.matrixV().col(size - 1);
    double total = v.sum();
    if (std::abs(total) < tol) throw Error(ErrorKind::DegenerateFilter, "integer values cannot sum to 1");
    v /= total;
    return {v.data(), v.data() + size};
}

ScalingCascade::ScalingCascade(const Filter& filter, int levels) : levels_(levels) {
    require(levels >= 0 && levels <= 12, ErrorKind::InvalidArgument, "cascade depth must lie in [0, 12]");
    const int N = static_cast<int>(filter.length());
    support_end_ = N - 1;
    std::vector<double> current = scaling_values_at_integers(filter);
    current.push_back(0.0);  // phi(N-1)
    for (int level = 1; level <= levels; ++level) {
        const long half = 1L << (level - 1);
        const long count = (N - 1) * (1L << level) + 1;
        std::vector<double> next(static_cast<std::size_t>(count), 0.0);
        for (long k = 0; k < count; ++k) {
            double acc = 0.0;
            for (int i = 0; i < N; ++i) {
                long idx = k - i * half;
                if (idx >= 0 && idx < static_cast<long>(current.size()))
                    acc += filter.taps[static_cast<std::size_t>(i)] * current[static_cast<std::size_t>(idx)];
            }
            next[static_cast<std::size_t>(k)] = std::numbers::sqrt2 * acc;
        }
        current = std::move(next);
    }
    samples_ = std::move(current);
}

double ScalingCascade::operator()(double t) const {
    if (!(t >= 0.0) || t >= support_end_) return 0.0;
    const double scaled = std::ldexp(t, levels_);
    const double base = std::floor(scaled);
    const auto i = static_cast<std::size_t>(base);
    const double frac = scaled - base;
    double left = samples_[i];
    if (frac == 0.0 || i + 1 >= samples_.size()) return left;
    return left + frac * (samples_[i + 1] - left);
}

double ScalingCascade::periodized(double t, double period) const {
    double first = std::ceil(-t / period);
    double last = std::floor((support_end_ - t) / period);
    double sum = 0.0;
    for (double m = first; m <= last; m += 1.0) sum += (*this)(t + period * m);
    return sum;
}

InterpolationConstant interpolation_constant_A(const Filter& filter, int d, std::size_t grid) {
    require(d >= 1 && grid >= 8, ErrorKind::InvalidArgument, "need d >= 1 and a grid of at least 8 points");
    std::vector<double> values = scaling_values_at_integers(filter);
    double lip = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) lip += std::abs(static_cast<double>(k) * values[k]);
    double min_mod = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid; ++i) {
        double u = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(grid);
        cplx p{};
        for (std::size_t k = 0; k < values.size(); ++k) p += values[k] * std::polar(1.0, u * static_cast<double>(k));
        min_mod = std::min(min_mod, std::abs(p));
    }
    double lower = std::max(0.0, min_mod - lip * std::numbers::pi / static_cast<double>(grid));
    double value = std::pow(min_mod, d);
    return {value, std::pow(lower, d), value, lip, grid};
}

bool dominant_value_check(const std::vector<double>& values, std::size_t k0) {
    require(k0 < values.size(), ErrorKind::IndexOutOfRange, "k0 outside the support");
    double rest = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if (k != k0) rest += std::abs(values[k]);
    return std::abs(values[k0]) > rest;
}

RMat scaling_toeplitz_gram(const Filter& filter, int level, int d) {
    require(level >= 0 && level <= 12 && d >= 1, ErrorKind::InvalidArgument, "bad level or dimension");
    std::vector<double> values = scaling_values_at_integers(filter);
    const int M = 1 << level;
    // Integer values wrapped onto Z / M.
    std::vector<double> wrapped(static_cast<std::size_t>(M), 0.0);
    for (std::size_t k = 0; k < values.size(); ++k) wrapped[k % static_cast<std::size_t>(M)] += values[k];
    RMat axis(M, M);
    for (int k = 0; k < M; ++k)
        for (int l = 0; l < M; ++l) {
            double s = 0.0;
            for (int nu = 0; nu < M; ++nu)
                s += wrapped[static_cast<std::size_t>(((nu - k) % M + M) % M)] *
                     wrapped[static_cast<std::size_t>(((nu - l) % M + M) % M)];
            axis(k, l) = s;
        }
    RMat gram = axis;
    for (int r = 1; r < d; ++r) {
        RMat next(gram.rows() * M, gram.cols() * M);
        for (Eigen::Index a = 0; a < gram.rows(); ++a)
            for (Eigen::Index b = 0; b < gram.cols(); ++b) next.block(a * M, b * M, M, M) = gram(a, b) * axis;
        gram = std::move(next);
    }
    return gram;
}

}  // namespace aeq
