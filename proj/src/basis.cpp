#include "aequiv/basis.hpp"

#include "aequiv/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aeq {

namespace {

constexpr std::size_t kMaxBasisSize = std::size_t{1} << 24;

std::size_t checked_power(int m, int d) {
    std::size_t n = 1;
    for (int r = 0; r < d; ++r) {
        n *= static_cast<std::size_t>(m);
        require(n <= kMaxBasisSize, ErrorKind::SizeLimit, "basis size m^d too large");
    }
    return n;
}

// Per-axis index k_r in 0..m-1 of a lexicographic position, last axis fastest.
int axis_index(std::size_t j, int m, int d, int r) {
    for (int q = d - 1; q > r; --q) j /= static_cast<std::size_t>(m);
    return static_cast<int>(j % static_cast<std::size_t>(m));
}

bool enumeration_less(const Frequency& a, const Frequency& b) {
    long long na = squared_norm(a), nb = squared_norm(b);
    if (na != nb) return na < nb;
    for (std::size_t r = 0; r < a.size(); ++r) {
        int ma = std::abs(a[r]), mb = std::abs(b[r]);
        if (ma != mb) return ma < mb;
        if (a[r] != b[r]) return a[r] < b[r];
    }
    return false;
}

double sinc(double u) {
    if (u == 0.0) return 1.0;
    double t = std::numbers::pi * u;
    return std::sin(t) / t;
}

// Periodic hat b(t) = max(0, 1 - |t|), t in units of the grid spacing, period m.
double periodic_hat(double t, int m) {
    double p = static_cast<double>(m);
    t -= p * std::floor(t / p + 0.5);
    return std::max(0.0, 1.0 - std::abs(t));
}

}  // namespace

std::vector<Frequency> enumerate_frequencies(int d, std::size_t count) {
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    require(count >= 1, ErrorKind::InvalidArgument, "count must be positive");
    require(count <= kMaxBasisSize, ErrorKind::SizeLimit, "too many frequencies requested");
    int radius = std::max(1, static_cast<int>(std::ceil(std::pow(static_cast<double>(count), 1.0 / d) / 2.0)));
    for (;;) {
        std::vector<Frequency> all;
        for_each_in_box(d, radius, [&](const Frequency& l) { all.push_back(l); });
        if (all.size() >= count) {
            std::sort(all.begin(), all.end(), enumeration_less);
            // Everything with |l|_2 <= radius is inside the box, so the prefix is final.
            if (squared_norm(all[count - 1]) <= static_cast<long long>(radius) * radius) {
                all.resize(count);
                return all;
            }
        }
        radius *= 2;
    }
}

std::vector<Frequency> fourier_block(int m, int d) {
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    require(m >= 1 && m % 2 == 1, ErrorKind::Convention, "Fourier block needs an odd m, got " + std::to_string(m));
    checked_power(m, d);
    std::vector<Frequency> all;
    for_each_in_box(d, (m - 1) / 2, [&](const Frequency& l) { all.push_back(l); });
    std::sort(all.begin(), all.end(), enumeration_less);
    return all;
}

RMat spline_l2_gram(int m, int d) {
    require(m >= 3, ErrorKind::UnsupportedSize, "spline Gram needs m >= 3");
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    const std::size_t n = checked_power(m, d);
    require(n <= 1 << 14, ErrorKind::SizeLimit, "dense spline Gram too large");
    RMat g = RMat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double scale = 1.0 / (std::pow(6.0, d) * static_cast<double>(n));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            double v = scale;
            for (int r = 0; r < d && v != 0.0; ++r) {
                int diff = (axis_index(a, m, d, r) - axis_index(b, m, d, r) + m) % m;
                if (diff == 0)
                    v *= 4.0;
                else if (diff != 1 && diff != m - 1)
                    v = 0.0;
            }
            g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = v;
        }
    return g;
}

const char* to_string(BasisKind kind) {
    switch (kind) {
        case BasisKind::PiecewiseConstant: return "piecewise_constant";
        case BasisKind::Fourier: return "fourier";
        case BasisKind::SplineLinearPeriodic: return "spline";
        case BasisKind::ScalingSystem: return "scaling";
    }
    return "?";
}

BasisFamily BasisFamily::piecewise_constant(std::size_t n) {
    require(n >= 1 && n <= kMaxBasisSize, ErrorKind::SizeLimit, "piecewise-constant size out of range");
    BasisFamily b;
    b.kind_ = BasisKind::PiecewiseConstant;
    b.d_ = 1;
    b.size_ = n;
    b.m_ = static_cast<int>(n);
    return b;
}

BasisFamily BasisFamily::fourier(std::vector<Frequency> frequencies) {
    require(!frequencies.empty(), ErrorKind::InvalidArgument, "Fourier family needs at least one frequency");
    const std::size_t d = frequencies.front().size();
    require(d >= 1, ErrorKind::InvalidArgument, "frequency dimension must be positive");
    for (const auto& l : frequencies)
        require(l.size() == d, ErrorKind::InvalidArgument, "inconsistent frequency dimensions");
    BasisFamily b;
    b.kind_ = BasisKind::Fourier;
    b.d_ = static_cast<int>(d);
    b.size_ = frequencies.size();
    b.freqs_ = std::move(frequencies);
    return b;
}

BasisFamily BasisFamily::fourier_block(int m, int d) {
    BasisFamily b = fourier(aeq::fourier_block(m, d));
    b.m_ = m;
    return b;
}

BasisFamily BasisFamily::fourier_enumerated(int d, std::size_t count) {
    return fourier(enumerate_frequencies(d, count));
}

BasisFamily BasisFamily::spline_linear_periodic(int m, int d) {
    require(m >= 3, ErrorKind::UnsupportedSize, "spline family needs m >= 3");
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    BasisFamily b;
    b.kind_ = BasisKind::SplineLinearPeriodic;
    b.d_ = d;
    b.size_ = checked_power(m, d);
    b.m_ = m;
    return b;
}

BasisFamily BasisFamily::scaling_system(const Filter& filter, int level, int d) {
    require(level >= 0 && level <= 12, ErrorKind::InvalidArgument, "scaling level must lie in [0, 12]");
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    BasisFamily b;
    b.kind_ = BasisKind::ScalingSystem;
    b.d_ = d;
    b.m_ = 1 << level;
    b.size_ = checked_power(b.m_, d);
    b.level_ = level;
    b.filter_ = filter;
    b.cascade_ = std::make_shared<const ScalingCascade>(filter, 12);
    return b;
}

cplx BasisFamily::evaluate(std::size_t j, std::span<const double> x) const {
    require(j < size_, ErrorKind::IndexOutOfRange, "basis index " + std::to_string(j) + " out of range");
    require(static_cast<int>(x.size()) == d_, ErrorKind::InvalidArgument, "point dimension mismatch");
    switch (kind_) {
        case BasisKind::PiecewiseConstant: {
            const double n = static_cast<double>(size_);
            // Cell (j/n, (j+1)/n]; the small shift keeps x = i/n in cell i-1.
            double cell = std::ceil(x[0] * n - 1e-9) - 1.0;
            return cell == static_cast<double>(j) ? cplx(std::sqrt(n), 0.0) : cplx{};
        }
        case BasisKind::Fourier: {
            const Frequency& l = freqs_[j];
            double phase = 0.0;
            for (int r = 0; r < d_; ++r) phase += l[static_cast<std::size_t>(r)] * x[static_cast<std::size_t>(r)];
            phase -= std::round(phase);
            return std::polar(1.0, 2.0 * std::numbers::pi * phase);
        }
        case BasisKind::SplineLinearPeriodic: {
            double v = 1.0;
            for (int r = 0; r < d_ && v != 0.0; ++r) {
                int k = axis_index(j, m_, d_, r) + 1;
                v *= periodic_hat(m_ * x[static_cast<std::size_t>(r)] - k, m_);
            }
            return v;
        }
        case BasisKind::ScalingSystem: {
            const double period = static_cast<double>(m_);
            double v = 1.0;
            for (int r = 0; r < d_ && v != 0.0; ++r) {
                int k = axis_index(j, m_, d_, r) + 1;
                v *= std::sqrt(period) * cascade_->periodized(period * x[static_cast<std::size_t>(r)] - k, period);
            }
            return v;
        }
    }
    return {};
}

cplx BasisFamily::fourier_coefficient(std::size_t j, const Frequency& l) const {
    require(j < size_, ErrorKind::IndexOutOfRange, "basis index " + std::to_string(j) + " out of range");
    require(static_cast<int>(l.size()) == d_, ErrorKind::InvalidArgument, "frequency dimension mismatch");
    switch (kind_) {
        case BasisKind::Fourier: return freqs_[j] == l ? cplx(1.0, 0.0) : cplx{};
        case BasisKind::PiecewiseConstant: {
            const double n = static_cast<double>(size_);
            if (l[0] == 0) return 1.0 / std::sqrt(n);
            const double w = 2.0 * std::numbers::pi * l[0];
            const double a = static_cast<double>(j) / n, b = static_cast<double>(j + 1) / n;
            cplx integral = (std::polar(1.0, -w * b) - std::polar(1.0, -w * a)) / cplx(0.0, -w);
            return std::sqrt(n) * integral;
        }
        case BasisKind::SplineLinearPeriodic: {
            cplx v(1.0, 0.0);
            for (int r = 0; r < d_; ++r) {
                const double lr = l[static_cast<std::size_t>(r)];
                const int k = axis_index(j, m_, d_, r) + 1;
                const double s = sinc(lr / m_);
                v *= std::polar(s * s / m_, -2.0 * std::numbers::pi * lr * k / m_);
            }
            return v;
        }
        case BasisKind::ScalingSystem: break;
    }
    throw Error(ErrorKind::UnsupportedCombination, "Fourier coefficients are not available for scaling systems");
}

RMat BasisFamily::l2_gram() const {
    if (kind_ == BasisKind::SplineLinearPeriodic) return spline_l2_gram(m_, d_);
    const auto n = static_cast<Eigen::Index>(size_);
    return RMat::Identity(n, n);
}

BasisFamily BasisFamily::leading(std::size_t count) const {
    require(kind_ == BasisKind::Fourier, ErrorKind::UnsupportedCombination, "leading() needs a Fourier family");
    require(count >= 1 && count <= size_, ErrorKind::IndexOutOfRange, "leading count out of range");
    BasisFamily b = *this;
    b.freqs_.resize(count);
    b.size_ = count;
    b.m_ = 0;
    return b;
}

}  // namespace aeq
