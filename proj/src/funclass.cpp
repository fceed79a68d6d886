#include "aequiv/funclass.hpp"

#include "aequiv/error.hpp"
#include "aequiv/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aeq {

int sup_norm(const Frequency& l) {
    int m = 0;
    for (int v : l) m = std::max(m, std::abs(v));
    return m;
}

long long squared_norm(const Frequency& l) {
    long long s = 0;
    for (int v : l) s += static_cast<long long>(v) * v;
    return s;
}

cplx FourierFunction::coefficient(const Frequency& l) const {
    auto it = coeffs.find(l);
    return it == coeffs.end() ? cplx{} : it->second;
}

cplx FourierFunction::operator()(std::span<const double> x) const {
    cplx sum{};
    for (const auto& [l, c] : coeffs) {
        double phase = 0.0;
        for (std::size_t r = 0; r < l.size(); ++r) phase += l[r] * x[r];
        sum += c * std::polar(1.0, 2.0 * std::numbers::pi * phase);
    }
    return sum;
}

double FourierFunction::l2_norm_sq() const {
    double s = 0.0;
    for (const auto& [l, c] : coeffs) s += std::norm(c);
    return s;
}

int FourierFunction::max_frequency() const {
    int m = 0;
    for (const auto& [l, c] : coeffs) m = std::max(m, sup_norm(l));
    return m;
}

void validate(const SobolevBall& ball) {
    require(ball.d >= 1, ErrorKind::InvalidArgument, "Sobolev ball needs d >= 1");
    require(ball.s > 0.0, ErrorKind::InvalidArgument, "Sobolev regularity s must be positive");
    require(ball.R >= 0.0, ErrorKind::InvalidArgument, "Sobolev radius must be nonnegative");
}

void validate(const HoelderBall& ball) {
    require(ball.alpha > 0.0 && ball.alpha <= 1.0, ErrorKind::InvalidArgument,
            "Hoelder exponent must lie in (0,1]");
    require(ball.R >= 0.0, ErrorKind::InvalidArgument, "Hoelder radius must be nonnegative");
}

double sobolev_seminorm_sq(const FourierFunction& f, double s) {
    double sum = 0.0;
    for (const auto& [l, c] : f.coeffs) {
        int a = sup_norm(l);
        if (a == 0) continue;
        sum += std::pow(static_cast<double>(a), 2.0 * s) * std::norm(c);
    }
    return sum;
}

FourierFunction sample_from_sobolev_ball(const SobolevBall& ball, int cutoff, std::uint64_t seed,
                                         bool to_boundary) {
    validate(ball);
    require(cutoff >= 0, ErrorKind::InvalidArgument, "cutoff must be nonnegative");
    constexpr double kEps = 0.01;
    FourierFunction f;
    f.d = ball.d;
    f.real_valued = true;
    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    double c0 = std::clamp(0.5 * ball.R * normal(rng), -ball.R, ball.R);
    f.coeffs[Frequency(static_cast<std::size_t>(ball.d), 0)] = c0;

    // Each conjugate pair is drawn once, at its lexicographically positive member.
    const double decay = -ball.s - 0.5 * ball.d - kEps;
    for_each_in_box(ball.d, cutoff, [&](const Frequency& l) {
        auto first = std::find_if(l.begin(), l.end(), [](int v) { return v != 0; });
        if (first == l.end() || *first < 0) return;
        double sd = std::pow(static_cast<double>(sup_norm(l)), decay) / std::numbers::sqrt2;
        cplx c(sd * normal(rng), sd * normal(rng));
        Frequency neg(l.size());
        std::transform(l.begin(), l.end(), neg.begin(), [](int v) { return -v; });
        f.coeffs[l] = c;
        f.coeffs[neg] = std::conj(c);
    });

    double semi = sobolev_seminorm_sq(f, ball.s);
    if (semi > 0.0 && (to_boundary || semi > ball.R * ball.R)) {
        double scale = ball.R / std::sqrt(semi);
        for (auto& [freq, c] : f.coeffs)
            if (sup_norm(freq) != 0) c *= scale;
    }
    return f;
}

double holder_worst_bias_bound(const HoelderBall& ball, std::size_t n) {
    validate(ball);
    require(n >= 1, ErrorKind::InvalidArgument, "n must be positive");
    return ball.R * ball.R / (2.0 * ball.alpha + 1.0) * std::pow(static_cast<double>(n), -2.0 * ball.alpha);
}

nlohmann::json to_json(const FourierFunction& f) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [l, c] : f.coeffs) arr.push_back({{"l", l}, {"re", c.real()}, {"im", c.imag()}});
    return arr;
}

FourierFunction fourier_function_from_json(const nlohmann::json& j, bool real_valued) {
    require(j.is_array(), ErrorKind::Io, "Fourier function JSON must be an array");
    FourierFunction f;
    f.real_valued = real_valued;
    bool first = true;
    for (const auto& rec : j) {
        Frequency l = rec.at("l").get<Frequency>();
        if (first) {
            f.d = static_cast<int>(l.size());
            first = false;
        }
        require(static_cast<int>(l.size()) == f.d, ErrorKind::Io, "inconsistent frequency dimension");
        f.coeffs[l] += cplx(rec.at("re").get<double>(), rec.at("im").get<double>());
    }
    return f;
}

}  // namespace aeq
