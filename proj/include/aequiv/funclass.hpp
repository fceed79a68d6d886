#pragma once

#include "aequiv/linalg.hpp"

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

namespace aeq {

// Frequency vector l in Z^d.
using Frequency = std::vector<int>;

int sup_norm(const Frequency& l);
long long squared_norm(const Frequency& l);

// Calls fn(l) for every l with |l|_inf <= radius, lexicographic, last axis fastest.
template <class F>
void for_each_in_box(int d, int radius, F&& fn) {
    Frequency l(static_cast<std::size_t>(d), -radius);
    for (;;) {
        fn(static_cast<const Frequency&>(l));
        int r = d - 1;
        while (r >= 0 && ++l[static_cast<std::size_t>(r)] > radius) {
            l[static_cast<std::size_t>(r)] = -radius;
            --r;
        }
        if (r < 0) break;
    }
}

// Finitely supported Fourier series sum_l coeffs[l] exp(2 pi i <l, x>).
struct FourierFunction {
    int d = 1;
    std::map<Frequency, cplx> coeffs;
    bool real_valued = false;

    cplx coefficient(const Frequency& l) const;
    cplx operator()(std::span<const double> x) const;
    // Sum of |coeff|^2 over the support.
    double l2_norm_sq() const;
    // Largest |l|_inf in the support (0 for an empty support).
    int max_frequency() const;
};

struct SobolevBall {
    int d = 1;
    double s = 1.0;
    double R = 1.0;
};

struct HoelderBall {
    double alpha = 1.0;
    double R = 1.0;
};

void validate(const SobolevBall& ball);
void validate(const HoelderBall& ball);

// sum_{l != 0} |l|_inf^{2s} |<f, phi_l>|^2.
double sobolev_seminorm_sq(const FourierFunction& f, double s);

// Real-valued random element of the ball with frequencies |l|_inf <= cutoff.
// Non-constant modes get complex Gaussian coefficients with standard deviation
// |l|_inf^{-s-d/2-0.01}; the constant is drawn separately and clamped to [-R, R].
// With to_boundary the non-constant part is rescaled so the seminorm equals R^2;
// otherwise it is only shrunk when it exceeds R^2.
FourierFunction sample_from_sobolev_ball(const SobolevBall& ball, int cutoff, std::uint64_t seed,
                                         bool to_boundary = true);

// R^2 (2 alpha + 1)^{-1} n^{-2 alpha}: squared L2 interpolation error bound for
// piecewise constants on the grid i/n.
double holder_worst_bias_bound(const HoelderBall& ball, std::size_t n);

// JSON form: list of {"l": [...], "re": x, "im": y}.
nlohmann::json to_json(const FourierFunction& f);
FourierFunction fourier_function_from_json(const nlohmann::json& j, bool real_valued = false);

}  // namespace aeq
