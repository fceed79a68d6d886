#pragma once

#include "aequiv/linalg.hpp"

#include <string>
#include <vector>

#include <json.hpp>

namespace aeq {

// Refinement filter h_0..h_{N-1} of an orthonormal scaling function
// phi(x) = sqrt(2) sum_k h_k phi(2x - k), supported on [0, N-1].
struct Filter {
    std::string name;
    std::vector<double> taps;

    std::size_t length() const noexcept { return taps.size(); }
};

// "haar", "db2" (4 taps), "db3" (6 taps).
Filter named_filter(const std::string& name);
// JSON array of taps.
Filter filter_from_json(const nlohmann::json& j);

// phi(k) for k = 0..N-2 (phi(N-1) = 0 under the right-continuous convention),
// the eigenvector of the integer refinement matrix for eigenvalue 1, scaled so
// the values sum to 1. Throws DegenerateFilter unless that eigenvalue is simple.
std::vector<double> scaling_values_at_integers(const Filter& filter);

// phi sampled on the dyadic grid k 2^{-levels} over [0, N-1] by the cascade
// recursion from the integer values. levels <= 12.
class ScalingCascade {
public:
    ScalingCascade(const Filter& filter, int levels);

    int levels() const noexcept { return levels_; }
    double support_end() const noexcept { return support_end_; }
    const std::vector<double>& samples() const noexcept { return samples_; }

    // Exact on the dyadic grid, linear interpolation between grid points.
    double operator()(double t) const;
    // sum_{m in Z} phi(t + period * m).
    double periodized(double t, double period) const;

private:
    int levels_;
    double support_end_;
    std::vector<double> samples_;
};

struct InterpolationConstant {
    double value;   // min over the u-grid of |sum_k phi(k) e^{iku}|^d
    double lower;   // certified lower bound for the infimum
    double upper;   // equals value: a grid minimum bounds the infimum from above
    double lipschitz;
    std::size_t grid;
};

// A = inf_u |sum_k phi(k) e^{iku}|^d, with a Lipschitz-certified bracket.
InterpolationConstant interpolation_constant_A(const Filter& filter, int d, std::size_t grid = 1 << 16);

// Sufficient condition |phi(k0)| > sum_{k != k0} |phi(k)| for A > 0.
bool dominant_value_check(const std::vector<double>& values, std::size_t k0);

// Empirical Gram of the periodized level-j system on the dyadic grid, in the
// (phi_jk) coordinates: prod_a sum_b phi(b - k_a) phi(b - l_a) with indices mod 2^j.
RMat scaling_toeplitz_gram(const Filter& filter, int level, int d);

}  // namespace aeq
