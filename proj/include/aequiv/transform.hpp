#pragma once

#include "aequiv/design.hpp"
#include "aequiv/emp.hpp"
#include "aequiv/linalg.hpp"
#include "aequiv/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace aeq {

// Y_i = f(x_i) + sigma eps_i.
struct RegressionSample {
    Design design;
    std::vector<double> y;
    double sigma = 1.0;
};

// Adds seeded N(0, sigma^2) noise to the signal values.
RegressionSample simulate_sample(const Design& design, const std::vector<double>& signal, double sigma,
                                 std::uint64_t seed);

enum class NoiseKind { Identity, Gram, GramInverse, TwoLevel };

const char* to_string(NoiseKind kind);

// Covariance scale * shape of the transformed noise, shape in the output coordinates.
struct NoiseDescriptor {
    NoiseKind kind = NoiseKind::Identity;
    double scale = 0.0;  // sigma^2 / n
    std::size_t n0 = 0;  // TwoLevel only
    CMat shape;

    CMat covariance() const { return scale * shape; }
};

struct TransformOutput {
    std::string transform;  // Z, Z1, Z2, Z3, Z5, Zr
    std::size_t n = 0;
    std::optional<std::size_t> n0;
    std::optional<std::uint64_t> seed;
    CVec coeffs;  // L2-orthonormal coordinates of the geometry
    NoiseDescriptor noise;
};

nlohmann::json to_json(const TransformOutput& out);

// Z = I_n applied to Y; requires an isometric geometry.
TransformOutput isometric_shift(const RegressionSample& sample, const EmpiricalGeometry& geometry);
// Z1 = (<Y, psi_j>_n)_j, covariance (sigma^2/n) G.
TransformOutput z1(const RegressionSample& sample, const EmpiricalGeometry& geometry);
// Z2 = G^{-1/2} Z1, covariance (sigma^2/n) Id.
TransformOutput z2(const RegressionSample& sample, const EmpiricalGeometry& geometry);
// Z3 = G^{-1} Z1, covariance (sigma^2/n) G^{-1}.
TransformOutput z3(const RegressionSample& sample, const EmpiricalGeometry& geometry);
// Z5 = Z3 + eta, eta ~ N(0, (sigma^2/n)(Id - G^{-1})); needs Id - G^{-1} >= 0.
TransformOutput z5_randomize(const TransformOutput& z3_output, const EmpiricalGeometry& geometry,
                             std::uint64_t seed);

// Tolerance below zero allowed for the smallest eigenvalue of Id - G^{-1}.
inline constexpr double kOrderingTol = 1e-10;

// Empirical Gram-Schmidt of the (orthonormalized) basis columns.
struct GramSchmidtFactor {
    CMat T;           // upper triangular, phi_j^n = sum_k T(k, j) phi_k
    CMat R;           // T^{-1}
    RVec residuals;   // r_j = ||phi_j - P_{j-1} phi_j||_n
    CMat Q;           // values of phi_j^n at the design points
};

// Modified Gram-Schmidt with one reorthogonalization pass. Throws
// RankDeficiencyError when r_j <= 1e-10 ||phi_j||_n.
GramSchmidtFactor empirical_gram_schmidt(const EmpiricalGeometry& geometry);

// Z_r: empirical orthonormalization on the first n0 functions, triangular
// whitening above. Low-block covariance (sigma^2/n) G_{n0}^{-1}, high block (sigma^2/n) Id.
TransformOutput two_level_transform(const RegressionSample& sample, const EmpiricalGeometry& geometry,
                                    std::size_t n0);
TransformOutput two_level_transform(const RegressionSample& sample, const EmpiricalGeometry& geometry,
                                    const GramSchmidtFactor& factor, std::size_t n0);

// Empirical Haar function on I_{jk} = I_{j+1,2k} u I_{j+1,2k+1}, intervals
// [k 2^-j, (k+1) 2^-j) with x = 1 placed in the last one:
// psi = C (1_{left} / N_left - 1_{right} / N_right).
struct HaarTwoLevel {
    int j = 0;
    int k = 0;
    std::int64_t n_left = 0;
    std::int64_t n_right = 0;
    std::int64_t n_parent = 0;
    Rational c_squared;  // n N_left N_right / N_parent
    double c = 0.0;
    double weight_left = 0.0;   // C / N_left
    double weight_right = 0.0;  // -C / N_right
};

// Occupancy counts of the dyadic intervals at a level.
std::vector<std::int64_t> dyadic_counts(const Design& design, int level);

// All (j, k) with j < levels; throws EmptyBin if a needed count is zero.
std::vector<HaarTwoLevel> haar_two_level_basis(const Design& design, int levels);
Rational haar_c_squared(std::int64_t n, std::int64_t n_left, std::int64_t n_right);

}  // namespace aeq
