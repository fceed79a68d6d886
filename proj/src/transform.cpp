#include "aequiv/transform.hpp"

#include "aequiv/error.hpp"
#include "aequiv/rng.hpp"

#include <cmath>
#include <random>

namespace aeq {

RegressionSample simulate_sample(const Design& design, const std::vector<double>& signal, double sigma,
                                 std::uint64_t seed) {
    require(signal.size() == design.size(), ErrorKind::InvalidArgument, "signal length differs from design size");
    require(sigma >= 0.0, ErrorKind::InvalidArgument, "sigma must be nonnegative");
    RegressionSample s{design, signal, sigma};
    if (sigma > 0.0) {
        Rng rng = make_rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (double& v : s.y) v += sigma * normal(rng);
    }
    return s;
}

const char* to_string(NoiseKind kind) {
    switch (kind) {
        case NoiseKind::Identity: return "identity";
        case NoiseKind::Gram: return "gram";
        case NoiseKind::GramInverse: return "gram_inverse";
        case NoiseKind::TwoLevel: return "two_level";
    }
    return "?";
}

nlohmann::json to_json(const TransformOutput& out) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index i = 0; i < out.coeffs.size(); ++i) coeffs.push_back({out.coeffs(i).real(), out.coeffs(i).imag()});
    nlohmann::json noise = {{"kind", to_string(out.noise.kind)}, {"scale", out.noise.scale}};
    if (out.noise.kind == NoiseKind::TwoLevel) noise["n0"] = out.noise.n0;
    nlohmann::json j = {{"transform", out.transform}, {"n", out.n}, {"coeffs", coeffs}, {"noise", noise}};
    if (out.n0) j["n0"] = *out.n0;
    if (out.seed) j["seed"] = *out.seed;
    return j;
}

namespace {

CVec observation_vector(const RegressionSample& sample, const EmpiricalGeometry& geometry) {
    require(sample.y.size() == geometry.n(), ErrorKind::InvalidArgument, "observation count differs from design size");
    require(sample.design == geometry.design(), ErrorKind::InvalidArgument, "sample design differs from geometry design");
    CVec y(static_cast<Eigen::Index>(sample.y.size()));
    for (std::size_t i = 0; i < sample.y.size(); ++i) y(static_cast<Eigen::Index>(i)) = sample.y[i];
    return y;
}

double noise_scale(const RegressionSample& sample) {
    return sample.sigma * sample.sigma / static_cast<double>(sample.y.size());
}

CVec empirical_coefficients(const RegressionSample& sample, const EmpiricalGeometry& geometry) {
    return geometry.orthonormal_evaluation().adjoint() * observation_vector(sample, geometry) /
           static_cast<double>(geometry.n());
}

void require_definite(const EmpiricalGeometry& geometry) {
    const RVec& v = geometry.spectrum().values;
    if (!(v.minCoeff() > 0.0) || condition_number(geometry.spectrum()) > kSingularCondition)
        throw Error(ErrorKind::Singular, "empirical Gram is not positive definite");
}

TransformOutput make_output(std::string name, const RegressionSample& sample, CVec coeffs, NoiseKind kind,
                            CMat shape) {
    TransformOutput out;
    out.transform = std::move(name);
    out.n = sample.y.size();
    out.coeffs = std::move(coeffs);
    out.noise.kind = kind;
    out.noise.scale = noise_scale(sample);
    out.noise.shape = std::move(shape);
    return out;
}

}  // namespace

TransformOutput isometric_shift(const RegressionSample& sample, const EmpiricalGeometry& geometry) {
    require(geometry.isometric(1e-8), ErrorKind::Precondition, "geometry is not isometric; use Z1, Z2 or Z3");
    CVec y = observation_vector(sample, geometry);
    CVec c = geometry.interpolate({y.data(), static_cast<std::size_t>(y.size())});
    const auto k = static_cast<Eigen::Index>(geometry.basis_size());
    return make_output("Z", sample, std::move(c), NoiseKind::Identity, CMat::Identity(k, k));
}

TransformOutput z1(const RegressionSample& sample, const EmpiricalGeometry& geometry) {
    return make_output("Z1", sample, empirical_coefficients(sample, geometry), NoiseKind::Gram, geometry.gram());
}

TransformOutput z2(const RegressionSample& sample, const EmpiricalGeometry& geometry) {
    require_definite(geometry);
    CVec c = psd_inverse_sqrt(geometry.spectrum()) * empirical_coefficients(sample, geometry);
    const auto k = static_cast<Eigen::Index>(geometry.basis_size());
    return make_output("Z2", sample, std::move(c), NoiseKind::Identity, CMat::Identity(k, k));
}

TransformOutput z3(const RegressionSample& sample, const EmpiricalGeometry& geometry) {
    require_definite(geometry);
    CMat inv = psd_inverse(geometry.spectrum());
    CVec c = inv * empirical_coefficients(sample, geometry);
    return make_output("Z3", sample, std::move(c), NoiseKind::GramInverse, std::move(inv));
}

TransformOutput z5_randomize(const TransformOutput& z3_output, const EmpiricalGeometry& geometry,
                             std::uint64_t seed) {
    require(z3_output.transform == "Z3", ErrorKind::InvalidArgument, "Z5 randomizes a Z3 output");
    require(static_cast<std::size_t>(z3_output.coeffs.size()) == geometry.basis_size(), ErrorKind::InvalidArgument,
            "Z3 output does not match the geometry");
    require_definite(geometry);
    const auto k = static_cast<Eigen::Index>(geometry.basis_size());
    CMat gap = CMat::Identity(k, k) - psd_inverse(geometry.spectrum());
    HermitianSpectrum s = hermitian_eig(0.5 * (gap + gap.adjoint()));
    if (s.values.minCoeff() < -kOrderingTol)
        throw Error(ErrorKind::OrderingViolation,
                    "Id - G^{-1} has eigenvalue " + std::to_string(s.values.minCoeff()));
    // eigenvalues within roundoff of zero would otherwise leak sqrt(eps)-sized noise
    CMat root = spectral_apply(s, [](double l) { return l <= kPsdClip ? 0.0 : std::sqrt(l); });

    Rng rng = make_rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    CVec xi(k);
    for (Eigen::Index i = 0; i < k; ++i) xi(i) = normal(rng);

    TransformOutput out = z3_output;
    out.transform = "Z5";
    out.seed = seed;
    out.coeffs += std::sqrt(z3_output.noise.scale) * (root * xi);
    out.noise.kind = NoiseKind::Identity;
    out.noise.shape = CMat::Identity(k, k);
    return out;
}

GramSchmidtFactor empirical_gram_schmidt(const EmpiricalGeometry& geometry) {
    const CMat& e = geometry.orthonormal_evaluation();
    const Eigen::Index n = e.rows(), k = e.cols();
    require(k <= n, ErrorKind::RankDeficiency, "more basis functions than design points");
    const double inv_n = 1.0 / static_cast<double>(n);
    GramSchmidtFactor f;
    f.Q = e;
    f.R = CMat::Zero(k, k);
    f.residuals = RVec::Zero(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        auto v = f.Q.col(j);
        const double incoming = std::sqrt(v.squaredNorm() * inv_n);
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index q = 0; q < j; ++q) {
                cplx c = f.Q.col(q).dot(v) * inv_n;  // <v, phi_q^n>_n
                v -= c * f.Q.col(q);
                f.R(q, j) += c;
            }
        const double r = std::sqrt(v.squaredNorm() * inv_n);
        if (!(r > 1e-10 * incoming)) throw RankDeficiencyError(static_cast<std::size_t>(j), r);
        v /= r;
        f.R(j, j) = r;
        f.residuals(j) = r;
    }
    f.T = f.R.triangularView<Eigen::Upper>().solve(CMat::Identity(k, k));
    f.T.triangularView<Eigen::StrictlyLower>().setZero();
    return f;
}

TransformOutput two_level_transform(const RegressionSample& sample, const EmpiricalGeometry& geometry,
                                    std::size_t n0) {
    return two_level_transform(sample, geometry, empirical_gram_schmidt(geometry), n0);
}

TransformOutput two_level_transform(const RegressionSample& sample, const EmpiricalGeometry& geometry,
                                    const GramSchmidtFactor& factor, std::size_t n0) {
    const auto k = static_cast<Eigen::Index>(geometry.basis_size());
    require(n0 >= 1 && n0 <= geometry.basis_size(), ErrorKind::IndexOutOfRange, "n0 must lie in [1, basis size]");
    require(factor.T.rows() == k, ErrorKind::InvalidArgument, "Gram-Schmidt factor does not match the geometry");
    const auto low = static_cast<Eigen::Index>(n0);
    // w_j = <Y, phi_j^n>_n
    CVec w = factor.T.adjoint() * empirical_coefficients(sample, geometry);
    CVec c = CVec::Zero(k);
    c.head(low) = factor.T.topLeftCorner(low, low) * w.head(low);
    c.tail(k - low) = w.tail(k - low);

    CMat shape = CMat::Identity(k, k);
    const CMat& t11 = factor.T.topLeftCorner(low, low);
    shape.topLeftCorner(low, low) = t11 * t11.adjoint();
    TransformOutput out = make_output("Zr", sample, std::move(c), NoiseKind::TwoLevel, std::move(shape));
    out.n0 = n0;
    out.noise.n0 = n0;
    return out;
}

std::vector<std::int64_t> dyadic_counts(const Design& design, int level) {
    require(design.dim() == 1, ErrorKind::InvalidArgument, "Haar construction is one-dimensional");
    require(level >= 0 && level <= 30, ErrorKind::InvalidArgument, "level out of range");
    const std::int64_t bins = std::int64_t{1} << level;
    std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
    for (std::size_t i = 0; i < design.size(); ++i) {
        auto b = static_cast<std::int64_t>(std::floor(design.point(i)[0] * static_cast<double>(bins)));
        counts[static_cast<std::size_t>(std::min(b, bins - 1))] += 1;
    }
    return counts;
}

Rational haar_c_squared(std::int64_t n, std::int64_t n_left, std::int64_t n_right) {
    require(n_left > 0 && n_right > 0, ErrorKind::EmptyBin, "Haar construction needs nonempty bins");
    return Rational(n) * Rational(n_left) * Rational(n_right) / Rational(n_left + n_right);
}

std::vector<HaarTwoLevel> haar_two_level_basis(const Design& design, int levels) {
    require(levels >= 1, ErrorKind::InvalidArgument, "need at least one level");
    const auto n = static_cast<std::int64_t>(design.size());
    std::vector<HaarTwoLevel> out;
    for (int j = 0; j < levels; ++j) {
        std::vector<std::int64_t> child = dyadic_counts(design, j + 1);
        for (int k = 0; k < (1 << j); ++k) {
            HaarTwoLevel h;
            h.j = j;
            h.k = k;
            h.n_left = child[static_cast<std::size_t>(2 * k)];
            h.n_right = child[static_cast<std::size_t>(2 * k + 1)];
            h.n_parent = h.n_left + h.n_right;
            if (h.n_left == 0 || h.n_right == 0)
                throw Error(ErrorKind::EmptyBin, "empty child interval at j=" + std::to_string(j) +
                                                     ", k=" + std::to_string(k));
            h.c_squared = haar_c_squared(n, h.n_left, h.n_right);
            h.c = std::sqrt(h.c_squared.to_double());
            h.weight_left = h.c / static_cast<double>(h.n_left);
            h.weight_right = -h.c / static_cast<double>(h.n_right);
            out.push_back(h);
        }
    }
    return out;
}

}  // namespace aeq
