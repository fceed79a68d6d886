#include "aequiv/error.hpp"
#include "aequiv/linalg.hpp"

#include <cmath>
#include <limits>

namespace aeq {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SizeLimit: return "size limit exceeded";
        case ErrorKind::InvalidDesign: return "invalid design";
        case ErrorKind::IndexOutOfRange: return "index out of range";
        case ErrorKind::UnsupportedSize: return "unsupported size";
        case ErrorKind::DegenerateFilter: return "degenerate filter";
        case ErrorKind::NonIsomorphicDesign: return "non-isomorphic design";
        case ErrorKind::Convention: return "convention error";
        case ErrorKind::Singular: return "singular matrix";
        case ErrorKind::Precondition: return "precondition violated";
        case ErrorKind::OrderingViolation: return "operator ordering violated";
        case ErrorKind::RankDeficiency: return "rank deficiency";
        case ErrorKind::EmptyBin: return "empty bin";
        case ErrorKind::UnsupportedCombination: return "unsupported combination";
        case ErrorKind::InvalidArgument: return "invalid argument";
        case ErrorKind::Validation: return "validation failed";
        case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

HermitianSpectrum hermitian_eig(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(m);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::Singular, "eigendecomposition failed");
    HermitianSpectrum s{es.eigenvalues(), es.eigenvectors()};
    return s;
}

namespace {

double clipped(double lambda, double scale) {
    if (lambda >= 0.0) return lambda;
    if (lambda >= -kPsdClip * std::max(scale, 1.0)) return 0.0;
    throw Error(ErrorKind::Precondition,
                "matrix is not positive semidefinite (eigenvalue " + std::to_string(lambda) + ")");
}

double spectral_scale(const HermitianSpectrum& s) {
    return s.values.size() == 0 ? 0.0 : s.values.cwiseAbs().maxCoeff();
}

}  // namespace

CMat psd_sqrt(const HermitianSpectrum& s) {
    double scale = spectral_scale(s);
    return spectral_apply(s, [scale](double l) { return std::sqrt(clipped(l, scale)); });
}

CMat psd_inverse_sqrt(const HermitianSpectrum& s) {
    double scale = spectral_scale(s);
    return spectral_apply(s, [scale](double l) {
        double c = clipped(l, scale);
        if (c == 0.0) throw Error(ErrorKind::Singular, "inverse square root of a singular matrix");
        return 1.0 / std::sqrt(c);
    });
}

CMat psd_inverse(const HermitianSpectrum& s) {
    double scale = spectral_scale(s);
    return spectral_apply(s, [scale](double l) {
        double c = clipped(l, scale);
        if (c == 0.0) throw Error(ErrorKind::Singular, "inverse of a singular matrix");
        return 1.0 / c;
    });
}

double condition_number(const HermitianSpectrum& s) {
    if (s.values.size() == 0) return 1.0;
    double lo = s.values.cwiseAbs().minCoeff();
    double hi = s.values.cwiseAbs().maxCoeff();
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

}  // namespace aeq
