#pragma once

#include <Eigen/Dense>

#include <complex>

namespace aeq {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Eigenvalues below this (relative to the largest magnitude) are treated as
// roundoff of a PSD matrix and clipped to zero; anything more negative fails.
inline constexpr double kPsdClip = 1e-12;

// Hermitian eigendecomposition with the PSD clipping rule applied.
struct HermitianSpectrum {
    RVec values;   // ascending
    CMat vectors;  // columns
};

HermitianSpectrum hermitian_eig(const CMat& m);

// f(M) = V diag(f(lambda)) V* for a Hermitian PSD matrix.
template <class F>
CMat spectral_apply(const HermitianSpectrum& s, F&& f) {
    RVec mapped = s.values.unaryExpr(f);
    return s.vectors * mapped.asDiagonal() * s.vectors.adjoint();
}

CMat psd_sqrt(const HermitianSpectrum& s);
CMat psd_inverse_sqrt(const HermitianSpectrum& s);
CMat psd_inverse(const HermitianSpectrum& s);

// Ratio of extreme eigenvalue magnitudes; infinity if the smallest is zero.
double condition_number(const HermitianSpectrum& s);

}  // namespace aeq
