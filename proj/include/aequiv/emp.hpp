#pragma once

#include "aequiv/basis.hpp"
#include "aequiv/design.hpp"
#include "aequiv/funclass.hpp"
#include "aequiv/linalg.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <span>
#include <utility>

namespace aeq {

// <f, g>_n = (1/n) sum_i f(x_i) conj(g(x_i)).
cplx empirical_inner(std::span<const cplx> f, std::span<const cplx> g);

// Condition number above which E is treated as singular.
inline constexpr double kSingularCondition = 1e12;

// Evaluation operator and empirical Gram of a (basis, design) pair.
//
// The Gram is held in L2-orthonormal coordinates. For the spline family the
// raw evaluation matrix E is whitened by H^{-1/2}, H the L2 Gram, so that the
// eigenvalues of gram() are those of the pencil (E*E/n, H).
class EmpiricalGeometry {
public:
    EmpiricalGeometry(BasisFamily basis, Design design);

    const BasisFamily& basis() const noexcept { return basis_; }
    const Design& design() const noexcept { return design_; }
    std::size_t n() const noexcept { return design_.size(); }
    std::size_t basis_size() const noexcept { return basis_.size(); }

    // E[i][j] = psi_j(x_i).
    const CMat& evaluation() const noexcept { return e_; }
    // E H^{-1/2}; the same matrix as evaluation() for orthonormal families.
    const CMat& orthonormal_evaluation() const noexcept { return e_on_; }
    // (1/n) E_on^* E_on, entry (j, k) = <psi_k, psi_j>_n in orthonormal coordinates.
    const CMat& gram() const noexcept { return g_; }
    // (1/n) E^* E in the raw basis coordinates.
    CMat basis_gram() const;
    // H^{-1/2}: maps orthonormal coordinates to basis coordinates.
    const CMat& whitener() const noexcept { return whitener_; }

    // Cached, computed once on first use; safe to call concurrently.
    const HermitianSpectrum& spectrum() const;

    // Ratio of extreme singular values of E (square geometries); cached.
    double evaluation_condition() const;
    // (A_n, B_n) = (sqrt(lambda_min), sqrt(lambda_max)) of gram().
    std::pair<double, double> isomorphism_constants() const;
    bool isometric(double tol = 1e-8) const;

    // Coefficients c (basis coordinates) with E c = fvals. Square systems only.
    CVec interpolate(std::span<const cplx> fvals) const;

    // Function values at the design points.
    std::vector<cplx> sample(const std::function<cplx(std::span<const double>)>& f) const;

private:
    struct Cache {
        std::once_flag once;
        HermitianSpectrum spectrum;
        std::once_flag cond_once;
        double condition = 0.0;
    };

    BasisFamily basis_;
    Design design_;
    CMat e_;
    CMat e_on_;
    CMat whitener_;
    CMat g_;
    std::shared_ptr<Cache> cache_;
};

// Coefficients of P_n f on the odd-m Fourier block, in fourier_block(m, d) order.
CVec l2_project_fourier(const FourierFunction& f, int m);

// ||f - g||_{L2}^2 where g = sum_j coeffs[j] phi_{l_j} over a Fourier family.
double fourier_l2_distance_sq(const FourierFunction& f, const BasisFamily& family, const CVec& coeffs);

// Frobenius norm of M - Id, or of M^{-1} - Id when inverted.
double hs_distance_identity(const CMat& m, bool inverted);

// Row-major CSV with a (re, im) column pair per entry, 17 significant digits.
void write_matrix_csv(const CMat& m, std::ostream& out);

// Gram of the Fourier family on an arbitrary design from the moments
// A_q = (1/n) sum_i exp(2 pi i <q, x_i>): entry (j, k) = A_{l_k - l_j}.
CMat fourier_gram_by_moments(const Design& design, const std::vector<Frequency>& freqs);

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points);

// ||f - I_n f||_{L2}^2 for the d = 1 piecewise-constant interpolant that takes
// the value f(x_i) on ((i-1)/n, i/n]; Gauss-Legendre quadrature per cell.
double piecewise_constant_interpolation_error_sq(const std::function<double(double)>& f, const Design& design,
                                                 int points = 16);

}  // namespace aeq
