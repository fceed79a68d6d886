#pragma once

#include "aequiv/funclass.hpp"
#include "aequiv/linalg.hpp"
#include "aequiv/scaling.hpp"

#include <memory>
#include <span>
#include <vector>

namespace aeq {

// First `count` frequencies of Z^d ordered by |l|_2, ties broken coordinate by
// coordinate on (|l_r|, sign) with negative before positive. Starts at l = 0.
std::vector<Frequency> enumerate_frequencies(int d, std::size_t count);

// All l with |l|_inf <= (m-1)/2 in enumeration order; m must be odd.
std::vector<Frequency> fourier_block(int m, int d);

// Periodic linear B-spline L2 Gram, n = m^d, entries 4^{#{r: k_r = l_r}} / (6^d n)
// for periodic |k - l|_inf <= 1. Requires m >= 3.
RMat spline_l2_gram(int m, int d);

enum class BasisKind { PiecewiseConstant, Fourier, SplineLinearPeriodic, ScalingSystem };

const char* to_string(BasisKind kind);

// An enumerated function system on [0,1]^d. Indices are 0-based.
class BasisFamily {
public:
    // sqrt(n) 1_{(i/n, (i+1)/n]}, d = 1.
    static BasisFamily piecewise_constant(std::size_t n);
    static BasisFamily fourier(std::vector<Frequency> frequencies);
    static BasisFamily fourier_block(int m, int d);
    static BasisFamily fourier_enumerated(int d, std::size_t count);
    // b_k(x) = prod_r hat(m x_r - k_r) periodized, k in {1..m}^d lexicographic.
    static BasisFamily spline_linear_periodic(int m, int d);
    // Periodized phi_jk on level j, k in {1..2^j}^d lexicographic.
    static BasisFamily scaling_system(const Filter& filter, int level, int d);

    BasisKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return d_; }
    std::size_t size() const noexcept { return size_; }
    bool l2_orthonormal() const noexcept { return kind_ != BasisKind::SplineLinearPeriodic; }

    cplx evaluate(std::size_t j, std::span<const double> x) const;

    // <psi_j, phi_l>_{L2}: the l-th Fourier coefficient of basis function j.
    // Not available for scaling systems.
    cplx fourier_coefficient(std::size_t j, const Frequency& l) const;

    // L2 Gram <psi_k, psi_j> in basis coordinates.
    RMat l2_gram() const;

    const std::vector<Frequency>& frequencies() const noexcept { return freqs_; }
    // Restriction to the first `count` functions (Fourier families only).
    BasisFamily leading(std::size_t count) const;

    int grid_points_per_axis() const noexcept { return m_; }
    int level() const noexcept { return level_; }
    const Filter& filter() const noexcept { return filter_; }

private:
    BasisFamily() = default;

    BasisKind kind_ = BasisKind::Fourier;
    int d_ = 1;
    std::size_t size_ = 0;
    int m_ = 0;      // per-axis count for splines and scaling systems
    int level_ = 0;  // scaling systems
    std::vector<Frequency> freqs_;
    Filter filter_;
    std::shared_ptr<const ScalingCascade> cascade_;
};

}  // namespace aeq
