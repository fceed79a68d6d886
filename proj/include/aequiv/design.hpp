#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace aeq {

enum class DesignKind { EquidistantGrid, Perturbed, UniformRandom, Explicit };

const char* to_string(DesignKind kind);

// A set of n design points in [0,1]^d, stored row-major.
class Design {
public:
    Design() = default;

    // Arbitrary points; validates the unit-cube constraint. kind = Explicit.
    static Design from_points(int d, std::vector<double> coords);

    int dim() const noexcept { return d_; }
    std::size_t size() const noexcept { return d_ == 0 ? 0 : coords_.size() / static_cast<std::size_t>(d_); }
    DesignKind kind() const noexcept { return kind_; }
    int grid_points_per_axis() const noexcept { return grid_m_; }
    std::uint64_t seed() const noexcept { return seed_; }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
    }
    const std::vector<double>& coords() const noexcept { return coords_; }

    friend bool operator==(const Design&, const Design&) = default;

private:
    friend Design equidistant_grid(int m, int d);
    friend Design perturbed_design(std::span<const double> deviations);
    friend Design uniform_random_design(std::size_t n, int d, std::uint64_t seed);

    int d_ = 0;
    std::vector<double> coords_;
    DesignKind kind_ = DesignKind::Explicit;
    int grid_m_ = 0;
    std::uint64_t seed_ = 0;
};

// Points k/m, k in {1..m}^d, lexicographic in k with the last axis fastest.
Design equidistant_grid(int m, int d);

// x_i = i/n + deviations[i-1]; must be strictly increasing inside [0,1].
Design perturbed_design(std::span<const double> deviations);

// sum_i |x_i - i/n|^{2 alpha} for a one-dimensional ordered design.
double perturbation_sum(const Design& design, double alpha);

// i.i.d. uniform points, a pure function of (n, d, seed).
Design uniform_random_design(std::size_t n, int d, std::uint64_t seed);

// CSV with header x1..xd, one point per row, 17 significant digits.
void write_csv(const Design& design, std::ostream& out);
Design read_csv(std::istream& in);

}  // namespace aeq
