#include "aequiv/basis.hpp"
#include "aequiv/error.hpp"
#include "aequiv/lecam.hpp"
#include "aequiv/rng.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

using namespace aeq;

namespace {

// sup ||f - I_m f||^2 over the d = 1 ball, by brute force on frequencies
// |nu| <= (m - 1)/2 + K m: the error quadratic form weighted by |nu|^{-s}.
double brute_force_sup_sq(int m, double s, double R, int K) {
    const int h = (m - 1) / 2, top = h + K * m;
    std::vector<int> nu;
    for (int v = -top; v <= top; ++v)
        if (v != 0) nu.push_back(v);
    const auto N = static_cast<Eigen::Index>(nu.size());
    // error coefficients e = A a; inside the block e_l = -sum_{k != 0} a_{l+km}, outside e_v = a_v
    RMat A = RMat::Zero(N + 1, N);
    auto residue = [&](int v) { return ((v % m) + m + h) % m - h; };
    for (Eigen::Index q = 0; q < N; ++q) {
        int v = nu[static_cast<std::size_t>(q)];
        if (std::abs(v) > h) {
            A(q, q) = 1.0;
            int l = residue(v);
            Eigen::Index row = l == 0 ? N : static_cast<Eigen::Index>(std::find(nu.begin(), nu.end(), l) - nu.begin());
            A(row, q) -= 1.0;
        }
    }
    RVec w(N);
    for (Eigen::Index q = 0; q < N; ++q) w(q) = std::pow(std::abs(nu[static_cast<std::size_t>(q)]), -s);
    RMat B = A * w.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMat> es(B.transpose() * B, Eigen::EigenvaluesOnly);
    return R * R * es.eigenvalues().maxCoeff();
}

double zeta(double x) {
    double s = 0.0;
    for (int k = 1; k < 200000; ++k) s += std::pow(k, -x);
    // Euler-Maclaurin remainder from N = 200000
    const double N = 200000.0;
    return s + std::pow(N, 1 - x) / (x - 1) - 0.5 * std::pow(N, -x);
}

}  // namespace

TEST_SUITE("lecam") {

TEST_CASE("total variation of a Gaussian shift") {
    CHECK(tv_gaussian_shift(0.0, 10.0, 1.0) == 0.0);
    CHECK(tv_gaussian_shift(1.0, 4.0, 1.0) == doctest::Approx(0.6826894921370859).epsilon(1e-14));
    double prev = 0.0;
    for (double b : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        double v = tv_gaussian_shift(b, 4.0, 1.0);
        CHECK(v > prev);
        prev = v;
    }
    CHECK(tv_gaussian_shift(INFINITY, 4.0, 1.0) == 1.0);
    CHECK(normal_cdf(0.0) == 0.5);
}

TEST_CASE("Hellinger distance between covariances") {
    auto id = hellinger_gaussian_cov(CMat::Identity(3, 3));
    CHECK(id.exact == 0.0);
    CHECK(id.bound == 0.0);
    CMat two = 2.0 * CMat::Identity(1, 1);
    auto h = hellinger_gaussian_cov(two, 0.7);
    CHECK(h.exact == doctest::Approx(2.0 - 2.0 * std::sqrt(2.0 * std::sqrt(2.0) / 3.0)).epsilon(1e-14));
    CHECK(h.exact == doctest::Approx(0.058033).epsilon(1e-5));
    CHECK(h.bound == doctest::Approx(2.0));
    CMat bad = -CMat::Identity(2, 2);
    CHECK_THROWS_AS(hellinger_gaussian_cov(bad), Error);
}

TEST_CASE("Hellinger exact value is below the bound") {
    Rng rng = make_rng(99);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        const int k = 1 + t % 8;
        CMat a(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) a(i, j) = cplx(g(rng), g(rng)) * 0.2;
        CMat s = CMat::Identity(k, k) + a * a.adjoint();
        auto h = hellinger_gaussian_cov(s);
        CHECK(h.exact <= h.bound);
    }
}

TEST_CASE("lattice sums against zeta values") {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    LatticeSum one = lattice_sum(1, 1.0);
    CHECK(one.lower <= pi2 / 3.0);
    CHECK(one.upper >= pi2 / 3.0);
    CHECK(one.value == doctest::Approx(pi2 / 3.0).epsilon(1e-9));
    // d = 2: shells of size 8r, sum = 8 zeta(2s - 1)
    CHECK(lattice_sum(2, 1.5).value == doctest::Approx(8.0 * pi2 / 6.0).epsilon(1e-9));
    CHECK(lattice_sum(2, 2.0).value == doctest::Approx(8.0 * zeta(3.0)).epsilon(1e-9));
    // d = 3: shells 24 r^2 + 2
    CHECK(lattice_sum(3, 2.0).value == doctest::Approx(4.0 * pi2 + 2.0 * pi2 * pi2 / 90.0).epsilon(1e-9));
    CHECK(std::isinf(lattice_sum(2, 1.0).value));
}

TEST_CASE("shell tail bound dominates the explicit tail") {
    for (int d : {1, 2, 3})
        for (double shift : {0.0, 0.5}) {
            const double s = 0.5 * d + 0.75;
            const int K = 10;
            double tail = 0.0;
            for (int r = K + 1; r < 200000; ++r)
                tail += (std::pow(2.0 * r + 1, d) - std::pow(2.0 * r - 1, d)) * std::pow(r - shift, -2 * s);
            CHECK(shell_tail_bound(d, s, K, shift) >= tail);
            CHECK(shell_tail_bound(d, s, K, shift) <= 1.5 * tail + 1e-3);
        }
}

TEST_CASE("Fourier bias sup: components") {
    BiasSup b = fourier_sobolev_sup(5, {1, 1.0, 1.0});
    CHECK(b.classical == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    const double pi2 = std::numbers::pi * std::numbers::pi;
    CHECK(b.aliasing == doctest::Approx((4.0 + pi2 / 3.0) / 25.0).epsilon(1e-9));
    CHECK(b.sup_sq >= b.sup_sq_lower);
    CHECK(b.sup_sq <= b.classical + b.aliasing);
    CHECK(b.sup_sq >= b.classical);
    BiasSup zero = fourier_sobolev_sup(5, {1, 1.0, 0.0});
    CHECK(zero.sup() == 0.0);
    CHECK_THROWS_AS(fourier_sobolev_sup(4, {1, 1.0, 1.0}), Error);
    CHECK_FALSE(fourier_sobolev_sup(5, {2, 1.0, 1.0}).finite);
}

TEST_CASE("Fourier bias sup against brute force eigenvalues") {
    for (auto [m, s] : {std::pair{5, 1.0}, {7, 1.5}, {3, 0.75}}) {
        const int K = 6;
        BiasSup b = fourier_sobolev_sup(m, {1, s, 1.3}, K);
        double brute = brute_force_sup_sq(m, s, 1.3, K);
        CHECK(b.sup_sq_lower == doctest::Approx(brute).epsilon(1e-10));
        CHECK(b.sup_sq >= brute_force_sup_sq(m, s, 1.3, 40) * (1 - 1e-12));
    }
}

TEST_CASE("generic bias sup is an upper bound on the grid") {
    EmpiricalGeometry g(BasisFamily::fourier_block(7, 1), equidistant_grid(7, 1));
    SobolevBall ball{1, 1.0, 1.0};
    BiasSup generic = generic_sobolev_sup(g, ball, 3 + 5 * 7);
    BiasSup exact = fourier_sobolev_sup(7, ball);
    CHECK(generic.form == BoundForm::Rate);
    CHECK(generic.sup_sq_lower <= exact.sup_sq + 1e-12);
    CHECK(generic.sup_sq_lower == doctest::Approx(brute_force_sup_sq(7, 1.0, 1.0, 5)).epsilon(1e-8));
    CHECK(generic.sup() >= std::sqrt(exact.sup_sq_lower));
    // hat functions reproduce constants, so the sup is finite
    EmpiricalGeometry sp(BasisFamily::spline_linear_periodic(8, 1), equidistant_grid(8, 1));
    CHECK(generic_sobolev_sup(sp, ball, 24).finite);
}

TEST_CASE("piecewise-constant Hoelder sup") {
    BiasSup b = holder_piecewise_sup({1.0, 1.0}, 10);
    CHECK(b.sup_sq == doctest::Approx(1.0 / 300.0).epsilon(1e-14));
}

TEST_CASE("Hoelder design bound") {
    BoundReport r = holder_design_bound(equidistant_grid(10, 1), {1.0, 1.0}, 1.0);
    CHECK(r.components.at("perturbation_term") == 0.0);
    CHECK(r.components.at("grid_term") == doctest::Approx(2.0 / 100.0));
    CHECK(r.value > 0.0);
    CHECK(r.value < 1.0);
    BoundReport z = holder_design_bound(equidistant_grid(10, 1), {1.0, 0.0}, 1.0);
    CHECK(z.value == 0.0);
    // max deviation c n^{-1/(2 alpha)} gives a perturbation sum at most c^{2 alpha}
    const std::size_t n = 400;
    const double alpha = 0.5, c = 0.3;
    std::vector<double> dev(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; i += 2) dev[i] = -c * std::pow(n, -1.0 / (2 * alpha)) * 0.999;
    CHECK(perturbation_sum(perturbed_design(dev), alpha) <= std::pow(c, 2 * alpha));
}

TEST_CASE("multidimensional bound") {
    BoundReport r = multidim_bound(1.0, 1, 1.0, 1.0, 31);
    CHECK(r.value > 0.0);
    CHECK(r.value < 1.0);
    CHECK(r.form == BoundForm::ExactPhi);
    CHECK(r.value == doctest::Approx(tv_gaussian_shift(r.components.at("bias_sup"), 31, 1.0)).epsilon(1e-15));
    CHECK(r.warnings.empty());
    CHECK(multidim_bound(1.0, 2, 1.0, 1.0, 49).warnings == std::vector<std::string>{"non_equivalence_s_le_d_over_2"});
    CHECK(multidim_bound(1.0, 1, 0.0, 1.0, 31).value == 0.0);
    CHECK_THROWS_AS(multidim_bound(1.0, 1, 1.0, 1.0, 32), Error);
}

TEST_CASE("random design bound") {
    CHECK(optimal_n0(1.0, 1, 1000000) == 100);
    BoundReport r = random_design_bound(1.0, 1, 0.0, 1.0, 10000, 50);
    CHECK(r.value == doctest::Approx(0.5));
    BoundReport full = random_design_bound(1.0, 1, 1.0, 1.0, 10000, 10000);
    CHECK(full.value >= 100.0);
    CHECK_THROWS_AS(random_design_bound(1.0, 1, 1.0, 1.0, 10, 11), Error);
}

TEST_CASE("rate fits") {
    std::vector<std::pair<double, double>> p;
    for (double n : {10.0, 100.0, 1000.0}) p.emplace_back(n, 3.0 * std::pow(n, -0.5));
    RateFit f = fit_rate_slope(p);
    CHECK(std::abs(f.slope + 0.5) < 1e-12);
    CHECK(f.residual < 1e-12);
    std::vector<std::pair<double, double>> c = {{2, 1.5}, {4, 1.5}, {8, 1.5}};
    CHECK(std::abs(fit_rate_slope(c).slope) < 1e-15);
    CHECK_THROWS_AS(fit_rate_slope({{1, 1}, {2, 2}}), Error);
}

TEST_CASE("integer roots") {
    CHECK(integer_root(1023 * 1023, 2) == std::optional<int>(1023));
    CHECK(integer_root(125, 3) == std::optional<int>(5));
    CHECK_FALSE(integer_root(126, 3).has_value());
}

TEST_CASE("report csv has fixed columns") {
    BoundReport r = random_design_bound(1.0, 1, 1.0, 1.0, 100, 5);
    std::string header = report_csv_header();
    std::string row = report_csv_row(r);
    CHECK(std::count(header.begin(), header.end(), ',') == std::count(row.begin(), row.end(), ','));
    CHECK(header.rfind("bound,n,d,s,R,sigma,n0,form,value,", 0) == 0);
}

}
