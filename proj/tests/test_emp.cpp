#include "aequiv/basis.hpp"
#include "aequiv/emp.hpp"
#include "aequiv/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <doctest.h>

using namespace aeq;

namespace {

std::vector<cplx> mode_values(const Design& design, int l) {
    std::vector<cplx> v(design.size());
    for (std::size_t i = 0; i < design.size(); ++i)
        v[i] = std::exp(cplx(0.0, 2 * std::numbers::pi * l * design.point(i)[0]));
    return v;
}

std::size_t index_of(const BasisFamily& b, const Frequency& l) {
    const auto& f = b.frequencies();
    return static_cast<std::size_t>(std::find(f.begin(), f.end(), l) - f.begin());
}

}  // namespace

TEST_SUITE("emp") {

TEST_CASE("empirical inner product") {
    std::vector<cplx> ones(4, 1.0);
    CHECK(empirical_inner(ones, ones) == cplx(1.0, 0.0));
    Design g = equidistant_grid(5, 1);
    CHECK(std::abs(empirical_inner(mode_values(g, 2), mode_values(g, -3)) - 1.0) < 1e-14);
    CHECK(std::abs(empirical_inner(mode_values(g, 1), mode_values(g, 0))) < 1e-14);
}

TEST_CASE("isometric geometries") {
    EmpiricalGeometry f1(BasisFamily::fourier_block(31, 1), equidistant_grid(31, 1));
    CHECK((f1.gram() - CMat::Identity(31, 31)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(f1.isometric());
    auto [a, b] = f1.isomorphism_constants();
    CHECK(a == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(b == doctest::Approx(1.0).epsilon(1e-12));

    EmpiricalGeometry pc(BasisFamily::piecewise_constant(12), equidistant_grid(12, 1));
    CHECK((pc.gram() - CMat::Identity(12, 12)).cwiseAbs().maxCoeff() <= 1e-15);

    EmpiricalGeometry one(BasisFamily::fourier_enumerated(1, 1), equidistant_grid(1, 1));
    auto [a1, b1] = one.isomorphism_constants();
    CHECK(a1 == 1.0);
    CHECK(b1 == 1.0);
}

TEST_CASE("random design Gram is Hermitian with unit diagonal") {
    EmpiricalGeometry g(BasisFamily::fourier_enumerated(1, 9), uniform_random_design(64, 1, 3));
    CHECK((g.gram() - g.gram().adjoint()).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < 9; ++i) CHECK(std::abs(g.gram()(i, i) - 1.0) < 1e-15);
    CMat m = fourier_gram_by_moments(g.design(), g.basis().frequencies());
    CHECK((m - g.gram()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("random design is 2-isomorphic on the first 16 modes") {
    EmpiricalGeometry g(BasisFamily::fourier_enumerated(1, 16), uniform_random_design(512, 1, 2024));
    auto [a, b] = g.isomorphism_constants();
    CHECK(a >= 0.5);
    CHECK(b <= 2.0);
}

TEST_CASE("interpolation and aliasing") {
    BasisFamily fam = BasisFamily::fourier_block(31, 1);
    EmpiricalGeometry g(fam, equidistant_grid(31, 1));
    CVec c = g.interpolate(mode_values(g.design(), 3));
    for (Eigen::Index j = 0; j < c.size(); ++j)
        CHECK(std::abs(c(j) - (static_cast<std::size_t>(j) == index_of(fam, {3}) ? 1.0 : 0.0)) < 1e-12);

    BasisFamily f5 = BasisFamily::fourier_block(5, 1);
    EmpiricalGeometry g5(f5, equidistant_grid(5, 1));
    CVec a = g5.interpolate(mode_values(g5.design(), 7));
    for (Eigen::Index j = 0; j < 5; ++j)
        CHECK(std::abs(a(j) - (static_cast<std::size_t>(j) == index_of(f5, {2}) ? 1.0 : 0.0)) < 1e-10);

    std::vector<cplx> zero(5, 0.0);
    CHECK(g5.interpolate(zero).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("projection truncates where interpolation aliases") {
    BasisFamily f5 = BasisFamily::fourier_block(5, 1);
    FourierFunction f;
    f.coeffs[{2}] = 1.0;
    f.coeffs[{7}] = 1.0;
    CVec p = l2_project_fourier(f, 5);
    EmpiricalGeometry g5(f5, equidistant_grid(5, 1));
    CVec c = g5.interpolate(g5.sample([&](std::span<const double> x) { return f(x); }));
    const auto i2 = static_cast<Eigen::Index>(index_of(f5, {2}));
    CHECK(std::abs(p(i2) - 1.0) < 1e-14);
    CHECK(std::abs(c(i2) - 2.0) < 1e-12);
    CHECK(p.cwiseAbs().sum() == doctest::Approx(1.0));

    FourierFunction h;
    h.coeffs[{3}] = 1.0;
    CHECK(l2_project_fourier(h, 5).cwiseAbs().maxCoeff() == 0.0);
    FourierFunction k;
    k.coeffs[{-2}] = 0.5;
    k.coeffs[{1}] = 2.0;
    CHECK(fourier_l2_distance_sq(k, f5, l2_project_fourier(k, 5)) < 1e-28);
}

TEST_CASE("HS distance to the identity") {
    CHECK(hs_distance_identity(CMat::Identity(3, 3), false) == 0.0);
    CMat m = CMat::Identity(2, 2);
    m(0, 0) = 2.0;
    CHECK(hs_distance_identity(m, true) == doctest::Approx(0.5));
    const double a = 1e-3;
    CMat s = (1 + a) * CMat::Identity(7, 7);
    CHECK(hs_distance_identity(s, true) == doctest::Approx(std::sqrt(7.0) * a / (1 + a)).epsilon(1e-10));
}

TEST_CASE("singular design is refused") {
    EmpiricalGeometry g(BasisFamily::fourier_enumerated(1, 3), Design::from_points(1, {0.5, 0.5, 0.25}));
    std::vector<cplx> v(3, 1.0);
    CHECK_THROWS_AS(g.interpolate(v), Error);
}

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    auto [x, w] = gauss_legendre(8);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::pow(x[i], 14);
    CHECK(s == doctest::Approx(2.0 / 15.0).epsilon(1e-14));
}

TEST_CASE("piecewise-constant interpolation error of f(x) = x") {
    double e = piecewise_constant_interpolation_error_sq([](double x) { return x; }, equidistant_grid(10, 1));
    CHECK(std::abs(e - 1.0 / 300.0) < 1e-14);
}

TEST_CASE("matrix csv layout") {
    CMat m(1, 2);
    m << cplx(1.0, -2.0), cplx(0.5, 0.0);
    std::ostringstream out;
    write_matrix_csv(m, out);
    CHECK(out.str() == "re1,im1,re2,im2\n1,-2,0.5,0\n");
}

}
