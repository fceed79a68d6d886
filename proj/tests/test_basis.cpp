#include "aequiv/basis.hpp"
#include "aequiv/error.hpp"

#include <cmath>
#include <numbers>

#include <doctest.h>

using namespace aeq;

namespace {

// Midpoint rule on [0,1] with many cells; exact enough for piecewise linear integrands.
template <class F>
cplx integrate01(F&& f, int cells = 20000) {
    cplx s = 0.0;
    for (int i = 0; i < cells; ++i) {
        double x = (i + 0.5) / cells;
        s += f(x);
    }
    return s / static_cast<double>(cells);
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("enumeration d=1") {
    auto f = enumerate_frequencies(1, 5);
    std::vector<Frequency> want = {{0}, {-1}, {1}, {-2}, {2}};
    CHECK(f == want);
    CHECK(enumerate_frequencies(1, 1) == std::vector<Frequency>{{0}});
}

TEST_CASE("enumeration d=2 starts with the origin and the unit ring") {
    auto f = enumerate_frequencies(2, 5);
    std::vector<Frequency> want = {{0, 0}, {0, -1}, {0, 1}, {-1, 0}, {1, 0}};
    CHECK(f == want);
    auto g = enumerate_frequencies(2, 200);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(squared_norm(g[i - 1]) <= squared_norm(g[i]));
}

TEST_CASE("Fourier evaluation") {
    auto b = BasisFamily::fourier({{1}, {-4}});
    std::vector<double> x = {0.25};
    CHECK(std::abs(b.evaluate(0, x) - cplx(0.0, 1.0)) < 1e-15);
    std::vector<double> zero = {0.0};
    CHECK(b.evaluate(1, zero) == cplx(1.0, 0.0));
}

TEST_CASE("spline hat peaks at its node") {
    auto b = BasisFamily::spline_linear_periodic(4, 1);
    std::vector<double> x = {0.25};
    CHECK(b.evaluate(0, x) == cplx(1.0, 0.0));
    CHECK(std::abs(b.evaluate(1, x)) == 0.0);
    std::vector<double> y = {0.375};
    CHECK(b.evaluate(0, y).real() == doctest::Approx(0.5));
    CHECK(b.evaluate(1, y).real() == doctest::Approx(0.5));
}

TEST_CASE("spline L2 Gram") {
    RMat g = spline_l2_gram(4, 1);
    CHECK(g(0, 0) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(g(0, 1) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));
    CHECK(g(0, 3) == doctest::Approx(1.0 / 24.0).epsilon(1e-15));  // periodic neighbour
    CHECK(g(0, 2) == 0.0);
    for (auto [m, d] : {std::pair{4, 1}, {5, 2}, {3, 3}}) {
        RMat h = spline_l2_gram(m, d);
        const double n = std::pow(m, d);
        for (Eigen::Index i = 0; i < h.rows(); ++i) CHECK(h.row(i).sum() == doctest::Approx(1.0 / n).epsilon(1e-13));
    }
    // quadrature oracle
    auto b = BasisFamily::spline_linear_periodic(6, 1);
    RMat q = spline_l2_gram(6, 1);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j) {
            cplx v = integrate01([&](double x) {
                std::vector<double> p = {x};
                return b.evaluate(i, p) * std::conj(b.evaluate(j, p));
            });
            CHECK(std::abs(v - q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) < 1e-8);
        }
    CHECK_THROWS_AS(spline_l2_gram(2, 1), Error);
}

TEST_CASE("Fourier coefficients of non-Fourier families against quadrature") {
    auto pc = BasisFamily::piecewise_constant(5);
    auto sp = BasisFamily::spline_linear_periodic(5, 1);
    for (int l : {-3, 0, 1, 7})
        for (std::size_t j : {std::size_t{0}, std::size_t{3}}) {
            const Frequency freq = {l};
            for (const BasisFamily* fam : {&pc, &sp}) {
                cplx want = integrate01([&](double x) {
                    std::vector<double> p = {x};
                    return fam->evaluate(j, p) * std::exp(cplx(0.0, -2 * std::numbers::pi * l * x));
                });
                CHECK(std::abs(fam->fourier_coefficient(j, freq) - want) < 1e-7);
            }
        }
}

TEST_CASE("even Fourier grid is a convention error") {
    try {
        BasisFamily::fourier_block(4, 1);
        FAIL("even m accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Convention);
    }
    CHECK(fourier_block(3, 2).size() == 9);
}

TEST_CASE("leading subfamily") {
    auto b = BasisFamily::fourier_enumerated(1, 9);
    auto l = b.leading(3);
    CHECK(l.size() == 3);
    CHECK(l.frequencies() == enumerate_frequencies(1, 3));
}

}
