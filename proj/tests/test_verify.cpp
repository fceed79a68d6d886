#include "aequiv/basis.hpp"
#include "aequiv/error.hpp"
#include "aequiv/transform.hpp"
#include "aequiv/verify.hpp"

#include <cmath>

#include <doctest.h>

using namespace aeq;

TEST_SUITE("verify") {

TEST_CASE("mean and standard error") {
    MeanSe m = mean_se({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(within_se({0.0, 0.0}, 0.0, 4.0));
    CHECK_FALSE(within_se({1.0, 0.1}, 0.0, 4.0));
    CHECK(outside_regime(4096, 4096));
    CHECK_FALSE(outside_regime(32, 4096));
}

TEST_CASE("cross products match an explicit Gram-Schmidt") {
    Design design = uniform_random_design(40, 1, 6);
    CMat u = gram_schmidt_cross_products(design, 6);
    EmpiricalGeometry g(BasisFamily::fourier_enumerated(1, 6), design);
    GramSchmidtFactor f = empirical_gram_schmidt(g);
    const CMat& e = g.evaluation();
    for (Eigen::Index k = 0; k < 6; ++k)
        for (Eigen::Index k1 = k; k1 < 6; ++k1) {
            cplx direct = f.Q.col(k).dot(e.col(k1)) / 40.0;  // <phi_k', phi_k^n>_n
            CHECK(std::abs(u(k, k1) - direct) < 1e-10);
        }
    // first row: plain moments
    CHECK(std::abs(u(0, 1) - g.gram()(0, 1)) < 1e-14);
}

TEST_CASE("cross products have rotation-invariant moduli") {
    Design design = uniform_random_design(50, 1, 12);
    std::vector<double> theta = {0.37};
    CMat a = gram_schmidt_cross_products(design, 6);
    CMat b = gram_schmidt_cross_products(rotated_design(design, theta), 6);
    CHECK((a.cwiseAbs() - b.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("index lists") {
    CHECK(all_pairs(8).size() == 28);
    CHECK(all_triples(8).size() == 56);
    CHECK(all_pairs(3)[2].k == 2);
}

TEST_CASE("symmetry check") {
    CheckResult r = check_symmetry_zero_mean(200, 1, {{2, 5}, {1, 3}}, {{1, 2, 3}}, 500, 3);
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.estimates.contains("pair(2,5).re"));
    CHECK_THROWS_AS(symmetry_replicate(equidistant_grid(9, 1), 4), Error);
}

TEST_CASE("symmetry check is thread-count independent") {
    auto a = check_symmetry_zero_mean(60, 1, all_pairs(4), all_triples(4), 300, 7, 1);
    auto b = check_symmetry_zero_mean(60, 1, all_pairs(4), all_triples(4), 300, 7, 3);
    CHECK(to_json(a).dump() == to_json(b).dump());
}

TEST_CASE("trig discretization with the 2 pi constant") {
    CheckResult r = check_trig_discretization(2, 0.25, 1, 20, 5);
    CHECK(r.estimates.at("violations_2pi_constant") == 0.0);
    CheckResult fine = check_trig_discretization(2, 1.0 / 32, 1, 20, 5);
    CHECK(fine.thresholds.at("rhs_factor") < r.thresholds.at("rhs_factor"));
    CHECK(fine.estimates.at("violations_2pi_constant") == 0.0);
    CHECK_THROWS_AS(check_trig_discretization(4, 0.3, 1, 5, 1), Error);
}

TEST_CASE("multinomial maximum") {
    CheckResult big = check_multinomial_max(10000, 50, 20.0, 200, 1);
    CHECK(big.estimates.at("exceedance_probability") == 0.0);
    CHECK(big.verdict == Verdict::Pass);
    CheckResult one = check_multinomial_max(1000, 1, 3.0, 50, 1);
    CHECK(one.estimates.at("exceedance_probability") == 0.0);
    CheckResult broken = check_multinomial_max(10000, 50, 1.0, 50, 1);
    CHECK(broken.verdict == Verdict::Fail);
    CHECK(check_multinomial_max(100000, 100, 3.0, 2000, 42).thresholds.at("bound") ==
          doctest::Approx(4.0 * std::pow(100.0, -1.25)).epsilon(1e-14));
}

TEST_CASE("isomorphy event") {
    CheckResult one = check_isomorphy_event(64, 1, 20, 1);
    CHECK(one.estimates.at("min_A") == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.estimates.at("max_B") == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(one.passed());
    CheckResult crowded = check_isomorphy_event(64, 32, 20, 1);
    CHECK(crowded.estimates.at("failures") > 0.0);
    CHECK_FALSE(crowded.notes.empty());
}

TEST_CASE("projection growth") {
    CheckResult r = check_projection_growth(512, {1, 2, 4, 8}, 300, 4);
    CHECK(r.estimates.at("j=1.restricted") == 0.0);
    CHECK(r.estimates.at("j=1.unrestricted") == 0.0);
    CHECK(r.passed());
    CHECK(r.estimates.at("j=2.restricted") < r.estimates.at("j=8.restricted"));
}

TEST_CASE("decomposition terms") {
    SobolevBall ball{1, 1.0, 1.0};
    FourierFunction zero;
    zero.coeffs[{0}] = 0.0;
    CheckResult a = decompose_terms(256, 8, ball, zero, 1.0, 100, 2);
    CHECK(a.estimates.at("I") == 0.0);
    CHECK(a.estimates.at("III") == 0.0);
    CHECK(a.passed());
    CheckResult b = decompose_terms(256, 16, ball, zero, 1.0, 100, 2);
    double ratio = b.estimates.at("II") / a.estimates.at("II");
    CHECK(ratio >= 2.0);
    CHECK(ratio <= 8.0);

    FourierFunction f = sample_from_sobolev_ball(ball, 6, 1);
    CheckResult c = decompose_terms(256, 4, ball, f, 1.0, 50, 2);
    CHECK(c.estimates.at("I") > 0.0);
    CHECK(c.estimates.at("III") > 0.0);
    CHECK(c.estimates.contains("constant_III"));
}

TEST_CASE("transform covariance") {
    EmpiricalGeometry g(BasisFamily::fourier_enumerated(1, 5), uniform_random_design(32, 1, 9));
    CHECK(check_transform_covariance(g, "Z2", 1.0, 2, 400, 1).passed());
    CheckResult zr = check_transform_covariance(g, "Zr", 1.0, 2, 400, 1);
    CHECK(zr.passed());
    CHECK(zr.estimates.contains("cross_block_max_abs_z"));
    CHECK_THROWS_AS(check_transform_covariance(g, "Z9", 1.0, 2, 10, 1), Error);
}

}
