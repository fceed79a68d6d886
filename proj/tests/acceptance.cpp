#include "aequiv/app.hpp"
#include "aequiv/basis.hpp"
#include "aequiv/emp.hpp"
#include "aequiv/io.hpp"
#include "aequiv/lecam.hpp"
#include "aequiv/rational.hpp"
#include "aequiv/rng.hpp"
#include "aequiv/transform.hpp"
#include "aequiv/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace aeq;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, const std::function<Outcome()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::ostringstream time;
    time.precision(2);
    time << std::fixed << dt;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (id < 10 ? " " : "") << id << "  " << name << "  ["
              << o.detail << "; " << time.str() << " s]" << std::endl;
}

std::string g(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

// Interpolation coefficient on l predicted by folding: sum_k a_{l + k m}.
cplx alias_sum(const FourierFunction& f, const Frequency& l, int m) {
    cplx s = 0.0;
    for (const auto& [v, c] : f.coeffs) {
        bool same = true;
        for (std::size_t r = 0; r < v.size(); ++r)
            if (((v[r] - l[r]) % m + m) % m != 0) same = false;
        if (same) s += c;
    }
    return s;
}

Outcome fourier_isometry() {
    double worst = 0.0;
    for (auto [m, d] : {std::pair{31, 1}, {7, 2}}) {
        EmpiricalGeometry geo(BasisFamily::fourier_block(m, d), equidistant_grid(m, d));
        const auto k = static_cast<Eigen::Index>(geo.basis_size());
        worst = std::max(worst, (geo.gram() - CMat::Identity(k, k)).cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-12, "max |G - Id| = " + g(worst)};
}

Outcome aliasing() {
    BasisFamily f5 = BasisFamily::fourier_block(5, 1);
    EmpiricalGeometry g5(f5, equidistant_grid(5, 1));
    FourierFunction seven;
    seven.coeffs[{7}] = 1.0;
    CVec c = g5.interpolate(g5.sample([&](std::span<const double> x) { return seven(x); }));
    double single = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        cplx want = f5.frequencies()[static_cast<std::size_t>(j)] == Frequency{2} ? 1.0 : 0.0;
        single = std::max(single, std::abs(c(j) - want));
    }
    double sweep = 0.0;
    for (std::uint64_t t = 0; t < 50; ++t) {
        const int d = t % 2 == 0 ? 1 : 2;
        const int m = d == 1 ? 9 : 5;
        FourierFunction f;
        f.d = d;
        Rng rng = make_rng(derive_seed(2024, t));
        std::uniform_int_distribution<int> freq(-25, 25);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int q = 0; q < 12; ++q) {
            Frequency l(static_cast<std::size_t>(d));
            for (int& v : l) v = freq(rng);
            f.coeffs[l] += cplx(normal(rng), normal(rng));
        }
        BasisFamily fam = BasisFamily::fourier_block(m, d);
        EmpiricalGeometry geo(fam, equidistant_grid(m, d));
        CVec a = geo.interpolate(geo.sample([&](std::span<const double> x) { return f(x); }));
        for (Eigen::Index j = 0; j < a.size(); ++j)
            sweep = std::max(sweep, std::abs(a(j) - alias_sum(f, fam.frequencies()[static_cast<std::size_t>(j)], m)));
    }
    return {single <= 1e-10 && sweep <= 1e-8, "e^{2 pi i 7x} on m=5: " + g(single) + ", 50 random f: " + g(sweep)};
}

Outcome holder_exactness() {
    // each cell contributes int_{(i-1)/n}^{i/n} (x - i/n)^2 dx = 1/(3 n^3)
    const double closed = 10.0 / (3.0 * 1000.0);
    double e = piecewise_constant_interpolation_error_sq([](double x) { return x; }, equidistant_grid(10, 1));
    double diff = std::abs(e - closed);
    return {diff <= 1e-12, "|err - 1/300| = " + g(diff)};
}

Outcome pythagoras() {
    const int m = 31;
    BasisFamily fam = BasisFamily::fourier_block(m, 1);
    EmpiricalGeometry geo(fam, equidistant_grid(m, 1));
    double worst = 0.0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        FourierFunction f = sample_from_sobolev_ball({1, 1.0, 1.0}, 80, derive_seed(7, t));
        CVec interp = geo.interpolate(geo.sample([&](std::span<const double> x) { return f(x); }));
        CVec proj = l2_project_fourier(f, m);
        double total = fourier_l2_distance_sq(f, fam, interp);
        double classical = fourier_l2_distance_sq(f, fam, proj);
        double alias = (proj - interp).squaredNorm();
        worst = std::max(worst, std::abs(total - classical - alias));
    }
    return {worst <= 1e-8, "max defect = " + g(worst)};
}

Outcome rate_recovery() {
    const std::vector<int> ms = {31, 63, 127, 255, 511, 1023};
    auto slope = [&](double s, int d) {
        std::vector<std::pair<double, double>> pts;
        for (int m : ms) {
            auto n = static_cast<std::size_t>(std::llround(std::pow(m, d)));
            pts.emplace_back(static_cast<double>(n), multidim_bound(s, d, 1.0, 1.0, n).value);
        }
        return fit_rate_slope(pts).slope;
    };
    double s1 = slope(1.0, 1), s2 = slope(1.5, 2);
    bool ok = std::abs(s1 + 0.5) <= 0.05 && std::abs(s2 + 0.25) <= 0.07;
    return {ok, "d=1 s=1 slope " + g(s1) + " (target -0.5), d=2 s=1.5 slope " + g(s2) + " (target -0.25)"};
}

Outcome spline_ordering() {
    double lowest = INFINITY;
    for (auto [m, d] : {std::pair{8, 1}, {16, 1}, {32, 1}, {8, 2}}) {
        EmpiricalGeometry geo(BasisFamily::spline_linear_periodic(m, d), equidistant_grid(m, d));
        RMat emp = geo.basis_gram().real();
        RMat l2 = spline_l2_gram(m, d);
        Eigen::GeneralizedSelfAdjointEigenSolver<RMat> es(emp, l2, Eigen::EigenvaluesOnly);
        lowest = std::min(lowest, es.eigenvalues().minCoeff());
    }
    return {lowest >= 1.0 - 1e-10, "smallest generalized eigenvalue " + io::fmt17(lowest)};
}

Outcome hellinger() {
    int violations = 0;
    Rng rng = make_rng(31337);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> size(1, 16);
    std::uniform_real_distribution<double> scale(0.01, 0.6);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int k = size(rng);
        const double a = scale(rng);
        CMat x(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) x(i, j) = cplx(normal(rng), normal(rng)) * (a / std::sqrt(k));
        CMat s = CMat::Identity(k, k) + 0.5 * (x + x.adjoint());
        if (hermitian_eig(s).values.minCoeff() <= 0.05) s += CMat::Identity(k, k) * (0.05 - hermitian_eig(s).values.minCoeff());
        HellingerResult h = hellinger_gaussian_cov(s, 1.0 + t % 3);
        if (h.exact > h.bound) ++violations;
        if (h.bound > 0) worst = std::max(worst, h.exact / h.bound);
    }
    return {violations == 0, std::to_string(violations) + " violations, max exact/bound " + g(worst)};
}

Outcome gram_schmidt() {
    double worst = 0.0, lower = 0.0;
    for (std::uint64_t t = 0; t < 20; ++t) {
        EmpiricalGeometry geo(BasisFamily::fourier_enumerated(1, 16), uniform_random_design(64, 1, derive_seed(8, t)));
        GramSchmidtFactor f = empirical_gram_schmidt(geo);
        CMat inv = geo.gram().inverse();
        worst = std::max(worst, (f.T * f.T.adjoint() - inv).cwiseAbs().maxCoeff());
        CMat et = geo.evaluation() * f.T;
        worst = std::max(worst, (et.adjoint() * et / 64.0 - CMat::Identity(16, 16)).cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < 16; ++i)
            for (Eigen::Index j = 0; j < i; ++j) lower = std::max(lower, std::abs(f.T(i, j)));
    }
    return {worst <= 1e-8 && lower == 0.0, "max deviation " + g(worst) + ", below-diagonal max " + g(lower)};
}

Outcome noise_covariance() {
    EmpiricalGeometry random(BasisFamily::fourier_enumerated(1, 9), uniform_random_design(64, 1, 64));
    EmpiricalGeometry spline(BasisFamily::spline_linear_periodic(8, 1), equidistant_grid(8, 1));
    bool ok = true;
    std::string detail;
    std::uint64_t seed = 900;
    for (const char* t : {"Z1", "Z2", "Z3", "Z5", "Zr"}) {
        const EmpiricalGeometry& geo = std::string(t) == "Z5" ? spline : random;
        CheckResult r = check_transform_covariance(geo, t, 1.0, 3, 2000, seed++);
        ok = ok && r.passed();
        detail += std::string(detail.empty() ? "" : ", ") + t + " max z " + g(r.estimates.at("max_abs_z"));
        if (r.estimates.contains("cross_block_max_abs_z"))
            detail += " (cross block " + g(r.estimates.at("cross_block_max_abs_z")) + ")";
    }
    return {ok, detail};
}

app::RunOutput verify_suite(const std::string& checks, unsigned threads) {
    app::CliOverrides o;
    o.seed = 42;
    o.threads = threads;
    return app::run_verify(app::resolve_config("verify", "checks = " + checks, o));
}

Outcome proposition_suite() {
    app::RunOutput out = verify_suite("symmetry,projection,isomorphy,multinomial,trig", 1);
    std::string detail;
    for (const auto& r : out.json) {
        if (!detail.empty()) detail += ", ";
        detail += r["name"].get<std::string>() + " " + r["verdict"].get<std::string>();
        if (r["name"] == "trig_discretization")
            detail += " (" + std::to_string(static_cast<int>(r["estimates"]["violations"].get<double>())) +
                      " violations; " +
                      std::to_string(static_cast<int>(r["estimates"]["violations_2pi_constant"].get<double>())) +
                      " with the 2 pi constant)";
    }
    return {out.exit_code == 0, detail};
}

Outcome term_two() {
    SobolevBall ball{1, 1.0, 1.0};
    FourierFunction f = sample_from_sobolev_ball(ball, 8, 11);
    CheckResult r = decompose_terms(1024, 16, ball, f, 1.0, 500, 42);
    return {r.passed(), "II = " + g(r.estimates.at("II")) + " +- " + g(r.mc_errors.at("II")) + " vs " +
                            g(r.thresholds.at("II"))};
}

Outcome haar_constants() {
    int mismatches = 0;
    for (std::uint64_t t = 0; t < 100; ++t) {
        Rng rng = make_rng(derive_seed(12, t));
        std::uniform_int_distribution<int> count(1, 60);
        const int levels = 3, leaves = 1 << levels;
        std::vector<double> x;
        for (int b = 0; b < leaves; ++b) {
            int c = count(rng);
            for (int i = 0; i < c; ++i) x.push_back((b + (i + 0.5) / c) / leaves);
        }
        std::sort(x.begin(), x.end());
        Design design = Design::from_points(1, x);
        const auto n = static_cast<std::int64_t>(x.size());
        for (const HaarTwoLevel& h : haar_two_level_basis(design, levels)) {
            // brute force: unit-C weights point by point, then C^2 = n / sum w_i^2
            const double width = std::ldexp(1.0, -h.j);
            const double lo = h.k * width, mid = lo + width / 2, hi = lo + width;
            std::int64_t left = 0, right = 0;
            for (double v : x) {
                if (v >= lo && v < mid) ++left;
                if (v >= mid && v < hi) ++right;
            }
            Rational sum(0);
            for (double v : x) {
                if (v >= lo && v < mid) sum = sum + Rational(1, left * left);
                if (v >= mid && v < hi) sum = sum + Rational(1, right * right);
            }
            if (!(Rational(n) / sum == h.c_squared)) ++mismatches;
        }
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatches over 100 configurations"};
}

Outcome determinism() {
    std::string diffs;
    app::RunOutput a = verify_suite("symmetry,projection,isomorphy,multinomial,trig,terms,covariance", 1);
    app::RunOutput b = verify_suite("symmetry,projection,isomorphy,multinomial,trig,terms,covariance", 4);
    if (a.csv != b.csv) diffs += " verify";
    for (const char* cmd : {"rates", "transform"}) {
        const std::string text = std::string(cmd) == "rates" ? "bound = multidim, random_design, holder_design\nm = \nn = 25, 49, 81, 121"
                                                              : "transform = Z1, Z2, Z3, Zr\ndesign = random\nn = 64\nk = 9";
        app::CliOverrides o1, o4;
        o1.seed = o4.seed = 42;
        o1.threads = 1;
        o4.threads = 4;
        if (app::run(app::resolve_config(cmd, text, o1)).csv != app::run(app::resolve_config(cmd, text, o4)).csv)
            diffs += std::string(" ") + cmd;
    }
    return {diffs.empty(), diffs.empty() ? "verify, rates and transform CSVs identical at 1 and 4 threads"
                                         : "differences in" + diffs};
}

}  // namespace

int main() {
    criterion(1, "Fourier grid isometry", fourier_isometry);
    criterion(2, "aliasing oracle", aliasing);
    criterion(3, "Hoelder bias exactness", holder_exactness);
    criterion(4, "Pythagoras split", pythagoras);
    criterion(5, "rate recovery", rate_recovery);
    criterion(6, "spline operator ordering", spline_ordering);
    criterion(7, "Hellinger inequality", hellinger);
    criterion(8, "Gram-Schmidt factor", gram_schmidt);
    criterion(9, "noise covariance Monte Carlo", noise_covariance);
    criterion(10, "proposition suite", proposition_suite);
    criterion(11, "term II bound", term_two);
    criterion(12, "Haar two-level constants", haar_constants);
    criterion(13, "determinism across thread counts", determinism);
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criterion(s) failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
