#pragma once

#include "aequiv/design.hpp"
#include "aequiv/emp.hpp"
#include "aequiv/funclass.hpp"
#include "aequiv/linalg.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace aeq {

double normal_cdf(double x);

// 1 - 2 Phi(-sqrt(n) bias / (2 sigma)), evaluated as erf(sqrt(n) bias / (2 sqrt(2) sigma)).
double tv_gaussian_shift(double bias_l2, double n, double sigma);

struct HellingerResult {
    double exact;  // H^2 = 2 - 2 prod_i (2 sqrt(l_i) / (1 + l_i))^{1/2}
    double bound;  // 2 ||Sigma - Id||_HS^2
};

// H^2(N(mu, alpha Sigma), N(mu, alpha Id)); independent of alpha > 0.
HellingerResult hellinger_gaussian_cov(const CMat& sigma, double alpha = 1.0);

// sum_{k in Z^d, k != 0} |k|_inf^{-2s} as a certified bracket; infinite for s <= d/2.
struct LatticeSum {
    double value;  // midpoint
    double lower;
    double upper;
    long radius;   // shells summed explicitly
};
LatticeSum lattice_sum(int d, double s);

// Upper bound on sum_{r > K} ((2r+1)^d - (2r-1)^d) (r - shift)^{-2s} for 0 <= shift < K.
double shell_tail_bound(int d, double s, int K, double shift);

enum class BoundForm { ExactPhi, Rate };
const char* to_string(BoundForm form);

// Squared worst-case interpolation error over a ball, with its decomposition.
struct BiasSup {
    BoundForm form = BoundForm::ExactPhi;
    bool finite = true;
    double sup_sq = 0.0;        // certified upper value of sup ||f - I_n f||^2
    double sup_sq_lower = 0.0;  // without the truncation tail
    double classical = 0.0;     // sup ||f - P_n f||^2
    double aliasing = 0.0;      // closed-form bound on sup ||P_n f - I_n f||^2
    double tail = 0.0;          // sup_sq - sup_sq_lower
    double sup() const;
};

inline constexpr int kDefaultAliasCutoff = 64;

// Fourier family on the odd m-grid: exact per residue class, alias sums
// truncated at |k|_inf <= K with a certified tail.
BiasSup fourier_sobolev_sup(int m, const SobolevBall& ball, int K = kDefaultAliasCutoff);

// Piecewise constants on x_i = i/n: R^2 (2 alpha + 1)^{-1} n^{-2 alpha}.
BiasSup holder_piecewise_sup(const HoelderBall& ball, std::size_t n);

// Any square geometry with Fourier coefficients available: largest eigenvalue
// of the weighted error form on |l|_inf <= K plus a tail bound. Rate form.
BiasSup generic_sobolev_sup(const EmpiricalGeometry& geometry, const SobolevBall& ball, int K);

struct BoundReport {
    std::string bound;  // holder_design, multidim, random_design
    BoundForm form = BoundForm::ExactPhi;
    double value = 0.0;
    std::map<std::string, double> components;
    std::size_t n = 0;
    int d = 1;
    double smoothness = 0.0;  // s or alpha
    double R = 0.0;
    double sigma = 1.0;
    std::optional<std::size_t> n0;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const BoundReport& r);
// Fixed component columns shared by every report; absent ones stay empty.
const std::vector<std::string>& report_component_columns();
std::string report_csv_header();
std::string report_csv_row(const BoundReport& r);

// Chain bias^2 <= 2 R^2 n^{-2 alpha} + 2 R^2 n^{-1} sum_i |x_i - i/n|^{2 alpha}.
BoundReport holder_design_bound(const Design& design, const HoelderBall& ball, double sigma);

// Equidistant design, Fourier family, periodic Sobolev ball; n = m^d with m odd.
BoundReport multidim_bound(double s, int d, double R, double sigma, std::size_t n, int K = kDefaultAliasCutoff);

// n^{-1/2} n0 + sigma^{-1} R n0^{1/2 - s/d} with unit constant.
BoundReport random_design_bound(double s, int d, double R, double sigma, std::size_t n, std::size_t n0);
std::size_t optimal_n0(double s, int d, std::size_t n);

struct RateFit {
    double slope;
    double intercept;
    double residual;  // root mean square of the log residuals
};
RateFit fit_rate_slope(const std::vector<std::pair<double, double>>& pairs);

// Exact integer m with m^d = n, or nullopt.
std::optional<int> integer_root(std::size_t n, int d);

}  // namespace aeq
