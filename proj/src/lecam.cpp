#include "aequiv/lecam.hpp"

#include "aequiv/basis.hpp"
#include "aequiv/error.hpp"
#include "aequiv/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace aeq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

// (2r+1)^d - (2r-1)^d = sum_{j : d-j odd} 2 C(d,j) (2r)^j, as coefficients of r^j.
std::vector<std::pair<int, double>> shell_coefficients(int d) {
    std::vector<std::pair<int, double>> c;
    for (int j = 0; j < d; ++j)
        if ((d - j) % 2 == 1) c.emplace_back(j, 2.0 * binomial(d, j) * std::pow(2.0, j));
    return c;
}

double shell(int d, double r) {
    double v = 0.0;
    for (auto [j, c] : shell_coefficients(d)) v += c * std::pow(r, j);
    return v;
}

// int_a^inf shell(x) x^{-2s} dx for 2s > d.
double shell_integral(int d, double s, double a) {
    double v = 0.0;
    for (auto [j, c] : shell_coefficients(d)) v += c * std::pow(a, j - 2.0 * s + 1.0) / (2.0 * s - j - 1.0);
    return v;
}

// Largest root of sum_i w_i / (x - p_i) = 1 with all w_i > 0, located in (top, hi].
// The left side decreases in x on (max p_i, inf).
template <class F>
double secular_root(F&& lhs, double top, double hi) {
    double lo = top;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (lhs(mid) > 1.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double tv_gaussian_shift(double bias_l2, double n, double sigma) {
    require(bias_l2 >= 0.0, ErrorKind::InvalidArgument, "bias must be nonnegative");
    require(n >= 1.0, ErrorKind::InvalidArgument, "n must be at least 1");
    require(sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
    if (std::isinf(bias_l2)) return 1.0;
    return std::erf(std::sqrt(n) * bias_l2 / (2.0 * std::numbers::sqrt2 * sigma));
}

HellingerResult hellinger_gaussian_cov(const CMat& sigma, double alpha) {
    require(sigma.rows() == sigma.cols(), ErrorKind::InvalidArgument, "covariance must be square");
    require(alpha > 0.0, ErrorKind::InvalidArgument, "scale must be positive");
    HermitianSpectrum s = hermitian_eig(0.5 * (sigma + sigma.adjoint()));
    if (s.values.size() > 0 && !(s.values.minCoeff() > 0.0))
        throw Error(ErrorKind::Precondition, "covariance is not positive definite");
    // Accumulate the log of the affinity to keep large products accurate.
    double log_affinity = 0.0;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        double l = s.values(i);
        log_affinity += 0.5 * (std::log(2.0 * std::sqrt(l)) - std::log1p(l));
    }
    double exact = -2.0 * std::expm1(log_affinity);
    CMat diff = sigma - CMat::Identity(sigma.rows(), sigma.cols());
    return {exact, 2.0 * diff.squaredNorm()};
}

LatticeSum lattice_sum(int d, double s) {
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    if (!(2.0 * s > d)) return {kInf, kInf, kInf, 0};
    long double partial = 0.0L;
    long r = 0;
    long target = 64;
    constexpr long kMaxRadius = 1L << 26;
    for (;;) {
        for (; r < target; ) {
            ++r;
            partial += static_cast<long double>(shell(d, static_cast<double>(r))) *
                       std::pow(static_cast<long double>(r), -2.0L * s);
        }
        double p = static_cast<double>(partial);
        double lower = p + shell_integral(d, s, static_cast<double>(r + 1));
        double upper = p + shell_integral(d, s, static_cast<double>(r));
        if (upper - lower <= 1e-10 * lower || r >= kMaxRadius) return {0.5 * (lower + upper), lower, upper, r};
        target = r * 2;
    }
}

double shell_tail_bound(int d, double s, int K, double shift) {
    require(K >= 1 && shift >= 0.0 && shift < K, ErrorKind::InvalidArgument, "bad tail parameters");
    if (!(2.0 * s > d)) return kInf;
    const double rho = (K + 1.0) / (K + 1.0 - shift);
    const double a = K - shift;
    double v = 0.0;
    for (auto [j, c] : shell_coefficients(d))
        v += c * std::pow(rho, j) * std::pow(a, j - 2.0 * s + 1.0) / (2.0 * s - j - 1.0);
    return v;
}

const char* to_string(BoundForm form) { return form == BoundForm::ExactPhi ? "exact_phi" : "rate"; }

double BiasSup::sup() const { return finite ? std::sqrt(sup_sq) : kInf; }

BiasSup fourier_sobolev_sup(int m, const SobolevBall& ball, int K) {
    validate(ball);
    require(m >= 1 && m % 2 == 1, ErrorKind::Convention, "Fourier grid needs an odd m, got " + std::to_string(m));
    require(K >= 1, ErrorKind::InvalidArgument, "alias cutoff must be positive");
    const int d = ball.d;
    const double s = ball.s;
    const double R2 = ball.R * ball.R;
    BiasSup out;
    out.classical = R2 * std::pow((m + 1) / 2.0, -2.0 * s);
    if (!(2.0 * s > d)) {
        out.finite = false;
        out.sup_sq = out.sup_sq_lower = out.aliasing = out.tail = kInf;
        if (ball.R == 0.0) out = BiasSup{};
        return out;
    }
    const double md = m;
    out.aliasing = R2 * std::pow(md, -2.0 * s) * (std::pow(2.0, 2.0 * s) * (std::pow(2.0, d) - 1.0) + lattice_sum(d, s).upper);
    if (ball.R == 0.0) {
        out.classical = out.aliasing = 0.0;
        return out;
    }

    const int h = (m - 1) / 2;
    const int box = 2 * K + 1;
    // |l + k m|_inf <= K m + h
    const long top = static_cast<long>(K) * m + h;
    std::vector<double> power(static_cast<std::size_t>(top + 1));
    power[0] = kInf;
    for (long r = 1; r <= top; ++r) power[static_cast<std::size_t>(r)] = std::pow(static_cast<double>(r), -2.0 * s);
    const double tail_mass = std::pow(md, -2.0 * s) * shell_tail_bound(d, s, K, 0.5);
    const double tail_top = std::pow(md * (K + 0.5), -2.0 * s);

    // Representative residue classes 0 <= l_1 <= ... <= l_d <= h; the alias
    // weights are invariant under coordinate permutations and sign flips.
    std::vector<std::vector<int>> classes;
    {
        std::vector<int> l(static_cast<std::size_t>(d), 0);
        for (;;) {
            classes.push_back(l);
            int r = d - 1;
            while (r >= 0 && l[static_cast<std::size_t>(r)] == h) --r;
            if (r < 0) break;
            int v = l[static_cast<std::size_t>(r)] + 1;
            for (int q = r; q < d; ++q) l[static_cast<std::size_t>(q)] = v;
        }
    }

    // Alias weights of one class, k != 0 in the K-box.
    auto weights = [&](const std::vector<int>& l, std::vector<double>& w) {
        w.clear();
        std::vector<std::vector<long>> axis(static_cast<std::size_t>(d), std::vector<long>(static_cast<std::size_t>(box)));
        for (int r = 0; r < d; ++r)
            for (int k = -K; k <= K; ++k)
                axis[static_cast<std::size_t>(r)][static_cast<std::size_t>(k + K)] =
                    std::labs(l[static_cast<std::size_t>(r)] + static_cast<long>(k) * m);
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        for (;;) {
            long a = 0;
            bool zero = true;
            for (int r = 0; r < d; ++r) {
                int k = idx[static_cast<std::size_t>(r)];
                a = std::max(a, axis[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)]);
                zero = zero && k == K;
            }
            if (!zero) w.push_back(power[static_cast<std::size_t>(a)]);
            int r = d - 1;
            while (r >= 0 && ++idx[static_cast<std::size_t>(r)] == box) idx[static_cast<std::size_t>(r--)] = 0;
            if (r < 0) break;
        }
    };

    // Bracket per class: sum w <= lambda <= max w + sum w (+ tail terms).
    std::vector<double> lower_bracket(classes.size()), upper_bracket(classes.size());
    std::vector<double> w;
    double best_lower = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        weights(classes[c], w);
        double sum = 0.0, mx = 0.0;
        for (double v : w) sum += v, mx = std::max(mx, v);
        lower_bracket[c] = sum;
        upper_bracket[c] = std::max(mx, tail_top) + sum + tail_mass;
        best_lower = std::max(best_lower, sum);
    }

    double lambda_upper = 0.0, lambda_lower = 0.0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (upper_bracket[c] < best_lower) continue;
        weights(classes[c], w);
        double mx = *std::max_element(w.begin(), w.end());
        double sum = lower_bracket[c];
        auto truncated = [&](double x) {
            double v = 0.0;
            for (double p : w) v += p / (x - p);
            return v;
        };
        double lo_root = secular_root(truncated, mx, mx + sum);
        double top = std::max(mx, tail_top);
        double up_root = secular_root([&](double x) { return truncated(x) + tail_mass / (x - tail_top); }, top,
                                      top + sum + tail_mass);
        lambda_lower = std::max(lambda_lower, lo_root);
        lambda_upper = std::max(lambda_upper, up_root);
    }
    out.sup_sq = R2 * lambda_upper;
    out.sup_sq_lower = R2 * lambda_lower;
    out.tail = out.sup_sq - out.sup_sq_lower;
    return out;
}

BiasSup holder_piecewise_sup(const HoelderBall& ball, std::size_t n) {
    BiasSup out;
    out.sup_sq = out.sup_sq_lower = out.classical = holder_worst_bias_bound(ball, n);
    return out;
}

BiasSup generic_sobolev_sup(const EmpiricalGeometry& geometry, const SobolevBall& ball, int K) {
    validate(ball);
    require(K >= 1, ErrorKind::InvalidArgument, "cutoff must be positive");
    require(geometry.basis().dim() == ball.d, ErrorKind::InvalidArgument, "ball and geometry dimensions differ");
    require(geometry.n() == geometry.basis_size(), ErrorKind::UnsupportedCombination,
            "generic bias needs a square geometry");
    require(geometry.basis().kind() != BasisKind::ScalingSystem, ErrorKind::UnsupportedCombination,
            "scaling systems have no Fourier coefficients");
    BiasSup out;
    out.form = BoundForm::Rate;
    if (!(2.0 * ball.s > ball.d)) {
        out.finite = false;
        out.sup_sq = out.sup_sq_lower = out.tail = kInf;
        return out;
    }
    std::vector<Frequency> freqs;
    for_each_in_box(ball.d, K, [&](const Frequency& l) { freqs.push_back(l); });
    const auto nf = static_cast<Eigen::Index>(freqs.size());
    const auto n = static_cast<Eigen::Index>(geometry.n());
    require(static_cast<double>(nf) * static_cast<double>(n) <= 5e7, ErrorKind::SizeLimit,
            "frequency box too large for the generic bias");
    const BasisFamily& basis = geometry.basis();

    CMat f(n, nf), c(n, nf);
    for (Eigen::Index q = 0; q < nf; ++q) {
        const Frequency& l = freqs[static_cast<std::size_t>(q)];
        for (Eigen::Index i = 0; i < n; ++i) {
            auto x = geometry.design().point(static_cast<std::size_t>(i));
            double phase = 0.0;
            for (int r = 0; r < ball.d; ++r) phase += l[static_cast<std::size_t>(r)] * x[static_cast<std::size_t>(r)];
            phase -= std::round(phase);
            f(i, q) = std::polar(1.0, 2.0 * std::numbers::pi * phase);
            c(i, q) = basis.fourier_coefficient(static_cast<std::size_t>(i), l);
        }
    }
    double cond = geometry.evaluation_condition();
    if (!(cond <= kSingularCondition))
        throw Error(ErrorKind::NonIsomorphicDesign, "evaluation matrix condition number " + io::fmt17(cond));
    CMat b = geometry.evaluation().partialPivLu().solve(f);  // I_n phi_l in basis coordinates
    CMat cross = c.transpose() * b;                         // <I_n phi_l', phi_l>
    CMat q = CMat::Identity(nf, nf) - cross - cross.adjoint() + b.adjoint() * basis.l2_gram().cast<cplx>() * b;
    q = 0.5 * (q + q.adjoint()).eval();

    Eigen::Index zero = 0;
    for (Eigen::Index i = 0; i < nf; ++i)
        if (sup_norm(freqs[static_cast<std::size_t>(i)]) == 0) zero = i;
    if (q.col(zero).norm() > 1e-8) {
        // Constants are not reproduced: the unconstrained mode makes the sup infinite.
        out.finite = false;
        out.sup_sq = out.sup_sq_lower = out.tail = kInf;
        return out;
    }
    RVec weight(nf);
    for (Eigen::Index i = 0; i < nf; ++i) {
        int a = sup_norm(freqs[static_cast<std::size_t>(i)]);
        weight(i) = a == 0 ? 0.0 : std::pow(static_cast<double>(a), -ball.s);
    }
    CMat weighted = weight.asDiagonal() * q * weight.asDiagonal();
    Eigen::SelfAdjointEigenSolver<CMat> es(weighted, Eigen::EigenvaluesOnly);
    double lambda = std::max(0.0, es.eigenvalues().maxCoeff());
    double head = ball.R * std::sqrt(lambda);
    auto [an, bn] = geometry.isomorphism_constants();
    (void)bn;
    double tail = ball.R * std::pow(K + 1.0, -ball.s) +
                  (an > 0.0 ? ball.R * std::sqrt(shell_tail_bound(ball.d, ball.s, K, 0.0)) / an : kInf);
    out.sup_sq_lower = head * head;
    out.sup_sq = (head + tail) * (head + tail);
    out.tail = out.sup_sq - out.sup_sq_lower;
    return out;
}

nlohmann::json to_json(const BoundReport& r) {
    nlohmann::json comps = nlohmann::json::object();
    for (const auto& [k, v] : r.components) comps[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(io::fmt17(v));
    nlohmann::json j = {{"bound", r.bound},
                        {"form", to_string(r.form)},
                        {"value", r.value},
                        {"components", comps},
                        {"inputs",
                         {{"n", r.n}, {"d", r.d}, {"smoothness", r.smoothness}, {"R", r.R}, {"sigma", r.sigma}}},
                        {"warnings", r.warnings}};
    if (r.n0) j["inputs"]["n0"] = *r.n0;
    return j;
}

const std::vector<std::string>& report_component_columns() {
    static const std::vector<std::string> cols = {"bias_sup", "classical_term", "aliasing_term", "tail_term",
                                                  "hs_term",  "mean_term",      "perturbation_term", "grid_term"};
    return cols;
}

std::string report_csv_header() {
    std::string h = "bound,n,d,s,R,sigma,n0,form,value";
    for (const auto& c : report_component_columns()) h += "," + c;
    return h + ",warning";
}

std::string report_csv_row(const BoundReport& r) {
    std::string row = r.bound + "," + std::to_string(r.n) + "," + std::to_string(r.d) + "," +
                      io::fmt17(r.smoothness) + "," + io::fmt17(r.R) + "," + io::fmt17(r.sigma) + "," +
                      (r.n0 ? std::to_string(*r.n0) : std::string()) + "," + to_string(r.form) + "," +
                      io::fmt17(r.value);
    for (const auto& c : report_component_columns()) {
        row += ",";
        auto it = r.components.find(c);
        if (it != r.components.end()) row += io::fmt17(it->second);
    }
    std::string warn;
    for (const auto& w : r.warnings) warn += (warn.empty() ? "" : ";") + w;
    return row + "," + warn;
}

BoundReport holder_design_bound(const Design& design, const HoelderBall& ball, double sigma) {
    validate(ball);
    require(design.dim() == 1, ErrorKind::InvalidArgument, "Hoelder design bound is one-dimensional");
    require(sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
    const std::size_t n = design.size();
    const double nd = static_cast<double>(n);
    const double R2 = ball.R * ball.R;
    BoundReport r;
    r.bound = "holder_design";
    r.n = n;
    r.smoothness = ball.alpha;
    r.R = ball.R;
    r.sigma = sigma;
    double grid = 2.0 * R2 * std::pow(nd, -2.0 * ball.alpha);
    double pert = 2.0 * R2 / nd * perturbation_sum(design, ball.alpha);
    double bias = std::sqrt(grid + pert);
    r.components = {{"grid_term", grid}, {"perturbation_term", pert}, {"bias_sup", bias}};
    r.value = tv_gaussian_shift(bias, nd, sigma);
    return r;
}

std::optional<int> integer_root(std::size_t n, int d) {
    if (n == 0 || d < 1) return std::nullopt;
    auto m = static_cast<long long>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
    for (long long c = std::max(1LL, m - 1); c <= m + 1; ++c) {
        long double p = 1.0L;
        for (int r = 0; r < d; ++r) p *= c;
        if (p == static_cast<long double>(n)) return static_cast<int>(c);
    }
    return std::nullopt;
}

BoundReport multidim_bound(double s, int d, double R, double sigma, std::size_t n, int K) {
    require(sigma > 0.0, ErrorKind::InvalidArgument, "sigma must be positive");
    auto m = integer_root(n, d);
    require(m.has_value() && *m % 2 == 1, ErrorKind::Convention,
            "n = " + std::to_string(n) + " is not the d-th power of an odd integer");
    BiasSup b = fourier_sobolev_sup(*m, {d, s, R}, K);
    BoundReport r;
    r.bound = "multidim";
    r.n = n;
    r.d = d;
    r.smoothness = s;
    r.R = R;
    r.sigma = sigma;
    if (!(2.0 * s > d)) r.warnings.push_back("non_equivalence_s_le_d_over_2");
    r.components = {{"bias_sup", b.sup()},
                    {"classical_term", b.classical},
                    {"aliasing_term", b.aliasing},
                    {"tail_term", b.tail}};
    r.value = tv_gaussian_shift(b.sup(), static_cast<double>(n), sigma);
    return r;
}

std::size_t optimal_n0(double s, int d, std::size_t n) {
    require(s > 0.0 && d >= 1 && n >= 1, ErrorKind::InvalidArgument, "bad rate parameters");
    double v = std::round(std::pow(static_cast<double>(n), d / (2.0 * s + d)));
    return static_cast<std::size_t>(std::clamp(v, 1.0, static_cast<double>(n)));
}

BoundReport random_design_bound(double s, int d, double R, double sigma, std::size_t n, std::size_t n0) {
    require(n0 >= 1 && n0 <= n, ErrorKind::InvalidArgument, "n0 must lie in [1, n]");
    require(sigma > 0.0 && s > 0.0 && R >= 0.0 && d >= 1, ErrorKind::InvalidArgument, "bad rate parameters");
    BoundReport r;
    r.bound = "random_design";
    r.form = BoundForm::Rate;
    r.n = n;
    r.d = d;
    r.smoothness = s;
    r.R = R;
    r.sigma = sigma;
    r.n0 = n0;
    double hs = static_cast<double>(n0) / std::sqrt(static_cast<double>(n));
    double mean = R / sigma * std::pow(static_cast<double>(n0), 0.5 - s / d);
    r.components = {{"hs_term", hs}, {"mean_term", mean}};
    r.value = hs + mean;
    if (!(2.0 * s > d)) r.warnings.push_back("non_equivalence_s_le_d_over_2");
    return r;
}

RateFit fit_rate_slope(const std::vector<std::pair<double, double>>& pairs) {
    require(pairs.size() >= 3, ErrorKind::InvalidArgument, "rate fit needs at least three points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [n, v] : pairs) {
        require(n > 0.0 && v > 0.0 && std::isfinite(v), ErrorKind::InvalidArgument, "rate fit needs positive finite values");
        double x = std::log(n), y = std::log(v);
        sx += x, sy += y, sxx += x * x, sxy += x * y;
    }
    const double k = static_cast<double>(pairs.size());
    const double den = k * sxx - sx * sx;
    require(den > 0.0, ErrorKind::InvalidArgument, "rate fit needs distinct n");
    double slope = (k * sxy - sx * sy) / den;
    double intercept = (sy - slope * sx) / k;
    double ss = 0.0;
    for (auto [n, v] : pairs) {
        double e = std::log(v) - intercept - slope * std::log(n);
        ss += e * e;
    }
    return {slope, intercept, std::sqrt(ss / k)};
}

}  // namespace aeq
