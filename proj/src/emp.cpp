#include "aequiv/emp.hpp"

#include "aequiv/error.hpp"
#include "aequiv/io.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

namespace aeq {

cplx empirical_inner(std::span<const cplx> f, std::span<const cplx> g) {
    require(f.size() == g.size(), ErrorKind::InvalidArgument, "empirical inner product of unequal lengths");
    require(!f.empty(), ErrorKind::InvalidArgument, "empirical inner product of empty vectors");
    cplx s{};
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * std::conj(g[i]);
    return s / static_cast<double>(f.size());
}

EmpiricalGeometry::EmpiricalGeometry(BasisFamily basis, Design design)
    : basis_(std::move(basis)), design_(std::move(design)), cache_(std::make_shared<Cache>()) {
    require(basis_.dim() == design_.dim(), ErrorKind::InvalidArgument, "basis and design dimensions differ");
    require(design_.size() >= 1, ErrorKind::InvalidDesign, "empty design");
    const auto n = static_cast<Eigen::Index>(design_.size());
    const auto k = static_cast<Eigen::Index>(basis_.size());
    require(static_cast<double>(n) * static_cast<double>(k) <= 1e8, ErrorKind::SizeLimit,
            "evaluation matrix too large");
    e_.resize(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto x = design_.point(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < k; ++j) e_(i, j) = basis_.evaluate(static_cast<std::size_t>(j), x);
    }
    if (basis_.l2_orthonormal()) {
        whitener_ = CMat::Identity(k, k);
        e_on_ = e_;
    } else {
        CMat h = basis_.l2_gram().cast<cplx>();
        whitener_ = psd_inverse_sqrt(hermitian_eig(h));
        e_on_ = e_ * whitener_;
    }
    g_ = e_on_.adjoint() * e_on_ / static_cast<double>(n);
    g_ = 0.5 * (g_ + g_.adjoint()).eval();
}

CMat EmpiricalGeometry::basis_gram() const {
    CMat g = e_.adjoint() * e_ / static_cast<double>(n());
    return 0.5 * (g + g.adjoint());
}

const HermitianSpectrum& EmpiricalGeometry::spectrum() const {
    std::call_once(cache_->once, [this] { cache_->spectrum = hermitian_eig(g_); });
    return cache_->spectrum;
}

std::pair<double, double> EmpiricalGeometry::isomorphism_constants() const {
    const RVec& v = spectrum().values;
    return {std::sqrt(std::max(0.0, v.minCoeff())), std::sqrt(std::max(0.0, v.maxCoeff()))};
}

bool EmpiricalGeometry::isometric(double tol) const {
    return (g_ - CMat::Identity(g_.rows(), g_.cols())).cwiseAbs().maxCoeff() <= tol;
}

double EmpiricalGeometry::evaluation_condition() const {
    std::call_once(cache_->cond_once, [&] {
        Eigen::BDCSVD<CMat> svd(e_);
        const RVec& sv = svd.singularValues();
        const double lo = sv(sv.size() - 1);
        cache_->condition = lo > 0.0 ? sv(0) / lo : std::numeric_limits<double>::infinity();
    });
    return cache_->condition;
}

CVec EmpiricalGeometry::interpolate(std::span<const cplx> fvals) const {
    require(n() == basis_size(), ErrorKind::Precondition, "interpolation needs as many basis functions as points");
    require(fvals.size() == n(), ErrorKind::InvalidArgument, "value count differs from the design size");
    double cond = evaluation_condition();
    if (!(cond <= kSingularCondition))
        throw Error(ErrorKind::NonIsomorphicDesign, "evaluation matrix condition number " + io::fmt17(cond));
    Eigen::Map<const CVec> y(fvals.data(), static_cast<Eigen::Index>(fvals.size()));
    return e_.partialPivLu().solve(y);
}

std::vector<cplx> EmpiricalGeometry::sample(const std::function<cplx(std::span<const double>)>& f) const {
    std::vector<cplx> out(n());
    for (std::size_t i = 0; i < n(); ++i) out[i] = f(design_.point(i));
    return out;
}

CVec l2_project_fourier(const FourierFunction& f, int m) {
    std::vector<Frequency> block = fourier_block(m, f.d);
    CVec c(static_cast<Eigen::Index>(block.size()));
    for (std::size_t j = 0; j < block.size(); ++j) c(static_cast<Eigen::Index>(j)) = f.coefficient(block[j]);
    return c;
}

double fourier_l2_distance_sq(const FourierFunction& f, const BasisFamily& family, const CVec& coeffs) {
    require(family.kind() == BasisKind::Fourier, ErrorKind::UnsupportedCombination, "needs a Fourier family");
    require(static_cast<std::size_t>(coeffs.size()) == family.size(), ErrorKind::InvalidArgument,
            "coefficient count differs from the family size");
    std::map<Frequency, cplx> diff = f.coeffs;
    for (std::size_t j = 0; j < family.size(); ++j) diff[family.frequencies()[j]] -= coeffs(static_cast<Eigen::Index>(j));
    double s = 0.0;
    for (const auto& [l, c] : diff) s += std::norm(c);
    return s;
}

double hs_distance_identity(const CMat& m, bool inverted) {
    require(m.rows() == m.cols(), ErrorKind::InvalidArgument, "HS distance needs a square matrix");
    CMat id = CMat::Identity(m.rows(), m.cols());
    if (!inverted) return (m - id).norm();
    HermitianSpectrum s = hermitian_eig(0.5 * (m + m.adjoint()));
    if (s.values.size() > 0 && !(s.values.minCoeff() > 0.0))
        throw Error(ErrorKind::Singular, "matrix is not positive definite");
    return (psd_inverse(s) - id).norm();
}

void write_matrix_csv(const CMat& m, std::ostream& out) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (c) out << ',';
        out << "re" << c + 1 << ",im" << c + 1;
    }
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << io::fmt17(m(r, c).real()) << ',' << io::fmt17(m(r, c).imag());
        }
        out << '\n';
    }
}

CMat fourier_gram_by_moments(const Design& design, const std::vector<Frequency>& freqs) {
    require(!freqs.empty(), ErrorKind::InvalidArgument, "empty frequency list");
    const int d = design.dim();
    const std::size_t k = freqs.size();
    int K = 0;
    for (const auto& l : freqs) {
        require(static_cast<int>(l.size()) == d, ErrorKind::InvalidArgument, "frequency dimension mismatch");
        K = std::max(K, sup_norm(l));
    }
    std::map<Frequency, std::size_t> index;
    std::vector<Frequency> diffs;
    std::vector<std::size_t> slot(k * k);
    Frequency q(static_cast<std::size_t>(d));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            for (std::size_t r = 0; r < q.size(); ++r) q[r] = freqs[b][r] - freqs[a][r];
            auto [it, inserted] = index.emplace(q, diffs.size());
            if (inserted) diffs.push_back(q);
            slot[a * k + b] = it->second;
        }
    // Per-axis powers z^p, p in [-2K, 2K].
    const int span = 4 * K + 1;
    std::vector<cplx> powers(static_cast<std::size_t>(d * span));
    std::vector<cplx> moments(diffs.size());
    for (std::size_t i = 0; i < design.size(); ++i) {
        auto x = design.point(i);
        for (int r = 0; r < d; ++r) {
            cplx z = std::polar(1.0, 2.0 * std::numbers::pi * x[static_cast<std::size_t>(r)]);
            cplx* row = powers.data() + r * span + 2 * K;
            row[0] = 1.0;
            for (int p = 1; p <= 2 * K; ++p) {
                row[p] = row[p - 1] * z;
                row[-p] = std::conj(row[p]);
            }
        }
        for (std::size_t u = 0; u < diffs.size(); ++u) {
            cplx v = powers[static_cast<std::size_t>(2 * K + diffs[u][0])];
            for (int r = 1; r < d; ++r) v *= powers[static_cast<std::size_t>(r * span + 2 * K + diffs[u][static_cast<std::size_t>(r)])];
            moments[u] += v;
        }
    }
    const double inv = 1.0 / static_cast<double>(design.size());
    CMat g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            g(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = moments[slot[a * k + b]] * inv;
    return g;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
    require(points >= 1 && points <= 256, ErrorKind::InvalidArgument, "Gauss-Legendre order out of range");
    std::vector<double> x(static_cast<std::size_t>(points)), w(x.size());
    for (int i = 0; i < points; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (points + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= points; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = points * (z * p1 - p0) / (z * z - 1.0);
            double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

double piecewise_constant_interpolation_error_sq(const std::function<double(double)>& f, const Design& design,
                                                 int points) {
    require(design.dim() == 1, ErrorKind::InvalidArgument, "piecewise-constant interpolation is one-dimensional");
    auto [nodes, weights] = gauss_legendre(points);
    const std::size_t n = design.size();
    const double h = 1.0 / static_cast<double>(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double level = f(design.point(i)[0]);
        const double a = static_cast<double>(i) * h;
        double cell = 0.0;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            double t = a + 0.5 * h * (nodes[q] + 1.0);
            double r = f(t) - level;
            cell += weights[q] * r * r;
        }
        total += 0.5 * h * cell;
    }
    return total;
}

}  // namespace aeq
