#pragma once

#include "aequiv/design.hpp"
#include "aequiv/emp.hpp"
#include "aequiv/funclass.hpp"
#include "aequiv/linalg.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace aeq {

enum class Verdict { Pass, Fail, Inconclusive };
const char* to_string(Verdict v);

struct CheckResult {
    std::string name;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    nlohmann::json parameters = nlohmann::json::object();
    std::map<std::string, double> estimates;
    std::map<std::string, double> mc_errors;
    std::map<std::string, double> thresholds;
    std::vector<std::string> notes;
    Verdict verdict = Verdict::Pass;

    bool passed() const noexcept { return verdict == Verdict::Pass; }
};

nlohmann::json to_json(const CheckResult& r);
// One line per check: name, verdict, replicates, then estimate=value pairs.
std::string format_table(const std::vector<CheckResult>& results);

// Mean and standard error (sample standard deviation / sqrt(count)).
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(const std::vector<double>& values);

// |mean - target| <= z SE, with an absolute floor for exactly constant samples.
bool within_se(const MeanSe& m, double target, double z, double floor = 1e-12);

// True when j log j exceeds n / 8, i.e. outside the regime j log j << n.
bool outside_regime(double j, double n);

// <phi_k', phi_k^n>_n for 0-based k < k' < count on a design, as the
// upper-triangular matrix L^* of the Cholesky factor G = L L^*. Throws
// RankDeficiency if G is not numerically positive definite.
CMat gram_schmidt_cross_products(const Design& design, std::size_t count);

// The same quantity on a random design only (precondition of the symmetry check).
CMat symmetry_replicate(const Design& design, std::size_t count);

// Design x_i = (y_i + theta) mod 1.
Design rotated_design(const Design& design, std::span<const double> theta);

// Index lists are 1-based as in the enumeration phi_1 = 1.
struct IndexPair {
    std::size_t k, k1;
};
struct IndexTriple {
    std::size_t k, k1, k2;
};
// All pairs k < k' <= top and triples k < k' < k'' <= top.
std::vector<IndexPair> all_pairs(std::size_t top);
std::vector<IndexTriple> all_triples(std::size_t top);

CheckResult check_symmetry_zero_mean(std::size_t n, int d, const std::vector<IndexPair>& pairs,
                                     const std::vector<IndexTriple>& triples, std::size_t reps,
                                     std::uint64_t seed, unsigned threads = 1);

CheckResult check_trig_discretization(int L, double delta, int d, std::size_t trials, std::uint64_t seed,
                                      unsigned threads = 1);

CheckResult check_multinomial_max(std::size_t n, std::size_t r, double C, std::size_t reps, std::uint64_t seed,
                                  unsigned threads = 1);

CheckResult check_isomorphy_event(std::size_t n, std::size_t j, std::size_t reps, std::uint64_t seed,
                                  int d = 1, unsigned threads = 1);

CheckResult check_projection_growth(std::size_t n, const std::vector<std::size_t>& js, std::size_t reps,
                                    std::uint64_t seed, int d = 1, unsigned threads = 1);

// Terms I, II, III of the random-design proof for f supported on the leading
// enumerated Fourier functions.
CheckResult decompose_terms(std::size_t n, std::size_t n0, const SobolevBall& ball, const FourierFunction& f,
                            double sigma, std::size_t reps, std::uint64_t seed, unsigned threads = 1);

// Monte Carlo covariance of a transform's coefficients with f = 0 against its
// noise descriptor. transform is one of Z, Z1, Z2, Z3, Z5, Zr.
CheckResult check_transform_covariance(const EmpiricalGeometry& geometry, const std::string& transform,
                                       double sigma, std::size_t n0, std::size_t reps, std::uint64_t seed,
                                       unsigned threads = 1);

}  // namespace aeq
