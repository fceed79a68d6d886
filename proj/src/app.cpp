#include "aequiv/app.hpp"

#include "aequiv/basis.hpp"
#include "aequiv/design.hpp"
#include "aequiv/emp.hpp"
#include "aequiv/error.hpp"
#include "aequiv/funclass.hpp"
#include "aequiv/io.hpp"
#include "aequiv/lecam.hpp"
#include "aequiv/parallel.hpp"
#include "aequiv/rng.hpp"
#include "aequiv/scaling.hpp"
#include "aequiv/transform.hpp"
#include "aequiv/verify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace aeq::app {

namespace {

using Point = std::map<std::string, std::string>;

const std::map<std::string, std::string>& defaults(const std::string& command) {
    static const std::map<std::string, std::map<std::string, std::string>> table = {
        {"bound",
         {{"bound", "multidim"}, {"n", ""}, {"m", "31"}, {"d", "1"}, {"s", "1"}, {"alpha", "1"}, {"R", "1"},
          {"sigma", "1"}, {"n0", ""}, {"design", "grid"}, {"amplitude", "0"}, {"K", "64"}}},
        {"rates",
         {{"bound", "multidim"}, {"n", ""}, {"m", "31,63,127,255,511,1023"}, {"d", "1"}, {"s", "1"},
          {"alpha", "1"}, {"R", "1"}, {"sigma", "1"}, {"n0", ""}, {"design", "grid"}, {"amplitude", "0"},
          {"K", "64"}}},
        {"transform",
         {{"basis", "fourier"}, {"transform", "Z1"}, {"design", "grid"}, {"m", "9"}, {"d", "1"}, {"n", ""},
          {"k", "9"}, {"n0", "3"}, {"s", "1"}, {"R", "1"}, {"cutoff", "8"}, {"sigma", "1"}, {"filter", "db2"},
          {"level", "3"}}},
        {"verify",
         {{"checks", "symmetry,projection,isomorphy,multinomial,trig,terms,covariance"},
          {"symmetry.n", "200"}, {"symmetry.d", "1"}, {"symmetry.top", "8"}, {"symmetry.reps", "10000"},
          {"projection.n", "4096"}, {"projection.js", "4,8,16,32"}, {"projection.reps", "2000"},
          {"isomorphy.n", "4096"}, {"isomorphy.j", "32"}, {"isomorphy.reps", "500"},
          {"multinomial.n", "100000"}, {"multinomial.r", "100"}, {"multinomial.C", "3"},
          {"multinomial.reps", "2000"},
          {"trig.L", "4"}, {"trig.delta", "0.125"}, {"trig.d", "1"}, {"trig.trials", "200"},
          {"terms.n", "1024"}, {"terms.n0", "16"}, {"terms.s", "1"}, {"terms.R", "1"}, {"terms.sigma", "1"},
          {"terms.cutoff", "8"}, {"terms.reps", "500"},
          {"covariance.transforms", "Z1,Z2,Z3,Z5,Zr"}, {"covariance.n", "64"}, {"covariance.k", "9"},
          {"covariance.n0", "3"}, {"covariance.sigma", "1"}, {"covariance.spline_m", "8"},
          {"covariance.reps", "2000"}}},
    };
    auto it = table.find(command);
    if (it == table.end())
        throw Error(ErrorKind::Validation, "unknown command '" + command + "' (use bound, transform, verify or rates)");
    return it->second;
}

template <class T>
T parse_integer(const std::string& key, const std::string& text) {
    std::string t = io::trim(text);
    T v{};
    auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || t.empty())
        throw Error(ErrorKind::Validation, "key '" + key + "': expected an integer, got '" + t + "'");
    return v;
}

double parse_real(const std::string& key, const std::string& text) {
    try {
        return io::parse_double(text);
    } catch (const Error&) {
        throw Error(ErrorKind::Validation, "key '" + key + "': expected a number, got '" + io::trim(text) + "'");
    }
}

long get_int(const Point& p, const std::string& key) { return parse_integer<long>(key, p.at(key)); }
double get_real(const Point& p, const std::string& key) { return parse_real(key, p.at(key)); }
bool has(const Point& p, const std::string& key) { return !io::trim(p.at(key)).empty(); }

std::vector<std::string> list_value(const std::string& text) {
    std::vector<std::string> out;
    for (auto& part : io::split(text, ',')) {
        std::string t = io::trim(part);
        if (!t.empty()) out.push_back(t);
    }
    return out;
}

void fail(const std::string& msg) { throw Error(ErrorKind::Validation, msg); }

std::string point_label(const Point& p, const std::set<std::string>& axes) {
    std::string out;
    for (const auto& [k, v] : p) {
        if (!axes.contains(k)) continue;
        if (!out.empty()) out += ';';
        out += k + "=" + v;
    }
    return out;
}

std::set<std::string> grid_axes(const ExperimentConfig& config) {
    std::set<std::string> axes;
    for (const auto& [k, v] : config.values)
        if (list_value(v).size() > 1) axes.insert(k);
    return axes;
}

// --- bound / rates -------------------------------------------------------

std::size_t bound_size(const Point& p) {
    const std::string kind = p.at("bound");
    if (kind == "multidim" && has(p, "m")) {
        const long m = get_int(p, "m");
        const long d = get_int(p, "d");
        return static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(m), static_cast<double>(d))));
    }
    return static_cast<std::size_t>(get_int(p, "n"));
}

void validate_bound_point(const Point& p) {
    const std::string kind = p.at("bound");
    if (kind != "multidim" && kind != "holder_design" && kind != "random_design")
        fail("key 'bound': expected multidim, holder_design or random_design, got '" + kind + "'");
    const long d = get_int(p, "d");
    if (d < 1 || d > 8) fail("key 'd': dimension must lie in [1, 8]");
    if (!(get_real(p, "R") >= 0.0)) fail("key 'R': radius must be nonnegative");
    if (!(get_real(p, "sigma") > 0.0)) fail("key 'sigma': noise level must be positive");
    get_int(p, "K");
    if (kind == "holder_design") {
        const double alpha = get_real(p, "alpha");
        if (!(alpha > 0.0 && alpha <= 1.0)) fail("key 'alpha': Hoelder exponent must lie in (0, 1]");
        if (d != 1) fail("key 'd': the Hoelder bound is one-dimensional");
        if (!has(p, "n")) fail("key 'n': the Hoelder bound needs n");
        const std::string design = p.at("design");
        if (design != "grid" && design != "perturbed" && design != "random")
            fail("key 'design': expected grid, perturbed or random, got '" + design + "'");
        const double a = get_real(p, "amplitude");
        if (!(a >= 0.0 && a < 1.0)) fail("key 'amplitude': perturbation amplitude must lie in [0, 1)");
    } else {
        if (!(get_real(p, "s") > 0.0)) fail("key 's': smoothness must be positive");
    }
    if (kind == "multidim") {
        if (has(p, "m")) {
            const long m = get_int(p, "m");
            if (has(p, "n") && static_cast<double>(get_int(p, "n")) !=
                                   std::pow(static_cast<double>(m), static_cast<double>(d)))
                fail("keys 'n' and 'm': n = " + p.at("n") + " is not m^d = " + std::to_string(m) + "^" +
                     std::to_string(d));
            if (m < 1 || m % 2 == 0)
                fail("key 'm': the Fourier grid needs an odd number of points per axis, got " + std::to_string(m) +
                     " (try " + std::to_string(m + 1) + ")");
        } else if (has(p, "n")) {
            const long n = get_int(p, "n");
            auto m = n > 0 ? integer_root(static_cast<std::size_t>(n), static_cast<int>(d)) : std::nullopt;
            if (!m || *m % 2 == 0) fail("key 'n': n must be m^d with m odd");
        } else {
            fail("key 'm': the multidimensional bound needs m or n");
        }
    } else if (!has(p, "n")) {
        fail("key 'n': missing sample size");
    }
    const std::size_t n = bound_size(p);
    if (n < 1) fail("key 'n': sample size must be positive");
    if (kind == "random_design" && has(p, "n0")) {
        const long n0 = get_int(p, "n0");
        if (n0 < 1) fail("key 'n0': must be at least 1");
        if (static_cast<std::size_t>(n0) > n)
            fail("key 'n0': n0 = " + std::to_string(n0) + " exceeds n = " + std::to_string(n));
    }
}

BoundReport evaluate_bound(const Point& p, std::uint64_t seed) {
    const std::string kind = p.at("bound");
    const int d = static_cast<int>(get_int(p, "d"));
    const double R = get_real(p, "R"), sigma = get_real(p, "sigma");
    const std::size_t n = bound_size(p);
    if (kind == "multidim") return multidim_bound(get_real(p, "s"), d, R, sigma, n, static_cast<int>(get_int(p, "K")));
    if (kind == "random_design") {
        const double s = get_real(p, "s");
        std::size_t n0 = has(p, "n0") ? static_cast<std::size_t>(get_int(p, "n0")) : optimal_n0(s, d, n);
        return random_design_bound(s, d, R, sigma, n, n0);
    }
    const HoelderBall ball{get_real(p, "alpha"), R};
    const std::string design = p.at("design");
    if (design == "grid") return holder_design_bound(equidistant_grid(static_cast<int>(n), 1), ball, sigma);
    if (design == "random") return holder_design_bound(uniform_random_design(n, 1, seed), ball, sigma);
    const double a = get_real(p, "amplitude") / static_cast<double>(n);
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> u(-0.5 * a, 0.5 * a);
    std::vector<double> dev(n);
    for (auto& v : dev) v = u(rng);
    dev.back() = std::min(dev.back(), 0.0);
    return holder_design_bound(perturbed_design(dev), ball, sigma);
}

std::vector<BoundReport> evaluate_bounds(const ExperimentConfig& config, const std::vector<Point>& grid) {
    std::vector<BoundReport> rows(grid.size());
    parallel_for(grid.size(), config.threads,
                 [&](std::size_t i) { rows[i] = evaluate_bound(grid[i], derive_seed(config.seed, i)); });
    return rows;
}

// --- transform -----------------------------------------------------------

void validate_transform_point(const Point& p) {
    const std::string basis = p.at("basis"), design = p.at("design"), t = p.at("transform");
    static const std::set<std::string> kTransforms = {"Z", "Z1", "Z2", "Z3", "Z5", "Zr"};
    if (!kTransforms.contains(t)) fail("key 'transform': expected one of Z, Z1, Z2, Z3, Z5, Zr, got '" + t + "'");
    if (basis != "fourier" && basis != "spline" && basis != "piecewise_constant" && basis != "scaling")
        fail("key 'basis': expected fourier, spline, piecewise_constant or scaling, got '" + basis + "'");
    if (design != "grid" && design != "random") fail("key 'design': expected grid or random, got '" + design + "'");
    const long d = get_int(p, "d");
    if (d < 1 || d > 4) fail("key 'd': dimension must lie in [1, 4]");
    if (!(get_real(p, "s") > 0.0)) fail("key 's': smoothness must be positive");
    if (!(get_real(p, "R") >= 0.0)) fail("key 'R': radius must be nonnegative");
    if (!(get_real(p, "sigma") > 0.0)) fail("key 'sigma': noise level must be positive");
    if (get_int(p, "cutoff") < 0) fail("key 'cutoff': must be nonnegative");
    std::size_t n = 0, k = 0;
    if (design == "random") {
        if (basis != "fourier") fail("key 'basis': random designs are supported with the fourier basis only");
        if (!has(p, "n")) fail("key 'n': a random design needs n");
        n = static_cast<std::size_t>(std::max(0L, get_int(p, "n")));
        k = static_cast<std::size_t>(std::max(0L, get_int(p, "k")));
        if (k < 1 || k > n) fail("key 'k': basis size must lie in [1, n]");
    } else {
        long m = get_int(p, "m");
        if (basis == "scaling") m = 1L << get_int(p, "level");
        if (m < 1) fail("key 'm': must be positive");
        if (basis == "fourier" && m % 2 == 0)
            fail("key 'm': the Fourier grid needs an odd number of points per axis, got " + std::to_string(m) +
                 " (try " + std::to_string(m + 1) + ")");
        if (basis == "piecewise_constant" && d != 1) fail("key 'd': piecewise constants are one-dimensional");
        if (basis == "spline" && m < 3) fail("key 'm': splines need m >= 3");
        n = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(m), static_cast<double>(d))));
        k = n;
    }
    if (t == "Zr") {
        const long n0 = get_int(p, "n0");
        if (n0 < 1) fail("key 'n0': must be at least 1");
        if (static_cast<std::size_t>(n0) > n)
            fail("key 'n0': n0 = " + std::to_string(n0) + " exceeds n = " + std::to_string(n));
        if (static_cast<std::size_t>(n0) > k)
            fail("key 'n0': n0 = " + std::to_string(n0) + " exceeds the basis size " + std::to_string(k));
    }
}

EmpiricalGeometry transform_geometry(const Point& p, std::uint64_t seed) {
    const int d = static_cast<int>(get_int(p, "d"));
    const std::string basis = p.at("basis");
    if (p.at("design") == "random")
        return EmpiricalGeometry(BasisFamily::fourier_enumerated(d, static_cast<std::size_t>(get_int(p, "k"))),
                                 uniform_random_design(static_cast<std::size_t>(get_int(p, "n")), d, seed));
    if (basis == "scaling") {
        const int level = static_cast<int>(get_int(p, "level"));
        return EmpiricalGeometry(BasisFamily::scaling_system(named_filter(p.at("filter")), level, d),
                                 equidistant_grid(1 << level, d));
    }
    const int m = static_cast<int>(get_int(p, "m"));
    if (basis == "fourier") return EmpiricalGeometry(BasisFamily::fourier_block(m, d), equidistant_grid(m, d));
    if (basis == "spline") return EmpiricalGeometry(BasisFamily::spline_linear_periodic(m, d), equidistant_grid(m, d));
    return EmpiricalGeometry(BasisFamily::piecewise_constant(static_cast<std::size_t>(m)), equidistant_grid(m, 1));
}

TransformOutput evaluate_transform(const Point& p, std::uint64_t seed) {
    EmpiricalGeometry geometry = transform_geometry(p, derive_seed(seed, 0));
    const SobolevBall ball{static_cast<int>(get_int(p, "d")), get_real(p, "s"), get_real(p, "R")};
    FourierFunction f = sample_from_sobolev_ball(ball, static_cast<int>(get_int(p, "cutoff")), derive_seed(seed, 1));
    std::vector<double> signal(geometry.n());
    for (std::size_t i = 0; i < signal.size(); ++i) signal[i] = f(geometry.design().point(i)).real();
    RegressionSample sample = simulate_sample(geometry.design(), signal, get_real(p, "sigma"), derive_seed(seed, 2));
    const std::string t = p.at("transform");
    if (t == "Z") return isometric_shift(sample, geometry);
    if (t == "Z1") return z1(sample, geometry);
    if (t == "Z2") return z2(sample, geometry);
    if (t == "Z3") return z3(sample, geometry);
    if (t == "Z5") return z5_randomize(z3(sample, geometry), geometry, derive_seed(seed, 3));
    return two_level_transform(sample, geometry, static_cast<std::size_t>(get_int(p, "n0")));
}

// --- verify --------------------------------------------------------------

const std::vector<std::string> kCheckNames = {"symmetry", "projection", "isomorphy", "multinomial",
                                              "trig", "terms", "covariance"};

std::uint64_t check_seed(std::uint64_t master, const std::string& name) {
    auto it = std::find(kCheckNames.begin(), kCheckNames.end(), name);
    return derive_seed(master, static_cast<std::uint64_t>(it - kCheckNames.begin()) + 1);
}

std::size_t positive(const Point& p, const std::string& key) {
    const long v = get_int(p, key);
    if (v < 1) fail("key '" + key + "': must be at least 1");
    return static_cast<std::size_t>(v);
}

void validate_verify(const ExperimentConfig& config) {
    const Point& p = config.values;
    for (const auto& name : list_value(p.at("checks")))
        if (std::find(kCheckNames.begin(), kCheckNames.end(), name) == kCheckNames.end())
            fail("key 'checks': unknown check '" + name + "'");
    for (const auto& [k, v] : p) {
        if (k == "checks" || k == "projection.js" || k == "covariance.transforms") continue;
        parse_real(k, v);
    }
    if (positive(p, "terms.n0") >= positive(p, "terms.n"))
        fail("key 'terms.n0': n0 must be smaller than terms.n");
    if (!(get_real(p, "terms.s") > 0.0)) fail("key 'terms.s': smoothness must be positive");
    if (!(get_real(p, "terms.sigma") > 0.0)) fail("key 'terms.sigma': noise level must be positive");
    if (!(get_real(p, "covariance.sigma") > 0.0)) fail("key 'covariance.sigma': noise level must be positive");
    if (positive(p, "covariance.n0") > positive(p, "covariance.k"))
        fail("key 'covariance.n0': n0 exceeds the basis size covariance.k");
    if (positive(p, "covariance.k") > positive(p, "covariance.n"))
        fail("key 'covariance.k': basis size exceeds covariance.n");
    for (const auto& j : list_value(p.at("projection.js"))) {
        const long v = parse_integer<long>("projection.js", j);
        if (v < 1 || static_cast<std::size_t>(v) > positive(p, "projection.n"))
            fail("key 'projection.js': entries must lie in [1, projection.n]");
    }
    for (const auto& t : list_value(p.at("covariance.transforms")))
        if (t != "Z" && t != "Z1" && t != "Z2" && t != "Z3" && t != "Z5" && t != "Zr")
            fail("key 'covariance.transforms': unknown transform '" + t + "'");
}

std::vector<CheckResult> run_checks(const ExperimentConfig& config) {
    const Point& p = config.values;
    const unsigned threads = config.threads;
    auto reps = [&](const std::string& key) { return config.reps ? *config.reps : positive(p, key); };
    std::vector<CheckResult> results;
    for (const auto& name : list_value(p.at("checks"))) {
        const std::uint64_t seed = check_seed(config.seed, name);
        if (name == "symmetry") {
            const std::size_t top = positive(p, "symmetry.top");
            results.push_back(check_symmetry_zero_mean(positive(p, "symmetry.n"), static_cast<int>(positive(p, "symmetry.d")),
                                                       all_pairs(top), all_triples(top), reps("symmetry.reps"), seed,
                                                       threads));
        } else if (name == "projection") {
            std::vector<std::size_t> js;
            for (const auto& j : list_value(p.at("projection.js")))
                js.push_back(parse_integer<std::size_t>("projection.js", j));
            results.push_back(check_projection_growth(positive(p, "projection.n"), js, reps("projection.reps"), seed, 1,
                                                      threads));
        } else if (name == "isomorphy") {
            results.push_back(check_isomorphy_event(positive(p, "isomorphy.n"), positive(p, "isomorphy.j"),
                                                    reps("isomorphy.reps"), seed, 1, threads));
        } else if (name == "multinomial") {
            results.push_back(check_multinomial_max(positive(p, "multinomial.n"), positive(p, "multinomial.r"),
                                                    get_real(p, "multinomial.C"), reps("multinomial.reps"), seed,
                                                    threads));
        } else if (name == "trig") {
            results.push_back(check_trig_discretization(static_cast<int>(positive(p, "trig.L")),
                                                        get_real(p, "trig.delta"),
                                                        static_cast<int>(positive(p, "trig.d")),
                                                        config.reps ? *config.reps : positive(p, "trig.trials"), seed,
                                                        threads));
        } else if (name == "terms") {
            const SobolevBall ball{1, get_real(p, "terms.s"), get_real(p, "terms.R")};
            FourierFunction f =
                sample_from_sobolev_ball(ball, static_cast<int>(positive(p, "terms.cutoff")), derive_seed(seed, 0));
            results.push_back(decompose_terms(positive(p, "terms.n"), positive(p, "terms.n0"), ball, f,
                                              get_real(p, "terms.sigma"), reps("terms.reps"), derive_seed(seed, 1),
                                              threads));
        } else if (name == "covariance") {
            const std::size_t n = positive(p, "covariance.n"), k = positive(p, "covariance.k");
            const std::size_t n0 = positive(p, "covariance.n0");
            const double sigma = get_real(p, "covariance.sigma");
            EmpiricalGeometry random(BasisFamily::fourier_enumerated(1, k),
                                     uniform_random_design(n, 1, derive_seed(seed, 0)));
            const int sm = static_cast<int>(positive(p, "covariance.spline_m"));
            EmpiricalGeometry spline(BasisFamily::spline_linear_periodic(sm, 1), equidistant_grid(sm, 1));
            const int fm = static_cast<int>(k % 2 == 1 ? k : k + 1);
            EmpiricalGeometry grid(BasisFamily::fourier_block(fm, 1), equidistant_grid(fm, 1));
            std::uint64_t index = 1;
            for (const auto& t : list_value(p.at("covariance.transforms"))) {
                const EmpiricalGeometry& g = t == "Z5" ? spline : t == "Z" ? grid : random;
                results.push_back(check_transform_covariance(g, t, sigma, std::min(n0, g.basis_size()),
                                                             reps("covariance.reps"), derive_seed(seed, index++),
                                                             threads));
            }
        }
    }
    return results;
}

std::string verify_csv(const std::vector<CheckResult>& results) {
    std::ostringstream out;
    out << "check,verdict,replicates,seed,quantity,estimate,mc_error,threshold\n";
    auto cell = [](const std::map<std::string, double>& m, const std::string& k) {
        auto it = m.find(k);
        return it == m.end() ? std::string() : io::fmt17(it->second);
    };
    for (const auto& r : results) {
        std::set<std::string> keys;
        for (const auto& [k, v] : r.estimates) keys.insert(k);
        for (const auto& [k, v] : r.thresholds) keys.insert(k);
        for (const auto& k : keys)
            out << r.name << ',' << to_string(r.verdict) << ',' << r.replicates << ',' << r.seed << ',' << k << ','
                << cell(r.estimates, k) << ',' << cell(r.mc_errors, k) << ',' << cell(r.thresholds, k) << '\n';
    }
    return out.str();
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::string t = io::trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            fail("config line " + std::to_string(number) + ": expected 'key = value', got '" + t + "'");
        std::string key = io::trim(t.substr(0, eq));
        if (key.empty()) fail("config line " + std::to_string(number) + ": empty key");
        out.emplace_back(key, io::trim(t.substr(eq + 1)));
    }
    return out;
}

ExperimentConfig resolve_config(const std::string& command, const std::string& config_text,
                                const CliOverrides& overrides) {
    ExperimentConfig config;
    config.command = command;
    config.values = defaults(command);
    std::set<std::string> given;
    auto assign = [&](const std::string& key, const std::string& value) {
        given.insert(key);
        if (key == "seed") config.seed = parse_integer<std::uint64_t>(key, value);
        else if (key == "reps") config.reps = parse_integer<std::size_t>(key, value);
        else if (key == "threads") config.threads = parse_integer<unsigned>(key, value);
        else if (key == "out") config.out_dir = value;
        else if (config.values.contains(key)) config.values[key] = value;
        else fail("unknown key '" + key + "' for command '" + command + "'");
    };
    for (const auto& [k, v] : parse_key_values(config_text)) assign(k, v);
    for (const auto& [k, v] : overrides.set) assign(k, v);
    if (overrides.seed) config.seed = *overrides.seed;
    if (overrides.reps) config.reps = *overrides.reps;
    if (overrides.threads) config.threads = *overrides.threads;
    if (overrides.out_dir) config.out_dir = *overrides.out_dir;
    // an explicit n on a grid replaces the default m
    if ((command == "bound" || command == "rates") && given.contains("n") && !given.contains("m") &&
        !config.values["n"].empty())
        config.values["m"] = "";
    if (config.reps && *config.reps < 2) fail("key 'reps': need at least two replicates");
    if (config.threads < 1) fail("key 'threads': need at least one thread");

    if (command == "verify") {
        validate_verify(config);
        return config;
    }
    const auto grid = expand_grid(config);
    for (const auto& p : grid) {
        if (command == "transform") validate_transform_point(p);
        else validate_bound_point(p);
    }
    if (command == "rates") {
        std::set<std::string> axes = grid_axes(config);
        axes.erase("n");
        axes.erase("m");
        std::map<std::string, std::size_t> counts;
        for (const auto& p : grid) ++counts[point_label(p, axes)];
        for (const auto& [label, c] : counts)
            if (c < 3)
                fail("rates: group '" + (label.empty() ? std::string("all") : label) + "' has " + std::to_string(c) +
                     " point(s); a slope fit needs at least 3 values of n or m");
    }
    return config;
}

std::vector<Point> expand_grid(const ExperimentConfig& config) {
    std::vector<Point> grid(1);
    for (const auto& [key, value] : config.values) {
        std::vector<std::string> options = list_value(value);
        if (options.empty()) options.emplace_back();
        std::vector<Point> next;
        next.reserve(grid.size() * options.size());
        for (const auto& p : grid)
            for (const auto& o : options) {
                Point q = p;
                q[key] = o;
                next.push_back(std::move(q));
            }
        grid = std::move(next);
    }
    return grid;
}

RunOutput run_bound(const ExperimentConfig& config) {
    const auto grid = expand_grid(config);
    std::vector<BoundReport> rows = evaluate_bounds(config, grid);
    RunOutput out;
    std::ostringstream csv;
    csv << report_csv_header() << '\n';
    out.json = nlohmann::json::array();
    for (const auto& r : rows) {
        csv << report_csv_row(r) << '\n';
        out.json.push_back(to_json(r));
    }
    out.csv = csv.str();
    out.table = out.csv;
    return out;
}

RunOutput run_rates(const ExperimentConfig& config) {
    const auto grid = expand_grid(config);
    std::vector<BoundReport> rows = evaluate_bounds(config, grid);
    std::set<std::string> axes = grid_axes(config);
    axes.erase("n");
    axes.erase("m");
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::string label = point_label(grid[i], axes);
        if (!groups.contains(label)) order.push_back(label);
        groups[label].push_back(i);
    }
    RunOutput out;
    std::ostringstream csv;
    csv << "group,bound,points,n_min,n_max,slope,intercept,residual,expected_slope\n";
    out.json = {{"fits", nlohmann::json::array()}, {"rows", nlohmann::json::array()}};
    for (const auto& r : rows) out.json["rows"].push_back(to_json(r));
    for (const auto& label : order) {
        const auto& idx = groups[label];
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t i : idx) pairs.emplace_back(static_cast<double>(rows[i].n), rows[i].value);
        RateFit fit = fit_rate_slope(pairs);
        const Point& p = grid[idx.front()];
        const std::string kind = p.at("bound");
        std::string expected;
        const double d = get_real(p, "d");
        if (kind == "multidim") expected = io::fmt17(0.5 - get_real(p, "s") / d);
        else if (kind == "holder_design" && p.at("design") == "grid") expected = io::fmt17(0.5 - get_real(p, "alpha"));
        else if (kind == "random_design" && !has(p, "n0")) {
            const double s = get_real(p, "s");
            expected = io::fmt17((d - 2.0 * s) / (2.0 * (2.0 * s + d)));
        }
        std::size_t n_min = rows[idx.front()].n, n_max = n_min;
        for (std::size_t i : idx) {
            n_min = std::min(n_min, rows[i].n);
            n_max = std::max(n_max, rows[i].n);
        }
        csv << (label.empty() ? "all" : label) << ',' << kind << ',' << idx.size() << ',' << n_min << ',' << n_max
            << ',' << io::fmt17(fit.slope) << ',' << io::fmt17(fit.intercept) << ',' << io::fmt17(fit.residual) << ','
            << expected << '\n';
        nlohmann::json j = {{"group", label.empty() ? "all" : label}, {"bound", kind}, {"points", idx.size()},
                            {"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual}};
        if (!expected.empty()) j["expected_slope"] = io::parse_double(expected);
        out.json["fits"].push_back(j);
    }
    out.csv = csv.str();
    out.table = out.csv;
    return out;
}

RunOutput run_transform(const ExperimentConfig& config) {
    const auto grid = expand_grid(config);
    std::vector<TransformOutput> outputs(grid.size());
    parallel_for(grid.size(), config.threads,
                 [&](std::size_t i) { outputs[i] = evaluate_transform(grid[i], derive_seed(config.seed, i)); });
    const std::set<std::string> axes = grid_axes(config);
    RunOutput out;
    std::ostringstream csv;
    csv << "point,transform,n,index,re,im,noise_kind,noise_scale\n";
    out.json = nlohmann::json::array();
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        const auto& o = outputs[i];
        for (Eigen::Index j = 0; j < o.coeffs.size(); ++j)
            csv << i << ',' << o.transform << ',' << o.n << ',' << j << ',' << io::fmt17(o.coeffs(j).real()) << ','
                << io::fmt17(o.coeffs(j).imag()) << ',' << to_string(o.noise.kind) << ','
                << io::fmt17(o.noise.scale) << '\n';
        nlohmann::json j = to_json(o);
        j["point"] = point_label(grid[i], axes);
        out.json.push_back(j);
    }
    out.csv = csv.str();
    std::ostringstream table;
    for (std::size_t i = 0; i < outputs.size(); ++i)
        table << outputs[i].transform << " n=" << outputs[i].n << " coefficients=" << outputs[i].coeffs.size()
              << " noise=" << to_string(outputs[i].noise.kind) << '\n';
    out.table = table.str();
    return out;
}

RunOutput run_verify(const ExperimentConfig& config) {
    std::vector<CheckResult> results = run_checks(config);
    RunOutput out;
    out.csv = verify_csv(results);
    out.json = nlohmann::json::array();
    for (const auto& r : results) {
        out.json.push_back(to_json(r));
        if (r.verdict != Verdict::Pass) out.exit_code = 1;
    }
    out.table = format_table(results);
    return out;
}

RunOutput run(const ExperimentConfig& config) {
    if (config.command == "bound") return run_bound(config);
    if (config.command == "rates") return run_rates(config);
    if (config.command == "transform") return run_transform(config);
    if (config.command == "verify") return run_verify(config);
    throw Error(ErrorKind::Validation, "unknown command '" + config.command + "'");
}

nlohmann::json manifest(const ExperimentConfig& config) {
    nlohmann::json values = nlohmann::json::object();
    for (const auto& [k, v] : config.values) values[k] = v;
    nlohmann::json j = {{"command", config.command}, {"seed", config.seed}, {"threads", config.threads},
                        {"out", config.out_dir}, {"config", values}};
    j["reps"] = config.reps ? nlohmann::json(*config.reps) : nlohmann::json(nullptr);
    return j;
}

void write_outputs(const ExperimentConfig& config, const RunOutput& output) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create '" + config.out_dir + "': " + ec.message());
    auto write = [&](const std::string& name, const std::string& text) {
        const fs::path path = fs::path(config.out_dir) / name;
        std::ofstream f(path, std::ios::binary);
        f << text;
        if (!f) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
    };
    write("results.csv", output.csv);
    write("results.json", output.json.dump(2) + "\n");
    write("manifest.json", manifest(config).dump(2) + "\n");
}

}  // namespace aeq::app
