#include "aequiv/design.hpp"

#include "aequiv/error.hpp"
#include "aequiv/io.hpp"
#include "aequiv/rng.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

namespace aeq {

namespace {

// Upper limit on stored coordinates; keeps m^d * d addressable with room to spare.
constexpr std::size_t kMaxCoords = std::size_t{1} << 34;

void check_unit_cube(const std::vector<double>& coords) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
        double v = coords[i];
        if (!(v >= 0.0 && v <= 1.0))
            throw Error(ErrorKind::InvalidDesign,
                        "coordinate " + std::to_string(i) + " = " + io::fmt17(v) + " outside [0,1]");
    }
}

}  // namespace

const char* to_string(DesignKind kind) {
    switch (kind) {
        case DesignKind::EquidistantGrid: return "equidistant";
        case DesignKind::Perturbed: return "perturbed";
        case DesignKind::UniformRandom: return "random";
        case DesignKind::Explicit: return "explicit";
    }
    return "?";
}

Design Design::from_points(int d, std::vector<double> coords) {
    require(d >= 1, ErrorKind::InvalidArgument, "dimension must be positive");
    require(coords.size() % static_cast<std::size_t>(d) == 0, ErrorKind::InvalidDesign,
            "coordinate count is not a multiple of the dimension");
    check_unit_cube(coords);
    Design out;
    out.d_ = d;
    out.coords_ = std::move(coords);
    return out;
}

Design equidistant_grid(int m, int d) {
    require(m >= 1 && d >= 1, ErrorKind::InvalidArgument, "grid needs m >= 1 and d >= 1");
    std::size_t n = 1;
    for (int r = 0; r < d; ++r) {
        if (n > kMaxCoords / static_cast<std::size_t>(m) / static_cast<std::size_t>(d))
            throw Error(ErrorKind::SizeLimit, "m^d too large for m=" + std::to_string(m) +
                                                  ", d=" + std::to_string(d));
        n *= static_cast<std::size_t>(m);
    }
    Design out;
    out.d_ = d;
    out.kind_ = DesignKind::EquidistantGrid;
    out.grid_m_ = m;
    out.coords_.resize(n * static_cast<std::size_t>(d));
    std::vector<int> k(static_cast<std::size_t>(d), 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (int r = 0; r < d; ++r)
            out.coords_[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(r)] =
                static_cast<double>(k[static_cast<std::size_t>(r)]) / m;
        for (int r = d - 1; r >= 0; --r) {
            if (++k[static_cast<std::size_t>(r)] <= m) break;
            k[static_cast<std::size_t>(r)] = 1;
        }
    }
    return out;
}

Design perturbed_design(std::span<const double> deviations) {
    const std::size_t n = deviations.size();
    require(n >= 1, ErrorKind::InvalidArgument, "empty design");
    Design out;
    out.d_ = 1;
    out.kind_ = DesignKind::Perturbed;
    out.coords_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i + 1) / static_cast<double>(n) + deviations[i];
        if (!(x >= 0.0 && x <= 1.0))
            throw Error(ErrorKind::InvalidDesign,
                        "x_" + std::to_string(i + 1) + " = " + io::fmt17(x) + " outside [0,1]");
        if (i > 0 && !(x > out.coords_[i - 1]))
            throw Error(ErrorKind::InvalidDesign,
                        "design not strictly increasing at index " + std::to_string(i + 1));
        out.coords_[i] = x;
    }
    return out;
}

double perturbation_sum(const Design& design, double alpha) {
    require(design.dim() == 1, ErrorKind::InvalidArgument, "perturbation sum needs d = 1");
    const std::size_t n = design.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dev = std::abs(design.point(i)[0] - static_cast<double>(i + 1) / static_cast<double>(n));
        sum += std::pow(dev, 2.0 * alpha);
    }
    return sum;
}

Design uniform_random_design(std::size_t n, int d, std::uint64_t seed) {
    require(n >= 1 && d >= 1, ErrorKind::InvalidArgument, "random design needs n >= 1 and d >= 1");
    require(n <= kMaxCoords / static_cast<std::size_t>(d), ErrorKind::SizeLimit, "design too large");
    Design out;
    out.d_ = d;
    out.kind_ = DesignKind::UniformRandom;
    out.seed_ = seed;
    out.coords_.resize(n * static_cast<std::size_t>(d));
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (double& c : out.coords_) c = unif(rng);
    return out;
}

void write_csv(const Design& design, std::ostream& out) {
    const int d = design.dim();
    for (int r = 0; r < d; ++r) out << (r ? "," : "") << 'x' << (r + 1);
    out << '\n';
    for (std::size_t i = 0; i < design.size(); ++i) {
        auto p = design.point(i);
        for (int r = 0; r < d; ++r) out << (r ? "," : "") << io::fmt17(p[static_cast<std::size_t>(r)]);
        out << '\n';
    }
}

Design read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty design file");
    auto header = io::split(io::trim(line), ',');
    const int d = static_cast<int>(header.size());
    for (int r = 0; r < d; ++r)
        if (io::trim(header[static_cast<std::size_t>(r)]) != "x" + std::to_string(r + 1))
            throw Error(ErrorKind::Io, "bad design header '" + line + "'");
    std::vector<double> coords;
    while (std::getline(in, line)) {
        if (io::trim(line).empty()) continue;
        auto cells = io::split(line, ',');
        if (static_cast<int>(cells.size()) != d) throw Error(ErrorKind::Io, "ragged design row '" + line + "'");
        for (auto& c : cells) coords.push_back(io::parse_double(c));
    }
    return Design::from_points(d, std::move(coords));
}

}  // namespace aeq
