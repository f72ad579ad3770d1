#include "periflow/geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace periflow {

namespace {

// splitmix64 finalizer over a counter: value is a pure function of
// (seed, index), so substreams over disjoint index ranges never overlap and
// partitioned scans reproduce the sequential one exactly.
std::uint64_t counter_value(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// top 53 bits to a double in [0, 1)
double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double dot(Complex a, Complex b) { return a.real() * b.real() + a.imag() * b.imag(); }

} // namespace

double shortest_lattice_vector(const Lattice& lattice) {
    // Lagrange-Gauss reduction: after it terminates, the shorter basis vector
    // attains the lattice minimum.
    Complex u = lattice.omega1;
    Complex w = lattice.omega2;
    for (int iter = 0; iter < 64; ++iter) {
        if (std::norm(u) > std::norm(w)) std::swap(u, w);
        const double mu = std::round(dot(w, u) / std::norm(u));
        const Complex w_next = w - mu * u;
        if (std::norm(w_next) >= std::norm(w)) break;
        w = w_next;
    }
    return std::min(std::abs(u), std::abs(w));
}

FundamentalRegion make_region(const Lattice& lattice, const CircleObstacle& obstacle,
                              std::optional<Complex> z0) {
    const double r = obstacle.radius;
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("obstacle radius must be positive and finite");

    const double lambda1 = shortest_lattice_vector(lattice);
    if (!(lambda1 > 2.0 * r))
        throw std::invalid_argument(
            "obstacle too large for the lattice: translates overlap or touch "
            "(shortest lattice vector <= 2r)");

    FundamentalRegion region;
    region.lattice = lattice;
    region.obstacle = obstacle;
    region.cell_area = std::abs((std::conj(lattice.omega1) * lattice.omega2).imag());

    // membership tests check only the four surrounding lattice corners, which
    // is exact only while the obstacle is thinner than both cell widths
    const double width1 = region.cell_area / std::abs(lattice.omega1);
    const double width2 = region.cell_area / std::abs(lattice.omega2);
    if (!(r < width1 && r < width2))
        throw std::invalid_argument(
            "lattice basis too skew for this obstacle: radius must be below "
            "the cell width in both period directions");

    region.flow_area = region.cell_area - kPi * r * r;
    if (!(region.flow_area > 0.0))
        throw std::invalid_argument("obstacle fills the whole period cell");

    region.z0 = z0.value_or(obstacle.center);
    if (!(std::abs(region.z0 - obstacle.center) < r))
        throw std::invalid_argument("anchor point z0 must lie strictly inside the obstacle");
    return region;
}

double flow_area(const FundamentalRegion& region) {
    return region.flow_area;
}

bool in_obstacle_array(Complex z, const FundamentalRegion& region) {
    const Lattice& lat = region.lattice;
    const Complex w = (z - region.obstacle.center) * lat.inv_omega1;
    const double b = w.imag() / lat.im_tau;
    const double a = w.real() - b * lat.tau.real();
    const double fa = std::floor(a);
    const double fb = std::floor(b);
    const double r2 = region.obstacle.radius * region.obstacle.radius;
    for (int dm = 0; dm <= 1; ++dm) {
        for (int dn = 0; dn <= 1; ++dn) {
            const Complex center = region.obstacle.center + (fa + dm) * lat.omega1 +
                                   (fb + dn) * lat.omega2;
            if (std::norm(z - center) <= r2) return true;
        }
    }
    return false;
}

Complex region_proposal(const FundamentalRegion& region, std::uint64_t seed,
                        std::uint64_t index) {
    const double a1 = to_unit(counter_value(seed, 2 * index));
    const double a2 = to_unit(counter_value(seed, 2 * index + 1));
    return region.z0 + a1 * region.lattice.omega1 + a2 * region.lattice.omega2;
}

SampleSet sample_region(const FundamentalRegion& region, std::int64_t count,
                        std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample_region: count must be >= 1");

    SampleSet set;
    set.seed = seed;
    set.requested = count;
    set.points.reserve(static_cast<std::size_t>(count));

    std::uint64_t index = 0;
    while (std::ssize(set.points) < count) {
        const Complex z = region_proposal(region, seed, index);
        ++index;
        if (!in_obstacle_array(z, region)) set.points.push_back(z);
        // valid regions accept >9% of proposals; this guards hand-built ones
        if ((index & 0xFFFF) == 0 && std::ssize(set.points) * 1000 < static_cast<std::int64_t>(index))
            throw std::runtime_error(
                "sample_region: acceptance ratio below 1e-3, region nearly filled "
                "by obstacles");
    }
    set.proposals = static_cast<std::int64_t>(index);
    return set;
}

SampleSet grid_region(const FundamentalRegion& region, int na, int nb) {
    if (na < 1 || nb < 1) throw std::invalid_argument("grid_region: resolutions must be >= 1");

    SampleSet set;
    set.seed = 0;
    set.requested = static_cast<std::int64_t>(na) * nb;
    set.proposals = set.requested;
    set.points.reserve(static_cast<std::size_t>(set.requested));
    for (int ib = 0; ib < nb; ++ib) {
        const double b = (ib + 0.5) / nb;
        for (int ia = 0; ia < na; ++ia) {
            const double a = (ia + 0.5) / na;
            const Complex z = region.z0 + a * region.lattice.omega1 + b * region.lattice.omega2;
            if (!in_obstacle_array(z, region)) set.points.push_back(z);
        }
    }
    return set;
}

} // namespace periflow
