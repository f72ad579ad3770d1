#pragma once

#include "periflow/lattice.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace periflow {

struct CircleObstacle {
    Complex center{0.0, 0.0};
    double radius = 1.0;
};

// One period cell of the obstacle array: the parallelogram anchored at z0
// (z0 inside the generating obstacle) minus the closed disks of the array.
// The clipped corner pieces of the cell tile exactly one disk, so
// flow_area = cell_area - pi r^2.
struct FundamentalRegion {
    Lattice lattice;
    CircleObstacle obstacle;
    Complex z0;
    double cell_area = 0.0;  // |Im(conj(omega1) * omega2)|
    double flow_area = 0.0;  // cell_area - pi r^2
};

// Euclidean length of the shortest nonzero lattice vector, via Lagrange-Gauss
// basis reduction. Exact up to rounding for any valid basis, including skew
// ones where scanning a fixed window of (m, n) offsets would miss the minimum.
double shortest_lattice_vector(const Lattice& lattice);

// Validates and assembles the region. Throws std::invalid_argument when
// obstacles overlap or touch (shortest lattice vector <= 2r), when the cell is
// too thin for the four-corner membership test below to be exact
// (r >= cell_area/|omega1| or cell_area/|omega2|), or when z0 is not strictly
// inside the obstacle. Default z0 is the obstacle center.
FundamentalRegion make_region(const Lattice& lattice, const CircleObstacle& obstacle,
                              std::optional<Complex> z0 = std::nullopt);

double flow_area(const FundamentalRegion& region);

// True when z lies inside or on any translate of the obstacle. Writing
// z - center = a omega1 + b omega2, only the four translates with
// (m, n) in {floor(a), floor(a)+1} x {floor(b), floor(b)+1} can contain z;
// this is exact because make_region guarantees r is below both cell widths.
bool in_obstacle_array(Complex z, const FundamentalRegion& region);

// Quadrature nodes in the flow region. For Monte Carlo sets, `seed` and
// `requested` reproduce the set exactly; `proposals` records how many
// uniform cell proposals the rejection loop consumed.
struct SampleSet {
    std::vector<Complex> points;
    std::uint64_t seed = 0;
    std::int64_t requested = 0;
    std::int64_t proposals = 0;
};

// The index-th uniform proposal in the cell, before rejection: a pure
// function of (seed, index) through a counter-based generator, so any
// partition of the index range reproduces the same stream.
Complex region_proposal(const FundamentalRegion& region, std::uint64_t seed,
                        std::uint64_t index);

// First `count` accepted proposals in index order. Deterministic in
// (region, count, seed) and independent of how the scan would be chunked.
// Throws std::invalid_argument for count < 1 and std::runtime_error if the
// acceptance ratio collapses below 1e-3 (unreachable for regions that pass
// make_region validation; guards hand-built ones).
SampleSet sample_region(const FundamentalRegion& region, std::int64_t count,
                        std::uint64_t seed);

// Midpoint-rule nodes of the na x nb cell subdivision, with nodes inside
// obstacles rejected. Deterministic companion quadrature for cross-checking
// Monte Carlo results.
SampleSet grid_region(const FundamentalRegion& region, int na, int nb);

} // namespace periflow
