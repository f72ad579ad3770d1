#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "periflow/errors.hpp"
#include "periflow/mfs.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace periflow;

namespace {

const Lattice kSquare = make_lattice({4.0, 0.0}, {0.0, 4.0});

FundamentalRegion square_region() {
    return make_region(kSquare, CircleObstacle{{0.0, 0.0}, 1.0});
}

FlowModel solve_square(int count, double ratio, const SampleSet& samples, double speed = 1.0) {
    const FundamentalRegion region = square_region();
    const ChargeConfig cfg = place_points(region.obstacle, count, ratio);
    return assemble_and_solve(region, cfg, cell_average_coefficients(cfg, region, samples),
                              speed);
}

double total_strength(const FlowModel& model) {
    return std::accumulate(model.strengths.begin(), model.strengths.end(), 0.0);
}

double max_strength(const FlowModel& model) {
    double m = 0.0;
    for (double q : model.strengths) m = std::max(m, std::abs(q));
    return m;
}

// pseudo-period increments of the stream function, exact identities of the
// ansatz once the total strength vanishes
double stream_shift(const FlowModel& model, Complex period) {
    double s = model.mean_speed * period.imag();
    for (std::size_t j = 0; j < model.strengths.size(); ++j)
        s += model.strengths[j] * (model.cell_averages[j] * period).real() / kTwoPi;
    if (period == model.region.lattice.omega2 || period == -model.region.lattice.omega2) {
        double extra = 0.0;
        for (std::size_t j = 0; j < model.strengths.size(); ++j)
            extra += model.strengths[j] *
                     (model.charges.charge_points[j] * model.region.lattice.inv_omega1).imag();
        s += (period == model.region.lattice.omega2) ? extra : -extra;
    }
    return s;
}

} // namespace

TEST_CASE("charge and collocation rings") {
    const CircleObstacle disk{{0.0, 0.0}, 1.0};
    const ChargeConfig cfg = place_points(disk, 4, 0.7);
    CHECK(cfg.count == 4);
    CHECK(cfg.charge_points.size() == 4);
    CHECK(cfg.collocation_points.size() == 4);  // defaults to the charge count
    const Complex expect_q[] = {{0.7, 0.0}, {0.0, 0.7}, {-0.7, 0.0}, {0.0, -0.7}};
    const Complex expect_z[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    for (int j = 0; j < 4; ++j) {
        CHECK(std::abs(cfg.charge_points[j] - expect_q[j]) < 1e-15);
        CHECK(std::abs(cfg.collocation_points[j] - expect_z[j]) < 1e-15);
    }

    // off-center obstacle translates both rings
    const CircleObstacle off{{2.0, -1.0}, 0.5};
    const ChargeConfig cfg2 = place_points(off, 8, 0.5, 24);
    CHECK(cfg2.collocation_points.size() == 24);
    CHECK(std::abs(cfg2.charge_points[0] - Complex{2.25, -1.0}) < 1e-15);
    CHECK(std::abs(cfg2.collocation_points[0] - Complex{2.5, -1.0}) < 1e-15);
    for (const Complex zeta : cfg2.charge_points)
        CHECK(std::abs(zeta - off.center) == doctest::Approx(0.25).epsilon(1e-14));

    CHECK_THROWS_AS(place_points(disk, 3, 0.7), std::invalid_argument);
    CHECK_THROWS_AS(place_points(disk, 4, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(place_points(disk, 4, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(place_points(disk, 4, -0.3), std::invalid_argument);
    CHECK_THROWS_AS(place_points(disk, 8, 0.7, 7), std::invalid_argument);
}

TEST_CASE("cell average validation") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 100, 1);
    CHECK_THROWS_AS(cell_average_coefficient({0.7, 0.0}, region, SampleSet{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(cell_average_coefficient({1.5, 0.0}, region, samples),
                    std::invalid_argument);
    CHECK_THROWS_AS(cell_average_coefficient({1.0, 0.0}, region, samples),
                    std::invalid_argument);  // on the boundary is not inside
    CHECK_NOTHROW(cell_average_coefficient({0.99, 0.0}, region, samples));
}

TEST_CASE("cell averages are lattice-translation covariant") {
    const FundamentalRegion region = square_region();
    const SampleSet base = sample_region(region, 20000, 5);
    const Complex zeta{0.7, 0.0};
    const Complex u0 = cell_average_coefficient(zeta, region, base);

    SampleSet shifted = base;
    for (Complex& z : shifted.points) z += region.lattice.omega1;
    const Complex u1 = cell_average_coefficient(zeta, region, shifted);
    CHECK(std::abs(u1 - u0) < 1e-13 * (1.0 + std::abs(u0)));

    // a tau-direction shift offsets the logarithmic derivative by one winding
    SampleSet shifted2 = base;
    for (Complex& z : shifted2.points) z += region.lattice.omega2;
    const Complex u2 = cell_average_coefficient(zeta, region, shifted2);
    const Complex expected = u0 - Complex{0.0, kTwoPi} * region.lattice.inv_omega1;
    CHECK(std::abs(u2 - expected) < 1e-13 * (1.0 + std::abs(u0)));
}

TEST_CASE("monte carlo cell average matches midpoint-grid quadrature") {
    const FundamentalRegion region = square_region();
    const Complex zeta{0.7, 0.0};
    const SampleSet mc = sample_region(region, 1000000, 11);
    const Complex u_mc = cell_average_coefficient(zeta, region, mc);

    // standard error from the kernel's sample variance on an independent set
    const SampleSet probe = sample_region(region, 100000, 12);
    Complex mean{0.0, 0.0};
    std::vector<Complex> vals;
    vals.reserve(probe.points.size());
    for (const Complex z : probe.points) {
        vals.push_back(region.lattice.inv_omega1 *
                       log_deriv_theta1((z - zeta) * region.lattice.inv_omega1,
                                        region.lattice));
        mean += vals.back();
    }
    mean /= static_cast<double>(vals.size());
    double sq = 0.0;
    for (const Complex k : vals) sq += std::norm(k - mean);
    const double se = std::sqrt(sq / (static_cast<double>(vals.size()) - 1.0)) /
                      std::sqrt(static_cast<double>(mc.points.size()));

    const SampleSet grid = grid_region(region, 2000, 2000);
    const Complex u_grid = cell_average_coefficient(zeta, region, grid);
    CHECK(std::abs(u_mc - u_grid) < 4.0 * se);

    // independent seed lands within the same band
    const Complex u_mc2 =
        cell_average_coefficient(zeta, region, sample_region(region, 1000000, 13));
    CHECK(std::abs(u_mc2 - u_grid) < 4.0 * se);
}

TEST_CASE("monte carlo cell average error scales as one over sqrt(samples)") {
    const FundamentalRegion region = square_region();
    const Complex zeta{0.7, 0.0};
    double sd[2] = {0.0, 0.0};
    int slot = 0;
    for (const std::int64_t m : {std::int64_t{10000}, std::int64_t{40000}}) {
        std::vector<Complex> us;
        Complex mean{0.0, 0.0};
        for (std::uint64_t seed = 100; seed < 140; ++seed) {
            us.push_back(
                cell_average_coefficient(zeta, region, sample_region(region, m, seed)));
            mean += us.back();
        }
        mean /= 40.0;
        double sq = 0.0;
        for (const Complex u : us) sq += std::norm(u - mean);
        sd[slot++] = std::sqrt(sq / 39.0);
    }
    // quadrupling the sample count should halve the spread; allow wide noise
    // band around the theoretical factor 2 for 40 replicas
    const double ratio = sd[0] / sd[1];
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.85);
}

TEST_CASE("solve invariants: zero total strength, tiny residual, enforced boundary") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 100000, 0);
    const FlowModel m16 = solve_square(16, 0.7, samples);
    const FlowModel m32 = solve_square(32, 0.7, samples);

    for (const FlowModel* m : {&m16, &m32}) {
        CHECK(std::abs(total_strength(*m)) < 1e-12 * std::max(1.0, max_strength(*m)));
        CHECK(m->residual_scale < 1e-10);
        CHECK(m->condition_estimate > 1.0);
        // the boundary rows are satisfied at solver precision
        for (const Complex zi : m->charges.collocation_points)
            CHECK(std::abs(eval_stream(*m, zi) - m->stream_constant) < 1e-10);
    }
    CHECK(m32.condition_estimate > m16.condition_estimate);

    // validation
    ChargeConfig broken = place_points(region.obstacle, 8, 0.7);
    const auto uj = cell_average_coefficients(broken, region, samples);
    CHECK_THROWS_AS(assemble_and_solve(region, broken, {uj.begin(), uj.begin() + 4}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(assemble_and_solve(region, broken, uj,
                                       std::numeric_limits<double>::quiet_NaN()),
                    std::invalid_argument);
    auto bad_uj = uj;
    bad_uj[2] = {std::numeric_limits<double>::infinity(), 0.0};
    CHECK_THROWS_AS(assemble_and_solve(region, broken, bad_uj, 1.0), std::invalid_argument);
    broken.charge_points.pop_back();
    CHECK_THROWS_AS(assemble_and_solve(region, broken, uj, 1.0), std::invalid_argument);
}

TEST_CASE("zero mean speed gives the trivial solution; strengths are linear in it") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 20000, 2);
    const FlowModel zero = solve_square(12, 0.7, samples, 0.0);
    for (const double q : zero.strengths) CHECK(q == 0.0);
    CHECK(zero.stream_constant == 0.0);
    CHECK(eval_velocity(zero, {1.7, 0.3}) == Complex{0.0, 0.0});

    const FlowModel one = solve_square(12, 0.7, samples, 1.0);
    const FlowModel two = solve_square(12, 0.7, samples, 2.0);
    for (std::size_t j = 0; j < one.strengths.size(); ++j)
        CHECK(two.strengths[j] ==
              doctest::Approx(2.0 * one.strengths[j]).epsilon(1e-14));
    CHECK(two.stream_constant == doctest::Approx(2.0 * one.stream_constant).epsilon(1e-14));
}

TEST_CASE("a chargeless model is the uniform stream") {
    FlowModel model;
    model.region = square_region();
    model.charges = place_points(model.region.obstacle, 8, 0.7);
    model.mean_speed = 1.5;
    model.strengths.assign(8, 0.0);
    model.cell_averages.assign(8, Complex{0.0, 0.0});

    oracle::Uniform rng(7);
    for (int t = 0; t < 50; ++t) {
        const Complex z = rng.complex(-2.0, 2.0);
        CHECK(eval_stream(model, z) == doctest::Approx(1.5 * z.imag()).epsilon(1e-15));
        CHECK(std::abs(eval_velocity(model, z) - Complex{1.5, 0.0}) < 1e-15);
        CHECK(std::abs(eval_potential(model, z) - 1.5 * z) < 1e-14);
    }
}

TEST_CASE("velocity is doubly periodic") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 50000, 3);
    const FlowModel model = solve_square(24, 0.7, samples);
    oracle::Uniform rng(8);
    int tested = 0;
    while (tested < 100) {
        const Complex z = rng.complex(-2.0, 2.0);
        if (in_obstacle_array(z, region)) continue;
        ++tested;
        const double m = std::floor(rng(-2.0, 3.0));
        const double n = std::floor(rng(-2.0, 3.0));
        const Complex shift = m * region.lattice.omega1 + n * region.lattice.omega2;
        CHECK(std::abs(eval_velocity(model, z + shift) - eval_velocity(model, z)) < 1e-11);
    }
}

TEST_CASE("stream function shifts by closed-form constants across periods") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 50000, 3);
    const FlowModel model = solve_square(24, 0.7, samples);
    const double d1 = stream_shift(model, region.lattice.omega1);
    const double d2 = stream_shift(model, region.lattice.omega2);

    oracle::Uniform rng(9);
    int tested = 0;
    while (tested < 50) {
        const Complex z = rng.complex(-2.0, 2.0);
        if (in_obstacle_array(z, region)) continue;
        ++tested;
        const double m = std::floor(rng(-2.0, 3.0));
        const double n = std::floor(rng(-2.0, 3.0));
        const Complex shift = m * region.lattice.omega1 + n * region.lattice.omega2;
        const double expected = eval_stream(model, z) + m * d1 + n * d2;
        CHECK(eval_stream(model, z + shift) == doctest::Approx(expected).epsilon(1e-10));
    }

    // every translate of the obstacle boundary is a level line with the same
    // spread as the home one
    const auto spread = [&](Complex center) {
        double lo = 1e300, hi = -1e300;
        for (int k = 0; k < 257; ++k) {
            const double p = eval_stream(model, center + std::polar(1.0, kTwoPi * k / 257.0));
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        return hi - lo;
    };
    const double s0 = spread({0.0, 0.0});
    for (auto [m, n] : {std::pair{1, 0}, {0, 1}, {2, -1}, {-2, 2}}) {
        const double s = spread(static_cast<double>(m) * region.lattice.omega1 +
                                static_cast<double>(n) * region.lattice.omega2);
        CHECK(std::abs(s - s0) < 0.01 * s0 + 1e-13);
    }
}

TEST_CASE("potential branch: imaginary part is the stream function") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 50000, 3);
    const FlowModel model = solve_square(24, 0.7, samples);
    oracle::Uniform rng(10);
    for (int t = 0; t < 100; ++t) {
        const Complex z = rng.complex(-6.0, 6.0);
        if (in_obstacle_array(z, region)) continue;
        const double psi = eval_stream(model, z);
        CHECK(std::abs(eval_potential(model, z).imag() - psi) < 1e-13 * (1.0 + std::abs(psi)));
    }
}

TEST_CASE("potential pseudo-periodicity closed forms in the central window") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 50000, 3);
    const FlowModel model = solve_square(24, 0.7, samples);

    Complex qu{0.0, 0.0};  // sum_j Q_j u_j
    Complex qz{0.0, 0.0};  // sum_j Q_j zeta_j / omega1
    for (std::size_t j = 0; j < model.strengths.size(); ++j) {
        qu += model.strengths[j] * model.cell_averages[j];
        qz += model.strengths[j] * model.charges.charge_points[j] * region.lattice.inv_omega1;
    }
    const Complex i2pi{0.0, 1.0 / kTwoPi};
    const Complex d1 = region.lattice.omega1 * (model.mean_speed + i2pi * qu);
    const Complex d2 = model.mean_speed * region.lattice.omega2 + qz +
                       i2pi * region.lattice.omega2 * qu;

    oracle::Uniform rng(11);
    int tested = 0;
    while (tested < 50) {
        const Complex z = rng.complex(-1.2, 1.2);
        bool near_charge = false;
        for (const Complex zeta : model.charges.charge_points)
            near_charge = near_charge || std::abs(z - zeta) < 0.1;
        if (near_charge) continue;
        ++tested;
        const Complex f = eval_potential(model, z);
        CHECK(std::abs(eval_potential(model, z + region.lattice.omega1) - f - d1) < 1e-10);
        CHECK(std::abs(eval_potential(model, z + region.lattice.omega2) - f - d2) < 1e-10);
    }
}

TEST_CASE("potential derivative equals the velocity field") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 50000, 3);
    const FlowModel model = solve_square(24, 0.7, samples);
    const double h = 1e-5;
    for (int k = 0; k < 12; ++k) {
        const Complex z = 1.5 * std::polar(1.0, kTwoPi * (k + 0.37) / 12.0);
        const Complex fd =
            (eval_potential(model, z + h) - eval_potential(model, z - h)) / (2.0 * h);
        CHECK(std::abs(fd - eval_velocity(model, z)) < 1e-7);
    }
}

TEST_CASE("flow tangency on the obstacle improves with resolution") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 100000, 0);
    const auto max_normal_flow = [&](const FlowModel& m) {
        double worst = 0.0;
        for (int k = 0; k < 64; ++k) {
            const Complex zb = std::polar(1.0, kTwoPi * (k + 0.37) / 64.0);
            const Complex fp = eval_velocity(m, zb);
            worst = std::max(worst,
                             std::abs(fp.real() * zb.real() - fp.imag() * zb.imag()));
        }
        return worst;
    };
    const double t16 = max_normal_flow(solve_square(16, 0.7, samples));
    const double t32 = max_normal_flow(solve_square(32, 0.7, samples));
    CHECK(t16 < 0.1);
    CHECK(t32 < t16 / 10.0);
}

TEST_CASE("least-squares variant with extra collocation points") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 100000, 0);
    const ChargeConfig cfg = place_points(region.obstacle, 16, 0.7, 48);
    const FlowModel lsq =
        assemble_and_solve(region, cfg, cell_average_coefficients(cfg, region, samples), 1.0);
    CHECK(std::abs(total_strength(lsq)) < 1e-12 * std::max(1.0, max_strength(lsq)));
    // the fit cannot pin all rows, but the misfit stays at the inter-point
    // defect level of the square system
    CHECK(lsq.residual_scale > 0.0);
    CHECK(lsq.residual_scale < 0.02);
    const FlowModel sq = solve_square(16, 0.7, samples);
    CHECK(std::abs(lsq.stream_constant - sq.stream_constant) < 0.01);
}

TEST_CASE("degenerate systems are rejected") {
    const FundamentalRegion region = square_region();
    const SampleSet samples = sample_region(region, 20000, 4);
    ChargeConfig cfg = place_points(region.obstacle, 8, 0.7);
    cfg.charge_points[3] = cfg.charge_points[2];  // two identical columns
    const auto uj = cell_average_coefficients(cfg, region, samples);
    try {
        assemble_and_solve(region, cfg, uj, 1.0);
        FAIL("expected SingularSystemError");
    } catch (const SingularSystemError& e) {
        CHECK(e.condition_estimate > 1e12);
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
}
