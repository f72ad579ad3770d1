#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "periflow/lattice.hpp"

#include "oracles.hpp"

#include <cmath>

using namespace periflow;

TEST_CASE("square lattice derived quantities") {
    const Lattice lat = make_lattice({1.0, 0.0}, {0.0, 1.0});
    CHECK(lat.tau.real() == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(lat.tau.imag() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lat.nome.real() == doctest::Approx(std::exp(-kPi)).epsilon(1e-15));
    CHECK(std::abs(lat.nome.imag()) < 1e-16);
    CHECK(lat.abs_nome == doctest::Approx(std::abs(lat.nome)).epsilon(1e-15));
    CHECK(lat.log_abs_nome == doctest::Approx(-kPi).epsilon(1e-15));
}

TEST_CASE("hexagonal lattice tau") {
    const Complex w2 = 4.0 * std::polar(1.0, kPi / 3.0);
    const Lattice lat = make_lattice({4.0, 0.0}, w2);
    CHECK(lat.tau.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(lat.tau.imag() == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-14));
    // |q| = exp(-pi Im tau) invariant
    CHECK(lat.abs_nome == doctest::Approx(std::exp(-kPi * lat.im_tau)).epsilon(1e-14));
}

TEST_CASE("rotating both periods leaves tau unchanged") {
    const Complex rot = std::polar(1.0, kPi / 6.0);
    const Lattice base = make_lattice({4.0, 0.0}, {0.0, 4.0});
    const Lattice rotated = make_lattice(4.0 * rot, Complex{0.0, 4.0} * rot);
    CHECK(std::abs(rotated.tau - base.tau) < 1e-14);
    CHECK(std::abs(rotated.nome - base.nome) < 1e-14);
}

TEST_CASE("degenerate bases are rejected") {
    CHECK_THROWS_AS(make_lattice({1.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_lattice({1.0, 0.0}, {2.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_lattice({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);
    // negative orientation
    CHECK_THROWS_AS(make_lattice({1.0, 0.0}, {0.0, -1.0}), std::invalid_argument);
    // aspect ratio beyond the double-precision envelope
    CHECK_THROWS_AS(make_lattice({1.0, 0.0}, {0.0, 500.0}), std::invalid_argument);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(make_lattice({inf, 0.0}, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("argument reduction picks the centred representative") {
    const Lattice lat = make_lattice({1.0, 0.0}, {0.0, 1.0});

    SUBCASE("zero stays put") {
        const ReducedArgument red = reduce_argument({0.0, 0.0}, lat);
        CHECK(red.reduced == Complex{0.0, 0.0});
        CHECK(red.unit_steps == 0);
        CHECK(red.tau_steps == 0);
    }
    SUBCASE("1 + tau reduces to the origin") {
        const ReducedArgument red = reduce_argument(Complex{1.0, 0.0} + lat.tau, lat);
        CHECK(std::abs(red.reduced) < 1e-15);
        CHECK(red.unit_steps == 1);
        CHECK(red.tau_steps == 1);
    }
    SUBCASE("0.75 + 0.6i for tau = i") {
        const ReducedArgument red = reduce_argument({0.75, 0.6}, lat);
        CHECK(red.unit_steps == 1);
        CHECK(red.tau_steps == 1);
        CHECK(red.reduced.real() == doctest::Approx(-0.25).epsilon(1e-15));
        CHECK(red.reduced.imag() == doctest::Approx(-0.4).epsilon(1e-15));
    }
    SUBCASE("non-finite arguments are rejected") {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(reduce_argument({nan, 0.0}, lat), std::invalid_argument);
    }
}

TEST_CASE("reduction properties over random arguments and lattices") {
    const Lattice lattices[] = {
        make_lattice({1.0, 0.0}, {0.0, 1.0}),
        make_lattice({4.0, 0.0}, 4.0 * std::polar(1.0, kPi / 3.0)),
        make_lattice({4.0, 0.0}, {2.0, 2.0}),
    };
    oracle::Uniform rng(2024);
    for (const Lattice& lat : lattices) {
        for (int trial = 0; trial < 1000; ++trial) {
            const Complex v = rng.complex(-8.0, 8.0);
            const ReducedArgument red = reduce_argument(v, lat);

            // round trip
            const Complex back = red.reduced + static_cast<double>(red.unit_steps) +
                                 static_cast<double>(red.tau_steps) * lat.tau;
            CHECK(std::abs(back - v) <= 1e-13 * (1.0 + std::abs(v)));

            // centred cell bounds (half-open, so allow the closed edge)
            const double b = red.reduced.imag() / lat.im_tau;
            const double a = red.reduced.real() - b * lat.tau.real();
            CHECK(a >= -0.5 - 1e-12);
            CHECK(a < 0.5 + 1e-12);
            CHECK(b >= -0.5 - 1e-12);
            CHECK(b < 0.5 + 1e-12);

            // idempotence: reducing a reduced argument is the identity
            const ReducedArgument again = reduce_argument(red.reduced, lat);
            CHECK(again.unit_steps == 0);
            CHECK(again.tau_steps == 0);
            CHECK(std::abs(again.reduced - red.reduced) == 0.0);

            // determinism
            const ReducedArgument repeat = reduce_argument(v, lat);
            CHECK(repeat.unit_steps == red.unit_steps);
            CHECK(repeat.tau_steps == red.tau_steps);
            CHECK(repeat.reduced == red.reduced);
        }
    }
}
