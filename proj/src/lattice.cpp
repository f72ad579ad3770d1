#include "periflow/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace periflow {

namespace {

// Table length covers every tolerance the accuracy knob allows; evaluations
// needing more terms than this fail the convergence check long before.
constexpr int kCoeffTableSize = 96;

bool finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace

Lattice make_lattice(Complex omega1, Complex omega2) {
    if (!finite(omega1) || !finite(omega2))
        throw std::invalid_argument("lattice periods must be finite");
    if (omega1 == Complex{0.0, 0.0})
        throw std::invalid_argument("lattice period omega1 must be nonzero");

    Lattice lat;
    lat.omega1 = omega1;
    lat.omega2 = omega2;
    lat.tau = omega2 / omega1;
    lat.im_tau = lat.tau.imag();
    if (!(lat.im_tau > 0.0))
        throw std::invalid_argument(
            "degenerate lattice basis: Im(omega2/omega1) must be positive");
    // exp(pi Im(tau)/2), the worst sine magnitude over the reduced cell,
    // must stay below the double-precision range
    if (lat.im_tau > 400.0)
        throw std::invalid_argument(
            "lattice aspect ratio too extreme: Im(omega2/omega1) beyond 400 "
            "overflows double-precision theta evaluation");

    lat.nome = std::exp(Complex{0.0, kPi} * lat.tau);
    lat.abs_nome = std::exp(-kPi * lat.im_tau);
    lat.log_abs_nome = -kPi * lat.im_tau;
    lat.inv_omega1 = 1.0 / omega1;

    lat.series_coeff.resize(kCoeffTableSize);
    const Complex ipi_tau = Complex{0.0, kPi} * lat.tau;
    for (int k = 0; k < kCoeffTableSize; ++k) {
        const double h = k + 0.5;
        Complex c = std::exp(ipi_tau * (h * h));
        lat.series_coeff[k] = (k & 1) ? -c : c;
    }
    return lat;
}

ReducedArgument reduce_argument(Complex v, const Lattice& lattice) {
    if (!finite(v))
        throw std::invalid_argument("reduce_argument: argument must be finite");

    const double b = v.imag() / lattice.im_tau;
    const double a = v.real() - b * lattice.tau.real();
    const double n = std::floor(b + 0.5);
    const double m = std::floor(a + 0.5);

    ReducedArgument red;
    red.unit_steps = static_cast<long>(m);
    red.tau_steps = static_cast<long>(n);
    red.reduced = v - m - n * lattice.tau;
    return red;
}

} // namespace periflow
