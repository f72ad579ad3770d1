#pragma once

#include <complex>
#include <vector>

namespace periflow {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTwoPi = 2.0 * kPi;

// A period lattice spanned by two complex half-periods with Im(omega2/omega1) > 0.
// Carries the derived quantities every theta evaluation needs: the ratio tau,
// the nome q = exp(i pi tau), and a precomputed table of signed series
// coefficients (-1)^k q^{(k+1/2)^2}.  Instances are immutable after
// make_lattice and cheap to share by const reference.
struct Lattice {
    Complex omega1;
    Complex omega2;
    Complex tau;      // omega2 / omega1
    Complex nome;     // exp(i pi tau)
    double im_tau = 0.0;
    double abs_nome = 0.0;      // exp(-pi im_tau)
    double log_abs_nome = 0.0;  // -pi im_tau
    Complex inv_omega1;

    std::vector<Complex> series_coeff;  // (-1)^k exp(i pi tau (k+1/2)^2)

    // Exact log-magnitude of coefficient k; safe where the table entry underflowed.
    double series_coeff_log_abs(int k) const {
        const double h = k + 0.5;
        return -kPi * im_tau * h * h;
    }
};

// Result of translating an argument into the centred fundamental cell of the
// tau lattice: v == reduced + unit_steps + tau_steps * tau with
// |Re(reduced) pulled back near 0| and |Im(reduced)| <= Im(tau)/2.
struct ReducedArgument {
    Complex reduced;
    long unit_steps = 0;
    long tau_steps = 0;
};

// Validates the basis (finite, omega1 != 0, Im(omega2/omega1) > 0) and
// precomputes the series tables. Throws std::invalid_argument on a
// degenerate basis.
Lattice make_lattice(Complex omega1, Complex omega2);

// Splits v = reduced + m + n*tau with integer m, n chosen so the remainder
// lies in the centred cell: write v = a + b*tau (a, b real), then
// n = floor(b + 1/2), m = floor(a + 1/2).  Deterministic; throws
// std::invalid_argument for non-finite v.
ReducedArgument reduce_argument(Complex v, const Lattice& lattice);

} // namespace periflow
