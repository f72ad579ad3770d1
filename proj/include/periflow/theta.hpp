#pragma once

#include "periflow/lattice.hpp"

namespace periflow {

// Truncation control for the theta series. The sine series over the reduced
// cell gains roughly a factor |q|^{2k} per term, so the defaults converge in
// a handful of terms for every lattice of practical aspect ratio. When the
// a-priori term bound fails to drop below term_tolerance times the leading
// term's scale within max_terms terms (nome magnitude approaching 1), the
// evaluation throws std::runtime_error rather than return a silently
// truncated value.
struct ThetaAccuracy {
    double term_tolerance = 1e-16;
    int max_terms = 64;
};

// First Jacobi theta function theta1(v) of the lattice's tau, evaluated by
// argument reduction plus the alternating sine series
//   theta1(v) = 2 sum_{k>=0} (-1)^k q^{(k+1/2)^2} sin((2k+1) pi v).
// theta1 vanishes exactly at lattice points of the tau lattice. For
// arguments many tau periods from the real axis the quasi-periodic prefactor
// grows like |q|^{-n^2} and can overflow; log_abs_theta1 / log_deriv_theta1
// are the stable interfaces at long range.
Complex theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc = {});

// Derivative d theta1 / dv.
Complex theta1_prime(Complex v, const Lattice& lattice, const ThetaAccuracy& acc = {});

// log |theta1(v)|, evaluated without forming theta1 at the original argument:
// the reduction indices contribute pi Im(tau) n^2 + 2 pi n Im(v_red) exactly.
// Throws std::domain_error at lattice zeros.
double log_abs_theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc = {});

// Logarithmic derivative theta1'(v)/theta1(v); quasi-periodic:
// adding tau to v subtracts 2 pi i. Throws std::domain_error at lattice zeros.
Complex log_deriv_theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc = {});

// A branch of log theta1(v) whose real part equals log_abs_theta1(v)
// identically. Continuous in v only within one reduction cell; across cell
// boundaries the imaginary part jumps by multiples of pi. Throws
// std::domain_error at lattice zeros.
Complex log_theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc = {});

// Independent evaluation through the triple product
//   theta1(v) = 2 q^{1/4} sin(pi v) prod_{n>=1} (1-q^{2n}) (1 - 2 q^{2n} cos(2 pi v) + q^{4n}),
// summed without argument reduction. Cross-validation rig for theta1; not
// used in solver paths.
Complex theta1_product(Complex v, const Lattice& lattice, const ThetaAccuracy& acc = {});

} // namespace periflow
