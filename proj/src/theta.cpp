#include "periflow/theta.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace periflow {

namespace {

constexpr Complex kI{0.0, 1.0};

// log(2k+1) for the derivative-series term bounds.
const std::array<double, 200> kLogOdd = [] {
    std::array<double, 200> t{};
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = std::log(2.0 * k + 1.0);
    return t;
}();

void check_accuracy(const ThetaAccuracy& acc) {
    if (!(acc.term_tolerance > 0.0))
        throw std::invalid_argument("theta accuracy: term_tolerance must be positive");
    if (acc.max_terms < 4)
        throw std::invalid_argument("theta accuracy: max_terms must be at least 4");
}

struct SeriesSums {
    Complex sine;    // sum (-1)^k q^{(k+1/2)^2} sin((2k+1) pi v)
    Complex cosine;  // sum (-1)^k (2k+1) q^{(k+1/2)^2} cos((2k+1) pi v)
};

// Both partial series at a reduced argument. Truncation is driven by the
// a-priori bound |coeff_{k+1}| e^{(2k+3) pi |Im v|} (times 2k+3 for the
// cosine series) measured against the leading term's bound; the geometric
// tail factor is folded in before comparing. Terms gain at most
// exp(-2 pi Im(tau) (k+1) + 2 pi |Im v|) per step, which is < 1 for reduced
// arguments, so the loop terminates unless the nome is extremely close to
// the unit circle; then it throws instead of returning a truncated value.
template <bool NeedCosine>
SeriesSums eval_series(Complex v, const Lattice& lat, const ThetaAccuracy& acc) {
    const double growth = kPi * std::abs(v.imag());
    const double log_tol = std::log(acc.term_tolerance);
    const double log_scale0 = lat.series_coeff_log_abs(0) + growth;
    const double stop_at = log_tol + log_scale0;
    const int terms = std::min<int>(acc.max_terms, static_cast<int>(lat.series_coeff.size()));

    // sin/cos((2k+1) pi v) via one complex exponential and an order-2 recurrence
    const Complex e1 = std::exp(kI * (kPi * v));
    const Complex e1inv = 1.0 / e1;
    Complex sin_cur = (e1 - e1inv) * Complex{0.0, -0.5};
    Complex cos_cur = (e1 + e1inv) * 0.5;
    const Complex e2 = e1 * e1;
    const Complex e2inv = e1inv * e1inv;
    const Complex sin_step = (e2 - e2inv) * Complex{0.0, -0.5};
    const Complex cos_step = (e2 + e2inv) * 0.5;

    SeriesSums sums{{0.0, 0.0}, {0.0, 0.0}};
    for (int k = 0; k < terms; ++k) {
        const Complex coef = lat.series_coeff[k];
        sums.sine += coef * sin_cur;
        if constexpr (NeedCosine) sums.cosine += (2.0 * k + 1.0) * coef * cos_cur;

        double log_next = lat.series_coeff_log_abs(k + 1) + (2 * k + 3) * growth;
        if constexpr (NeedCosine) log_next += kLogOdd[static_cast<std::size_t>(k) + 1];
        const double log_ratio = -kTwoPi * lat.im_tau * (k + 2) + 2.0 * growth;
        if (log_ratio < -0.6931471805599453) {
            // ratio <= 1/2: tail <= 2 * next bound
            if (log_next + 0.6931471805599454 < stop_at) return sums;
        } else if (log_ratio < 0.0) {
            if (log_next - std::log1p(-std::exp(log_ratio)) < stop_at) return sums;
        }

        const Complex sin_next = sin_cur * cos_step + cos_cur * sin_step;
        cos_cur = cos_cur * cos_step - sin_cur * sin_step;
        sin_cur = sin_next;
    }
    throw std::runtime_error(
        "theta series did not converge within the term budget; "
        "the lattice nome is too close to the unit circle");
}

// (-1)^{m+n} q^{-n^2} exp(-2 pi i n v_red): the exact prefactor that undoes
// the argument reduction. Its magnitude grows like exp(pi Im(tau) n^2) and
// can overflow for arguments very many tau-periods out; the log interfaces
// avoid forming it.
Complex reduction_factor(const ReducedArgument& red, const Lattice& lat) {
    const double n = static_cast<double>(red.tau_steps);
    Complex exponent = -kI * kPi * lat.tau * (n * n) - kI * kTwoPi * n * red.reduced;
    Complex factor = std::exp(exponent);
    if ((red.unit_steps + red.tau_steps) & 1L) factor = -factor;
    return factor;
}

[[noreturn]] void throw_lattice_zero() {
    throw std::domain_error("theta1 vanishes at lattice points; logarithmic "
                            "quantities are undefined there");
}

} // namespace

Complex theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc) {
    check_accuracy(acc);
    const ReducedArgument red = reduce_argument(v, lattice);
    const Complex th = 2.0 * eval_series<false>(red.reduced, lattice, acc).sine;
    if (red.unit_steps == 0 && red.tau_steps == 0) return th;
    return reduction_factor(red, lattice) * th;
}

Complex theta1_prime(Complex v, const Lattice& lattice, const ThetaAccuracy& acc) {
    check_accuracy(acc);
    const ReducedArgument red = reduce_argument(v, lattice);
    const SeriesSums sums = eval_series<true>(red.reduced, lattice, acc);
    const Complex prime_red = kTwoPi * sums.cosine;
    if (red.unit_steps == 0 && red.tau_steps == 0) return prime_red;
    // d/dv of (factor(v) theta1(v_red(v))) = factor * (theta1' - 2 pi i n theta1)
    const double n = static_cast<double>(red.tau_steps);
    const Complex theta_red = 2.0 * sums.sine;
    return reduction_factor(red, lattice) * (prime_red - kI * kTwoPi * n * theta_red);
}

double log_abs_theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc) {
    check_accuracy(acc);
    const ReducedArgument red = reduce_argument(v, lattice);
    const Complex th = 2.0 * eval_series<false>(red.reduced, lattice, acc).sine;
    const double mag = std::abs(th);
    if (mag == 0.0) throw_lattice_zero();
    const double n = static_cast<double>(red.tau_steps);
    return std::log(mag) + kPi * lattice.im_tau * n * n + kTwoPi * n * red.reduced.imag();
}

Complex log_deriv_theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc) {
    check_accuracy(acc);
    const ReducedArgument red = reduce_argument(v, lattice);
    const SeriesSums sums = eval_series<true>(red.reduced, lattice, acc);
    if (std::abs(sums.sine) == 0.0) throw_lattice_zero();
    const Complex ratio = kPi * (sums.cosine / sums.sine);
    if (red.tau_steps == 0) return ratio;
    return ratio - kI * (kTwoPi * static_cast<double>(red.tau_steps));
}

Complex log_theta1(Complex v, const Lattice& lattice, const ThetaAccuracy& acc) {
    check_accuracy(acc);
    const ReducedArgument red = reduce_argument(v, lattice);
    const Complex th = 2.0 * eval_series<false>(red.reduced, lattice, acc).sine;
    if (std::abs(th) == 0.0) throw_lattice_zero();
    const double m = static_cast<double>(red.unit_steps);
    const double n = static_cast<double>(red.tau_steps);
    // principal log at the reduced argument plus the exact log of the
    // reduction prefactor; real part coincides with log_abs_theta1
    return std::log(th) + kI * (kPi * (m + n)) - kI * kPi * lattice.tau * (n * n) -
           kI * (kTwoPi * n) * red.reduced;
}

Complex theta1_product(Complex v, const Lattice& lattice, const ThetaAccuracy& acc) {
    check_accuracy(acc);
    if (!(std::isfinite(v.real()) && std::isfinite(v.imag())))
        throw std::invalid_argument("theta1_product: argument must be finite");

    const Complex q2 = lattice.nome * lattice.nome;
    const Complex cos2pv = std::cos(kTwoPi * v);
    // series_coeff[0] is exactly q^{1/4}
    Complex prod = 2.0 * lattice.series_coeff[0] * std::sin(kPi * v);
    const double cos_mag = std::abs(cos2pv);

    Complex p{1.0, 0.0};
    for (int n = 1; n <= 500; ++n) {
        p *= q2;
        prod *= (1.0 - p) * (1.0 - 2.0 * p * cos2pv + p * p);
        const double pm = std::abs(p);
        if (pm * (2.0 + 2.0 * cos_mag + pm) < 0.25 * acc.term_tolerance) return prod;
    }
    throw std::runtime_error("theta1 product did not converge; "
                             "the lattice nome is too close to the unit circle");
}

} // namespace periflow
