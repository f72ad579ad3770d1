#include "periflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace periflow {

namespace {

constexpr double kInvTwoPi = 1.0 / kTwoPi;

struct KahanComplex {
    Complex sum{0.0, 0.0};
    Complex comp{0.0, 0.0};
    void add(Complex x) {
        const Complex y = x - comp;
        const Complex t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
};

} // namespace

BoundaryProbe boundary_probe(const FlowModel& model, int samples_per_unknown,
                             const ThetaAccuracy& acc) {
    if (samples_per_unknown < 1)
        throw std::invalid_argument("boundary_probe: samples_per_unknown must be >= 1");

    const CircleObstacle& obstacle = model.region.obstacle;
    const Lattice& lat = model.region.lattice;
    const int total = samples_per_unknown * model.charges.count;
    double worst = 0.0;
    double amplification = 0.0;
    // half-step offset keeps probes away from every collocation angle
    for (int k = 0; k < total; ++k) {
        const double phi = kTwoPi * (k + 0.5) / total;
        const Complex z = obstacle.center + obstacle.radius * std::polar(1.0, phi);
        // the stream sum, mirrored from eval_stream, plus the magnitude sum
        // of the same terms: rounding in psi scales with the latter
        double sum = 0.0;
        double mags = 0.0;
        for (std::size_t j = 0; j < model.strengths.size(); ++j) {
            const Complex v = (z - model.charges.charge_points[j]) * lat.inv_omega1;
            const double la = log_abs_theta1(v, lat, acc);
            const double uz = (model.cell_averages[j] * z).real();
            sum += model.strengths[j] * (la - uz);
            mags += std::abs(model.strengths[j]) * (std::abs(la) + std::abs(uz));
        }
        const double psi = model.mean_speed * z.imag() - kInvTwoPi * sum;
        worst = std::max(worst, std::abs(psi - model.stream_constant));
        amplification = std::max(amplification,
                                 std::abs(model.mean_speed * z.imag()) + kInvTwoPi * mags +
                                     std::abs(model.stream_constant));
    }
    const double denom = std::abs(model.mean_speed) * obstacle.radius;
    BoundaryProbe probe;
    probe.epsilon = (denom > 0.0) ? worst / denom : worst;
    probe.evaluation_condition = (denom > 0.0) ? amplification / denom : amplification;
    return probe;
}

double boundary_error(const FlowModel& model, int samples_per_unknown,
                      const ThetaAccuracy& acc) {
    return boundary_probe(model, samples_per_unknown, acc).epsilon;
}

DecayFit fit_decay_rate(const std::vector<ConvergenceRecord>& records) {
    constexpr double eps = std::numeric_limits<double>::epsilon();

    DecayFit fit;
    std::vector<double> xs, ys;
    for (const ConvergenceRecord& rec : records) {
        if (!rec.error.empty()) continue;
        if (!std::isfinite(rec.epsilon) || !(rec.epsilon > 0.0)) continue;
        // records at the rounding floor carry no decay information
        if (!(rec.epsilon > 100.0 * rec.condition_estimate * eps)) continue;
        xs.push_back(rec.count);
        ys.push_back(std::log(rec.epsilon));
        fit.fit_counts.push_back(rec.count);
    }
    if (xs.size() < 3)
        throw std::runtime_error(
            "fit_decay_rate: fewer than 3 records above the rounding floor");

    const double n = static_cast<double>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (!(std::abs(det) > 0.0))
        throw std::runtime_error("fit_decay_rate: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy * sxx - sx * sxy) / det;
    fit.rate = std::exp(slope);
    fit.amplitude = std::exp(intercept);
    return fit;
}

Complex mean_complex_velocity(const FlowModel& model, const SampleSet& samples,
                              const ThetaAccuracy& acc) {
    if (samples.points.empty())
        throw std::invalid_argument("mean_complex_velocity: empty sample set");
    KahanComplex sum;
    for (const Complex z : samples.points) sum.add(eval_velocity(model, z, acc));
    return sum.sum / static_cast<double>(samples.points.size());
}

Complex average_velocity(const FlowModel& model, const SampleSet& samples,
                         const ThetaAccuracy& acc) {
    if (model.mean_speed == 0.0)
        throw std::invalid_argument("average_velocity: undefined for zero mean speed");
    const Complex mean = mean_complex_velocity(model, samples, acc);
    return {mean.real() / model.mean_speed, -mean.imag() / model.mean_speed};
}

std::vector<ConvergenceRecord> convergence_sweep(const FundamentalRegion& region,
                                                 double mean_speed,
                                                 const std::vector<int>& counts,
                                                 double placement_ratio,
                                                 const SampleSet& samples,
                                                 const ThetaAccuracy& acc) {
    if (counts.empty()) throw std::invalid_argument("convergence_sweep: empty count list");
    if (!std::is_sorted(counts.begin(), counts.end()))
        throw std::invalid_argument("convergence_sweep: counts must be ascending");

    QuadratureInfo info;
    info.mode = QuadratureInfo::Mode::monte_carlo;
    info.samples = std::ssize(samples.points);
    info.seed = samples.seed;

    std::vector<ConvergenceRecord> records;
    records.reserve(counts.size());
    for (const int count : counts) {
        ConvergenceRecord rec;
        rec.count = count;
        try {
            const ChargeConfig config = place_points(region.obstacle, count, placement_ratio);
            const std::vector<Complex> u = cell_average_coefficients(config, region, samples, acc);
            const FlowModel model = assemble_and_solve(region, config, u, mean_speed, info, acc);
            const BoundaryProbe probe = boundary_probe(model, 16, acc);
            rec.epsilon = probe.epsilon;
            rec.condition_estimate = probe.evaluation_condition;
        } catch (const std::exception& e) {
            rec.epsilon = std::numeric_limits<double>::quiet_NaN();
            rec.condition_estimate = std::numeric_limits<double>::quiet_NaN();
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

} // namespace periflow
