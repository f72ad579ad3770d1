#include "periflow/mfs.hpp"

#include "periflow/errors.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>

namespace periflow {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kInvTwoPi = 1.0 / kTwoPi;

bool finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

// compensated accumulation keeps quadrature means reproducible to rounding
// regardless of sample count
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

ChargeConfig place_points(const CircleObstacle& obstacle, int count, double placement_ratio,
                          int collocation_count) {
    if (count < 4)
        throw std::invalid_argument("place_points: at least 4 charges required");
    if (!(placement_ratio > 0.0 && placement_ratio < 1.0))
        throw std::invalid_argument("place_points: placement ratio must lie strictly in (0,1)");
    if (collocation_count == 0) collocation_count = count;
    if (collocation_count < count)
        throw std::invalid_argument(
            "place_points: collocation count must be at least the charge count");

    ChargeConfig config;
    config.count = count;
    config.placement_ratio = placement_ratio;
    config.charge_points.reserve(count);
    config.collocation_points.reserve(collocation_count);
    const double rq = placement_ratio * obstacle.radius;
    for (int j = 0; j < count; ++j) {
        const double phi = kTwoPi * j / count;
        config.charge_points.push_back(obstacle.center + rq * std::polar(1.0, phi));
    }
    for (int i = 0; i < collocation_count; ++i) {
        const double phi = kTwoPi * i / collocation_count;
        config.collocation_points.push_back(obstacle.center +
                                            obstacle.radius * std::polar(1.0, phi));
    }
    return config;
}

Complex cell_average_coefficient(Complex charge_point, const FundamentalRegion& region,
                                 const SampleSet& samples, const ThetaAccuracy& acc) {
    if (samples.points.empty())
        throw std::invalid_argument("cell_average_coefficient: empty sample set");
    if (!(std::abs(charge_point - region.obstacle.center) < region.obstacle.radius))
        throw std::invalid_argument(
            "cell_average_coefficient: charge must lie strictly inside the obstacle");

    const Lattice& lat = region.lattice;
    KahanComplex acc_sum;
    for (const Complex z : samples.points)
        acc_sum.add(log_deriv_theta1((z - charge_point) * lat.inv_omega1, lat, acc));
    return lat.inv_omega1 * (acc_sum.sum / static_cast<double>(samples.points.size()));
}

std::vector<Complex> cell_average_coefficients(const ChargeConfig& config,
                                               const FundamentalRegion& region,
                                               const SampleSet& samples,
                                               const ThetaAccuracy& acc) {
    std::vector<Complex> averages;
    averages.reserve(config.charge_points.size());
    for (const Complex zeta : config.charge_points)
        averages.push_back(cell_average_coefficient(zeta, region, samples, acc));
    return averages;
}

FlowModel assemble_and_solve(const FundamentalRegion& region, const ChargeConfig& config,
                             const std::vector<Complex>& cell_averages, double mean_speed,
                             const QuadratureInfo& provenance, const ThetaAccuracy& acc) {
    const int n = config.count;
    const int m = static_cast<int>(config.collocation_points.size());
    if (n < 4 || static_cast<int>(config.charge_points.size()) != n)
        throw std::invalid_argument("assemble_and_solve: malformed charge configuration");
    if (m < n)
        throw std::invalid_argument("assemble_and_solve: fewer collocation points than charges");
    if (static_cast<int>(cell_averages.size()) != n)
        throw std::invalid_argument("assemble_and_solve: one cell average per charge required");
    if (!std::isfinite(mean_speed))
        throw std::invalid_argument("assemble_and_solve: mean speed must be finite");
    for (const Complex u : cell_averages)
        if (!finite(u))
            throw std::invalid_argument("assemble_and_solve: non-finite cell average");

    const Lattice& lat = region.lattice;

    // boundary rows: psi(z_i) - C = 0  <=>
    //   -(1/2pi) sum_j Q_j [log|theta1((z_i - zeta_j)/omega1)| - Re(u_j z_i)] - C
    //   = -U Im(z_i)
    Eigen::MatrixXd boundary(m, n + 1);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
        const Complex zi = config.collocation_points[i];
        for (int j = 0; j < n; ++j) {
            const Complex v = (zi - config.charge_points[j]) * lat.inv_omega1;
            const double la = log_abs_theta1(v, lat, acc);
            boundary(i, j) = -kInvTwoPi * (la - (cell_averages[j] * zi).real());
        }
        boundary(i, n) = -1.0;
        b(i) = -mean_speed * zi.imag();
    }
    if (!boundary.allFinite())
        throw std::invalid_argument("assemble_and_solve: non-finite matrix entry");

    // Square case: boundary rows plus the zero-total-strength row, one
    // unknown per charge plus C. Overdetermined case: the constraint is
    // eliminated exactly (Q_{n-1} = -sum of the others) so it holds to
    // rounding rather than being traded against the boundary misfit.
    const bool square = (m == n);
    Eigen::MatrixXd A;
    if (square) {
        A.resize(m + 1, n + 1);
        A.topRows(m) = boundary;
        A.row(m).head(n).setOnes();
        A(m, n) = 0.0;
        b.conservativeResize(m + 1);
        b(m) = 0.0;
    } else {
        A.resize(m, n);
        for (int j = 0; j + 1 < n; ++j) A.col(j) = boundary.col(j) - boundary.col(n - 1);
        A.col(n - 1) = boundary.col(n);
    }

    // no rank truncation: these systems are intentionally ill-conditioned and
    // the backward-stable QR residual stays small regardless, so only an
    // exactly vanishing pivot is treated as singular
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
    qr.setThreshold(std::numeric_limits<double>::denorm_min());
    qr.compute(A);

    const Eigen::VectorXd r_diag = qr.matrixQR().diagonal().head(A.cols()).cwiseAbs();
    const double r_max = r_diag.maxCoeff();
    const double r_min = r_diag.minCoeff();
    const double cond = (r_min > 0.0) ? r_max / r_min
                                      : std::numeric_limits<double>::infinity();
    if (qr.rank() < A.cols())
        throw SingularSystemError("collocation matrix is numerically singular", cond);

    const Eigen::VectorXd x = qr.solve(b);
    if (!x.allFinite())
        throw SingularSystemError("collocation solve produced non-finite coefficients", cond);

    FlowModel model;
    model.region = region;
    model.charges = config;
    model.mean_speed = mean_speed;
    model.cell_averages = cell_averages;
    model.condition_estimate = cond;
    model.provenance = provenance;
    if (square) {
        model.strengths.assign(x.data(), x.data() + n);
        model.stream_constant = x(n);
    } else {
        model.strengths.assign(x.data(), x.data() + (n - 1));
        double tail = 0.0;
        for (int j = 0; j + 1 < n; ++j) tail += x(j);
        model.strengths.push_back(-tail);
        model.stream_constant = x(n - 1);
    }

    Eigen::VectorXd full(n + 1);
    for (int j = 0; j < n; ++j) full(j) = model.strengths[j];
    full(n) = model.stream_constant;
    const Eigen::VectorXd residual = boundary * full - b.head(m);
    const double denom = std::abs(mean_speed) * region.obstacle.radius;
    const double raw = residual.cwiseAbs().maxCoeff();
    model.residual_scale = (denom > 0.0) ? raw / denom : raw;
    return model;
}

double eval_stream(const FlowModel& model, Complex z, const ThetaAccuracy& acc) {
    const Lattice& lat = model.region.lattice;
    double sum = 0.0;
    for (std::size_t j = 0; j < model.strengths.size(); ++j) {
        const Complex v = (z - model.charges.charge_points[j]) * lat.inv_omega1;
        const double la = log_abs_theta1(v, lat, acc);
        sum += model.strengths[j] * (la - (model.cell_averages[j] * z).real());
    }
    return model.mean_speed * z.imag() - kInvTwoPi * sum;
}

Complex eval_potential(const FlowModel& model, Complex z, const ThetaAccuracy& acc) {
    const Lattice& lat = model.region.lattice;
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < model.strengths.size(); ++j) {
        const Complex v = (z - model.charges.charge_points[j]) * lat.inv_omega1;
        sum += model.strengths[j] * (log_theta1(v, lat, acc) - model.cell_averages[j] * z);
    }
    return model.mean_speed * z - kI * kInvTwoPi * sum;
}

Complex eval_velocity(const FlowModel& model, Complex z, const ThetaAccuracy& acc) {
    const Lattice& lat = model.region.lattice;
    Complex sum{0.0, 0.0};
    for (std::size_t j = 0; j < model.strengths.size(); ++j) {
        const Complex v = (z - model.charges.charge_points[j]) * lat.inv_omega1;
        sum += model.strengths[j] *
               (lat.inv_omega1 * log_deriv_theta1(v, lat, acc) - model.cell_averages[j]);
    }
    return model.mean_speed - kI * kInvTwoPi * sum;
}

} // namespace periflow
