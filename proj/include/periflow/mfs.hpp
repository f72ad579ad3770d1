#pragma once

#include "periflow/geometry.hpp"
#include "periflow/theta.hpp"

#include <string>
#include <vector>

namespace periflow {

// Charge and collocation rings for the fundamental-solutions ansatz.
// Charges sit strictly inside the obstacle on a concentric circle of radius
// placement_ratio * r, collocation points on the boundary, both starting on
// the positive real axis from the obstacle center and equally spaced.
// collocation_points.size() >= charge_points.size(); the overdetermined
// least-squares variant uses more collocation points than charges.
struct ChargeConfig {
    int count = 0;             // number of charges N
    double placement_ratio = 0.7;
    std::vector<Complex> charge_points;
    std::vector<Complex> collocation_points;
};

// count >= 4, 0 < placement_ratio < 1, collocation_count >= count
// (0 means match count). Throws std::invalid_argument otherwise.
ChargeConfig place_points(const CircleObstacle& obstacle, int count,
                          double placement_ratio, int collocation_count = 0);

// How the cell averages were produced; carried into solution artifacts.
struct QuadratureInfo {
    enum class Mode { monte_carlo, grid };
    Mode mode = Mode::monte_carlo;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    int grid_na = 0;
    int grid_nb = 0;
};

// Area average over the flow region of the velocity kernel of one charge,
//   (1/|D0|) integral of (1/omega1) theta1'/theta1((z - charge)/omega1) dA,
// approximated by the sample mean over `samples`. This is the per-charge
// linear correction that keeps the cell-mean velocity equal to the prescribed
// uniform flow. The charge must lie strictly inside the obstacle so the
// kernel has no pole in the closure of the flow region.
Complex cell_average_coefficient(Complex charge_point, const FundamentalRegion& region,
                                 const SampleSet& samples, const ThetaAccuracy& acc = {});

std::vector<Complex> cell_average_coefficients(const ChargeConfig& config,
                                               const FundamentalRegion& region,
                                               const SampleSet& samples,
                                               const ThetaAccuracy& acc = {});

// A solved flow: stream function
//   psi(z) = U Im z - (1/2pi) sum_j Q_j [ log|theta1((z - zeta_j)/omega1)| - Re(u_j z) ]
// with sum_j Q_j = 0 and boundary value C on every obstacle. The complex
// velocity u - i v is the derivative of the underlying potential.
struct FlowModel {
    FundamentalRegion region;
    ChargeConfig charges;
    double mean_speed = 1.0;            // prescribed cell-mean x-velocity U
    std::vector<double> strengths;      // Q_j
    double stream_constant = 0.0;       // boundary streamline level C
    std::vector<Complex> cell_averages; // u_j

    double condition_estimate = 0.0;    // |R_00|/|R_kk| from the pivoted QR
    double residual_scale = 0.0;        // max |A x - b| / (|U| r), 0 rows aside
    QuadratureInfo provenance;
};

// Assembles the collocation system (boundary-streamline rows plus the
// zero-total-charge row) and solves it by column-pivoted Householder QR with
// no rank truncation. Throws SingularSystemError on an exactly vanishing
// pivot or non-finite factorization. With more collocation points than
// charges the boundary rows are solved in the least-squares sense with the
// zero-total-strength constraint eliminated exactly.
FlowModel assemble_and_solve(const FundamentalRegion& region, const ChargeConfig& config,
                             const std::vector<Complex>& cell_averages, double mean_speed,
                             const QuadratureInfo& provenance = {},
                             const ThetaAccuracy& acc = {});

// Stream function psi(z). Finite everywhere off the charge translates;
// throws std::domain_error on a charge translate.
double eval_stream(const FlowModel& model, Complex z, const ThetaAccuracy& acc = {});

// One branch of the complex potential. Its imaginary part equals eval_stream
// identically; its real part is continuous only within one reduction cell per
// charge. Velocities and the stream function, not this branch, are the
// single-valued observables.
Complex eval_potential(const FlowModel& model, Complex z, const ThetaAccuracy& acc = {});

// Derivative of the potential; doubly periodic. Velocity components are
// (Re, -Im) of the returned value.
Complex eval_velocity(const FlowModel& model, Complex z, const ThetaAccuracy& acc = {});

} // namespace periflow
