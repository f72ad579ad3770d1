#pragma once

#include "periflow/mfs.hpp"

namespace periflow {

// Scaled boundary defect
//   eps_N = max |psi(z) - C| / (|U| r)
// over samples_per_unknown * N boundary points offset half a step from the
// collocation angles, so the maximum is probed between the enforced points.
// evaluation_condition is the forward rounding amplification of that defect:
// the largest sum of term magnitudes entering one psi evaluation, on the
// same |U| r scale. Computed epsilon values saturate once they fall to
// O(evaluation_condition * machine epsilon); smaller values are rounding
// noise, not convergence.
struct BoundaryProbe {
    double epsilon = 0.0;
    double evaluation_condition = 0.0;
};

BoundaryProbe boundary_probe(const FlowModel& model, int samples_per_unknown = 16,
                             const ThetaAccuracy& acc = {});

double boundary_error(const FlowModel& model, int samples_per_unknown = 16,
                      const ThetaAccuracy& acc = {});

// One row of a convergence study. `error` is empty on success; on a solver
// failure it carries the message and epsilon/condition are NaN.
// condition_estimate is the boundary-evaluation conditioning (see
// BoundaryProbe), the quantity that sets the observable epsilon floor; the
// linear-solver R-diagonal ratio lives on FlowModel and grows exponentially
// with N without ever limiting the achieved defect.
struct ConvergenceRecord {
    int count = 0;
    double epsilon = 0.0;
    double condition_estimate = 0.0;
    std::string error;
};

struct DecayFit {
    double rate = 0.0;       // fitted epsilon_{N+1}/epsilon_N per unit N
    double amplitude = 0.0;  // fitted epsilon at N = 0
    std::vector<int> fit_counts;  // records that entered the fit
};

// Least-squares fit of log epsilon against N over records that converged and
// sit above the rounding floor (epsilon > 100 * condition_estimate * machine
// epsilon). Throws std::runtime_error when fewer than 3 records qualify.
DecayFit fit_decay_rate(const std::vector<ConvergenceRecord>& records);

// Sample mean of the complex velocity over the given quadrature set.
Complex mean_complex_velocity(const FlowModel& model, const SampleSet& samples,
                              const ThetaAccuracy& acc = {});

// Cell-mean velocity components scaled by U: returns
// (mean u / U, mean v / U) as a complex pair. By construction of the cell
// averages this is exactly (1, 0) when evaluated on the same sample set the
// model was built with; on an independent set it deviates by the quadrature
// error only.
Complex average_velocity(const FlowModel& model, const SampleSet& samples,
                         const ThetaAccuracy& acc = {});

// Solves the problem for each charge count in ascending `counts` on a shared
// sample set and records the boundary defect and conditioning. Per-count
// solver failures are recorded and the sweep continues.
std::vector<ConvergenceRecord> convergence_sweep(const FundamentalRegion& region,
                                                 double mean_speed,
                                                 const std::vector<int>& counts,
                                                 double placement_ratio,
                                                 const SampleSet& samples,
                                                 const ThetaAccuracy& acc = {});

} // namespace periflow
