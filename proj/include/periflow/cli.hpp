#pragma once

#include "periflow/config.hpp"
#include "periflow/field.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace periflow {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

// Solves one problem and writes charges, stream constant, cell averages,
// conditioning, boundary defect, and the resolved config as JSON.
int run_solve(const std::string& config_path, const std::string& out_path,
              std::ostream& log);

// Convergence study over placement ratios and charge counts; writes a CSV
// with header ratio,N,epsilon,cond_estimate,fitted_rate. Failed cells leave
// epsilon empty; a ratio whose decay fit is infeasible leaves fitted_rate
// empty. Returns kExitSolver only if every cell failed.
int run_sweep(const std::string& config_path, const std::vector<int>& counts,
              const std::vector<double>& ratios, const std::string& csv_path,
              std::ostream& log);

// Streamline figure (SVG) plus the raw field grid (CSV) over window_r (in
// units of the obstacle radius).
int run_field(const std::string& config_path, const FieldWindow& window_r, int nx, int ny,
              int n_levels, const std::string& svg_path, const std::string& csv_path,
              std::ostream& log);

// Writes via a temp file in the destination directory plus an atomic rename,
// so partially written artifacts never appear under the final name.
void write_file_atomic(const std::string& path, const std::string& content);

} // namespace periflow
