#include "periflow/cli.hpp"

#include "periflow/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace periflow {

namespace {

using nlohmann::json;

std::string fmt12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json solution_json(const ProblemConfig& config, const SolvedProblem& solved) {
    const FlowModel& model = solved.model;
    json j;
    j["config"] = json::parse(config_to_json(config));

    json results;
    results["charges"] = model.strengths;
    double charge_sum = 0.0;
    for (const double q : model.strengths) charge_sum += q;
    results["charge_sum"] = charge_sum;
    results["stream_constant"] = model.stream_constant;
    json averages = json::array();
    for (const Complex u : model.cell_averages)
        averages.push_back({u.real(), u.imag()});
    results["cell_averages"] = averages;
    results["condition_estimate"] = model.condition_estimate;
    results["collocation_residual"] = model.residual_scale;
    results["epsilon"] = solved.epsilon;
    j["results"] = results;

    json quad;
    quad["mode"] = (model.provenance.mode == QuadratureInfo::Mode::monte_carlo)
                       ? "monte_carlo"
                       : "grid";
    quad["points"] = model.provenance.samples;
    quad["seed"] = model.provenance.seed;
    quad["proposals"] = solved.samples.proposals;
    if (model.provenance.mode == QuadratureInfo::Mode::grid) {
        quad["grid_na"] = model.provenance.grid_na;
        quad["grid_nb"] = model.provenance.grid_nb;
    }
    j["quadrature"] = quad;
    return j;
}

} // namespace

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp(target);
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

int run_solve(const std::string& config_path, const std::string& out_path,
              std::ostream& log) {
    ProblemConfig config;
    try {
        config = load_config(config_path);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        const SolvedProblem solved = solve_problem(config);
        write_file_atomic(out_path, solution_json(config, solved).dump(2) + "\n");
        log << "solve: N=" << config.count << " epsilon=" << fmt12(solved.epsilon)
            << " cond=" << fmt12(solved.model.condition_estimate) << " -> " << out_path
            << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        log << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

int run_sweep(const std::string& config_path, const std::vector<int>& counts,
              const std::vector<double>& ratios, const std::string& csv_path,
              std::ostream& log) {
    ProblemConfig config;
    try {
        config = load_config(config_path);
        if (counts.empty()) throw ConfigError("sweep needs at least one charge count");
        for (std::size_t i = 0; i + 1 < counts.size(); ++i)
            if (counts[i] >= counts[i + 1])
                throw ConfigError("sweep charge counts must be strictly ascending");
        for (const int n : counts)
            if (n < 4) throw ConfigError("sweep charge counts must be at least 4");
        if (ratios.empty()) throw ConfigError("sweep needs at least one placement ratio");
        for (const double q : ratios)
            if (!(q > 0.0 && q < 1.0))
                throw ConfigError("sweep placement ratios must lie strictly in (0,1)");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const Lattice lat = make_lattice(config.omega1 * config.radius,
                                         config.omega2 * config.radius);
        const CircleObstacle obstacle{Complex{0.0, 0.0}, config.radius};
        std::optional<Complex> z0;
        if (config.z0) z0 = *config.z0 * config.radius;
        const FundamentalRegion region = make_region(lat, obstacle, z0);
        const SampleSet samples =
            (config.quadrature == QuadratureInfo::Mode::monte_carlo)
                ? sample_region(region, config.mc_samples, config.seed)
                : grid_region(region, config.grid_na, config.grid_nb);

        std::string csv = "# doubly periodic cylinder-array convergence sweep\n";
        csv += "# config: " + config_to_json(config) + "\n";
        csv += "ratio,N,epsilon,cond_estimate,fitted_rate\n";

        bool any_success = false;
        for (const double ratio : ratios) {
            const std::vector<ConvergenceRecord> records =
                convergence_sweep(region, config.mean_speed, counts, ratio, samples);
            std::string rate;
            try {
                const DecayFit fit = fit_decay_rate(records);
                rate = fmt12(fit.rate);
            } catch (const std::exception& e) {
                log << "ratio " << fmt12(ratio) << ": decay fit infeasible: " << e.what()
                    << "\n";
            }
            for (const ConvergenceRecord& rec : records) {
                csv += fmt12(ratio);
                csv += ',';
                csv += std::to_string(rec.count);
                csv += ',';
                if (rec.error.empty()) {
                    any_success = true;
                    csv += fmt12(rec.epsilon);
                    csv += ',';
                    csv += fmt12(rec.condition_estimate);
                } else {
                    csv += ',';
                }
                csv += ',';
                csv += rate;
                csv += '\n';
            }
            log << "ratio " << fmt12(ratio) << ": fitted_rate="
                << (rate.empty() ? "n/a" : rate) << "\n";
        }
        write_file_atomic(csv_path, csv);
        log << "sweep -> " << csv_path << "\n";
        return any_success ? kExitOk : kExitSolver;
    } catch (const std::exception& e) {
        log << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

int run_field(const std::string& config_path, const FieldWindow& window_r, int nx, int ny,
              int n_levels, const std::string& svg_path, const std::string& csv_path,
              std::ostream& log) {
    ProblemConfig config;
    try {
        config = load_config(config_path);
        if (nx < 2 || ny < 2) throw ConfigError("field grid must be at least 2x2");
        if (n_levels < 1) throw ConfigError("field needs at least one streamline level");
        if (!(window_r.x_max > window_r.x_min && window_r.y_max > window_r.y_min) ||
            !std::isfinite(window_r.x_min) || !std::isfinite(window_r.x_max) ||
            !std::isfinite(window_r.y_min) || !std::isfinite(window_r.y_max))
            throw ConfigError("field window must be finite with positive extent");
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const SolvedProblem solved = solve_problem(config);
        const FieldGrid grid = eval_grid(solved.model, window_r, nx, ny);
        const StreamlineSet streams = extract_streamlines(grid, n_levels);

        std::string metadata = "field: config=" + config_to_json(config);
        metadata += " window=[" + fmt12(window_r.x_min) + "," + fmt12(window_r.x_max) + "," +
                    fmt12(window_r.y_min) + "," + fmt12(window_r.y_max) + "]";
        metadata += " grid=" + std::to_string(nx) + "x" + std::to_string(ny);
        metadata += " levels=" + std::to_string(n_levels);

        write_file_atomic(svg_path, render_svg(streams, solved.model.region, window_r, metadata));
        write_file_atomic(csv_path, write_field_csv(grid));
        log << "field: " << streams.lines.size() << " polylines over "
            << streams.levels.size() << " levels -> " << svg_path << ", " << csv_path << "\n";
        return kExitOk;
    } catch (const std::exception& e) {
        log << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}

} // namespace periflow
