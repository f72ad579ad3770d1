#include "periflow/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"potential flow past a doubly periodic array of cylinders"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path = "solution.json";
    std::string csv_path = "sweep.csv";
    std::string field_svg = "field.svg";
    std::string field_csv = "field.csv";
    std::vector<int> counts = {16, 24, 32, 40, 48, 56, 64};
    std::vector<double> ratios = {0.4, 0.5, 0.6, 0.7};
    std::vector<double> window = {-2.0, 6.0, -2.0, 6.0};
    int nx = 400, ny = 400, levels = 24;

    CLI::App* solve = app.add_subcommand("solve", "solve one problem and write JSON results");
    solve->add_option("--config", config_path, "problem config (JSON)")->required();
    solve->add_option("--out", out_path, "output JSON path");

    CLI::App* sweep = app.add_subcommand("sweep", "boundary-error convergence study (CSV)");
    sweep->add_option("--config", config_path, "problem config (JSON)")->required();
    sweep->add_option("--counts", counts, "charge counts, ascending")->delimiter(',');
    sweep->add_option("--ratios", ratios, "charge placement ratios in (0,1)")->delimiter(',');
    sweep->add_option("--out", csv_path, "output CSV path");

    CLI::App* field = app.add_subcommand("field", "stream-function figure (SVG) and grid (CSV)");
    field->add_option("--config", config_path, "problem config (JSON)")->required();
    field->add_option("--window", window, "x_min,x_max,y_min,y_max in obstacle radii")
        ->expected(4)
        ->delimiter(',');
    field->add_option("--nx", nx, "grid resolution in x");
    field->add_option("--ny", ny, "grid resolution in y");
    field->add_option("--levels", levels, "number of streamline levels");
    field->add_option("--svg", field_svg, "output SVG path");
    field->add_option("--csv", field_csv, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return periflow::kExitConfig;
    }

    if (solve->parsed())
        return periflow::run_solve(config_path, out_path, std::cout);
    if (sweep->parsed())
        return periflow::run_sweep(config_path, counts, ratios, csv_path, std::cout);
    periflow::FieldWindow win{window[0], window[1], window[2], window[3]};
    return periflow::run_field(config_path, win, nx, ny, levels, field_svg, field_csv,
                               std::cout);
}
