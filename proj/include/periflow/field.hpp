#pragma once

#include "periflow/mfs.hpp"

#include <string>
#include <vector>

namespace periflow {

// Axis-aligned evaluation window, in units of the obstacle radius.
struct FieldWindow {
    double x_min = -2.0;
    double x_max = 6.0;
    double y_min = -2.0;
    double y_max = 6.0;
};

// Stream function and velocity sampled on an nx x ny grid of cell centers.
// Row-major with x fastest: index(ix, iy) = iy * nx + ix. Nodes inside the
// obstacle closure are masked; their psi/velocity entries are NaN.
struct FieldGrid {
    FieldWindow window;
    int nx = 0;
    int ny = 0;
    double radius = 1.0;          // length unit of the window
    double stream_constant = 0.0; // C of the model that produced the grid
    FundamentalRegion region;
    std::vector<double> psi;
    std::vector<Complex> velocity;      // u + i v
    std::vector<std::uint8_t> mask;     // 1 = inside obstacle closure

    double x_at(int ix) const { return window.x_min + (ix + 0.5) * dx(); }
    double y_at(int iy) const { return window.y_min + (iy + 0.5) * dy(); }
    double dx() const { return (window.x_max - window.x_min) / nx; }
    double dy() const { return (window.y_max - window.y_min) / ny; }
};

FieldGrid eval_grid(const FlowModel& model, const FieldWindow& window, int nx, int ny,
                    const ThetaAccuracy& acc = {});

// A level-line polyline in window coordinates (units of r). `closed` marks
// loops; closed polylines repeat their first vertex at the end.
struct Streamline {
    double level = 0.0;
    bool closed = false;
    std::vector<Complex> points;
};

// n_levels levels uniformly spaced between the 1st and 99th percentile of
// unmasked psi values, plus the obstacle-surface level C appended last.
struct StreamlineSet {
    std::vector<double> levels;
    std::vector<Streamline> lines;
};

// Marching-squares contours of the grid restricted to fully unmasked cells,
// with saddle cells resolved by the cell average. For the surface level C the
// obstacle boundaries themselves are emitted analytically, offset outward by
// 0.4 grid cells so every vertex stays in the unmasked region, alongside the
// marching-squares lines (the dividing streamlines). A window with no
// unmasked node yields an empty set.
StreamlineSet extract_streamlines(const FieldGrid& grid, int n_levels);

// Deterministic standalone SVG 1.1 document: obstacle disks, streamlines,
// frame and axis ticks. Byte-identical for identical inputs. `metadata` is
// embedded as an XML comment when non-empty.
std::string render_svg(const StreamlineSet& streamlines, const FundamentalRegion& region,
                       const FieldWindow& window, const std::string& metadata = {});

// CSV dump of the grid: header "x,y,psi,u,v,mask" then one row per node,
// y-major, x fastest. Masked nodes leave psi/u/v empty.
std::string write_field_csv(const FieldGrid& grid);

} // namespace periflow
