#include "periflow/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace periflow {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_window(const FieldWindow& w) {
    if (!(std::isfinite(w.x_min) && std::isfinite(w.x_max) && std::isfinite(w.y_min) &&
          std::isfinite(w.y_max)))
        throw std::invalid_argument("field window must be finite");
    if (!(w.x_max > w.x_min && w.y_max > w.y_min))
        throw std::invalid_argument("field window must have positive extent");
}

// --- marching squares ------------------------------------------------------

struct Segments {
    std::vector<Complex> verts;         // window coordinates (units of r)
    std::vector<std::uint8_t> dropped;  // vertex falls inside an obstacle
    std::vector<std::pair<int, int>> segs;
};

// Crossing vertex on the edge between two grid nodes, shared by adjacent
// cells through the edge id so chains stitch without coordinate quantization.
int edge_vertex(Segments& out, std::unordered_map<long long, int>& cache, long long key,
                const FieldGrid& grid, double level, int ix0, int iy0, int ix1, int iy1) {
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    const double p0 = grid.psi[static_cast<std::size_t>(iy0) * grid.nx + ix0];
    const double p1 = grid.psi[static_cast<std::size_t>(iy1) * grid.nx + ix1];
    double t = (level - p0) / (p1 - p0);
    t = std::clamp(t, 0.0, 1.0);
    const Complex a{grid.x_at(ix0), grid.y_at(iy0)};
    const Complex b{grid.x_at(ix1), grid.y_at(iy1)};
    const Complex p = a + t * (b - a);
    const int idx = static_cast<int>(out.verts.size());
    out.verts.push_back(p);
    const Complex z_phys = p * grid.radius;
    out.dropped.push_back(in_obstacle_array(z_phys, grid.region) ? 1 : 0);
    cache.emplace(key, idx);
    return idx;
}

Segments march_level(const FieldGrid& grid, double level) {
    Segments out;
    std::unordered_map<long long, int> cache;
    const int nx = grid.nx;
    const int ny = grid.ny;

    auto node = [&](int ix, int iy) {
        return grid.psi[static_cast<std::size_t>(iy) * nx + ix];
    };
    auto masked = [&](int ix, int iy) {
        return grid.mask[static_cast<std::size_t>(iy) * nx + ix] != 0;
    };
    // unique ids: horizontal edges even, vertical odd
    auto h_edge = [&](int ix, int iy) -> long long {
        return 2LL * (static_cast<long long>(iy) * (nx - 1) + ix);
    };
    auto v_edge = [&](int ix, int iy) -> long long {
        return 2LL * (static_cast<long long>(iy) * nx + ix) + 1LL;
    };

    auto add_seg = [&](int a, int b) {
        if (a == b) return;
        if (out.dropped[a] || out.dropped[b]) return;
        out.segs.emplace_back(a, b);
    };

    for (int iy = 0; iy + 1 < ny; ++iy) {
        for (int ix = 0; ix + 1 < nx; ++ix) {
            if (masked(ix, iy) || masked(ix + 1, iy) || masked(ix, iy + 1) ||
                masked(ix + 1, iy + 1))
                continue;
            const bool p00 = node(ix, iy) > level;
            const bool p10 = node(ix + 1, iy) > level;
            const bool p11 = node(ix + 1, iy + 1) > level;
            const bool p01 = node(ix, iy + 1) > level;

            int cross = 0;
            int bottom = -1, right = -1, top = -1, left = -1;
            if (p00 != p10) {
                bottom = edge_vertex(out, cache, h_edge(ix, iy), grid, level, ix, iy, ix + 1, iy);
                ++cross;
            }
            if (p10 != p11) {
                right = edge_vertex(out, cache, v_edge(ix + 1, iy), grid, level, ix + 1, iy,
                                    ix + 1, iy + 1);
                ++cross;
            }
            if (p01 != p11) {
                top = edge_vertex(out, cache, h_edge(ix, iy + 1), grid, level, ix, iy + 1,
                                  ix + 1, iy + 1);
                ++cross;
            }
            if (p00 != p01) {
                left = edge_vertex(out, cache, v_edge(ix, iy), grid, level, ix, iy, ix, iy + 1);
                ++cross;
            }

            if (cross == 2) {
                int a = -1, b = -1;
                for (const int v : {bottom, right, top, left}) {
                    if (v < 0) continue;
                    (a < 0 ? a : b) = v;
                }
                add_seg(a, b);
            } else if (cross == 4) {
                // saddle: connect according to the sign of the cell average
                const double avg = 0.25 * (node(ix, iy) + node(ix + 1, iy) +
                                           node(ix, iy + 1) + node(ix + 1, iy + 1));
                if ((avg > level) == p00) {
                    add_seg(bottom, right);
                    add_seg(top, left);
                } else {
                    add_seg(bottom, left);
                    add_seg(top, right);
                }
            }
        }
    }
    return out;
}

std::vector<Streamline> stitch(const Segments& in, double level) {
    std::vector<std::vector<int>> adj(in.verts.size());
    for (std::size_t s = 0; s < in.segs.size(); ++s) {
        adj[in.segs[s].first].push_back(static_cast<int>(s));
        adj[in.segs[s].second].push_back(static_cast<int>(s));
    }
    std::vector<bool> used(in.segs.size(), false);

    std::vector<Streamline> lines;
    auto walk = [&](int start_vertex, int start_seg) {
        Streamline line;
        line.level = level;
        line.points.push_back(in.verts[start_vertex]);
        int v = start_vertex;
        int s = start_seg;
        while (true) {
            used[s] = true;
            const auto [a, b] = in.segs[s];
            v = (a == v) ? b : a;
            line.points.push_back(in.verts[v]);
            int next = -1;
            for (const int cand : adj[v])
                if (!used[cand]) { next = cand; break; }
            if (next < 0) break;
            s = next;
        }
        if (line.points.size() > 2 && v == start_vertex) line.closed = true;
        return line;
    };

    // open chains first so their endpoints terminate walks
    for (std::size_t v = 0; v < in.verts.size(); ++v) {
        if (adj[v].size() != 1) continue;
        const int s = adj[v][0];
        if (!used[s]) lines.push_back(walk(static_cast<int>(v), s));
    }
    for (std::size_t s = 0; s < in.segs.size(); ++s)
        if (!used[s]) lines.push_back(walk(in.segs[s].first, static_cast<int>(s)));
    return lines;
}

// --- obstacle boundary polylines -------------------------------------------

struct LatticeRange {
    long m_lo, m_hi, n_lo, n_hi;
};

// lattice-index window large enough to cover every translate whose vicinity
// touches the window rectangle
LatticeRange index_range(const FundamentalRegion& region, const FieldWindow& w, double pad) {
    const Lattice& lat = region.lattice;
    double a_lo = 0, a_hi = 0, b_lo = 0, b_hi = 0;
    bool first = true;
    const double r = region.obstacle.radius;
    for (const double x : {w.x_min, w.x_max}) {
        for (const double y : {w.y_min, w.y_max}) {
            const Complex z = Complex{x, y} * r;
            const Complex c = (z - region.obstacle.center) * lat.inv_omega1;
            const double b = c.imag() / lat.im_tau;
            const double a = c.real() - b * lat.tau.real();
            if (first || a < a_lo) a_lo = a;
            if (first || a > a_hi) a_hi = a;
            if (first || b < b_lo) b_lo = b;
            if (first || b > b_hi) b_hi = b;
            first = false;
        }
    }
    // one lattice step spans at least the cell width, so pad/width steps
    // cover a euclidean pad distance in every direction
    const double width1 = region.cell_area / std::abs(lat.omega1);
    const double width2 = region.cell_area / std::abs(lat.omega2);
    const double pad_steps = pad * r / std::min(width1, width2) + 2.0;
    LatticeRange range;
    range.m_lo = static_cast<long>(std::floor(a_lo - pad_steps));
    range.m_hi = static_cast<long>(std::ceil(a_hi + pad_steps));
    range.n_lo = static_cast<long>(std::floor(b_lo - pad_steps));
    range.n_hi = static_cast<long>(std::ceil(b_hi + pad_steps));
    return range;
}

// distance from a point to the window rectangle (0 inside), plus the
// farthest-corner distance, both in window units
void rect_distances(const FieldWindow& w, Complex c, double& nearest, double& farthest) {
    const double cx = std::clamp(c.real(), w.x_min, w.x_max);
    const double cy = std::clamp(c.imag(), w.y_min, w.y_max);
    nearest = std::abs(c - Complex{cx, cy});
    farthest = 0.0;
    for (const double x : {w.x_min, w.x_max})
        for (const double y : {w.y_min, w.y_max})
            farthest = std::max(farthest, std::abs(c - Complex{x, y}));
}

bool point_in_window(const FieldWindow& w, Complex p) {
    return p.real() >= w.x_min && p.real() <= w.x_max && p.imag() >= w.y_min &&
           p.imag() <= w.y_max;
}

// Obstacle boundaries for the surface level, sampled analytically at a radius
// offset 0.4 grid cells outward so every vertex is strictly in the flow.
std::vector<Streamline> surface_rings(const FieldGrid& grid, double level) {
    const FundamentalRegion& region = grid.region;
    const double cell = std::min(grid.dx(), grid.dy());
    const double ring_r = 1.0 + 0.4 * cell;  // window units; obstacle radius is 1

    std::vector<Streamline> lines;
    const LatticeRange range = index_range(region, grid.window, ring_r);
    const Complex center0 = region.obstacle.center / grid.radius;
    const Complex step1 = region.lattice.omega1 / grid.radius;
    const Complex step2 = region.lattice.omega2 / grid.radius;

    const int npts = std::clamp(static_cast<int>(std::ceil(kTwoPi * ring_r / (0.5 * cell))),
                                64, 4096);

    for (long m = range.m_lo; m <= range.m_hi; ++m) {
        for (long n = range.n_lo; n <= range.n_hi; ++n) {
            const Complex c = center0 + static_cast<double>(m) * step1 +
                              static_cast<double>(n) * step2;
            double nearest = 0, farthest = 0;
            rect_distances(grid.window, c, nearest, farthest);
            if (nearest > ring_r || farthest < ring_r) continue;

            std::vector<std::uint8_t> keep(npts);
            std::vector<Complex> pts(npts);
            bool all = true;
            for (int k = 0; k < npts; ++k) {
                const Complex p = c + ring_r * std::polar(1.0, kTwoPi * k / npts);
                pts[k] = p;
                const bool ok = point_in_window(grid.window, p) &&
                                !in_obstacle_array(p * grid.radius, region);
                keep[k] = ok ? 1 : 0;
                all = all && ok;
            }
            if (all) {
                Streamline line;
                line.level = level;
                line.closed = true;
                line.points.assign(pts.begin(), pts.end());
                line.points.push_back(pts.front());
                lines.push_back(std::move(line));
                continue;
            }
            // open arcs: rotate the start to a dropped point, then emit runs
            int start = 0;
            while (start < npts && keep[start]) ++start;
            if (start == npts) continue;  // unreachable: all==false implies a drop
            Streamline run;
            run.level = level;
            for (int off = 1; off <= npts; ++off) {
                const int k = (start + off) % npts;
                if (keep[k]) {
                    run.points.push_back(pts[k]);
                } else if (run.points.size() >= 2) {
                    lines.push_back(std::move(run));
                    run = Streamline{};
                    run.level = level;
                } else {
                    run.points.clear();
                }
            }
            if (run.points.size() >= 2) lines.push_back(std::move(run));
        }
    }
    return lines;
}

// --- formatting -------------------------------------------------------------

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt12(double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

double nice_step(double range) {
    const double raw = range / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (const double mult : {1.0, 2.0, 5.0}) {
        if (raw <= mult * mag) return mult * mag;
    }
    return 10.0 * mag;
}

} // namespace

FieldGrid eval_grid(const FlowModel& model, const FieldWindow& window, int nx, int ny,
                    const ThetaAccuracy& acc) {
    check_window(window);
    if (nx < 2 || ny < 2)
        throw std::invalid_argument("eval_grid: resolution must be at least 2x2");

    FieldGrid grid;
    grid.window = window;
    grid.nx = nx;
    grid.ny = ny;
    grid.radius = model.region.obstacle.radius;
    grid.stream_constant = model.stream_constant;
    grid.region = model.region;
    const std::size_t total = static_cast<std::size_t>(nx) * ny;
    grid.psi.assign(total, kNaN);
    grid.velocity.assign(total, Complex{kNaN, kNaN});
    grid.mask.assign(total, 0);

    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t idx = static_cast<std::size_t>(iy) * nx + ix;
            const Complex z = Complex{grid.x_at(ix), grid.y_at(iy)} * grid.radius;
            if (in_obstacle_array(z, model.region)) {
                grid.mask[idx] = 1;
                continue;
            }
            try {
                grid.psi[idx] = eval_stream(model, z, acc);
                grid.velocity[idx] = std::conj(eval_velocity(model, z, acc));
            } catch (const std::domain_error&) {
                // node exactly on a charge translate: treat as masked
                grid.mask[idx] = 1;
                grid.psi[idx] = kNaN;
                grid.velocity[idx] = Complex{kNaN, kNaN};
            }
        }
    }
    return grid;
}

StreamlineSet extract_streamlines(const FieldGrid& grid, int n_levels) {
    if (n_levels < 1)
        throw std::invalid_argument("extract_streamlines: n_levels must be >= 1");
    if (grid.nx < 2 || grid.ny < 2 || grid.psi.size() != static_cast<std::size_t>(grid.nx) * grid.ny)
        throw std::invalid_argument("extract_streamlines: malformed grid");

    StreamlineSet set;
    std::vector<double> values;
    values.reserve(grid.psi.size());
    for (std::size_t i = 0; i < grid.psi.size(); ++i)
        if (!grid.mask[i] && std::isfinite(grid.psi[i])) values.push_back(grid.psi[i]);
    if (values.empty()) return set;

    std::sort(values.begin(), values.end());
    auto percentile = [&](double q) {
        const double pos = q * static_cast<double>(values.size() - 1);
        return values[static_cast<std::size_t>(std::llround(pos))];
    };
    const double lo = percentile(0.01);
    const double hi = percentile(0.99);

    for (int k = 0; k < n_levels; ++k)
        set.levels.push_back(lo + (k + 0.5) * (hi - lo) / n_levels);
    set.levels.push_back(grid.stream_constant);  // obstacle surface level

    for (std::size_t li = 0; li < set.levels.size(); ++li) {
        const double level = set.levels[li];
        const Segments segs = march_level(grid, level);
        std::vector<Streamline> lines = stitch(segs, level);
        for (Streamline& line : lines) set.lines.push_back(std::move(line));
        if (li + 1 == set.levels.size()) {
            std::vector<Streamline> rings = surface_rings(grid, level);
            for (Streamline& line : rings) set.lines.push_back(std::move(line));
        }
    }
    return set;
}

std::string render_svg(const StreamlineSet& streamlines, const FundamentalRegion& region,
                       const FieldWindow& window, const std::string& metadata) {
    check_window(window);

    const double vw = window.x_max - window.x_min;
    const double vh = window.y_max - window.y_min;
    const double short_side = std::min(vw, vh);
    const double px_w = 720.0;
    const double px_h = 720.0 * vh / vw;

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fmt(px_w) +
           "\" height=\"" + fmt(px_h) + "\" viewBox=\"" + fmt(window.x_min) + " " +
           fmt(-window.y_max) + " " + fmt(vw) + " " + fmt(vh) + "\">\n";
    if (!metadata.empty()) {
        std::string safe = metadata;
        std::size_t pos = 0;
        while ((pos = safe.find("--", pos)) != std::string::npos) safe.replace(pos, 2, "- -");
        svg += "<!-- " + safe + " -->\n";
    }
    svg += "<rect x=\"" + fmt(window.x_min) + "\" y=\"" + fmt(-window.y_max) + "\" width=\"" +
           fmt(vw) + "\" height=\"" + fmt(vh) + "\" fill=\"#ffffff\"/>\n";

    // obstacle disks (unit radius in window coordinates)
    const double r = region.obstacle.radius;
    const LatticeRange range = index_range(region, window, 1.0);
    const Complex center0 = region.obstacle.center / r;
    const Complex step1 = region.lattice.omega1 / r;
    const Complex step2 = region.lattice.omega2 / r;
    const double disk_stroke = 0.004 * short_side;
    for (long m = range.m_lo; m <= range.m_hi; ++m) {
        for (long n = range.n_lo; n <= range.n_hi; ++n) {
            const Complex c = center0 + static_cast<double>(m) * step1 +
                              static_cast<double>(n) * step2;
            double nearest = 0, farthest = 0;
            rect_distances(window, c, nearest, farthest);
            if (nearest > 1.0) continue;
            svg += "<circle cx=\"" + fmt(c.real()) + "\" cy=\"" + fmt(-c.imag()) +
                   "\" r=\"1\" fill=\"#e6e6e6\" stroke=\"#555555\" stroke-width=\"" +
                   fmt(disk_stroke) + "\"/>\n";
        }
    }

    const double line_stroke = 0.003 * short_side;
    for (const Streamline& line : streamlines.lines) {
        if (line.points.size() < 2) continue;
        std::string d = "M " + fmt(line.points[0].real()) + " " + fmt(-line.points[0].imag());
        const std::size_t last = line.closed ? line.points.size() - 1 : line.points.size();
        for (std::size_t i = 1; i < last; ++i)
            d += " L " + fmt(line.points[i].real()) + " " + fmt(-line.points[i].imag());
        if (line.closed) d += " Z";
        svg += "<path d=\"" + d + "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"" +
               fmt(line_stroke) + "\"/>\n";
    }

    // frame and ticks
    const double frame_stroke = 0.004 * short_side;
    svg += "<rect x=\"" + fmt(window.x_min) + "\" y=\"" + fmt(-window.y_max) + "\" width=\"" +
           fmt(vw) + "\" height=\"" + fmt(vh) + "\" fill=\"none\" stroke=\"#000000\" "
           "stroke-width=\"" + fmt(frame_stroke) + "\"/>\n";

    const double tick_len = 0.018 * short_side;
    const double font = 0.035 * short_side;
    const double x_step = nice_step(vw);
    const double y_step = nice_step(vh);
    const std::string font_attr = "font-family=\"Helvetica,Arial,sans-serif\" font-size=\"" +
                                  fmt(font) + "\"";

    for (double t = std::ceil(window.x_min / x_step) * x_step; t <= window.x_max + 1e-12 * vw;
         t += x_step) {
        svg += "<line x1=\"" + fmt(t) + "\" y1=\"" + fmt(-window.y_min) + "\" x2=\"" + fmt(t) +
               "\" y2=\"" + fmt(-window.y_min - tick_len) + "\" stroke=\"#000000\" "
               "stroke-width=\"" + fmt(0.5 * frame_stroke) + "\"/>\n";
        svg += "<text x=\"" + fmt(t) + "\" y=\"" + fmt(-window.y_min - 1.5 * tick_len) + "\" " +
               font_attr + " text-anchor=\"middle\">" + fmt(t) + "</text>\n";
    }
    for (double t = std::ceil(window.y_min / y_step) * y_step; t <= window.y_max + 1e-12 * vh;
         t += y_step) {
        svg += "<line x1=\"" + fmt(window.x_min) + "\" y1=\"" + fmt(-t) + "\" x2=\"" +
               fmt(window.x_min + tick_len) + "\" y2=\"" + fmt(-t) + "\" stroke=\"#000000\" "
               "stroke-width=\"" + fmt(0.5 * frame_stroke) + "\"/>\n";
        svg += "<text x=\"" + fmt(window.x_min + 1.8 * tick_len) + "\" y=\"" +
               fmt(-t + 0.35 * font) + "\" " + font_attr + ">" + fmt(t) + "</text>\n";
    }
    svg += "<text x=\"" + fmt(window.x_max - 0.06 * vw) + "\" y=\"" +
           fmt(-window.y_min - 3.2 * tick_len) + "\" " + font_attr + ">x / r</text>\n";
    svg += "<text x=\"" + fmt(window.x_min + 0.8 * tick_len) + "\" y=\"" +
           fmt(-window.y_max + 0.06 * vh) + "\" " + font_attr + ">y / r</text>\n";
    svg += "</svg>\n";
    return svg;
}

std::string write_field_csv(const FieldGrid& grid) {
    std::string csv = "x,y,psi,u,v,mask\n";
    csv.reserve(csv.size() + static_cast<std::size_t>(grid.nx) * grid.ny * 48);
    for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
            const std::size_t idx = static_cast<std::size_t>(iy) * grid.nx + ix;
            csv += fmt12(grid.x_at(ix));
            csv += ',';
            csv += fmt12(grid.y_at(iy));
            csv += ',';
            if (grid.mask[idx]) {
                csv += ",,,1\n";
            } else {
                csv += fmt12(grid.psi[idx]);
                csv += ',';
                csv += fmt12(grid.velocity[idx].real());
                csv += ',';
                csv += fmt12(grid.velocity[idx].imag());
                csv += ",0\n";
            }
        }
    }
    return csv;
}

} // namespace periflow
