#include "periflow/config.hpp"

#include "periflow/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace periflow {

namespace {

using nlohmann::json;

Complex get_complex(const json& j, const std::string& key, Complex fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("config key '" + key + "' must be a number or [re, im] pair");
}

double get_double(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
}

std::int64_t get_int(const json& j, const std::string& key, std::int64_t fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer())
        throw ConfigError("config key '" + key + "' must be an integer");
    return v.get<std::int64_t>();
}

json config_json(const ProblemConfig& c) {
    json j;
    j["omega1"] = {c.omega1.real(), c.omega1.imag()};
    j["omega2"] = {c.omega2.real(), c.omega2.imag()};
    j["radius"] = c.radius;
    j["U"] = c.mean_speed;
    j["N"] = c.count;
    j["placement_ratio"] = c.placement_ratio;
    j["mc_samples"] = c.mc_samples;
    j["seed"] = c.seed;
    j["quadrature"] =
        (c.quadrature == QuadratureInfo::Mode::monte_carlo) ? "monte_carlo" : "grid";
    if (c.z0)
        j["z0"] = {c.z0->real(), c.z0->imag()};
    else
        j["z0"] = nullptr;
    j["grid_na"] = c.grid_na;
    j["grid_nb"] = c.grid_nb;
    return j;
}

} // namespace

ProblemConfig parse_config_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::set<std::string> known = {
        "omega1", "omega2", "radius", "U",       "N",       "placement_ratio",
        "mc_samples", "seed", "quadrature", "z0", "grid_na", "grid_nb"};
    for (const auto& item : j.items())
        if (!known.count(item.key()))
            throw ConfigError("unknown config key '" + item.key() + "'");

    ProblemConfig c;
    c.omega1 = get_complex(j, "omega1", c.omega1);
    c.omega2 = get_complex(j, "omega2", c.omega2);
    c.radius = get_double(j, "radius", c.radius);
    c.mean_speed = get_double(j, "U", c.mean_speed);
    c.count = static_cast<int>(get_int(j, "N", c.count));
    c.placement_ratio = get_double(j, "placement_ratio", c.placement_ratio);
    c.mc_samples = get_int(j, "mc_samples", c.mc_samples);
    if (j.contains("seed")) {
        const json& v = j.at("seed");
        if (!v.is_number_unsigned())
            throw ConfigError("config key 'seed' must be a non-negative integer");
        c.seed = v.get<std::uint64_t>();
    }
    if (j.contains("quadrature")) {
        const json& v = j.at("quadrature");
        if (v.is_string() && v.get<std::string>() == "monte_carlo")
            c.quadrature = QuadratureInfo::Mode::monte_carlo;
        else if (v.is_string() && v.get<std::string>() == "grid")
            c.quadrature = QuadratureInfo::Mode::grid;
        else
            throw ConfigError("config key 'quadrature' must be \"monte_carlo\" or \"grid\"");
    }
    if (j.contains("z0") && !j.at("z0").is_null()) c.z0 = get_complex(j, "z0", {});
    c.grid_na = static_cast<int>(get_int(j, "grid_na", c.grid_na));
    c.grid_nb = static_cast<int>(get_int(j, "grid_nb", c.grid_nb));

    if (!(c.radius > 0.0) || !std::isfinite(c.radius))
        throw ConfigError("config key 'radius' must be positive and finite");
    if (c.count < 4) throw ConfigError("config key 'N' must be at least 4");
    if (!(c.placement_ratio > 0.0 && c.placement_ratio < 1.0))
        throw ConfigError("config key 'placement_ratio' must lie strictly in (0,1)");
    if (c.mc_samples < 1) throw ConfigError("config key 'mc_samples' must be at least 1");
    if (c.grid_na < 1 || c.grid_nb < 1)
        throw ConfigError("config keys 'grid_na'/'grid_nb' must be at least 1");

    // surface the geometric preconditions (degenerate basis, overlapping
    // obstacles, anchor outside the obstacle) as config errors at load time
    try {
        const Lattice lat = make_lattice(c.omega1 * c.radius, c.omega2 * c.radius);
        const CircleObstacle obstacle{Complex{0.0, 0.0}, c.radius};
        std::optional<Complex> z0;
        if (c.z0) z0 = *c.z0 * c.radius;
        make_region(lat, obstacle, z0);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid geometry: ") + e.what());
    }
    return c;
}

ProblemConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_json(buffer.str());
}

std::string config_to_json(const ProblemConfig& config) {
    return config_json(config).dump();
}

SolvedProblem solve_problem(const ProblemConfig& config) {
    const Lattice lat = make_lattice(config.omega1 * config.radius,
                                     config.omega2 * config.radius);
    const CircleObstacle obstacle{Complex{0.0, 0.0}, config.radius};
    std::optional<Complex> z0;
    if (config.z0) z0 = *config.z0 * config.radius;
    const FundamentalRegion region = make_region(lat, obstacle, z0);

    SolvedProblem solved;
    QuadratureInfo info;
    info.mode = config.quadrature;
    if (config.quadrature == QuadratureInfo::Mode::monte_carlo) {
        solved.samples = sample_region(region, config.mc_samples, config.seed);
        info.seed = config.seed;
    } else {
        solved.samples = grid_region(region, config.grid_na, config.grid_nb);
        info.grid_na = config.grid_na;
        info.grid_nb = config.grid_nb;
    }
    info.samples = std::ssize(solved.samples.points);

    const ChargeConfig charges = place_points(obstacle, config.count, config.placement_ratio);
    const std::vector<Complex> u = cell_average_coefficients(charges, region, solved.samples);
    solved.model = assemble_and_solve(region, charges, u, config.mean_speed, info);
    solved.epsilon = boundary_error(solved.model);
    return solved;
}

} // namespace periflow
