#pragma once

// Run configuration: strict JSON parsing, defaults and a stable hash.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mesodrop/error.hpp"
#include "mesodrop/potential.hpp"
#include "mesodrop/units.hpp"

namespace mesodrop::app {

using json = nlohmann::ordered_json;

struct CalibrationTarget {
    double xi = 0.35;
    double r_target = 3.52;  // angstrom
};

struct RunConfig {
    // droplet
    long long N = 1000;
    double l = 3.6;
    // kernel
    double xi = 0.35;
    std::optional<double> kappa;  // empty = calibrate
    CalibrationTarget calibration;
    // mesoscopic grid
    double r_max_factor = 3.0;
    std::optional<double> r_max;  // angstrom; overrides the factor
    std::size_t n_points = 400;
    // smoothing table
    std::size_t table_points = 600;
    double table_r_min = 0.5;
    double table_r_max = 30.0;
    // scf
    double mixing = 0.3;
    double tol = 1e-10;
    int max_iter = 500;
    // scans
    std::vector<double> xi_values{0.35, 0.60, 0.90};
    bool refine = true;
    std::vector<long long> probe_N{100, 300, 1000};
    // short scale
    double R_context = 3.52;
    std::optional<double> s_max;  // angstrom; default xi * L / 2
    std::size_t s_points = 2001;
    std::vector<double> epsilons{0.1, 0.05, 0.025};
    double lambda = 1.0;
    // figure profiles
    std::size_t fig_points = 500;
    double fig_r_min = 2.0;
    double fig_r_max = 12.0;
    // oracle
    std::uint64_t mc_seed = 20240611;
    std::size_t mc_samples = 1000000;
    // output
    std::string directory = "out";
    std::vector<std::string> formats{"csv", "json"};
    // physics
    Constants constants;
    PairPotential potential;

    [[nodiscard]] DropletSpec droplet() const { return make_droplet(N, l); }
    [[nodiscard]] double box_radius() const { return r_max ? *r_max : r_max_factor * droplet().L; }
    [[nodiscard]] double response_radius() const { return s_max ? *s_max : 0.5 * xi * droplet().L; }
    [[nodiscard]] bool wants(const std::string& format) const
    {
        for (const auto& f : formats) {
            if (f == format) return true;
        }
        return false;
    }
};

namespace detail {

inline void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed)
{
    if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!ok.count(it.key())) throw ConfigError("config: unknown key '" + where + "." + it.key() + "'");
    }
}

inline double number(const json& v, const std::string& where)
{
    if (!v.is_number()) throw ConfigError("config: '" + where + "' must be a number");
    return v.get<double>();
}

inline long long integer(const json& v, const std::string& where)
{
    if (!v.is_number_integer()) throw ConfigError("config: '" + where + "' must be an integer");
    return v.get<long long>();
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out)
{
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    const std::string name = where + "." + key;
    if constexpr (std::is_same_v<T, double>) {
        out = number(v, name);
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("config: '" + name + "' must be true or false");
        out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("config: '" + name + "' must be a string");
        out = v.get<std::string>();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned()) throw ConfigError("config: '" + name + "' must be a non-negative integer");
        out = v.get<std::uint64_t>();
    } else if constexpr (std::is_integral_v<T>) {
        const long long x = integer(v, name);
        if constexpr (std::is_unsigned_v<T>) {
            if (x < 0) throw ConfigError("config: '" + name + "' must be non-negative");
        }
        out = static_cast<T>(x);
    } else if constexpr (std::is_same_v<T, std::optional<double>>) {
        out = number(v, name);
    } else if constexpr (std::is_same_v<T, std::vector<double>>) {
        if (!v.is_array()) throw ConfigError("config: '" + name + "' must be an array");
        out.clear();
        for (const auto& x : v) out.push_back(number(x, name));
    } else if constexpr (std::is_same_v<T, std::vector<long long>>) {
        if (!v.is_array()) throw ConfigError("config: '" + name + "' must be an array");
        out.clear();
        for (const auto& x : v) out.push_back(integer(x, name));
    } else if constexpr (std::is_same_v<T, std::vector<std::string>>) {
        if (!v.is_array()) throw ConfigError("config: '" + name + "' must be an array");
        out.clear();
        for (const auto& x : v) {
            if (!x.is_string()) throw ConfigError("config: '" + name + "' must hold strings");
            out.push_back(x.get<std::string>());
        }
    }
}

} // namespace detail

/// Range checks shared by file and command-line configuration.
inline void validate(const RunConfig& c)
{
    auto positive = [](double x) { return x > 0.0 && std::isfinite(x); };
    require(c.N >= 2, "config: droplet.N must be >= 2");
    require(positive(c.l), "config: droplet.l_angstrom must be > 0");
    require(c.xi >= 0.0 && std::isfinite(c.xi), "config: kernel.xi must be >= 0");
    require(!c.kappa || positive(*c.kappa), "config: kernel.kappa must be > 0");
    require(positive(c.calibration.xi), "config: kernel.calibration.xi must be > 0");
    require(positive(c.calibration.r_target), "config: kernel.calibration.r_target must be > 0");
    require(positive(c.r_max_factor), "config: grid.r_max_factor must be > 0");
    require(!c.r_max || positive(*c.r_max), "config: grid.r_max must be > 0");
    require(c.n_points >= 200, "config: grid.n_points must be >= 200");
    require(c.table_points >= 3, "config: table.n_points must be >= 3");
    require(positive(c.table_r_min) && c.table_r_max > c.table_r_min, "config: table range must satisfy 0 < r_min < r_max");
    require(c.mixing > 0.0 && c.mixing <= 1.0, "config: scf.mixing must lie in (0, 1]");
    require(positive(c.tol), "config: scf.tol must be > 0");
    require(c.max_iter >= 1, "config: scf.max_iter must be >= 1");
    require(!c.xi_values.empty(), "config: xiscan.xi_values must not be empty");
    for (double x : c.xi_values) require(x >= 0.0 && std::isfinite(x), "config: xiscan.xi_values must be >= 0");
    require(!c.probe_N.empty(), "config: probe.N_values must not be empty");
    for (long long n : c.probe_N) require(n >= 1 && n <= 10000, "config: probe.N_values must lie in [1, 10000]");
    require(positive(c.R_context), "config: shortscale.R_context must be > 0");
    require(!c.s_max || positive(*c.s_max), "config: shortscale.s_max must be > 0");
    require(c.s_points >= 5, "config: shortscale.n_points must be >= 5");
    require(c.epsilons.size() >= 3, "config: scaling.epsilons needs at least 3 values");
    for (double e : c.epsilons) require(e > 0.0 && e < 1.0, "config: scaling.epsilons must lie in (0, 1)");
    require(std::isfinite(c.lambda) && c.lambda != 0.0, "config: scaling.lambda must be finite and non-zero");
    require(c.fig_points >= 2, "config: fig1.n_points must be >= 2");
    require(positive(c.fig_r_min) && c.fig_r_max > c.fig_r_min, "config: fig1 range must satisfy 0 < r_min < r_max");
    require(c.mc_samples >= 10000, "config: seeds.mc_samples must be >= 10000");
    require(!c.directory.empty(), "config: output.directory must not be empty");
    for (const auto& f : c.formats) require(f == "csv" || f == "json", "config: output.formats accepts 'csv' and 'json'");
    require(positive(c.constants.hbar) && positive(c.constants.k_B) && positive(c.constants.m),
            "config: constants must be > 0");
    require(positive(c.potential.eps_over_kB) && positive(c.potential.r_m), "config: potential scales must be > 0");
}

inline RunConfig parse_config(const json& root)
{
    using detail::check_keys;
    using detail::read;
    RunConfig c;
    check_keys(root, "config",
               {"droplet", "kernel", "grid", "table", "scf", "xiscan", "probe", "shortscale", "scaling", "fig1",
                "seeds", "output", "constants", "potential"});
    if (root.contains("droplet")) {
        const auto& d = root["droplet"];
        check_keys(d, "droplet", {"N", "l_angstrom", "l"});
        read(d, "N", "droplet", c.N);
        read(d, "l", "droplet", c.l);
        read(d, "l_angstrom", "droplet", c.l);
    }
    if (root.contains("kernel")) {
        const auto& k = root["kernel"];
        check_keys(k, "kernel", {"xi", "kappa", "calibration"});
        read(k, "xi", "kernel", c.xi);
        if (k.contains("kappa")) {
            const auto& v = k["kappa"];
            if (v.is_string()) {
                if (v.get<std::string>() != "calibrate") throw ConfigError("config: kernel.kappa must be a number or \"calibrate\"");
                c.kappa.reset();
            } else {
                c.kappa = detail::number(v, "kernel.kappa");
            }
        }
        if (k.contains("calibration")) {
            const auto& cal = k["calibration"];
            check_keys(cal, "kernel.calibration", {"xi", "r_target"});
            read(cal, "xi", "kernel.calibration", c.calibration.xi);
            read(cal, "r_target", "kernel.calibration", c.calibration.r_target);
        }
    }
    if (root.contains("grid")) {
        const auto& g = root["grid"];
        check_keys(g, "grid", {"r_max_factor", "r_max", "n_points"});
        read(g, "r_max_factor", "grid", c.r_max_factor);
        read(g, "r_max", "grid", c.r_max);
        read(g, "n_points", "grid", c.n_points);
    }
    if (root.contains("table")) {
        const auto& t = root["table"];
        check_keys(t, "table", {"n_points", "r_min", "r_max"});
        read(t, "n_points", "table", c.table_points);
        read(t, "r_min", "table", c.table_r_min);
        read(t, "r_max", "table", c.table_r_max);
    }
    if (root.contains("scf")) {
        const auto& s = root["scf"];
        check_keys(s, "scf", {"mixing", "tol", "max_iter"});
        read(s, "mixing", "scf", c.mixing);
        read(s, "tol", "scf", c.tol);
        read(s, "max_iter", "scf", c.max_iter);
    }
    if (root.contains("xiscan")) {
        const auto& x = root["xiscan"];
        check_keys(x, "xiscan", {"xi_values", "refine"});
        read(x, "xi_values", "xiscan", c.xi_values);
        read(x, "refine", "xiscan", c.refine);
    }
    if (root.contains("probe")) {
        const auto& p = root["probe"];
        check_keys(p, "probe", {"N_values"});
        read(p, "N_values", "probe", c.probe_N);
    }
    if (root.contains("shortscale")) {
        const auto& s = root["shortscale"];
        check_keys(s, "shortscale", {"R_context", "s_max", "n_points"});
        read(s, "R_context", "shortscale", c.R_context);
        read(s, "s_max", "shortscale", c.s_max);
        read(s, "n_points", "shortscale", c.s_points);
    }
    if (root.contains("scaling")) {
        const auto& s = root["scaling"];
        check_keys(s, "scaling", {"epsilons", "lambda"});
        read(s, "epsilons", "scaling", c.epsilons);
        read(s, "lambda", "scaling", c.lambda);
    }
    if (root.contains("fig1")) {
        const auto& f = root["fig1"];
        check_keys(f, "fig1", {"n_points", "r_min", "r_max"});
        read(f, "n_points", "fig1", c.fig_points);
        read(f, "r_min", "fig1", c.fig_r_min);
        read(f, "r_max", "fig1", c.fig_r_max);
    }
    if (root.contains("seeds")) {
        const auto& s = root["seeds"];
        check_keys(s, "seeds", {"mc_seed", "mc_samples"});
        read(s, "mc_seed", "seeds", c.mc_seed);
        read(s, "mc_samples", "seeds", c.mc_samples);
    }
    if (root.contains("output")) {
        const auto& o = root["output"];
        check_keys(o, "output", {"directory", "formats"});
        read(o, "directory", "output", c.directory);
        read(o, "formats", "output", c.formats);
    }
    if (root.contains("constants")) {
        const auto& k = root["constants"];
        check_keys(k, "constants", {"hbar", "k_B", "m"});
        read(k, "hbar", "constants", c.constants.hbar);
        read(k, "k_B", "constants", c.constants.k_B);
        read(k, "m", "constants", c.constants.m);
    }
    c.potential.k_B = c.constants.k_B;
    if (root.contains("potential")) {
        const auto& p = root["potential"];
        check_keys(p, "potential", {"eps_over_kB", "r_m", "A", "alpha", "C6", "C8", "C10", "D"});
        read(p, "eps_over_kB", "potential", c.potential.eps_over_kB);
        read(p, "r_m", "potential", c.potential.r_m);
        read(p, "A", "potential", c.potential.A);
        read(p, "alpha", "potential", c.potential.alpha);
        read(p, "C6", "potential", c.potential.C6);
        read(p, "C8", "potential", c.potential.C8);
        read(p, "C10", "potential", c.potential.C10);
        read(p, "D", "potential", c.potential.D);
    }
    validate(c);
    return c;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(root);
}

/// Effective configuration, every default spelled out.
inline json to_json(const RunConfig& c)
{
    json j;
    j["droplet"] = {{"N", c.N}, {"l_angstrom", c.l}};
    json kernel = {{"xi", c.xi}};
    if (c.kappa) kernel["kappa"] = *c.kappa;
    else kernel["kappa"] = "calibrate";
    kernel["calibration"] = {{"xi", c.calibration.xi}, {"r_target", c.calibration.r_target}};
    j["kernel"] = kernel;
    json grid = {{"r_max_factor", c.r_max_factor}, {"n_points", c.n_points}};
    if (c.r_max) grid["r_max"] = *c.r_max;
    j["grid"] = grid;
    j["table"] = {{"n_points", c.table_points}, {"r_min", c.table_r_min}, {"r_max", c.table_r_max}};
    j["scf"] = {{"mixing", c.mixing}, {"tol", c.tol}, {"max_iter", c.max_iter}};
    j["xiscan"] = {{"xi_values", c.xi_values}, {"refine", c.refine}};
    j["probe"] = {{"N_values", c.probe_N}};
    json ss = {{"R_context", c.R_context}, {"n_points", c.s_points}};
    if (c.s_max) ss["s_max"] = *c.s_max;
    j["shortscale"] = ss;
    j["scaling"] = {{"epsilons", c.epsilons}, {"lambda", c.lambda}};
    j["fig1"] = {{"n_points", c.fig_points}, {"r_min", c.fig_r_min}, {"r_max", c.fig_r_max}};
    j["seeds"] = {{"mc_seed", c.mc_seed}, {"mc_samples", c.mc_samples}};
    j["output"] = {{"directory", c.directory}, {"formats", c.formats}};
    j["constants"] = {{"hbar", c.constants.hbar}, {"k_B", c.constants.k_B}, {"m", c.constants.m}};
    const auto& p = c.potential;
    j["potential"] = {{"eps_over_kB", p.eps_over_kB}, {"r_m", p.r_m}, {"A", p.A},   {"alpha", p.alpha},
                      {"C6", p.C6},                   {"C8", p.C8},   {"C10", p.C10}, {"D", p.D}};
    return j;
}

/// FNV-1a 64 over a byte string.
inline std::uint64_t fnv1a64(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

/// Hash of the effective configuration; the output directory is excluded so that the
/// same physics written to two places carries the same hash.
inline std::string config_hash(const RunConfig& c)
{
    json j = to_json(c);
    j["output"].erase("directory");
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << fnv1a64(j.dump());
    return "fnv1a64:" + os.str();
}

} // namespace mesodrop::app
