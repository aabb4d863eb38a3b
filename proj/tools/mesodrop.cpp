// mesodrop: command-line front end for the smoothed-potential droplet model.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mesodrop/app/commands.hpp"

namespace {

using namespace mesodrop;
using namespace mesodrop::app;

// "a:b:step" -> {a, a+step, ..., b}
std::vector<double> parse_range(const std::string& text)
{
    std::vector<double> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        const std::string piece = text.substr(start, colon == std::string::npos ? std::string::npos : colon - start);
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(piece, &used));
            if (used != piece.size()) throw std::invalid_argument(piece);
        } catch (const std::exception&) {
            throw ConfigError("--xi-list: '" + text + "' is not of the form a:b:step");
        }
        if (colon == std::string::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0]) {
        throw ConfigError("--xi-list: '" + text + "' is not of the form a:b:step with step > 0 and a <= b");
    }
    std::vector<double> out;
    const auto n = static_cast<long long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
}

struct Overrides {
    std::optional<long long> N;
    std::optional<double> xi;
    std::optional<double> mixing;
    std::optional<double> tol;
    std::optional<std::string> xi_list;
    std::optional<double> R;
    std::optional<double> s_max;
    std::optional<std::vector<double>> eps;
    std::optional<std::string> coupling;
};

RunConfig effective_config(const std::string& path, const std::optional<std::string>& out_dir,
                           const std::optional<std::uint64_t>& seed, const Overrides& o)
{
    RunConfig c = path.empty() ? RunConfig{} : load_config(path);
    if (out_dir) c.directory = *out_dir;
    if (seed) c.mc_seed = *seed;
    if (o.N) c.N = *o.N;
    if (o.xi) c.xi = *o.xi;
    if (o.mixing) c.mixing = *o.mixing;
    if (o.tol) c.tol = *o.tol;
    if (o.xi_list) c.xi_values = parse_range(*o.xi_list);
    if (o.R) c.R_context = *o.R;
    if (o.s_max) c.s_max = *o.s_max;
    if (o.eps) c.epsilons = *o.eps;
    validate(c);
    return c;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Smoothed pair potentials and mesoscopic Hartree droplets for helium-4"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", "mesodrop 0.1.0");

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    bool timing = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output.directory)");
    app.add_option("--seed", seed, "Monte Carlo seed (overrides seeds.mc_seed)");
    app.add_flag("--timing", timing, "record wall-clock time in JSON reports (breaks byte-identical reruns)");

    Overrides o;
    auto* potential = app.add_subcommand("potential", "bare pair potential profile and well");
    auto* smooth = app.add_subcommand("smooth", "smoothed pair potential table");
    smooth->add_option("--xi", o.xi, "smoothing parameter");
    smooth->add_option("--n", o.N, "droplet size N");
    auto* table1 = app.add_subcommand("table1", "well positions and depths against published values");
    auto* fig1 = app.add_subcommand("fig1", "smoothed potential profiles at xi = 0.35, 0.60, 0.90");
    fig1->add_option("--n", o.N, "droplet size N");
    auto* scf = app.add_subcommand("scf", "self-consistent Hartree droplet");
    scf->add_option("--n", o.N, "droplet size N");
    scf->add_option("--xi", o.xi, "smoothing parameter");
    scf->add_option("--mixing", o.mixing, "initial density mixing");
    scf->add_option("--tol", o.tol, "density residual tolerance");
    auto* xiscan = app.add_subcommand("xiscan", "Hartree energy against xi");
    xiscan->add_option("--n", o.N, "droplet size N");
    xiscan->add_option("--xi-list", o.xi_list, "xi values as a:b:step");
    auto* shortscale = app.add_subcommand("shortscale", "short-scale pair response and its C correction");
    shortscale->add_option("--xi", o.xi, "smoothing parameter");
    shortscale->add_option("--R", o.R, "envelope separation, angstrom");
    shortscale->add_option("--smax", o.s_max, "response anchoring radius, angstrom");
    auto* scaling = app.add_subcommand("scaling", "response amplitude against epsilon");
    scaling->add_option("--coupling", o.coupling, "weak or strong (default both)")
        ->check(CLI::IsMember({"weak", "strong"}));
    scaling->add_option("--eps", o.eps, "epsilon values")->delimiter(',');
    scaling->add_option("--R", o.R, "envelope separation, angstrom");
    auto* oracle = app.add_subcommand("oracle", "quadrature against Monte Carlo at 12 points");
    auto* all = app.add_subcommand("all", "every artifact plus a manifest");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    RunConfig config;
    try {
        config = effective_config(config_path, out_dir, seed, o);
    } catch (const std::exception& e) {
        std::cerr << "mesodrop: " << e.what() << "\n";
        return exit_config;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        Session session(config, command, timing);
        ArtifactWriter out(config.directory);
        int code = exit_ok;
        if (potential->parsed()) run_potential(session, out);
        if (smooth->parsed()) run_smooth(session, out);
        if (table1->parsed()) run_table1(session, out);
        if (fig1->parsed()) run_fig1(session, out);
        if (scf->parsed()) run_scf(session, out);
        if (xiscan->parsed()) run_xiscan(session, out);
        if (shortscale->parsed()) run_shortscale(session, out);
        if (scaling->parsed()) {
            std::optional<ResponseKind> only;
            if (o.coupling) only = *o.coupling == "weak" ? ResponseKind::weak : ResponseKind::strong;
            run_scaling(session, out, only);
        }
        if (oracle->parsed()) {
            const auto j = run_oracle(session, out);
            if (!j["all_within_3_sigma"].get<bool>()) code = exit_acceptance;
        }
        if (all->parsed()) code = run_all(session, out);
        for (const auto& name : out.written()) std::cout << (out.directory() / name).string() << "\n";
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "mesodrop: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "mesodrop: " << e.what() << "\n";
        return exit_numeric;
    }
}
