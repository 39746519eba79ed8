// Command-line front end. All real work lives in selfsim/cli.hpp; this file
// parses flags, resolves the config, opens output files, and maps exceptions
// to the exit-code contract: 0 success, 1 verification failure, 2 usage or
// solver error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "selfsim/cli.hpp"

namespace fs = std::filesystem;
using namespace selfsim;

namespace {

/// Relative --out paths land under the configured output directory.
std::ofstream open_output(const RunConfig& cfg, const std::string& out) {
    const fs::path path = fs::path(cfg.output_dir) / fs::path(out);
    if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file '" + path.string() + "'");
    return os;
}

/// data.csv -> data.anchors.csv (companion file of a sweep).
std::string anchor_name(const std::string& out) {
    fs::path p(out);
    const std::string ext = p.extension().string();
    p.replace_extension();
    return p.string() + ".anchors" + (ext.empty() ? ".csv" : ext);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"radial self-similar solutions of beta(w)_t = Delta w with "
                 "beta(r) = 2r - r+"};
    app.require_subcommand(1);
    app.fallthrough(); // let --config appear after the subcommand name too

    std::string config_path;
    app.add_option("--config", config_path,
                   "key = value config file; explicit flags override it");

    // ---- alpha ------------------------------------------------------------
    auto* alpha_cmd =
        app.add_subcommand("alpha", "matched homogeneity exponents");
    int a_k = 0, a_maxk = 0, a_dim = 1;
    std::string a_sign, a_out;
    auto* a_k_opt = alpha_cmd->add_option("--k", a_k, "exponent index");
    auto* a_sign_opt =
        alpha_cmd->add_option("--sign", a_sign, "origin sign of the profile")
            ->check(CLI::IsMember({"plus", "minus"}));
    alpha_cmd->add_option("--dim", a_dim, "space dimension N")
        ->check(CLI::PositiveNumber);
    auto* a_maxk_opt = alpha_cmd->add_option(
        "--max-k", a_maxk, "both signs, k = 1..max-k, sorted by alpha");
    alpha_cmd->add_option("--out", a_out, "also write the rows as CSV");
    a_k_opt->needs(a_sign_opt);
    a_k_opt->excludes(a_maxk_opt);

    // ---- profile ----------------------------------------------------------
    auto* profile_cmd =
        app.add_subcommand("profile", "one origin shot, sampled as CSV");
    double p_alpha = 0.0;
    int p_dim = 1, p_samples = 2000;
    std::string p_sign = "plus", p_out;
    profile_cmd->add_option("--alpha", p_alpha, "homogeneity exponent")
        ->required();
    profile_cmd->add_option("--sign", p_sign, "origin sign")
        ->check(CLI::IsMember({"plus", "minus"}));
    profile_cmd->add_option("--dim", p_dim, "space dimension N")
        ->check(CLI::PositiveNumber);
    profile_cmd->add_option("--samples", p_samples, "uniform sample count");
    profile_cmd->add_option("--out", p_out, "CSV destination")->required();

    // ---- sweep ------------------------------------------------------------
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "zero-map curves alpha(s), with anchors in a companion file");
    std::string sw_range, sw_out;
    int sw_dim = 1, sw_workers = 0;
    sweep_cmd->add_option("--s-range", sw_range, "lo:hi:n sample grid")
        ->required();
    sweep_cmd->add_option("--dim", sw_dim, "space dimension N")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--workers", sw_workers,
                          "worker threads (SSS_THREADS overrides)");
    sweep_cmd->add_option("--out", sw_out, "CSV destination")->required();

    // ---- verify -----------------------------------------------------------
    auto* verify_cmd =
        app.add_subcommand("verify", "run a check suite, exit 0/1");
    std::string v_suite = "all";
    int v_dim = 1;
    verify_cmd->add_option("--suite", v_suite, "all|ode|spectral|appell|pde")
        ->check(CLI::IsMember({"all", "ode", "spectral", "appell", "pde"}));
    verify_cmd->add_option("--dim", v_dim, "space dimension N")
        ->check(CLI::PositiveNumber);

    // ---- appell -----------------------------------------------------------
    auto* appell_cmd = app.add_subcommand(
        "appell", "a profile and its negative-homogeneity dual as CSV");
    double ap_alpha = 0.0;
    int ap_dim = 1, ap_samples = 2000;
    std::string ap_sign = "plus", ap_out;
    appell_cmd->add_option("--alpha", ap_alpha, "homogeneity exponent")
        ->required();
    appell_cmd->add_option("--sign", ap_sign, "origin sign")
        ->check(CLI::IsMember({"plus", "minus"}));
    appell_cmd->add_option("--dim", ap_dim, "space dimension N")
        ->check(CLI::PositiveNumber);
    appell_cmd->add_option("--samples", ap_samples, "uniform sample count");
    appell_cmd->add_option("--out", ap_out, "CSV destination")->required();

    // ---- evolve -----------------------------------------------------------
    auto* evolve_cmd = app.add_subcommand(
        "evolve", "finite-difference march of a matched eigen-profile");
    int e_k = 1, e_dim = 1;
    double e_alpha = 0.0, e_tend = -0.05, e_h = 0.0, e_radius = 0.0;
    std::string e_sign = "minus", e_out;
    bool e_lipschitz = false;
    evolve_cmd->add_option("--k", e_k, "eigen-profile index")
        ->check(CLI::PositiveNumber);
    evolve_cmd->add_option("--sign", e_sign, "origin sign")
        ->check(CLI::IsMember({"plus", "minus"}));
    evolve_cmd->add_option("--dim", e_dim, "space dimension N")
        ->check(CLI::PositiveNumber);
    evolve_cmd->add_option(
        "--alpha", e_alpha,
        "claimed homogeneity for the ratio column (default: the profile's own; "
        "a wrong value makes the ratio drift)");
    evolve_cmd->add_option("--t-end", e_tend, "final time, in (t0, 0)");
    evolve_cmd->add_option("--step", e_h, "grid step");
    evolve_cmd->add_option("--radius", e_radius,
                           "domain radius (default: 3.05x the largest zero)");
    evolve_cmd->add_flag("--lipschitz-demo", e_lipschitz,
                         "short-time run reporting the center difference "
                         "quotients and their slope");
    evolve_cmd->add_option("--out", e_out, "trace CSV destination");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e); // prints help or the error message
        return rc == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config_file(config_path);

        if (app.got_subcommand(alpha_cmd)) {
            if (alpha_cmd->count("--dim")) cfg.dimension = a_dim;
            cfg.validate();
            cli::AlphaRequest req;
            if (a_k > 0) {
                req.k = a_k;
                req.sign = cli::parse_sign(a_sign);
            }
            req.max_k = a_maxk;
            const auto rows = cli::alpha_rows(req, cfg.dimension, cfg.exponents());
            cli::print_alpha_table(std::cout, rows);
            if (!a_out.empty()) {
                auto os = open_output(cfg, a_out);
                cli::write_alpha_csv(os, rows);
            }
            return 0;
        }

        if (app.got_subcommand(profile_cmd)) {
            if (profile_cmd->count("--dim")) cfg.dimension = p_dim;
            cfg.validate();
            const ProblemParams params{cfg.dimension, p_alpha};
            params.validate();
            const auto prof =
                shoot_origin(params, cli::parse_sign(p_sign), cfg.shot());
            auto os = open_output(cfg, p_out);
            cli::write_profile_csv(os, prof, p_samples);
            std::cout << "span=[0, " << csv::format(prof.s_end) << "] zeros="
                      << prof.zeros.size() << " tail=" << to_string(prof.tail)
                      << '\n';
            return 0;
        }

        if (app.got_subcommand(sweep_cmd)) {
            if (sweep_cmd->count("--dim")) cfg.dimension = sw_dim;
            if (sweep_cmd->count("--workers")) cfg.workers = sw_workers;
            cfg.validate();
            const auto res = cli::compute_sweep(cli::parse_range(sw_range), cfg);
            {
                auto os = open_output(cfg, sw_out);
                cli::write_sweep_csv(os, res);
            }
            const std::string anchors = anchor_name(sw_out);
            {
                auto os = open_output(cfg, anchors);
                cli::write_anchor_csv(os, res);
            }
            std::cout << "rows=" << res.rows.size() << " anchors="
                      << res.anchors.size() << " anchor_file=" << anchors
                      << '\n';
            return 0;
        }

        if (app.got_subcommand(verify_cmd)) {
            if (verify_cmd->count("--dim")) cfg.dimension = v_dim;
            return cli::run_verify(std::cout, cfg, v_suite);
        }

        if (app.got_subcommand(appell_cmd)) {
            if (appell_cmd->count("--dim")) cfg.dimension = ap_dim;
            cfg.validate();
            const ProblemParams params{cfg.dimension, ap_alpha};
            params.validate();
            ShotOptions shot = cfg.shot();
            shot.classify = false; // the transform needs zeros, not a tail class
            const auto prof =
                shoot_origin(params, cli::parse_sign(ap_sign), shot);
            const auto pair = appell_transform(prof);
            auto os = open_output(cfg, ap_out);
            cli::write_appell_csv(os, pair, ap_samples);
            std::cout << "alpha=" << csv::format(pair.params.alpha)
                      << " beta=" << csv::format(pair.beta)
                      << " zeros=" << pair.zeros.size() << '\n';
            return 0;
        }

        if (app.got_subcommand(evolve_cmd)) {
            if (evolve_cmd->count("--dim")) cfg.dimension = e_dim;
            if (evolve_cmd->count("--step")) cfg.pde_step = e_h;
            cfg.validate();
            cli::EvolveRequest req;
            req.k = e_k;
            req.sign = cli::parse_sign(e_sign);
            req.claimed_alpha = e_alpha;
            req.t_end = e_tend;
            req.radius = e_radius;
            req.lipschitz = e_lipschitz;
            const auto outcome = cli::run_evolve(req, cfg);
            if (!e_out.empty()) {
                auto os = open_output(cfg, e_out);
                cli::write_evolve_csv(os, outcome.run);
            }
            cli::print_evolve_summary(std::cout, outcome);
            return 0;
        }

        return 2; // unreachable: require_subcommand(1)
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
