#include "funreg/app/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using funreg::app::RunConfig;

    RunConfig config;
    std::string sigma_mode = "smooth";

    CLI::App app{"Functional linear regression by canonical (FCR) and principal component (FPR) expansions"};
    app.set_config("--config", "", "INI/TOML file with option defaults; flags given on the command line win");
    app.set_help_flag("--help", "print this help");
    app.require_subcommand(1, 1);

    app.add_option("--x", config.x_path, "predictor CSV (first row grid, one curve per row)");
    app.add_option("--y", config.y_path, "response CSV");
    app.add_option("--out", config.out_dir, "output directory")->capture_default_str();
    app.add_option("--method", config.method, "fcr, fpr or both")
        ->check(CLI::IsMember({"fcr", "fpr", "both"}));
    app.add_option("--h", config.bandwidths, "bandwidth list, e.g. 0.04,0.06")->delimiter(',');
    app.add_option("--l", config.truncations, "truncation list, e.g. 1,2,3,4")->delimiter(',');
    app.add_option("--ridge", config.ridge, "ridge added to score covariances in canonical analysis")
        ->capture_default_str();
    app.add_option("--seed", config.seed, "random seed")->capture_default_str();
    app.add_option("--sigma-mode", sigma_mode, "FPR cross moments: smooth or score")
        ->check(CLI::IsMember({"smooth", "score"}))
        ->capture_default_str();
    app.add_option("--model", config.model, "simulation model: standard or inverse-square")
        ->check(CLI::IsMember({"standard", "inverse-square"}))
        ->capture_default_str();
    app.add_option("--n", config.subjects, "number of simulated subjects")->capture_default_str();
    app.add_option("--noise", config.noise, "noise sd as a fraction of the signal scale")->capture_default_str();
    app.add_option("--points", config.points, "grid points per simulated curve")->capture_default_str();
    app.add_option("--components", config.components, "components of the inverse-square model")
        ->capture_default_str();
    app.add_option("--random-models", config.random_models, "random models in the check battery")
        ->capture_default_str();
    app.add_option("--trajectories", config.trajectories, "subjects written to trajectories.csv")
        ->capture_default_str();
    app.add_flag("--svg", config.svg, "also draw trajectories.svg");

    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "draw a sample from a built-in model"},
        {"fit", "fit one (h, L) and write beta.csv, predictions.csv, summary.csv"},
        {"cv", "leave-one-curve-out cross-validation over the (h, L) grid"},
        {"check", "run the population verification battery"},
        {"compare", "cross-validate FCR and FPR and report method, h, L, PE"},
    };
    for (const auto& [name, help] : commands)
        app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    config.command = app.get_subcommands().front()->get_name();

    try {
        config.sigma_mode = funreg::parse_sigma_mode(sigma_mode);
        return funreg::app::run(config, std::cout);
    } catch (const funreg::Error& e) {
        std::cerr << "funreg " << config.command << ": " << e.what() << '\n';
        return funreg::app::exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "funreg " << config.command << ": internal error: " << e.what() << '\n';
        return 3;
    }
}
