#include "funreg/app/run.hpp"

#include "funreg/app/csv.hpp"
#include "funreg/app/svg.hpp"
#include "funreg/population.hpp"
#include "funreg/selection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

namespace funreg::app {

namespace fs = std::filesystem;
namespace pop = funreg::population;

namespace {

constexpr double kIdentityTol = 1e-8;
constexpr double kOrderingTol = -1e-10;

void require(bool ok, const std::string& message)
{
    if (!ok)
        throw Error(ErrorCode::invalid_argument, message);
}

std::string clean(std::string text)
{
    std::replace(text.begin(), text.end(), ',', ';');
    std::replace(text.begin(), text.end(), '\n', ' ');
    return text;
}

std::vector<Method> methods_for(const RunConfig& config, const std::string& fallback)
{
    const std::string m = config.method.empty() ? fallback : config.method;
    if (m == "both")
        return {Method::fcr, Method::fpr};
    return {parse_method(m)};
}

std::pair<FunctionalSample, FunctionalSample> load_pair(const RunConfig& config)
{
    require(!config.x_path.empty() && !config.y_path.empty(), config.command + " needs --x and --y");
    FunctionalSample x = load_sample(config.x_path, Role::predictor);
    FunctionalSample y = load_sample(config.y_path, Role::response);
    if (x.subjects() != y.subjects())
        throw Error(ErrorCode::dimension_mismatch, "predictor file has " + std::to_string(x.subjects())
                                                       + " curves but response file has "
                                                       + std::to_string(y.subjects()));
    return {std::move(x), std::move(y)};
}

TuningGrid tuning_grid(const RunConfig& config, const FunctionalSample& x, const FunctionalSample& y,
                       Method method)
{
    TuningGrid grid;
    const std::vector<double> hs =
        config.bandwidths.empty() ? default_bandwidths(x.grid(), y.grid(), false) : config.bandwidths;
    for (double h : hs)
        grid.bandwidths.emplace_back(h);
    if (config.truncations.empty())
        grid.truncations = {1, 2, 3, 4};
    else
        grid.truncations.assign(config.truncations.begin(), config.truncations.end());
    grid.method = method;
    grid.options = FitOptions{config.ridge, config.sigma_mode};
    return grid;
}

void note(std::ostream& log, const fs::path& path)
{
    log << "wrote " << path.string() << '\n';
}

Table summary_table(const std::vector<std::pair<std::string, std::string>>& entries)
{
    Table table{{"key", "value"}, {}};
    for (const auto& [k, v] : entries)
        table.rows.push_back({k, clean(v)});
    return table;
}

void append_cv_rows(Table& table, const CvReport& report)
{
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        const CvCell& cell = report.cells[c];
        table.rows.push_back({std::string(to_string(report.method)), format_number(cell.bandwidth),
                              std::to_string(cell.truncation), format_number(cell.pe),
                              cell.feasible ? "1" : "0", c == report.chosen ? "1" : "0", clean(cell.failure)});
    }
}

Table cv_table()
{
    return Table{{"method", "h", "L", "pe", "feasible", "chosen", "failure"}, {}};
}

int run_simulate(const RunConfig& config, std::ostream& log)
{
    pop::PopulationModel model = [&] {
        if (config.model == "standard")
            return pop::standard_model(config.points, config.noise);
        if (config.model == "inverse-square") {
            pop::PopulationModel m = pop::inverse_square_model(config.components, config.points);
            return m.with_noise(config.noise * m.signal_scale());
        }
        throw Error(ErrorCode::invalid_argument, "unknown model '" + config.model + "'");
    }();
    const auto [x, y] = pop::simulate(model, config.subjects, config.seed);
    const Surface beta = pop::pop_beta_star(model, pop::pop_canonical(model).size());

    const fs::path out = config.out_dir;
    save_sample(out / "x.csv", x);
    note(log, out / "x.csv");
    save_sample(out / "y.csv", y);
    note(log, out / "y.csv");
    save_surface(out / "beta_true.csv", beta);
    note(log, out / "beta_true.csv");
    save_table(out / "model.csv",
               summary_table({{"model", config.model},
                              {"subjects", std::to_string(config.subjects)},
                              {"seed", std::to_string(config.seed)},
                              {"noise_sd", format_number(model.noise_sd())},
                              {"signal_scale", format_number(model.signal_scale())},
                              {"noise_floor", format_number(model.noise_floor())}}));
    note(log, out / "model.csv");
    return 0;
}

int run_fit(const RunConfig& config, std::ostream& log)
{
    const std::vector<Method> methods = methods_for(config, "fcr");
    require(methods.size() == 1, "fit takes a single method, fcr or fpr");
    require(config.bandwidths.size() <= 1, "fit takes a single bandwidth");
    require(config.truncations.size() <= 1, "fit takes a single truncation");
    const auto [x, y] = load_pair(config);

    const double h = config.bandwidths.empty() ? default_bandwidths(x.grid(), y.grid(), true).front()
                                               : config.bandwidths.front();
    const Eigen::Index l = config.truncations.empty() ? 2 : config.truncations.front();
    const RegressionSurface model = fit(methods.front(), x, y, Bandwidth(h), l, {config.ridge, config.sigma_mode});
    const FunctionalSample fitted = predict(model, x);
    const double pe = prediction_error(y, fitted);

    const fs::path out = config.out_dir;
    save_surface(out / "beta.csv", model.beta);
    note(log, out / "beta.csv");
    save_sample(out / "predictions.csv", fitted);
    note(log, out / "predictions.csv");
    save_table(out / "summary.csv",
               summary_table({{"method", std::string(to_string(model.method))},
                              {"h", format_number(h)},
                              {"L", std::to_string(l)},
                              {"ridge", format_number(config.ridge)},
                              {"sigma_mode", std::string(to_string(config.sigma_mode))},
                              {"subjects", std::to_string(x.subjects())},
                              {"in_sample_pe", format_number(pe)}}));
    note(log, out / "summary.csv");
    log << to_string(model.method) << " h=" << format_number(h) << " L=" << l
        << " in-sample PE=" << format_number(pe) << '\n';
    return 0;
}

int run_cv(const RunConfig& config, std::ostream& log)
{
    const auto [x, y] = load_pair(config);
    Table table = cv_table();
    for (Method method : methods_for(config, "both")) {
        const CvReport report = loocv(x, y, tuning_grid(config, x, y, method));
        append_cv_rows(table, report);
        log << to_string(method) << " chose h=" << format_number(report.best().bandwidth)
            << " L=" << report.best().truncation << " PE=" << format_number(report.best().pe) << '\n';
    }
    save_table(config.out_dir / "cv_report.csv", table);
    note(log, config.out_dir / "cv_report.csv");
    return 0;
}

struct CheckBattery {
    Table table{{"model", "check", "value", "tolerance", "pass"}, {}};
    bool all_pass = true;

    void add(const std::string& model, const std::string& check, double value, double tol, bool upper)
    {
        const bool pass = upper ? value <= tol : value >= tol;
        all_pass = all_pass && pass;
        table.rows.push_back({model, check, format_number(value), format_number(tol), pass ? "1" : "0"});
    }
};

void check_model(CheckBattery& battery, const std::string& name, const pop::PopulationModel& model)
{
    const pop::PopulationCanonical pc = pop::pop_canonical(model);
    battery.add(name, "cross_cov_decomposition", pop::verify_cross_cov_decomposition(model), kIdentityTol, true);

    double truncation = 0.0;
    double tail = 0.0;
    double ordering = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k <= pc.size(); ++k) {
        const pop::TruncationCheck t = pop::verify_truncation_identity(model, k);
        truncation = std::max(truncation, t.residual);
        tail = std::max(tail, t.tail_residual);
        ordering = std::min(ordering, pop::verify_operator_ordering(model, k).min());
    }
    battery.add(name, "truncation_identity", truncation, kIdentityTol, true);
    battery.add(name, "truncation_tail", tail, kIdentityTol, true);
    battery.add(name, "operator_ordering", ordering, kOrderingTol, false);

    const pop::FittedCorrelationCheck fc = pop::verify_fitted_correlations(model);
    battery.add(name, "fitted_correlations", fc.max_correlation_error, kIdentityTol, true);
    battery.add(name, "fitted_weights", fc.max_weight_error, kIdentityTol, true);
    battery.add(name, "fitted_variates", fc.max_variate_error, kIdentityTol, true);

    const pop::Covariances cov = pop::pop_covariances(model);
    const Surface oracle = pop::solve_normal_equation(cov.xx, cov.xy);
    const Surface beta = pop::pop_beta_star(model, pc.size());
    battery.add(name, "normal_equation", (oracle.values() - beta.values()).cwiseAbs().maxCoeff(), kIdentityTol,
                true);
}

int run_check(const RunConfig& config, std::ostream& log)
{
    CheckBattery battery;
    check_model(battery, "standard", pop::standard_model());
    check_model(battery, "inverse-square", pop::inverse_square_model(config.components));
    std::mt19937_64 rng(config.seed);
    std::uniform_int_distribution<long> size(1, 6);
    std::uniform_int_distribution<long> grid(30, 60);
    for (long r = 0; r < config.random_models; ++r) {
        const long m = size(rng);
        const long nx = grid(rng);
        const long ny = grid(rng);
        check_model(battery, "random-" + std::to_string(r + 1), pop::random_model(rng, m, nx, ny));
    }
    save_table(config.out_dir / "check_report.csv", battery.table);
    note(log, config.out_dir / "check_report.csv");
    std::size_t failed = 0;
    for (const auto& row : battery.table.rows)
        failed += row[4] == "0";
    log << battery.table.rows.size() - failed << " of " << battery.table.rows.size() << " checks passed\n";
    return battery.all_pass ? 0 : 3;
}

int run_compare(const RunConfig& config, std::ostream& log)
{
    const auto [x, y] = load_pair(config);
    const fs::path out = config.out_dir;
    Table cv = cv_table();
    Table compare{{"method", "h", "L", "PE"}, {}};
    std::vector<Eigen::MatrixXd> loo;
    std::vector<std::string> names;
    for (Method method : {Method::fcr, Method::fpr}) {
        const CvReport report = loocv(x, y, tuning_grid(config, x, y, method), CvOptions{true});
        append_cv_rows(cv, report);
        const CvCell& best = report.best();
        compare.rows.push_back({std::string(to_string(method)), format_number(best.bandwidth),
                                std::to_string(best.truncation), format_number(best.pe)});
        const RegressionSurface model = fit(method, x, y, Bandwidth(best.bandwidth), best.truncation,
                                            {config.ridge, config.sigma_mode});
        const std::string name = method == Method::fcr ? "fcr" : "fpr";
        save_surface(out / ("beta_" + name + ".csv"), model.beta);
        note(log, out / ("beta_" + name + ".csv"));
        loo.push_back(report.predictions[report.chosen]);
        names.push_back(name);
        log << to_string(method) << " h=" << format_number(best.bandwidth) << " L=" << best.truncation
            << " PE=" << format_number(best.pe) << '\n';
    }
    save_table(out / "cv_report.csv", cv);
    note(log, out / "cv_report.csv");
    save_table(out / "compare.csv", compare);
    note(log, out / "compare.csv");

    // Observed and leave-one-out predicted trajectories of the first subjects.
    const Eigen::Index shown = std::min<Eigen::Index>(config.trajectories, y.subjects());
    Table traj{{"subject", "t", "observed", "fcr", "fpr"}, {}};
    for (Eigen::Index i = 0; i < shown; ++i)
        for (Eigen::Index j = 0; j < y.points(); ++j)
            traj.rows.push_back({std::to_string(i + 1), format_number(y.grid()[static_cast<std::size_t>(j)]),
                                 format_number(y.matrix()(i, j)), format_number(loo[0](i, j)),
                                 format_number(loo[1](i, j))});
    save_table(out / "trajectories.csv", traj);
    note(log, out / "trajectories.csv");
    if (config.svg) {
        std::vector<TrajectoryPanel> panels;
        for (Eigen::Index i = 0; i < shown; ++i)
            panels.push_back({"subject " + std::to_string(i + 1), y.matrix().row(i).transpose(),
                              loo[0].row(i).transpose(), loo[1].row(i).transpose()});
        write_trajectory_svg(out / "trajectories.svg", y.grid(), panels);
        note(log, out / "trajectories.svg");
    }
    return 0;
}

} // namespace

void validate(const RunConfig& config)
{
    static const std::vector<std::string> commands{"simulate", "fit", "cv", "check", "compare"};
    require(std::find(commands.begin(), commands.end(), config.command) != commands.end(),
            "unknown command '" + config.command + "'");
    require(config.method.empty() || config.method == "fcr" || config.method == "fpr" || config.method == "both",
            "method must be fcr, fpr or both");
    for (double h : config.bandwidths)
        require(std::isfinite(h) && h > 0.0, "bandwidths must be positive");
    for (long l : config.truncations)
        require(l >= 1, "truncations must be at least 1");
    require(std::isfinite(config.ridge) && config.ridge >= 0.0, "ridge must be nonnegative");
    require(config.subjects >= 1, "--n must be at least 1");
    require(std::isfinite(config.noise) && config.noise >= 0.0, "--noise must be nonnegative");
    require(config.points >= 2, "--points must be at least 2");
    require(config.components >= 1, "--components must be at least 1");
    require(config.random_models >= 0, "--random-models must be nonnegative");
    require(config.trajectories >= 0, "--trajectories must be nonnegative");
    require(config.model == "standard" || config.model == "inverse-square",
            "model must be standard or inverse-square");
}

std::vector<double> default_bandwidths(const Grid& x, const Grid& y, bool single)
{
    const double step = std::max(x.max_spacing(), y.max_spacing());
    if (single)
        return {1.6 * step};
    return {1.25 * step, 1.6 * step, 2.5 * step, 4.0 * step};
}

int run(const RunConfig& config, std::ostream& log)
{
    validate(config);
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec)
        throw Error(ErrorCode::invalid_argument,
                    "cannot create output directory " + config.out_dir.string() + ": " + ec.message());
    if (config.command == "simulate")
        return run_simulate(config, log);
    if (config.command == "fit")
        return run_fit(config, log);
    if (config.command == "cv")
        return run_cv(config, log);
    if (config.command == "check")
        return run_check(config, log);
    return run_compare(config, log);
}

int exit_code(const Error& error) noexcept
{
    return error.is_numerical() ? 3 : 2;
}

} // namespace funreg::app
