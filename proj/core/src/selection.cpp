#include "funreg/selection.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace funreg {

namespace {

void validate(const TuningGrid& grid)
{
    if (grid.bandwidths.empty() || grid.truncations.empty())
        throw Error(ErrorCode::invalid_argument, "tuning grid needs at least one bandwidth and one truncation");
    for (Eigen::Index l : grid.truncations)
        if (l < 1)
            throw Error(ErrorCode::invalid_argument, "truncations must be at least 1");
}

bool better(const CvCell& a, const CvCell& b)
{
    if (a.pe != b.pe)
        return a.pe < b.pe;
    if (a.truncation != b.truncation)
        return a.truncation < b.truncation;
    return a.bandwidth < b.bandwidth;
}

} // namespace

CvReport loocv(const FunctionalSample& x, const FunctionalSample& y, const TuningGrid& grid,
               const CvOptions& options)
{
    validate(grid);
    if (x.subjects() != y.subjects())
        throw Error(ErrorCode::dimension_mismatch, "predictor and response differ in sample size");
    const Eigen::Index n = x.subjects();
    if (n < 3)
        throw Error(ErrorCode::invalid_argument, "cross-validation needs at least 3 pairs");

    const std::size_t nl = grid.truncations.size();
    const Eigen::Index limit = std::min(x.points(), y.points());
    const Eigen::Index max_l =
        std::min(limit, *std::max_element(grid.truncations.begin(), grid.truncations.end()));
    const bool cross = grid.method == Method::fpr && grid.options.sigma_mode == SigmaMode::smooth;
    const QuadratureWeights wy = quadrature_weights(y.grid());

    CvReport report{grid.method, {}, 0, {}};
    std::vector<Eigen::VectorXd> fold_errors;
    for (const Bandwidth& h : grid.bandwidths) {
        for (Eigen::Index l : grid.truncations) {
            CvCell cell{h.value(), l, std::numeric_limits<double>::quiet_NaN(), true, {}};
            if (l > limit) {
                cell.feasible = false;
                cell.failure = "truncation exceeds the number of grid points";
            }
            report.cells.push_back(std::move(cell));
            fold_errors.emplace_back(Eigen::VectorXd::Zero(n));
            if (options.keep_predictions)
                report.predictions.emplace_back(Eigen::MatrixXd::Zero(n, y.points()));
        }
    }

    for (std::size_t hi = 0; hi < grid.bandwidths.size(); ++hi) {
        const Bandwidth h = grid.bandwidths[hi];
        const std::size_t base = hi * nl;
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto open = [&](std::size_t li) { return report.cells[base + li].feasible; };
            bool any_open = false;
            for (std::size_t li = 0; li < nl; ++li)
                any_open = any_open || open(li);
            if (!any_open)
                break;

            std::optional<PreparedPair> prepared;
            try {
                prepared.emplace(x.without(i), y.without(i), h, max_l, cross);
            } catch (const Error& e) {
                if (!e.is_numerical())
                    throw;
                for (std::size_t li = 0; li < nl; ++li) {
                    CvCell& cell = report.cells[base + li];
                    if (cell.feasible) {
                        cell.feasible = false;
                        cell.failure = "fold " + std::to_string(i + 1) + ": " + e.what();
                    }
                }
                break;
            }

            const SampledCurve held_x = x.curve(i);
            for (std::size_t li = 0; li < nl; ++li) {
                if (!open(li))
                    continue;
                CvCell& cell = report.cells[base + li];
                try {
                    const RegressionSurface model = prepared->fit(grid.method, cell.truncation, grid.options);
                    const SampledCurve pred = predict(model, held_x);
                    const Eigen::VectorXd diff = y.matrix().row(i).transpose() - pred.values();
                    fold_errors[base + li][i] = diff.cwiseAbs2().dot(wy.values());
                    if (options.keep_predictions)
                        report.predictions[base + li].row(i) = pred.values().transpose();
                } catch (const Error& e) {
                    if (!e.is_numerical())
                        throw;
                    cell.feasible = false;
                    cell.failure = "fold " + std::to_string(i + 1) + ": " + e.what();
                }
            }
        }
    }

    bool found = false;
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        CvCell& cell = report.cells[c];
        if (!cell.feasible) {
            if (options.keep_predictions)
                report.predictions[c].resize(0, 0);
            continue;
        }
        cell.pe = fold_errors[c].sum() / static_cast<double>(n);
        if (!found || better(cell, report.cells[report.chosen])) {
            report.chosen = c;
            found = true;
        }
    }
    if (!found)
        throw Error(ErrorCode::infeasible, "every tuning cell failed in some fold");
    return report;
}

} // namespace funreg
