#include "funreg/population.hpp"
#include "funreg/selection.hpp"

#include "testing.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace funreg;
using funreg::testkit::Gen;
using funreg::testkit::max_abs;
namespace pop = funreg::population;

namespace {

ErrorCode code_of(auto&& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected funreg::Error";
    return ErrorCode::infeasible;
}

TuningGrid single(Method m, double h, Eigen::Index l)
{
    TuningGrid g;
    g.bandwidths = {Bandwidth(h)};
    g.truncations = {l};
    g.method = m;
    return g;
}

FunctionalSample permute_rows(const FunctionalSample& s, const std::vector<Eigen::Index>& order)
{
    Eigen::MatrixXd m(s.subjects(), s.points());
    for (Eigen::Index i = 0; i < s.subjects(); ++i)
        m.row(i) = s.matrix().row(order[static_cast<std::size_t>(i)]);
    return FunctionalSample(s.grid(), std::move(m));
}

} // namespace

TEST(Loocv, PicksTwoComponentsOnNoiselessRankTwoData)
{
    const auto model = pop::standard_model(30, 0.0);
    const auto [x, y] = pop::simulate(model, 60, 21);
    TuningGrid grid;
    grid.bandwidths = {Bandwidth(1.6 * x.grid().max_spacing()), Bandwidth(2.5 * x.grid().max_spacing())};
    grid.truncations = {1, 2, 3, 4};
    for (Method m : {Method::fcr, Method::fpr}) {
        grid.method = m;
        const CvReport r = loocv(x, y, grid);
        EXPECT_EQ(r.best().truncation, 2) << to_string(m);
        EXPECT_EQ(r.cells.size(), 8u);
    }
}

TEST(Loocv, TiesGoToSmallerTruncationThenBandwidth)
{
    // Identical constant pairs: every cell predicts the observed curve.
    const Grid g = testkit::unit_grid(8);
    const FunctionalSample x(g, Eigen::MatrixXd::Constant(3, 8, 1.0));
    const FunctionalSample y(g, Eigen::MatrixXd::Constant(3, 8, -2.0));
    TuningGrid grid;
    grid.bandwidths = {Bandwidth(0.4), Bandwidth(0.3)};
    grid.truncations = {2, 1};
    const CvReport r = loocv(x, y, grid);
    for (const CvCell& c : r.cells) {
        ASSERT_TRUE(c.feasible) << c.failure;
        EXPECT_EQ(c.pe, 0.0);
    }
    EXPECT_EQ(r.chosen, 3u);
}

TEST(Loocv, SingleCellMatchesManualFolds)
{
    const auto model = pop::standard_model(25, 0.1);
    const auto [x, y] = pop::simulate(model, 20, 22);
    const double h = 2.0 * x.grid().max_spacing();
    for (Method m : {Method::fcr, Method::fpr}) {
        const CvReport r = loocv(x, y, single(m, h, 2), {true});
        double total = 0.0;
        Eigen::MatrixXd preds(20, y.points());
        for (Eigen::Index i = 0; i < 20; ++i) {
            const RegressionSurface fold = fit(m, x.without(i), y.without(i), Bandwidth(h), 2);
            const SampledCurve p = predict(fold, x.curve(i));
            preds.row(i) = p.values().transpose();
            const FunctionalSample obs(y.grid(), y.matrix().row(i));
            const FunctionalSample est(y.grid(), p.values().transpose());
            total += prediction_error(obs, est);
        }
        EXPECT_NEAR(r.best().pe, total / 20.0, 1e-12) << to_string(m);
        EXPECT_LT(max_abs(r.predictions.front() - preds), 1e-12);
    }
}

TEST(Loocv, InvariantUnderSubjectPermutation)
{
    const auto model = pop::standard_model(25, 0.1);
    const auto [x, y] = pop::simulate(model, 25, 23);
    TuningGrid grid;
    grid.bandwidths = {Bandwidth(2.0 * x.grid().max_spacing())};
    grid.truncations = {1, 2};
    const CvReport a = loocv(x, y, grid);
    Gen gen(24);
    std::vector<Eigen::Index> order(25);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::shuffle(order.begin(), order.end(), gen.engine());
    const CvReport b = loocv(permute_rows(x, order), permute_rows(y, order), grid);
    for (std::size_t c = 0; c < a.cells.size(); ++c)
        EXPECT_NEAR(a.cells[c].pe, b.cells[c].pe, 1e-12 * std::max(1.0, a.cells[c].pe));
    EXPECT_EQ(a.chosen, b.chosen);
}

TEST(Loocv, ResponseShiftLeavesErrorUnchanged)
{
    const auto model = pop::standard_model(25, 0.1);
    const auto [x, y] = pop::simulate(model, 25, 25);
    const FunctionalSample shifted(y.grid(), y.matrix().array() + 3.5);
    const TuningGrid grid = single(Method::fcr, 2.0 * x.grid().max_spacing(), 2);
    EXPECT_NEAR(loocv(x, y, grid).best().pe, loocv(x, shifted, grid).best().pe, 1e-8);
}

TEST(Loocv, Deterministic)
{
    const auto model = pop::standard_model(25, 0.1);
    const auto [x, y] = pop::simulate(model, 20, 26);
    TuningGrid grid = single(Method::fpr, 2.0 * x.grid().max_spacing(), 2);
    const CvReport a = loocv(x, y, grid);
    const CvReport b = loocv(x, y, grid);
    EXPECT_EQ(a.best().pe, b.best().pe);
}

TEST(Loocv, InfeasibleCells)
{
    const auto model = pop::standard_model(6, 0.1);
    const auto [x, y] = pop::simulate(model, 10, 27);
    TuningGrid grid;
    grid.bandwidths = {Bandwidth(0.4)};
    grid.truncations = {1, 7};
    const CvReport r = loocv(x, y, grid);
    EXPECT_TRUE(r.cells[0].feasible);
    EXPECT_FALSE(r.cells[1].feasible);
    EXPECT_FALSE(r.cells[1].failure.empty());
    EXPECT_TRUE(std::isnan(r.cells[1].pe));
    EXPECT_EQ(r.chosen, 0u);

    grid.truncations = {7};
    EXPECT_EQ(code_of([&] { loocv(x, y, grid); }), ErrorCode::infeasible);
}

TEST(Loocv, Validation)
{
    const auto model = pop::standard_model(10, 0.1);
    const auto [x, y] = pop::simulate(model, 10, 28);
    TuningGrid empty;
    EXPECT_EQ(code_of([&] { loocv(x, y, empty); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { loocv(x, y, single(Method::fcr, 0.3, 0)); }), ErrorCode::invalid_argument);
    const FunctionalSample two(x.grid(), x.matrix().topRows(2));
    EXPECT_EQ(code_of([&] { loocv(two, FunctionalSample(y.grid(), y.matrix().topRows(2)),
                                  single(Method::fcr, 0.3, 1)); }),
              ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { loocv(two, y, single(Method::fcr, 0.3, 1)); }), ErrorCode::dimension_mismatch);
}
