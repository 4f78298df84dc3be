#include "funreg/core.hpp"

#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace funreg;
using funreg::testkit::Gen;

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

} // namespace

TEST(Grid, RejectsDegenerateInput)
{
    EXPECT_EQ(code_of([] { Grid({0.0}); }), ErrorCode::invalid_grid);
    EXPECT_EQ(code_of([] { Grid({0.0, 1.0, 1.0}); }), ErrorCode::invalid_grid);
    EXPECT_EQ(code_of([] { Grid({0.0, 2.0, 1.0}); }), ErrorCode::invalid_grid);
    EXPECT_EQ(code_of([] { Grid({0.0, std::numeric_limits<double>::quiet_NaN()}); }), ErrorCode::invalid_grid);
    EXPECT_EQ(code_of([] { Grid({0.0, std::numeric_limits<double>::infinity()}); }), ErrorCode::invalid_grid);
}

TEST(Grid, UniformHitsEndpoints)
{
    const Grid g = Grid::uniform(-1.0, 3.0, 9);
    EXPECT_EQ(g.size(), 9u);
    EXPECT_EQ(g.front(), -1.0);
    EXPECT_EQ(g.back(), 3.0);
    EXPECT_DOUBLE_EQ(g.max_spacing(), 0.5);
    EXPECT_TRUE(g == Grid::uniform(-1.0, 3.0, 9));
    EXPECT_FALSE(g == Grid::uniform(-1.0, 3.0, 10));
}

TEST(QuadratureWeights, EquidistantGridRepeatsSpacing)
{
    const auto w = quadrature_weights(Grid({0.0, 0.25, 0.5, 0.75, 1.0}));
    ASSERT_EQ(w.size(), 5);
    for (Eigen::Index j = 0; j < 5; ++j)
        EXPECT_DOUBLE_EQ(w[j], 0.25);
}

TEST(QuadratureWeights, LeftExtensionOnIrregularGrid)
{
    const auto w = quadrature_weights(Grid({0.0, 1.0, 3.0}));
    EXPECT_DOUBLE_EQ(w[0], 1.0);
    EXPECT_DOUBLE_EQ(w[1], 1.0);
    EXPECT_DOUBLE_EQ(w[2], 2.0);
}

TEST(QuadratureWeights, TranslationInvariant)
{
    Gen gen(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(gen.integer(2, 40));
        const Grid g = gen.irregular_grid(n, 0.0, gen.uniform(0.5, 5.0));
        const double shift = gen.uniform(-100.0, 100.0);
        std::vector<double> moved(g.points().begin(), g.points().end());
        for (double& p : moved)
            p += shift;
        const auto a = quadrature_weights(g).values();
        const auto b = quadrature_weights(Grid(moved)).values();
        EXPECT_LT(testkit::max_abs(a - b), 1e-12) << "trial " << trial;
    }
}

TEST(Integrate, ConstantOneSumsTheWeights)
{
    const Grid g = testkit::unit_grid(5);
    const SampledCurve one(g, Eigen::VectorXd::Ones(5));
    EXPECT_DOUBLE_EQ(integrate(one, quadrature_weights(g)), 1.25);
    EXPECT_EQ(integrate(SampledCurve::zeros(g), quadrature_weights(g)), 0.0);
}

TEST(Integrate, IdentityOn101Points)
{
    const Grid g = testkit::unit_grid(101);
    const SampledCurve t(g, g.vector());
    EXPECT_NEAR(integrate(t, quadrature_weights(g)), 0.505, 1e-12);
}

TEST(Integrate, LengthMismatch)
{
    const SampledCurve f = SampledCurve::zeros(testkit::unit_grid(4));
    EXPECT_EQ(code_of([&] { integrate(f, quadrature_weights(testkit::unit_grid(5))); }),
              ErrorCode::dimension_mismatch);
}

TEST(Integrate, Linear)
{
    Gen gen(12);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<Eigen::Index>(gen.integer(2, 60));
        const Grid g = gen.irregular_grid(static_cast<std::size_t>(n), -1.0, 2.0);
        const auto w = quadrature_weights(g);
        const Eigen::VectorXd f = gen.normal_vector(n);
        const Eigen::VectorXd h = gen.normal_vector(n);
        const double a = gen.normal();
        const double b = gen.normal();
        const double lhs = integrate(SampledCurve(g, a * f + b * h), w);
        const double rhs = a * integrate(SampledCurve(g, f), w) + b * integrate(SampledCurve(g, h), w);
        const double scale = std::abs(a) * f.cwiseAbs().dot(w.values()) + std::abs(b) * h.cwiseAbs().dot(w.values());
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, scale));
    }
}

TEST(InnerProduct, ZeroAndSymmetry)
{
    Gen gen(13);
    const Grid g = testkit::unit_grid(37);
    const auto w = quadrature_weights(g);
    EXPECT_EQ(inner_product(SampledCurve::zeros(g), SampledCurve::zeros(g), w), 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        const SampledCurve f(g, gen.normal_vector(37));
        const SampledCurve h(g, gen.normal_vector(37));
        EXPECT_NEAR(inner_product(f, h, w), inner_product(h, f, w), 1e-14);
        EXPECT_GE(inner_product(f, f, w), 0.0);
    }
}

TEST(InnerProduct, SineCosineNearlyOrthogonal)
{
    const Grid g = testkit::unit_grid(200);
    const SampledCurve s(g, testkit::evaluate(g, [](double t) { return std::sin(2 * std::numbers::pi * t); }));
    const SampledCurve c(g, testkit::evaluate(g, [](double t) { return std::cos(2 * std::numbers::pi * t); }));
    EXPECT_NEAR(inner_product(s, c, quadrature_weights(g)), 0.0, 1e-3);
}

TEST(InnerProduct, GridMismatch)
{
    const SampledCurve a = SampledCurve::zeros(testkit::unit_grid(5));
    const SampledCurve b = SampledCurve::zeros(testkit::unit_grid(5, 0.0, 2.0));
    EXPECT_EQ(code_of([&] { inner_product(a, b, quadrature_weights(a.grid())); }), ErrorCode::dimension_mismatch);
}

TEST(Containers, ValidateShapesAndValues)
{
    const Grid g = testkit::unit_grid(4);
    EXPECT_EQ(code_of([&] { SampledCurve(g, Eigen::VectorXd::Zero(3)); }), ErrorCode::dimension_mismatch);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(4);
    bad[2] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(code_of([&] { SampledCurve(g, bad); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { FunctionalSample(g, Eigen::MatrixXd::Zero(0, 4)); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] { FunctionalSample(g, Eigen::MatrixXd::Zero(2, 5)); }), ErrorCode::dimension_mismatch);
    EXPECT_EQ(code_of([&] { Surface(g, g, Eigen::MatrixXd::Zero(4, 3)); }), ErrorCode::dimension_mismatch);
}

TEST(FunctionalSample, WithoutDropsOneRow)
{
    const Grid g = testkit::unit_grid(3);
    Eigen::MatrixXd m(3, 3);
    m << 1, 2, 3, 4, 5, 6, 7, 8, 9;
    const FunctionalSample s(g, m);
    const FunctionalSample rest = s.without(1);
    ASSERT_EQ(rest.subjects(), 2);
    EXPECT_EQ(rest.matrix()(0, 0), 1.0);
    EXPECT_EQ(rest.matrix()(1, 2), 9.0);
    EXPECT_FALSE(rest.is_centered());
    EXPECT_EQ(code_of([&] { FunctionalSample(g, m.topRows(1)).without(0); }), ErrorCode::invalid_argument);
}

TEST(QuadratureNorm, ConstantSurface)
{
    const Grid s = testkit::unit_grid(5);
    const Grid t = Grid({0.0, 1.0, 3.0});
    const Surface c(s, t, Eigen::MatrixXd::Constant(5, 3, 2.0));
    // measure 1.25 x 4, value 2: sqrt(4 * 5)
    EXPECT_NEAR(quadrature_norm(c), std::sqrt(20.0), 1e-14);
    EXPECT_NEAR(quadrature_distance(c, Surface::zeros(s, t)), std::sqrt(20.0), 1e-14);
}
