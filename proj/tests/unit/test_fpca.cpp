#include "funreg/fpca.hpp"
#include "funreg/population.hpp"

#include "testing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace funreg;
using funreg::testkit::Gen;
using funreg::testkit::max_abs;

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

Eigen::MatrixXd two_orthonormal(const Grid& g)
{
    return population::sine_basis(g, 2);
}

} // namespace

TEST(Mean, IdenticalLinearCurves)
{
    const Grid g = testkit::unit_grid(15);
    const Eigen::RowVectorXd f = (2.0 - 3.0 * g.vector().array()).matrix().transpose();
    const FunctionalSample s(g, f.replicate(4, 1));
    EXPECT_LT(max_abs(estimate_mean(s, Bandwidth(0.2)).values() - f.transpose()), 1e-12);
}

TEST(Mean, OppositeCurvesCancel)
{
    const Grid g = testkit::unit_grid(15);
    Eigen::MatrixXd m(2, 15);
    m.row(0) = (1.0 + g.vector().array()).matrix().transpose();
    m.row(1) = -m.row(0);
    EXPECT_LT(max_abs(estimate_mean(FunctionalSample(g, m), Bandwidth(0.2)).values()), 1e-14);
}

TEST(Mean, SmoothedAverageMatchesDirectFit)
{
    Gen gen(31);
    const Grid g = testkit::unit_grid(40);
    Eigen::MatrixXd m(100, 40);
    for (Eigen::Index i = 0; i < 100; ++i)
        for (Eigen::Index j = 0; j < 40; ++j)
            m(i, j) = std::sin(2 * std::numbers::pi * g[static_cast<std::size_t>(j)]) + 0.3 * gen.normal();
    const FunctionalSample s(g, m);
    const Eigen::VectorXd avg = m.colwise().mean().transpose();
    const SampledCurve est = estimate_mean(s, Bandwidth(0.08));
    // Per-target weighted least squares on the raw average.
    for (std::size_t t = 0; t < g.size(); ++t) {
        double s0 = 0, s1 = 0, s2 = 0, r0 = 0, r1 = 0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double d = g[j] - g[t];
            const double k = epanechnikov(d / 0.08);
            s0 += k;
            s1 += k * d;
            s2 += k * d * d;
            r0 += k * avg[static_cast<Eigen::Index>(j)];
            r1 += k * d * avg[static_cast<Eigen::Index>(j)];
        }
        const double intercept = (s2 * r0 - s1 * r1) / (s0 * s2 - s1 * s1);
        EXPECT_NEAR(est.values()[static_cast<Eigen::Index>(t)], intercept, 1e-12);
    }
}

TEST(Center, Identities)
{
    Gen gen(32);
    const Grid g = testkit::unit_grid(12);
    const FunctionalSample s(g, gen.normal_matrix(7, 12));
    const FunctionalSample c = center(s, cross_sectional_mean(s));
    EXPECT_TRUE(c.is_centered());
    EXPECT_LT(max_abs(c.matrix().colwise().sum()), 1e-12);
    ASSERT_TRUE(c.mean_curve().has_value());

    const FunctionalSample again = center(c, SampledCurve::zeros(g));
    EXPECT_EQ(max_abs(again.matrix() - c.matrix()), 0.0);

    const FunctionalSample one(g, s.matrix().topRows(1));
    EXPECT_EQ(max_abs(center(one, cross_sectional_mean(one)).matrix()), 0.0);

    EXPECT_EQ(code_of([&] { center(s, SampledCurve::zeros(testkit::unit_grid(11))); }),
              ErrorCode::dimension_mismatch);
}

TEST(Covariance, Preconditions)
{
    const Grid g = testkit::unit_grid(10);
    const FunctionalSample raw(g, Eigen::MatrixXd::Zero(3, 10));
    EXPECT_EQ(code_of([&] { estimate_cov_surface(raw, Bandwidth(0.3)); }), ErrorCode::invalid_argument);
    const FunctionalSample one = center(FunctionalSample(g, Eigen::MatrixXd::Zero(1, 10)), SampledCurve::zeros(g));
    EXPECT_EQ(code_of([&] { estimate_cov_surface(one, Bandwidth(0.3)); }), ErrorCode::invalid_argument);
    const FunctionalSample zeros = center(raw, SampledCurve::zeros(g));
    EXPECT_EQ(max_abs(estimate_cov_surface(zeros, Bandwidth(0.3)).values()), 0.0);
}

TEST(Covariance, RankOneConstantFunctionIsExact)
{
    // Outer products of constants are planes, so the smoother keeps them.
    const Grid g = testkit::unit_grid(20);
    const Eigen::VectorXd phi = testkit::unit_constant(g);
    Eigen::VectorXd c(4);
    c << 1.0, -1.0, 1.5, -1.5; // mean 0, mean square 1.625
    c /= std::sqrt(1.625);
    const FunctionalSample s = center(FunctionalSample(g, c * phi.transpose()), SampledCurve::zeros(g));
    const Surface cov = estimate_cov_surface(s, Bandwidth(0.15));
    EXPECT_LT(max_abs(cov.values() - phi * phi.transpose()), 1e-12);
}

TEST(Covariance, GaussianSampleWithinMonteCarloError)
{
    const Grid g = testkit::unit_grid(30);
    const Eigen::MatrixXd basis = two_orthonormal(g);
    const Eigen::Vector2d lambda(2.0, 0.5);
    Gen gen(33);
    const Eigen::Index n = 500;
    const Eigen::MatrixXd scores = gen.normal_matrix(n, 2) * lambda.cwiseSqrt().asDiagonal();
    const FunctionalSample raw(g, scores * basis.transpose());
    const FunctionalSample s = center(raw, SampledCurve::zeros(g));

    const Eigen::MatrixXd truth = basis * lambda.asDiagonal() * basis.transpose();
    const Bandwidth h(0.1);
    const Surface est = estimate_cov_surface(s, h);
    // The smoother is linear, so the smoothed estimate is centred on the
    // smoothed truth; Var(x_s x_t) = r_ss r_tt + r_st^2 for Gaussian data.
    const Surface target = smooth_surface(Surface(g, g, truth), h, g, g);
    double sd = 0.0;
    for (Eigen::Index i = 0; i < 30; ++i)
        for (Eigen::Index j = 0; j < 30; ++j)
            sd = std::max(sd, std::sqrt((truth(i, i) * truth(j, j) + truth(i, j) * truth(i, j)) / static_cast<double>(n)));
    EXPECT_LT(max_abs(est.values() - target.values()), 5.0 * sd);
}

TEST(Eigendecompose, RankOne)
{
    const Grid g = testkit::unit_grid(25);
    const auto w = quadrature_weights(g);
    Eigen::VectorXd phi = two_orthonormal(g).col(0);
    const EigenSystem es = eigendecompose(Surface(g, g, phi * phi.transpose()), w, 3);
    EXPECT_NEAR(es.eigenvalues[0], 1.0, 1e-12);
    EXPECT_NEAR(es.eigenvalues[1], 0.0, 1e-12);
    EXPECT_LT(max_abs(es.eigenfunctions.col(0) - phi), 1e-10);
    EXPECT_EQ(es.usable(), 1);

    // The sign rule turns -phi into +phi.
    const EigenSystem flipped = eigendecompose(Surface(g, g, (-phi) * (-phi).transpose()), w, 1);
    EXPECT_GT(flipped.eigenfunctions(1, 0), 0.0);
}

TEST(Eigendecompose, TwoComponents)
{
    Gen gen(34);
    const Grid g = gen.irregular_grid(33, 0.0, 2.0);
    const auto w = quadrature_weights(g);
    const Eigen::MatrixXd b = population::sine_basis(g, 2);
    const Eigen::MatrixXd c = 4.0 * b.col(0) * b.col(0).transpose() + b.col(1) * b.col(1).transpose();
    const EigenSystem es = eigendecompose(Surface(g, g, c), w, 2);
    EXPECT_NEAR(es.eigenvalues[0], 4.0, 1e-8);
    EXPECT_NEAR(es.eigenvalues[1], 1.0, 1e-8);
    const Eigen::MatrixXd gram = es.eigenfunctions.transpose() * w.values().asDiagonal() * es.eigenfunctions;
    EXPECT_LT(max_abs(gram - Eigen::Matrix2d::Identity()), 1e-8);
}

TEST(Eigendecompose, ZeroAndErrors)
{
    const Grid g = testkit::unit_grid(8);
    const auto w = quadrature_weights(g);
    const EigenSystem es = eigendecompose(Surface::zeros(g, g), w, 8);
    EXPECT_EQ(max_abs(es.eigenvalues), 0.0);
    EXPECT_EQ(es.usable(), 0);

    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(8, 8);
    asym(0, 1) = 1e-6;
    EXPECT_EQ(code_of([&] { eigendecompose(Surface(g, g, asym), w, 2); }), ErrorCode::invalid_covariance);
    EXPECT_EQ(code_of([&] { eigendecompose(Surface::zeros(g, g), w, 9); }), ErrorCode::truncation_too_large);
    EXPECT_EQ(code_of([&] { eigendecompose(Surface::zeros(g, testkit::unit_grid(8, 0, 2)), w, 1); }),
              ErrorCode::invalid_covariance);
}

TEST(Scores, MultiplesOfEigenfunctions)
{
    const Grid g = testkit::unit_grid(25);
    const auto w = quadrature_weights(g);
    const Eigen::MatrixXd b = population::sine_basis(g, 2);
    const EigenSystem es = eigendecompose(
        Surface(g, g, 2.0 * b.col(0) * b.col(0).transpose() + b.col(1) * b.col(1).transpose()), w, 2);
    Eigen::MatrixXd m(2, 25);
    m.row(0) = 3.0 * es.eigenfunctions.col(0).transpose();
    m.row(1).setZero();
    const ScoreMatrix sc = compute_scores(FunctionalSample(g, m), es);
    EXPECT_NEAR(sc.scores(0, 0), 3.0, 1e-8);
    EXPECT_NEAR(sc.scores(0, 1), 0.0, 1e-8);
    EXPECT_EQ(sc.scores.row(1).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(sc.labels.front(), "pc1");
}

TEST(Scores, FullReconstructionInsideTheSpan)
{
    Gen gen(35);
    const Grid g = gen.irregular_grid(18, 0.0, 1.0);
    const auto w = quadrature_weights(g);
    const Eigen::MatrixXd a = gen.normal_matrix(18, 18);
    const EigenSystem es = eigendecompose(Surface(g, g, a * a.transpose()), w, 18);
    const FunctionalSample x(g, gen.normal_matrix(5, 18));
    const Eigen::MatrixXd back = reconstruct(compute_scores(x, es), es);
    EXPECT_LT(max_abs(back - x.matrix()), 1e-6);
}

TEST(Fpca, Properties)
{
    Gen gen(36);
    for (int trial = 0; trial < 10; ++trial) {
        const auto n_pts = static_cast<std::size_t>(gen.integer(12, 30));
        const Grid g = gen.irregular_grid(n_pts, 0.0, gen.uniform(0.5, 2.0));
        const auto np = static_cast<Eigen::Index>(n_pts);
        const FunctionalSample x(g, gen.normal_matrix(gen.integer(5, 40), np));
        const FpcaResult f = run_fpca(x, Bandwidth(3.0 * g.max_spacing()), np);
        const auto w = f.eigen.weights.values();

        // Full spectrum sums to the quadrature trace; clipping negatives only adds.
        const double trace = f.covariance.values().diagonal().dot(w);
        EXPECT_GE(f.eigen.eigenvalues.sum(), trace - 1e-8);
        EXPECT_GE(f.eigen.eigenvalues.minCoeff(), 0.0);
        for (Eigen::Index l = 1; l < np; ++l)
            EXPECT_GE(f.eigen.eigenvalues[l - 1], f.eigen.eigenvalues[l]);

        // Orthonormality.
        const Eigen::MatrixXd gram = f.eigen.eigenfunctions.transpose() * w.asDiagonal() * f.eigen.eigenfunctions;
        EXPECT_LT(max_abs(gram - Eigen::MatrixXd::Identity(np, np)), 1e-8);

        // Scores of centered data have zero column means.
        EXPECT_LT(max_abs(f.scores.scores.colwise().mean()), 1e-8);

        // Truncated reconstruction contracts the norm.
        const FpcaResult t = f.truncated(3);
        const Eigen::MatrixXd fitted = reconstruct(t.scores, t.eigen);
        for (Eigen::Index i = 0; i < fitted.rows(); ++i) {
            const double before = std::sqrt(f.centered.matrix().row(i).cwiseAbs2().dot(w));
            const double after = std::sqrt(fitted.row(i).cwiseAbs2().dot(w));
            EXPECT_LE(after, before + 1e-8);
        }
    }
}

TEST(Fpca, EigenvalueSumEqualsTraceWithoutClipping)
{
    // Smoothing a sum of constant outer products keeps the operator PSD.
    const Grid g = testkit::unit_grid(16);
    const auto w = quadrature_weights(g);
    Eigen::MatrixXd c = Eigen::MatrixXd::Constant(16, 16, 0.7);
    const EigenSystem es = eigendecompose(Surface(g, g, c), w, 16);
    EXPECT_NEAR(es.eigenvalues.sum(), c.diagonal().dot(w.values()), 1e-8);
}

TEST(Fpca, ScoreCovarianceIsDiagonalAtFullRank)
{
    // Scores against the eigensystem of the sample's own (unsmoothed)
    // covariance decorrelate: (1/n) S^T S = diag(lambda).
    Gen gen(37);
    const Grid g = gen.irregular_grid(14, 0.0, 1.0);
    const FunctionalSample raw(g, gen.normal_matrix(60, 14) * gen.normal_matrix(14, 14));
    const FunctionalSample x = center(raw, cross_sectional_mean(raw));
    const Eigen::MatrixXd emp = x.matrix().transpose() * x.matrix() / 60.0;
    const EigenSystem es = eigendecompose(Surface(g, g, emp), quadrature_weights(g), 14);
    const Eigen::MatrixXd s = compute_scores(x, es).scores;
    const Eigen::MatrixXd cov = s.transpose() * s / 60.0;
    Eigen::MatrixXd off = cov;
    off.diagonal().setZero();
    EXPECT_LT(max_abs(off), 1e-6 * cov.diagonal().maxCoeff());
    EXPECT_LT(max_abs(cov.diagonal() - es.eigenvalues), 1e-8 * es.eigenvalues[0]);
}
