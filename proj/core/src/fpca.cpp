#include "funreg/fpca.hpp"

#include <cmath>
#include <string>

namespace funreg {

SampledCurve EigenSystem::eigenfunction(Eigen::Index l) const
{
    return SampledCurve(grid, eigenfunctions.col(l));
}

Eigen::Index EigenSystem::usable(double relative_floor) const noexcept
{
    if (eigenvalues.size() == 0 || !(eigenvalues[0] > 0.0))
        return 0;
    const double floor = relative_floor * eigenvalues[0];
    Eigen::Index count = 0;
    while (count < eigenvalues.size() && eigenvalues[count] > floor)
        ++count;
    return count;
}

EigenSystem EigenSystem::truncated(Eigen::Index count) const
{
    if (count < 0 || count > size())
        throw Error(ErrorCode::truncation_too_large,
                    "cannot keep " + std::to_string(count) + " of " + std::to_string(size())
                        + " eigen components");
    return EigenSystem{grid, weights, eigenvalues.head(count), eigenfunctions.leftCols(count)};
}

SampledCurve cross_sectional_mean(const FunctionalSample& sample)
{
    return SampledCurve(sample.grid(), sample.matrix().colwise().mean().transpose());
}

SampledCurve estimate_mean(const FunctionalSample& sample, Bandwidth h)
{
    return smooth_curve(cross_sectional_mean(sample), h, sample.grid());
}

FunctionalSample center(const FunctionalSample& sample, const SampledCurve& mean)
{
    require_same_grid(sample.grid(), mean.grid(), "centering");
    Eigen::MatrixXd centered = sample.matrix().rowwise() - mean.values().transpose();
    return FunctionalSample::centered(sample.grid(), std::move(centered), mean);
}

Surface estimate_cov_surface(const FunctionalSample& sample, Bandwidth h)
{
    if (!sample.is_centered())
        throw Error(ErrorCode::invalid_argument, "covariance estimation needs a centered sample");
    if (sample.subjects() < 2)
        throw Error(ErrorCode::invalid_argument, "covariance estimation needs at least 2 curves");
    const auto& x = sample.matrix();
    const Eigen::MatrixXd raw = (x.transpose() * x) / static_cast<double>(x.rows());
    const Surface smoothed =
        smooth_surface(Surface(sample.grid(), sample.grid(), raw), h, sample.grid(), sample.grid());
    Eigen::MatrixXd sym = 0.5 * (smoothed.values() + smoothed.values().transpose());
    return Surface(sample.grid(), sample.grid(), std::move(sym));
}

Surface estimate_cross_cov_surface(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h)
{
    if (!x.is_centered() || !y.is_centered())
        throw Error(ErrorCode::invalid_argument, "cross-covariance estimation needs centered samples");
    if (x.subjects() != y.subjects())
        throw Error(ErrorCode::dimension_mismatch, "predictor and response differ in sample size");
    if (x.subjects() < 2)
        throw Error(ErrorCode::invalid_argument, "cross-covariance estimation needs at least 2 pairs");
    const Eigen::MatrixXd raw =
        (x.matrix().transpose() * y.matrix()) / static_cast<double>(x.subjects());
    return smooth_surface(Surface(x.grid(), y.grid(), raw), h, x.grid(), y.grid());
}

EigenSystem eigendecompose(const Surface& cov, const QuadratureWeights& w, Eigen::Index count)
{
    if (!(cov.grid_s() == cov.grid_t()))
        throw Error(ErrorCode::invalid_covariance, "covariance surface must live on one grid");
    const Eigen::MatrixXd& c = cov.values();
    const Eigen::Index n = c.rows();
    if (w.size() != n)
        throw Error(ErrorCode::dimension_mismatch, "weights do not match the covariance grid");
    if (count < 0 || count > n)
        throw Error(ErrorCode::truncation_too_large,
                    "requested " + std::to_string(count) + " eigen components on a grid of "
                        + std::to_string(n) + " points");
    const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
    if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw Error(ErrorCode::invalid_covariance, "covariance surface is not symmetric");

    // Symmetric form W^{1/2} C W^{1/2}; eigenvectors e map back to W^{-1/2} e.
    const Eigen::VectorXd root = w.values().cwiseSqrt();
    Eigen::MatrixXd a = root.asDiagonal() * c * root.asDiagonal();
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    if (es.info() != Eigen::Success)
        throw Error(ErrorCode::invalid_covariance, "eigen solver did not converge");

    Eigen::VectorXd values(count);
    Eigen::MatrixXd functions(n, count);
    for (Eigen::Index l = 0; l < count; ++l) {
        const Eigen::Index src = n - 1 - l; // ascending order from the solver
        values[l] = std::max(0.0, es.eigenvalues()[src]);
        Eigen::VectorXd phi = es.eigenvectors().col(src).cwiseQuotient(root);
        const double big = phi.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (std::abs(phi[j]) > 1e-10 * big) {
                if (phi[j] < 0.0)
                    phi = -phi;
                break;
            }
        }
        functions.col(l) = phi;
    }
    return EigenSystem{cov.grid_s(), w, std::move(values), std::move(functions)};
}

ScoreMatrix compute_scores(const FunctionalSample& sample, const EigenSystem& eig)
{
    require_same_grid(sample.grid(), eig.grid, "score computation");
    ScoreMatrix out;
    out.scores = sample.matrix() * eig.weights.values().asDiagonal() * eig.eigenfunctions;
    out.labels.reserve(static_cast<std::size_t>(eig.size()));
    for (Eigen::Index l = 0; l < eig.size(); ++l)
        out.labels.push_back("pc" + std::to_string(l + 1));
    return out;
}

Eigen::MatrixXd reconstruct(const ScoreMatrix& scores, const EigenSystem& eig)
{
    if (scores.scores.cols() != eig.size())
        throw Error(ErrorCode::dimension_mismatch, "scores and eigenfunctions differ in count");
    return scores.scores * eig.eigenfunctions.transpose();
}

FpcaResult FpcaResult::truncated(Eigen::Index count) const
{
    EigenSystem eig = eigen.truncated(count);
    ScoreMatrix sc{scores.scores.leftCols(count),
                   {scores.labels.begin(), scores.labels.begin() + count}};
    return FpcaResult{mean, centered, covariance, std::move(eig), std::move(sc)};
}

FpcaResult run_fpca(const FunctionalSample& sample, Bandwidth h, Eigen::Index count)
{
    SampledCurve mean = cross_sectional_mean(sample);
    FunctionalSample centered = center(sample, mean);
    Surface cov = estimate_cov_surface(centered, h);
    EigenSystem eig = eigendecompose(cov, quadrature_weights(sample.grid()), count);
    ScoreMatrix scores = compute_scores(centered, eig);
    return FpcaResult{std::move(mean), std::move(centered), std::move(cov), std::move(eig),
                      std::move(scores)};
}

} // namespace funreg
