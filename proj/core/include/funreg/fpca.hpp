#pragma once

#include "funreg/core.hpp"
#include "funreg/smoothing.hpp"

#include <string>
#include <vector>

namespace funreg {

/// Eigenvalues (nonincreasing, clipped at 0) and quadrature-orthonormal
/// eigenfunctions of a discretized covariance operator.
struct EigenSystem {
    Grid grid;
    QuadratureWeights weights;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenfunctions; // grid points x components

    Eigen::Index size() const noexcept { return eigenvalues.size(); }
    SampledCurve eigenfunction(Eigen::Index l) const;

    /// Number of leading components with eigenvalue above
    /// `relative_floor * eigenvalues[0]`; zero if the operator vanishes.
    Eigen::Index usable(double relative_floor = 1e-10) const noexcept;

    EigenSystem truncated(Eigen::Index count) const;
};

struct ScoreMatrix {
    Eigen::MatrixXd scores; // subjects x components
    std::vector<std::string> labels;
};

/// Pointwise average of the curves, unsmoothed.
SampledCurve cross_sectional_mean(const FunctionalSample& sample);

/// Cross-sectional average passed through the local linear smoother.
SampledCurve estimate_mean(const FunctionalSample& sample, Bandwidth h);

FunctionalSample center(const FunctionalSample& sample, const SampledCurve& mean);

/// (1/n) sum_i x_i x_i^T smoothed by local planes, then symmetrized.
Surface estimate_cov_surface(const FunctionalSample& sample, Bandwidth h);

/// (1/n) sum_i x_i y_i^T smoothed by local planes; both samples centered.
Surface estimate_cross_cov_surface(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h);

/// Leading `count` eigenpairs of the integral operator with kernel `cov`.
EigenSystem eigendecompose(const Surface& cov, const QuadratureWeights& w, Eigen::Index count);

/// Quadrature scores <x_i, phi_l>_w.
ScoreMatrix compute_scores(const FunctionalSample& sample, const EigenSystem& eig);

/// sum_l score_il phi_l for every subject (rows).
Eigen::MatrixXd reconstruct(const ScoreMatrix& scores, const EigenSystem& eig);

/// Centering, smoothed covariance, eigenpairs and scores of one process.
struct FpcaResult {
    SampledCurve mean;
    FunctionalSample centered;
    Surface covariance;
    EigenSystem eigen;
    ScoreMatrix scores;

    /// Same decomposition restricted to the first `count` components.
    FpcaResult truncated(Eigen::Index count) const;
};

FpcaResult run_fpca(const FunctionalSample& sample, Bandwidth h, Eigen::Index count);

} // namespace funreg
