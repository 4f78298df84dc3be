#pragma once

#include "funreg/fpca.hpp"

#include <string>
#include <vector>

namespace funreg {

/// Canonical pairs of two random vectors. Column k of `weights_u` and
/// `weights_v` gives the k-th pair of weight vectors; each variate has unit
/// variance under the unregularized covariance.
struct CcaSolution {
    Eigen::VectorXd correlations;
    Eigen::MatrixXd weights_u;
    Eigen::MatrixXd weights_v;
    std::vector<std::string> warnings;
};

/// Canonical analysis from covariance blocks via the SVD of
/// (Sxx + ridge I)^{-1/2} Sxy (Syy + ridge I)^{-1/2}.
CcaSolution cca_from_covariances(const Eigen::MatrixXd& sxx, const Eigen::MatrixXd& syy,
                                 const Eigen::MatrixXd& sxy, double ridge = 0.0);

/// Sample canonical analysis of two centered score matrices (1/n covariances).
CcaSolution multivariate_cca(const ScoreMatrix& x, const ScoreMatrix& y, double ridge = 0.0);

/// Weight functions sum_m a_m phi_m, one per column of `weight_vectors`.
Eigen::MatrixXd lift_weight_matrix(const Eigen::MatrixXd& weight_vectors, const EigenSystem& eig);
std::vector<SampledCurve> lift_weights(const Eigen::MatrixXd& weight_vectors, const EigenSystem& eig);

struct CanonicalSystem {
    Eigen::VectorXd correlations;
    Eigen::MatrixXd weight_vectors_u; // L x L, score space
    Eigen::MatrixXd weight_vectors_v;
    Grid grid_x;
    Grid grid_y;
    Eigen::MatrixXd weight_functions_u; // grid_x points x L
    Eigen::MatrixXd weight_functions_v; // grid_y points x L
    Eigen::MatrixXd variates_u;         // subjects x L
    Eigen::MatrixXd variates_v;
    std::vector<std::string> warnings;

    Eigen::Index size() const noexcept { return correlations.size(); }
};

/// Eigenbase functional canonical analysis: FPCA of both processes with
/// truncation L, canonical analysis of the score vectors, lift to curves.
CanonicalSystem functional_cca(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                               Eigen::Index truncation, double ridge = 0.0);

/// Same, from decompositions that are already truncated to a common size.
CanonicalSystem functional_cca(const FpcaResult& fx, const FpcaResult& fy, double ridge = 0.0);

} // namespace funreg
