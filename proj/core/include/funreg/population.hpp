#pragma once

#include "funreg/core.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace funreg::population {

/// Finite-rank pair of processes X = sum_m xi_m theta_m, Y = sum_j zeta_j phi_j
/// with E[xi xi^T] = diag(lambda_x), E[zeta zeta^T] = diag(lambda_y) and
/// E[xi zeta^T] = cross_cov. Observations add iid N(0, noise_sd^2) per grid point.
class PopulationModel {
public:
    /// Validates orthonormal bases (1e-8), positive nonincreasing eigenvalues
    /// and a positive semidefinite joint score covariance (floor -1e-10).
    PopulationModel(Grid grid_x, Grid grid_y, Eigen::MatrixXd basis_x, Eigen::MatrixXd basis_y,
                    Eigen::VectorXd lambda_x, Eigen::VectorXd lambda_y, Eigen::MatrixXd cross_cov,
                    double noise_sd = 0.0);

    const Grid& grid_x() const noexcept { return grid_x_; }
    const Grid& grid_y() const noexcept { return grid_y_; }
    const Eigen::MatrixXd& basis_x() const noexcept { return basis_x_; }
    const Eigen::MatrixXd& basis_y() const noexcept { return basis_y_; }
    const Eigen::VectorXd& lambda_x() const noexcept { return lambda_x_; }
    const Eigen::VectorXd& lambda_y() const noexcept { return lambda_y_; }
    const Eigen::MatrixXd& cross_cov() const noexcept { return cross_cov_; }
    double noise_sd() const noexcept { return noise_sd_; }

    Eigen::Index components_x() const noexcept { return lambda_x_.size(); }
    Eigen::Index components_y() const noexcept { return lambda_y_.size(); }

    /// [[diag(lambda_x), cross], [cross^T, diag(lambda_y)]]
    Eigen::MatrixXd joint_covariance() const;

    /// Root mean pointwise standard deviation of Y: sqrt(trace(R_YY) / |T_2|).
    double signal_scale() const;

    /// Expected squared quadrature norm of pure response noise,
    /// noise_sd^2 times the quadrature measure of the response grid.
    double noise_floor() const;

    PopulationModel with_noise(double noise_sd) const;

private:
    Grid grid_x_;
    Grid grid_y_;
    Eigen::MatrixXd basis_x_;
    Eigen::MatrixXd basis_y_;
    Eigen::VectorXd lambda_x_;
    Eigen::VectorXd lambda_y_;
    Eigen::MatrixXd cross_cov_;
    double noise_sd_;
};

/// Quadrature Gram-Schmidt of the columns of `raw`.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& raw, const QuadratureWeights& w);

/// `count` functions sqrt(2) sin(k pi u), u the grid rescaled to [0, 1],
/// made quadrature-orthonormal.
Eigen::MatrixXd sine_basis(const Grid& grid, Eigen::Index count);

/// Two-component pair on 40-point grids over [0, 1] in which Y is an exact
/// linear image of X (both canonical correlations equal 1), so beta* has
/// rank 2. Noise is `noise_fraction * signal_scale()`.
PopulationModel standard_model(Eigen::Index points = 40, double noise_fraction = 0.05);

/// lambda_Xm = 1/m^2, lambda_Yj = 1/j^2, E[xi_m zeta_j] = 1/((m+1)^2 (j+1)^2),
/// truncated to `components` terms.
PopulationModel inverse_square_model(Eigen::Index components, Eigen::Index points = 50);

/// A random legal model: M components, grids of the given sizes on random
/// intervals, random smooth bases and canonical correlations in [0, 0.95).
PopulationModel random_model(std::mt19937_64& rng, Eigen::Index components, Eigen::Index points_x,
                             Eigen::Index points_y);

struct Covariances {
    Surface xx;
    Surface yy;
    Surface xy;
};

Covariances pop_covariances(const PopulationModel& model);

/// Canonical decomposition of a pair of score vectors with diagonal
/// covariances `lambda_a`, `lambda_b` and cross-covariance `cross`: SVD of
/// diag(lambda_a)^{-1/2} cross diag(lambda_b)^{-1/2} = P diag(rho) Q^T.
struct ScoreCanonical {
    Eigen::VectorXd rho;
    Eigen::MatrixXd p; // columns: left singular vectors
    Eigen::MatrixXd q; // columns: right singular vectors
};

ScoreCanonical canonical_from_moments(const Eigen::VectorXd& lambda_a, const Eigen::VectorXd& lambda_b,
                                      const Eigen::MatrixXd& cross);

struct PopulationCanonical {
    Eigen::VectorXd rho;
    Eigen::MatrixXd u;      // grid_x points x K weight functions
    Eigen::MatrixXd v;      // grid_y points x K
    Eigen::MatrixXd p;      // R_XX^{1/2} u_k as curves
    Eigen::MatrixXd q;      // R_YY^{1/2} v_k as curves
    Eigen::MatrixXd u_coef; // u_k in the theta basis
    Eigen::MatrixXd v_coef; // v_k in the phi basis

    Eigen::Index size() const noexcept { return rho.size(); }
    /// Count of correlations above `tol`.
    Eigen::Index nonzero(double tol = 1e-12) const noexcept;
};

PopulationCanonical pop_canonical(const PopulationModel& model);

/// sum_{k<=K} rho_k u_k(s) (R_YY v_k)(t) in closed form through the bases.
Surface pop_beta_star(const PopulationModel& model, Eigen::Index components);

/// Minimum-norm solution of r_XY = Gamma_XX beta on the grid: the
/// quadrature-weighted pseudo-inverse of the discretized operator applied
/// to r_XY. Uses only the two covariance surfaces.
Surface solve_normal_equation(const Surface& r_xx, const Surface& r_xy, double relative_cutoff = 1e-10);

/// Max-abs gap between r_XY and sum_m rho_m (R_XX u_m)(s) (R_YY v_m)(t).
double verify_cross_cov_decomposition(const PopulationModel& model);

struct TruncationCheck {
    double lhs;       ///< E||Y - Y*_K||^2 from the joint score law
    double rhs;       ///< trace(R_YY) - sum_{k<=K} rho_k^2 ||R_YY v_k||^2
    double residual;
    double tail_lhs;  ///< E||Y* - Y*_K||^2 from the joint score law
    double tail_rhs;  ///< sum_{k>K} rho_k^2 ||R_YY v_k||^2
    double tail_residual;
};

TruncationCheck verify_truncation_identity(const PopulationModel& model, Eigen::Index components);

/// Minimum eigenvalues of R_{Y*Y*} - R_{Y*_K Y*_K}, R_{Yc Yc} - R_{Y*Y*},
/// R_YY - R_{Yc Yc} (weighted discretization); Yc is the canonical part of Y.
struct OrderingCheck {
    double fitted_vs_truncated;
    double canonical_vs_fitted;
    double response_vs_canonical;

    double min() const noexcept;
};

OrderingCheck verify_operator_ordering(const PopulationModel& model, Eigen::Index components);

struct FittedCorrelationCheck {
    Eigen::VectorXd correlations; ///< canonical correlations of (Y, Y*)
    Eigen::VectorXd expected;     ///< nonzero rho of (X, Y)
    double max_correlation_error;
    double max_weight_error;      ///< Y-side weight vs v_m, up to sign
    double max_variate_error;     ///< Y*-side variate vs <v_m / rho_m, Y*>, up to sign
};

FittedCorrelationCheck verify_fitted_correlations(const PopulationModel& model);

/// A truncation-indexed family: eigenvalues and cross moments by 1-based index.
struct ConditionRule {
    std::function<double(long)> lambda_x;
    std::function<double(long)> lambda_y;
    std::function<double(long, long)> cross;

    static ConditionRule inverse_square();
};

struct ConditionRow {
    long truncation;
    double s_c1;     ///< sum_{m,j<=M} (E[xi_m zeta_j] / lambda_Xm)^2
    double s_c2;     ///< sum_{m,j<=M} (E[xi_m zeta_j] / (lambda_Xm lambda_Yj^{1/2}))^2
    double ratio_c1; ///< S_C1(2M) / S_C1(M)
    double ratio_c2;
};

std::vector<ConditionRow> check_conditions(const ConditionRule& rule, const std::vector<long>& truncations);

/// n joint Gaussian draws of (xi, zeta) turned into curves, plus iid noise.
/// Deterministic for a given seed.
std::pair<FunctionalSample, FunctionalSample> simulate(const PopulationModel& model, Eigen::Index n,
                                                       std::uint64_t seed);

} // namespace funreg::population
