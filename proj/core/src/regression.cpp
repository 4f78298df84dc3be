#include "funreg/regression.hpp"

#include <string>

namespace funreg {

std::string_view to_string(Method method)
{
    return method == Method::fcr ? "FCR" : "FPR";
}

std::string_view to_string(SigmaMode mode)
{
    return mode == SigmaMode::smooth ? "smooth" : "score";
}

Method parse_method(std::string_view text)
{
    if (text == "fcr" || text == "FCR")
        return Method::fcr;
    if (text == "fpr" || text == "FPR")
        return Method::fpr;
    throw Error(ErrorCode::invalid_argument, "unknown method '" + std::string(text) + "'");
}

SigmaMode parse_sigma_mode(std::string_view text)
{
    if (text == "smooth")
        return SigmaMode::smooth;
    if (text == "score")
        return SigmaMode::score;
    throw Error(ErrorCode::invalid_argument, "unknown sigma mode '" + std::string(text) + "'");
}

namespace {

Eigen::Index checked_max(const FunctionalSample& x, const FunctionalSample& y, Eigen::Index max_truncation)
{
    if (x.subjects() != y.subjects())
        throw Error(ErrorCode::dimension_mismatch, "predictor and response differ in sample size");
    if (max_truncation < 1)
        throw Error(ErrorCode::invalid_argument, "truncation must be at least 1");
    const Eigen::Index limit = std::min(x.points(), y.points());
    if (max_truncation > limit)
        throw Error(ErrorCode::truncation_too_large,
                    "truncation " + std::to_string(max_truncation) + " exceeds the "
                        + std::to_string(limit) + " available components");
    return max_truncation;
}

} // namespace

PreparedPair::PreparedPair(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                           Eigen::Index max_truncation, bool with_cross_covariance)
    : h_(h)
    , x_(run_fpca(x, h, checked_max(x, y, max_truncation)))
    , y_(run_fpca(y, h, max_truncation))
{
    if (with_cross_covariance)
        cross_cov_ = estimate_cross_cov_surface(x_.centered, y_.centered, h);
}

void PreparedPair::check_truncation(Eigen::Index truncation) const
{
    if (truncation < 1)
        throw Error(ErrorCode::invalid_argument, "truncation must be at least 1");
    if (truncation > x_.eigen.size())
        throw Error(ErrorCode::truncation_too_large,
                    "truncation " + std::to_string(truncation) + " exceeds the "
                        + std::to_string(x_.eigen.size()) + " prepared components");
}

CanonicalSystem PreparedPair::canonical(Eigen::Index truncation, double ridge) const
{
    check_truncation(truncation);
    if (x_.eigen.usable(kEigenvalueFloor) < truncation || y_.eigen.usable(kEigenvalueFloor) < truncation)
        throw Error(ErrorCode::truncation_too_large,
                    "truncation " + std::to_string(truncation) + " exceeds the usable components (X: "
                        + std::to_string(x_.eigen.usable(kEigenvalueFloor)) + ", Y: "
                        + std::to_string(y_.eigen.usable(kEigenvalueFloor)) + ")");
    return functional_cca(x_.truncated(truncation), y_.truncated(truncation), ridge);
}

RegressionSurface PreparedPair::fit(Method method, Eigen::Index truncation, const FitOptions& options) const
{
    return method == Method::fcr ? fit_fcr(truncation, options) : fit_fpr(truncation, options);
}

RegressionSurface PreparedPair::fit_fcr(Eigen::Index truncation, const FitOptions& options) const
{
    check_truncation(truncation);
    const Grid& gx = x_.centered.grid();
    const Grid& gy = y_.centered.grid();
    // A response without variation has r_YY = 0 and therefore beta = 0.
    if (y_.eigen.usable(kEigenvalueFloor) == 0)
        return RegressionSurface{Surface::zeros(gx, gy), Method::fcr, truncation, h_, x_.mean, y_.mean};
    const CanonicalSystem cs = canonical(truncation, options.ridge);
    return RegressionSurface{fcr_beta(cs, y_.covariance, truncation), Method::fcr, truncation, h_,
                             x_.mean, y_.mean};
}

RegressionSurface PreparedPair::fit_fpr(Eigen::Index truncation, const FitOptions& options) const
{
    check_truncation(truncation);
    const Eigen::VectorXd& lambda = x_.eigen.eigenvalues;
    const double floor = kEigenvalueFloor * lambda[0];
    for (Eigen::Index m = 0; m < truncation; ++m) {
        if (!(lambda[m] > floor) || !(lambda[0] > 0.0))
            throw Error(ErrorCode::truncation_too_large,
                        "predictor eigenvalue " + std::to_string(m + 1)
                            + " is at the eigenvalue floor; truncation " + std::to_string(truncation)
                            + " is too large");
    }
    const Eigen::MatrixXd theta = x_.eigen.eigenfunctions.leftCols(truncation);
    const Eigen::MatrixXd phi = y_.eigen.eigenfunctions.leftCols(truncation);

    Eigen::MatrixXd sigma;
    if (options.sigma_mode == SigmaMode::score) {
        sigma = x_.scores.scores.leftCols(truncation).transpose() * y_.scores.scores.leftCols(truncation)
                / static_cast<double>(x_.centered.subjects());
    } else {
        const Surface cross = cross_cov_ ? *cross_cov_
                                         : estimate_cross_cov_surface(x_.centered, y_.centered, h_);
        sigma = theta.transpose() * x_.eigen.weights.values().asDiagonal() * cross.values()
                * y_.eigen.weights.values().asDiagonal() * phi;
    }
    const Eigen::VectorXd inv = lambda.head(truncation).cwiseInverse();
    Eigen::MatrixXd beta = theta * inv.asDiagonal() * sigma * phi.transpose();
    return RegressionSurface{Surface(x_.centered.grid(), y_.centered.grid(), std::move(beta)), Method::fpr,
                             truncation, h_, x_.mean, y_.mean};
}

Surface fcr_beta(const CanonicalSystem& cs, const Surface& response_cov, Eigen::Index components)
{
    if (components < 0 || components > cs.size())
        throw Error(ErrorCode::truncation_too_large, "more components requested than the canonical system holds");
    require_same_grid(response_cov.grid_s(), cs.grid_y, "response covariance");
    const QuadratureWeights wy = quadrature_weights(cs.grid_y);
    const Eigen::MatrixXd v = cs.weight_functions_v.leftCols(components);
    // (R_YY v)(t) = sum_j r_YY(t_j, t) v(t_j) w_j
    const Eigen::MatrixXd rv = response_cov.values().transpose() * wy.values().asDiagonal() * v;
    Eigen::MatrixXd beta = cs.weight_functions_u.leftCols(components)
                           * cs.correlations.head(components).asDiagonal() * rv.transpose();
    return Surface(cs.grid_x, cs.grid_y, std::move(beta));
}

RegressionSurface fcr_fit(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                          Eigen::Index truncation, const FitOptions& options)
{
    return PreparedPair(x, y, h, truncation).fit(Method::fcr, truncation, options);
}

RegressionSurface fpr_fit(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                          Eigen::Index truncation, const FitOptions& options)
{
    const bool smooth = options.sigma_mode == SigmaMode::smooth;
    return PreparedPair(x, y, h, truncation, smooth).fit(Method::fpr, truncation, options);
}

RegressionSurface fit(Method method, const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                      Eigen::Index truncation, const FitOptions& options)
{
    return method == Method::fcr ? fcr_fit(x, y, h, truncation, options)
                                 : fpr_fit(x, y, h, truncation, options);
}

SampledCurve predict(const RegressionSurface& model, const SampledCurve& x_new)
{
    require_same_grid(model.beta.grid_s(), x_new.grid(), "prediction");
    const QuadratureWeights wx = quadrature_weights(x_new.grid());
    const Eigen::VectorXd weighted = (x_new.values() - model.mean_x.values()).cwiseProduct(wx.values());
    Eigen::VectorXd y = model.beta.values().transpose() * weighted + model.mean_y.values();
    return SampledCurve(model.beta.grid_t(), std::move(y));
}

FunctionalSample predict(const RegressionSurface& model, const FunctionalSample& x_new)
{
    require_same_grid(model.beta.grid_s(), x_new.grid(), "prediction");
    const QuadratureWeights wx = quadrature_weights(x_new.grid());
    const Eigen::MatrixXd centered = x_new.matrix().rowwise() - model.mean_x.values().transpose();
    Eigen::MatrixXd y = centered * wx.values().asDiagonal() * model.beta.values();
    y.rowwise() += model.mean_y.values().transpose();
    return FunctionalSample(model.beta.grid_t(), std::move(y));
}

double prediction_error(const FunctionalSample& y_true, const FunctionalSample& y_pred)
{
    require_same_grid(y_true.grid(), y_pred.grid(), "prediction error");
    if (y_true.subjects() != y_pred.subjects())
        throw Error(ErrorCode::dimension_mismatch, "observed and predicted samples differ in size");
    const QuadratureWeights w = quadrature_weights(y_true.grid());
    const Eigen::MatrixXd diff = y_true.matrix() - y_pred.matrix();
    return (diff.cwiseAbs2() * w.values()).sum() / static_cast<double>(y_true.subjects());
}

} // namespace funreg
