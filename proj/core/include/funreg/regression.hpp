#pragma once

#include "funreg/cca.hpp"

#include <optional>
#include <string_view>

namespace funreg {

enum class Method { fcr, fpr };

/// How FPR estimates the cross moments sigma_mp = E[xi_m zeta_p].
enum class SigmaMode {
    smooth, ///< double quadrature against the smoothed cross-covariance surface
    score,  ///< empirical score cross-products (1/n) sum_i xi_im zeta_ip
};

std::string_view to_string(Method method);
std::string_view to_string(SigmaMode mode);
Method parse_method(std::string_view text);
SigmaMode parse_sigma_mode(std::string_view text);

struct FitOptions {
    double ridge = 0.0;
    SigmaMode sigma_mode = SigmaMode::smooth;
};

/// Estimated beta(s, t) on grid_X x grid_Y with what `predict` needs to
/// map raw predictor curves to raw response curves.
struct RegressionSurface {
    Surface beta;
    Method method;
    Eigen::Index truncation;
    Bandwidth bandwidth;
    SampledCurve mean_x;
    SampledCurve mean_y;
};

/// Relative eigenvalue floor below which a predictor component cannot be
/// inverted by FPR.
inline constexpr double kEigenvalueFloor = 1e-10;

/// Everything about a training pair that does not depend on the truncation:
/// centering, smoothed covariances and the eigen decompositions up to
/// `max_truncation` components. Fitting several truncations from one
/// instance reuses all of it.
class PreparedPair {
public:
    PreparedPair(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                 Eigen::Index max_truncation, bool with_cross_covariance = false);

    RegressionSurface fit(Method method, Eigen::Index truncation, const FitOptions& options = {}) const;

    /// The canonical system behind an FCR fit with `truncation` components.
    CanonicalSystem canonical(Eigen::Index truncation, double ridge = 0.0) const;

    const FpcaResult& x() const noexcept { return x_; }
    const FpcaResult& y() const noexcept { return y_; }
    Bandwidth bandwidth() const noexcept { return h_; }

private:
    RegressionSurface fit_fcr(Eigen::Index truncation, const FitOptions& options) const;
    RegressionSurface fit_fpr(Eigen::Index truncation, const FitOptions& options) const;
    void check_truncation(Eigen::Index truncation) const;

    Bandwidth h_;
    FpcaResult x_;
    FpcaResult y_;
    std::optional<Surface> cross_cov_;
};

/// beta(s,t) = sum_{k<K} rho_k u_k(s) (R_YY v_k)(t), with R_YY applied by
/// quadrature over the response grid.
Surface fcr_beta(const CanonicalSystem& cs, const Surface& response_cov, Eigen::Index components);

RegressionSurface fcr_fit(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                          Eigen::Index truncation, const FitOptions& options = {});

RegressionSurface fpr_fit(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                          Eigen::Index truncation, const FitOptions& options = {});

RegressionSurface fit(Method method, const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                      Eigen::Index truncation, const FitOptions& options = {});

/// mean_y(t) + sum_j beta(s_j, t) (x(s_j) - mean_x(s_j)) w_j
SampledCurve predict(const RegressionSurface& model, const SampledCurve& x_new);
FunctionalSample predict(const RegressionSurface& model, const FunctionalSample& x_new);

/// (1/n) sum_i sum_j (y_ij - yhat_ij)^2 w_j
double prediction_error(const FunctionalSample& y_true, const FunctionalSample& y_pred);

} // namespace funreg
