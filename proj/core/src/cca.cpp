#include "funreg/cca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace funreg {

namespace {

constexpr double kSingularRatio = 1e-12;

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& s, double ridge, const char* which)
{
    Eigen::MatrixXd reg = 0.5 * (s + s.transpose());
    reg.diagonal().array() += ridge;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reg);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double hi = ev.maxCoeff();
    if (!(hi > 0.0) || !(ev.minCoeff() > kSingularRatio * hi))
        throw Error(ErrorCode::singular_covariance,
                    std::string(which)
                        + " score covariance is singular; use a positive ridge or a smaller truncation");
    return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal()
           * es.eigenvectors().transpose();
}

Eigen::MatrixXd covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a.transpose() * b) / static_cast<double>(a.rows());
}

} // namespace

CcaSolution cca_from_covariances(const Eigen::MatrixXd& sxx, const Eigen::MatrixXd& syy,
                                 const Eigen::MatrixXd& sxy, double ridge)
{
    if (sxx.rows() != sxx.cols() || syy.rows() != syy.cols() || sxy.rows() != sxx.rows()
        || sxy.cols() != syy.rows())
        throw Error(ErrorCode::dimension_mismatch, "inconsistent covariance blocks");
    if (!(ridge >= 0.0) || !std::isfinite(ridge))
        throw Error(ErrorCode::invalid_argument, "ridge must be nonnegative");

    const Eigen::MatrixXd wx = inverse_sqrt(sxx, ridge, "predictor");
    const Eigen::MatrixXd wy = inverse_sqrt(syy, ridge, "response");
    const Eigen::MatrixXd whitened = wx * sxy * wy;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(whitened, Eigen::ComputeThinU | Eigen::ComputeThinV);

    const Eigen::Index pairs = std::min(sxx.rows(), syy.rows());
    CcaSolution out;
    out.correlations.resize(pairs);
    out.weights_u.resize(sxx.rows(), pairs);
    out.weights_v.resize(syy.rows(), pairs);
    for (Eigen::Index k = 0; k < pairs; ++k) {
        Eigen::VectorXd u = wx * svd.matrixU().col(k);
        Eigen::VectorXd v = wy * svd.matrixV().col(k);
        u /= std::sqrt(u.dot(sxx * u));
        v /= std::sqrt(v.dot(syy * v));
        double rho = u.dot(sxy * v);
        if (rho < 0.0) {
            v = -v;
            rho = -rho;
        }
        const double big = u.cwiseAbs().maxCoeff();
        for (Eigen::Index m = 0; m < u.size(); ++m) {
            if (std::abs(u[m]) > 1e-12 * big) {
                if (u[m] < 0.0) {
                    u = -u;
                    v = -v;
                }
                break;
            }
        }
        out.correlations[k] = std::clamp(rho, 0.0, 1.0);
        out.weights_u.col(k) = u;
        out.weights_v.col(k) = v;
    }
    return out;
}

CcaSolution multivariate_cca(const ScoreMatrix& x, const ScoreMatrix& y, double ridge)
{
    const Eigen::MatrixXd& sx = x.scores;
    const Eigen::MatrixXd& sy = y.scores;
    if (sx.rows() != sy.rows())
        throw Error(ErrorCode::dimension_mismatch, "score matrices differ in sample size");
    CcaSolution out = cca_from_covariances(covariance(sx, sx), covariance(sy, sy), covariance(sx, sy), ridge);
    const Eigen::Index dim = std::max(sx.cols(), sy.cols());
    if (sx.rows() <= 2 * dim)
        out.warnings.push_back("sample size " + std::to_string(sx.rows())
                               + " is not larger than twice the truncation " + std::to_string(dim)
                               + "; canonical correlations are biased upward");
    return out;
}

Eigen::MatrixXd lift_weight_matrix(const Eigen::MatrixXd& weight_vectors, const EigenSystem& eig)
{
    if (weight_vectors.rows() != eig.size())
        throw Error(ErrorCode::dimension_mismatch,
                    "weight vectors of length " + std::to_string(weight_vectors.rows()) + " for "
                        + std::to_string(eig.size()) + " eigenfunctions");
    return eig.eigenfunctions * weight_vectors;
}

std::vector<SampledCurve> lift_weights(const Eigen::MatrixXd& weight_vectors, const EigenSystem& eig)
{
    const Eigen::MatrixXd lifted = lift_weight_matrix(weight_vectors, eig);
    std::vector<SampledCurve> curves;
    curves.reserve(static_cast<std::size_t>(lifted.cols()));
    for (Eigen::Index k = 0; k < lifted.cols(); ++k)
        curves.emplace_back(eig.grid, lifted.col(k));
    return curves;
}

CanonicalSystem functional_cca(const FpcaResult& fx, const FpcaResult& fy, double ridge)
{
    if (fx.centered.subjects() != fy.centered.subjects())
        throw Error(ErrorCode::dimension_mismatch, "predictor and response differ in sample size");
    if (fx.eigen.size() != fy.eigen.size())
        throw Error(ErrorCode::dimension_mismatch, "predictor and response truncations differ");

    CcaSolution cca = multivariate_cca(fx.scores, fy.scores, ridge);
    CanonicalSystem cs{
        std::move(cca.correlations),
        std::move(cca.weights_u),
        std::move(cca.weights_v),
        fx.eigen.grid,
        fy.eigen.grid,
        {},
        {},
        {},
        {},
        std::move(cca.warnings),
    };
    cs.weight_functions_u = lift_weight_matrix(cs.weight_vectors_u, fx.eigen);
    cs.weight_functions_v = lift_weight_matrix(cs.weight_vectors_v, fy.eigen);
    cs.variates_u = fx.centered.matrix() * fx.eigen.weights.values().asDiagonal() * cs.weight_functions_u;
    cs.variates_v = fy.centered.matrix() * fy.eigen.weights.values().asDiagonal() * cs.weight_functions_v;
    return cs;
}

CanonicalSystem functional_cca(const FunctionalSample& x, const FunctionalSample& y, Bandwidth h,
                               Eigen::Index truncation, double ridge)
{
    if (x.subjects() != y.subjects())
        throw Error(ErrorCode::dimension_mismatch, "predictor and response differ in sample size");
    return functional_cca(run_fpca(x, h, truncation), run_fpca(y, h, truncation), ridge);
}

} // namespace funreg
