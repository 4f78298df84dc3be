#include "funreg/population.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace funreg::population {

namespace {

constexpr double kOrthonormalTol = 1e-8;
constexpr double kPsdFloor = -1e-10;
constexpr double kNonzeroRho = 1e-12;

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& basis, const QuadratureWeights& w)
{
    return basis.transpose() * w.values().asDiagonal() * basis;
}

double min_weighted_eigenvalue(const Eigen::MatrixXd& surface, const QuadratureWeights& w)
{
    const Eigen::VectorXd root = w.values().cwiseSqrt();
    Eigen::MatrixXd a = root.asDiagonal() * surface * root.asDiagonal();
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, Eigen::Index dim)
{
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd g(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < dim; ++j)
            g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(dim, dim);
}

Eigen::MatrixXd random_smooth_basis(std::mt19937_64& rng, const Grid& grid, Eigen::Index count)
{
    std::normal_distribution<double> gauss;
    const auto n = static_cast<Eigen::Index>(grid.size());
    const double lo = grid.front();
    const double span = grid.back() - grid.front();
    const Eigen::Index freqs = count + 1;
    Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(n, count);
    for (Eigen::Index k = 0; k < count; ++k) {
        for (Eigen::Index f = 0; f <= freqs; ++f) {
            const double a = gauss(rng);
            const double b = gauss(rng);
            for (Eigen::Index j = 0; j < n; ++j) {
                const double u = (grid[static_cast<std::size_t>(j)] - lo) / span;
                const double arg = 2.0 * std::numbers::pi * static_cast<double>(f) * u;
                raw(j, k) += a * std::cos(arg) + (f > 0 ? b * std::sin(arg) : 0.0);
            }
        }
    }
    return orthonormalize(raw, quadrature_weights(grid));
}

// Coefficients (in the phi basis) of Y*_K = sum_{k<K} rho_k U_k R_YY v_k
// as a linear map of xi.
Eigen::MatrixXd fitted_map(const PopulationModel& model, const PopulationCanonical& pc, Eigen::Index k)
{
    const Eigen::MatrixXd ry_v = model.lambda_y().asDiagonal() * pc.v_coef.leftCols(k);
    return ry_v * pc.rho.head(k).asDiagonal() * pc.u_coef.leftCols(k).transpose();
}

double max_abs_up_to_sign(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

} // namespace

PopulationModel::PopulationModel(Grid grid_x, Grid grid_y, Eigen::MatrixXd basis_x, Eigen::MatrixXd basis_y,
                                 Eigen::VectorXd lambda_x, Eigen::VectorXd lambda_y,
                                 Eigen::MatrixXd cross_cov, double noise_sd)
    : grid_x_(std::move(grid_x))
    , grid_y_(std::move(grid_y))
    , basis_x_(std::move(basis_x))
    , basis_y_(std::move(basis_y))
    , lambda_x_(std::move(lambda_x))
    , lambda_y_(std::move(lambda_y))
    , cross_cov_(std::move(cross_cov))
    , noise_sd_(noise_sd)
{
    const Eigen::Index mx = lambda_x_.size();
    const Eigen::Index my = lambda_y_.size();
    if (mx < 1 || my < 1)
        throw Error(ErrorCode::invalid_argument, "a population model needs at least one component per process");
    if (basis_x_.rows() != static_cast<Eigen::Index>(grid_x_.size()) || basis_x_.cols() != mx
        || basis_y_.rows() != static_cast<Eigen::Index>(grid_y_.size()) || basis_y_.cols() != my)
        throw Error(ErrorCode::dimension_mismatch, "basis shapes do not match grids and eigenvalue counts");
    if (cross_cov_.rows() != mx || cross_cov_.cols() != my)
        throw Error(ErrorCode::dimension_mismatch, "cross covariance must be components_x x components_y");
    if (!std::isfinite(noise_sd_) || noise_sd_ < 0.0)
        throw Error(ErrorCode::invalid_argument, "noise_sd must be nonnegative");
    if (!cross_cov_.allFinite() || !basis_x_.allFinite() || !basis_y_.allFinite())
        throw Error(ErrorCode::invalid_argument, "model entries must be finite");
    for (const Eigen::VectorXd* lam : {&lambda_x_, &lambda_y_}) {
        if (!lam->allFinite() || (lam->array() <= 0.0).any())
            throw Error(ErrorCode::rank_deficient, "eigenvalues must be strictly positive");
        for (Eigen::Index m = 1; m < lam->size(); ++m)
            if ((*lam)[m] > (*lam)[m - 1])
                throw Error(ErrorCode::invalid_argument, "eigenvalues must be nonincreasing");
    }
    const auto wx = quadrature_weights(grid_x_);
    const auto wy = quadrature_weights(grid_y_);
    if ((weighted_gram(basis_x_, wx) - Eigen::MatrixXd::Identity(mx, mx)).cwiseAbs().maxCoeff() > kOrthonormalTol
        || (weighted_gram(basis_y_, wy) - Eigen::MatrixXd::Identity(my, my)).cwiseAbs().maxCoeff() > kOrthonormalTol)
        throw Error(ErrorCode::invalid_argument, "bases must be quadrature-orthonormal");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(joint_covariance(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < kPsdFloor)
        throw Error(ErrorCode::not_psd, "joint score covariance is not positive semidefinite");
}

Eigen::MatrixXd PopulationModel::joint_covariance() const
{
    const Eigen::Index mx = lambda_x_.size();
    const Eigen::Index my = lambda_y_.size();
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(mx + my, mx + my);
    joint.topLeftCorner(mx, mx) = lambda_x_.asDiagonal();
    joint.bottomRightCorner(my, my) = lambda_y_.asDiagonal();
    joint.topRightCorner(mx, my) = cross_cov_;
    joint.bottomLeftCorner(my, mx) = cross_cov_.transpose();
    return joint;
}

double PopulationModel::signal_scale() const
{
    return std::sqrt(lambda_y_.sum() / quadrature_weights(grid_y_).total());
}

double PopulationModel::noise_floor() const
{
    return noise_sd_ * noise_sd_ * quadrature_weights(grid_y_).total();
}

PopulationModel PopulationModel::with_noise(double noise_sd) const
{
    PopulationModel copy = *this;
    if (!std::isfinite(noise_sd) || noise_sd < 0.0)
        throw Error(ErrorCode::invalid_argument, "noise_sd must be nonnegative");
    copy.noise_sd_ = noise_sd;
    return copy;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& raw, const QuadratureWeights& w)
{
    if (raw.rows() != w.size())
        throw Error(ErrorCode::dimension_mismatch, "raw functions do not match the weights");
    Eigen::MatrixXd q = raw;
    const auto dot = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (a.array() * b.array() * w.values().array()).sum();
    };
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        Eigen::VectorXd col = q.col(k);
        const double start = std::sqrt(dot(col, col));
        for (int pass = 0; pass < 2; ++pass)
            for (Eigen::Index l = 0; l < k; ++l)
                col -= dot(q.col(l), col) * q.col(l);
        const double norm = std::sqrt(dot(col, col));
        if (!(norm > 1e-10 * start))
            throw Error(ErrorCode::rank_deficient, "functions are linearly dependent on the grid");
        q.col(k) = col / norm;
    }
    return q;
}

Eigen::MatrixXd sine_basis(const Grid& grid, Eigen::Index count)
{
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd raw(n, count);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double u = (grid[static_cast<std::size_t>(j)] - grid.front()) / (grid.back() - grid.front());
        for (Eigen::Index k = 0; k < count; ++k)
            raw(j, k) = std::numbers::sqrt2 * std::sin(static_cast<double>(k + 1) * std::numbers::pi * u);
    }
    return orthonormalize(raw, quadrature_weights(grid));
}

PopulationModel standard_model(Eigen::Index points, double noise_fraction)
{
    const Grid grid = Grid::uniform(0.0, 1.0, static_cast<std::size_t>(points));
    const auto w = quadrature_weights(grid);
    const double pi = std::numbers::pi;
    Eigen::MatrixXd raw_x(points, 2), raw_y(points, 2);
    for (Eigen::Index j = 0; j < points; ++j) {
        const double t = grid[static_cast<std::size_t>(j)];
        raw_x(j, 0) = std::sin(pi * t);
        raw_x(j, 1) = std::cos(pi * t);
        raw_y(j, 0) = std::cos(0.5 * pi * t);
        raw_y(j, 1) = std::sin(0.5 * pi * t);
    }
    const Eigen::Vector2d lambda_x(1.0, 0.5);
    const Eigen::Vector2d lambda_y(1.0, 0.4);
    // zeta = diag(lambda_y)^{1/2} Q diag(lambda_x)^{-1/2} xi with Q a rotation,
    // so cov(zeta) = diag(lambda_y) and the whitened cross-covariance is Q^T.
    const double angle = pi / 6.0;
    Eigen::Matrix2d rot;
    rot << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
    const Eigen::MatrixXd cross =
        lambda_x.cwiseSqrt().asDiagonal() * rot.transpose() * lambda_y.cwiseSqrt().asDiagonal();
    PopulationModel model(grid, grid, orthonormalize(raw_x, w), orthonormalize(raw_y, w), lambda_x,
                          lambda_y, cross, 0.0);
    return model.with_noise(noise_fraction * model.signal_scale());
}

PopulationModel inverse_square_model(Eigen::Index components, Eigen::Index points)
{
    const Grid grid = Grid::uniform(0.0, 1.0, static_cast<std::size_t>(points));
    const Eigen::MatrixXd basis = sine_basis(grid, components);
    Eigen::VectorXd lambda(components);
    Eigen::MatrixXd cross(components, components);
    const ConditionRule rule = ConditionRule::inverse_square();
    for (Eigen::Index m = 0; m < components; ++m) {
        lambda[m] = rule.lambda_x(m + 1);
        for (Eigen::Index j = 0; j < components; ++j)
            cross(m, j) = rule.cross(m + 1, j + 1);
    }
    return PopulationModel(grid, grid, basis, basis, lambda, lambda, cross, 0.0);
}

PopulationModel random_model(std::mt19937_64& rng, Eigen::Index components, Eigen::Index points_x,
                             Eigen::Index points_y)
{
    std::uniform_real_distribution<double> offset(-1.0, 1.0);
    std::uniform_real_distribution<double> length(0.5, 3.0);
    std::uniform_real_distribution<double> eigen(0.05, 2.0);
    std::uniform_real_distribution<double> corr(0.0, 0.95);

    const double ax = offset(rng);
    const double ay = offset(rng);
    const Grid gx = Grid::uniform(ax, ax + length(rng), static_cast<std::size_t>(points_x));
    const Grid gy = Grid::uniform(ay, ay + length(rng), static_cast<std::size_t>(points_y));
    Eigen::MatrixXd bx = random_smooth_basis(rng, gx, components);
    Eigen::MatrixXd by = random_smooth_basis(rng, gy, components);

    Eigen::VectorXd lx(components), ly(components), rho(components);
    for (Eigen::Index m = 0; m < components; ++m) {
        lx[m] = eigen(rng);
        ly[m] = eigen(rng);
        rho[m] = corr(rng);
    }
    std::sort(lx.data(), lx.data() + components, std::greater<>());
    std::sort(ly.data(), ly.data() + components, std::greater<>());
    std::sort(rho.data(), rho.data() + components, std::greater<>());

    const Eigen::MatrixXd p = random_orthogonal(rng, components);
    const Eigen::MatrixXd q = random_orthogonal(rng, components);
    const Eigen::MatrixXd whitened = p * rho.asDiagonal() * q.transpose();
    Eigen::MatrixXd cross = lx.cwiseSqrt().asDiagonal() * whitened * ly.cwiseSqrt().asDiagonal();
    return PopulationModel(gx, gy, std::move(bx), std::move(by), std::move(lx), std::move(ly),
                           std::move(cross), 0.0);
}

Covariances pop_covariances(const PopulationModel& model)
{
    const auto& bx = model.basis_x();
    const auto& by = model.basis_y();
    return Covariances{
        Surface(model.grid_x(), model.grid_x(), bx * model.lambda_x().asDiagonal() * bx.transpose()),
        Surface(model.grid_y(), model.grid_y(), by * model.lambda_y().asDiagonal() * by.transpose()),
        Surface(model.grid_x(), model.grid_y(), bx * model.cross_cov() * by.transpose()),
    };
}

ScoreCanonical canonical_from_moments(const Eigen::VectorXd& lambda_a, const Eigen::VectorXd& lambda_b,
                                      const Eigen::MatrixXd& cross)
{
    if (cross.rows() != lambda_a.size() || cross.cols() != lambda_b.size())
        throw Error(ErrorCode::dimension_mismatch, "cross moments do not match the eigenvalue lists");
    if ((lambda_a.array() <= 0.0).any() || (lambda_b.array() <= 0.0).any())
        throw Error(ErrorCode::rank_deficient, "canonical analysis needs strictly positive eigenvalues");
    const Eigen::MatrixXd r =
        lambda_a.cwiseSqrt().cwiseInverse().asDiagonal() * cross * lambda_b.cwiseSqrt().cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ScoreCanonical out{svd.singularValues(), svd.matrixU(), svd.matrixV()};
    for (Eigen::Index k = 0; k < out.rho.size(); ++k) {
        auto pk = out.p.col(k);
        const double big = pk.cwiseAbs().maxCoeff();
        for (Eigen::Index m = 0; m < pk.size(); ++m) {
            if (std::abs(pk[m]) > 1e-12 * big) {
                if (pk[m] < 0.0) {
                    out.p.col(k) *= -1.0;
                    out.q.col(k) *= -1.0;
                }
                break;
            }
        }
    }
    return out;
}

Eigen::Index PopulationCanonical::nonzero(double tol) const noexcept
{
    return (rho.array() > tol).count();
}

PopulationCanonical pop_canonical(const PopulationModel& model)
{
    const ScoreCanonical sc = canonical_from_moments(model.lambda_x(), model.lambda_y(), model.cross_cov());
    PopulationCanonical pc;
    pc.rho = sc.rho;
    pc.u_coef = model.lambda_x().cwiseSqrt().cwiseInverse().asDiagonal() * sc.p;
    pc.v_coef = model.lambda_y().cwiseSqrt().cwiseInverse().asDiagonal() * sc.q;
    pc.u = model.basis_x() * pc.u_coef;
    pc.v = model.basis_y() * pc.v_coef;
    pc.p = model.basis_x() * sc.p;
    pc.q = model.basis_y() * sc.q;
    return pc;
}

Surface pop_beta_star(const PopulationModel& model, Eigen::Index components)
{
    const PopulationCanonical pc = pop_canonical(model);
    if (components < 0 || components > pc.size())
        throw Error(ErrorCode::truncation_too_large,
                    "model has " + std::to_string(pc.size()) + " canonical components");
    // R_YY v_k = sum_j lambda_Yj <v_k, phi_j> phi_j
    const Eigen::MatrixXd ry_v =
        model.basis_y() * model.lambda_y().asDiagonal() * pc.v_coef.leftCols(components);
    Eigen::MatrixXd beta = pc.u.leftCols(components) * pc.rho.head(components).asDiagonal() * ry_v.transpose();
    return Surface(model.grid_x(), model.grid_y(), std::move(beta));
}

Surface solve_normal_equation(const Surface& r_xx, const Surface& r_xy, double relative_cutoff)
{
    require_same_grid(r_xx.grid_s(), r_xx.grid_t(), "normal equation operator");
    require_same_grid(r_xx.grid_s(), r_xy.grid_s(), "normal equation right-hand side");
    const auto w = quadrature_weights(r_xx.grid_s());
    const Eigen::VectorXd root = w.values().cwiseSqrt();
    Eigen::MatrixXd a = root.asDiagonal() * r_xx.values() * root.asDiagonal();
    a = 0.5 * (a + a.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = relative_cutoff * std::max(ev.cwiseAbs().maxCoeff(), 0.0);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev[i] > cutoff)
            inv[i] = 1.0 / ev[i];
    const Eigen::MatrixXd pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    Eigen::MatrixXd beta = root.cwiseInverse().asDiagonal() * pinv * root.asDiagonal() * r_xy.values();
    return Surface(r_xy.grid_s(), r_xy.grid_t(), std::move(beta));
}

double verify_cross_cov_decomposition(const PopulationModel& model)
{
    const Covariances cov = pop_covariances(model);
    const PopulationCanonical pc = pop_canonical(model);
    const auto wx = quadrature_weights(model.grid_x());
    const auto wy = quadrature_weights(model.grid_y());
    const Eigen::MatrixXd rxx_u = cov.xx.values() * wx.values().asDiagonal() * pc.u;
    const Eigen::MatrixXd ryy_v = cov.yy.values() * wy.values().asDiagonal() * pc.v;
    const Eigen::MatrixXd rhs = rxx_u * pc.rho.asDiagonal() * ryy_v.transpose();
    return (cov.xy.values() - rhs).cwiseAbs().maxCoeff();
}

TruncationCheck verify_truncation_identity(const PopulationModel& model, Eigen::Index components)
{
    const PopulationCanonical pc = pop_canonical(model);
    if (components < 0 || components > pc.size())
        throw Error(ErrorCode::truncation_too_large,
                    "model has " + std::to_string(pc.size()) + " canonical components");

    // Score-law route: Y*_K = phi^T G_K xi.
    const Eigen::MatrixXd g_k = fitted_map(model, pc, components);
    const Eigen::MatrixXd g_all = fitted_map(model, pc, pc.size());
    const Eigen::MatrixXd lx = model.lambda_x().asDiagonal();
    TruncationCheck out{};
    out.lhs = model.lambda_y().sum() - 2.0 * (g_k * model.cross_cov()).trace()
              + (g_k * lx * g_k.transpose()).trace();
    const Eigen::MatrixXd gap = g_all - g_k;
    out.tail_lhs = (gap * lx * gap.transpose()).trace();

    // Grid route: quadrature trace and quadrature norms of R_YY v_k.
    const Covariances cov = pop_covariances(model);
    const auto wy = quadrature_weights(model.grid_y());
    const double trace = cov.yy.values().diagonal().dot(wy.values());
    const Eigen::MatrixXd ryy_v = cov.yy.values() * wy.values().asDiagonal() * pc.v;
    double head = 0.0;
    double tail = 0.0;
    for (Eigen::Index k = 0; k < pc.size(); ++k) {
        const double term = pc.rho[k] * pc.rho[k] * ryy_v.col(k).cwiseAbs2().dot(wy.values());
        (k < components ? head : tail) += term;
    }
    out.rhs = trace - head;
    out.tail_rhs = tail;
    out.residual = std::abs(out.lhs - out.rhs);
    out.tail_residual = std::abs(out.tail_lhs - out.tail_rhs);
    return out;
}

double OrderingCheck::min() const noexcept
{
    return std::min({fitted_vs_truncated, canonical_vs_fitted, response_vs_canonical});
}

OrderingCheck verify_operator_ordering(const PopulationModel& model, Eigen::Index components)
{
    const PopulationCanonical pc = pop_canonical(model);
    if (components < 0 || components > pc.size())
        throw Error(ErrorCode::truncation_too_large,
                    "model has " + std::to_string(pc.size()) + " canonical components");
    const Eigen::MatrixXd lx = model.lambda_x().asDiagonal();
    const Eigen::MatrixXd ly = model.lambda_y().asDiagonal();

    const Eigen::MatrixXd g_k = fitted_map(model, pc, components);
    const Eigen::MatrixXd g_all = fitted_map(model, pc, pc.size());
    // Canonical part of Y: sum over nonzero rho of V_m R_YY v_m, a map of zeta.
    const Eigen::Index active = pc.nonzero(kNonzeroRho);
    const Eigen::MatrixXd ry_v = ly * pc.v_coef.leftCols(active);
    const Eigen::MatrixXd h = ry_v * pc.v_coef.leftCols(active).transpose();

    const auto& by = model.basis_y();
    const auto surface = [&](const Eigen::MatrixXd& coef_cov) -> Eigen::MatrixXd {
        return by * coef_cov * by.transpose();
    };
    const Eigen::MatrixXd r_trunc = surface(g_k * lx * g_k.transpose());
    const Eigen::MatrixXd r_fitted = surface(g_all * lx * g_all.transpose());
    const Eigen::MatrixXd r_canon = surface(h * ly * h.transpose());
    const Eigen::MatrixXd r_resp = surface(ly);

    const auto wy = quadrature_weights(model.grid_y());
    return OrderingCheck{
        min_weighted_eigenvalue(r_fitted - r_trunc, wy),
        min_weighted_eigenvalue(r_canon - r_fitted, wy),
        min_weighted_eigenvalue(r_resp - r_canon, wy),
    };
}

FittedCorrelationCheck verify_fitted_correlations(const PopulationModel& model)
{
    const PopulationCanonical pc = pop_canonical(model);
    const Eigen::Index active = pc.nonzero(kNonzeroRho);
    const Eigen::MatrixXd lx = model.lambda_x().asDiagonal();
    const Eigen::MatrixXd g = fitted_map(model, pc, pc.size());

    FittedCorrelationCheck out{};
    out.expected = pc.rho.head(active);
    if (active == 0) {
        out.correlations.resize(0);
        return out;
    }

    // Karhunen-Loeve expansion of Y* in the phi basis.
    const Eigen::MatrixXd fitted_cov = g * lx * g.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (fitted_cov + fitted_cov.transpose()));
    const Eigen::Index my = fitted_cov.rows();
    const double top = es.eigenvalues().maxCoeff();
    Eigen::Index keep = 0;
    while (keep < my && es.eigenvalues()[my - 1 - keep] > 1e-12 * top)
        ++keep;
    Eigen::VectorXd mu(keep);
    Eigen::MatrixXd e(my, keep);
    for (Eigen::Index k = 0; k < keep; ++k) {
        mu[k] = es.eigenvalues()[my - 1 - k];
        e.col(k) = es.eigenvectors().col(my - 1 - k);
    }
    // cov(zeta, e^T G xi) = cross^T G^T e
    const Eigen::MatrixXd cross = model.cross_cov().transpose() * g.transpose() * e;
    const ScoreCanonical sc = canonical_from_moments(model.lambda_y(), mu, cross);
    out.correlations = sc.rho;

    const Eigen::Index common = std::min(active, out.correlations.size());
    out.max_correlation_error = active == out.correlations.size() ? 0.0 : std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < common; ++k) {
        out.max_correlation_error = std::max(out.max_correlation_error, std::abs(out.correlations[k] - pc.rho[k]));
        const bool separated = (k == 0 || pc.rho[k - 1] - pc.rho[k] > 1e-6)
                               && (k + 1 >= active || pc.rho[k] - pc.rho[k + 1] > 1e-6);
        if (!separated)
            continue;
        const Eigen::VectorXd weight_y = model.lambda_y().cwiseSqrt().cwiseInverse().asDiagonal() * sc.p.col(k);
        out.max_weight_error = std::max(out.max_weight_error, max_abs_up_to_sign(weight_y, pc.v_coef.col(k)));

        const Eigen::VectorXd fitted_weight = e * mu.cwiseSqrt().cwiseInverse().asDiagonal() * sc.q.col(k);
        const Eigen::VectorXd variate = lx.cwiseSqrt() * g.transpose() * fitted_weight;
        const Eigen::VectorXd expected = lx.cwiseSqrt() * g.transpose() * pc.v_coef.col(k) / pc.rho[k];
        out.max_variate_error = std::max(out.max_variate_error, max_abs_up_to_sign(variate, expected));
    }
    return out;
}

ConditionRule ConditionRule::inverse_square()
{
    return ConditionRule{
        [](long m) { return 1.0 / (static_cast<double>(m) * static_cast<double>(m)); },
        [](long j) { return 1.0 / (static_cast<double>(j) * static_cast<double>(j)); },
        [](long m, long j) {
            const double a = static_cast<double>(m + 1);
            const double b = static_cast<double>(j + 1);
            return 1.0 / (a * a * b * b);
        },
    };
}

std::vector<ConditionRow> check_conditions(const ConditionRule& rule, const std::vector<long>& truncations)
{
    if (truncations.empty())
        return {};
    for (long m : truncations)
        if (m < 1)
            throw Error(ErrorCode::invalid_argument, "truncations must be at least 1");
    const long top = 2 * *std::max_element(truncations.begin(), truncations.end());

    std::vector<double> lx(static_cast<std::size_t>(top + 1)), ly(static_cast<std::size_t>(top + 1));
    for (long m = 1; m <= top; ++m) {
        lx[static_cast<std::size_t>(m)] = rule.lambda_x(m);
        ly[static_cast<std::size_t>(m)] = rule.lambda_y(m);
    }
    const auto terms = [&](long m, long j) {
        const double c = rule.cross(m, j);
        const double a = c / lx[static_cast<std::size_t>(m)];
        const double b = a / std::sqrt(ly[static_cast<std::size_t>(j)]);
        return std::pair<long double, long double>(a * a, b * b);
    };

    // Partial sums over the square [1, M]^2 grow by one new row and column.
    std::vector<double> c1(static_cast<std::size_t>(top + 1), 0.0), c2(static_cast<std::size_t>(top + 1), 0.0);
    long double s1 = 0.0L, s2 = 0.0L;
    for (long m = 1; m <= top; ++m) {
        for (long j = 1; j <= m; ++j) {
            auto [a, b] = terms(m, j);
            s1 += a;
            s2 += b;
            if (j != m) {
                auto [a2, b2] = terms(j, m);
                s1 += a2;
                s2 += b2;
            }
        }
        c1[static_cast<std::size_t>(m)] = static_cast<double>(s1);
        c2[static_cast<std::size_t>(m)] = static_cast<double>(s2);
    }

    std::vector<ConditionRow> rows;
    rows.reserve(truncations.size());
    for (long m : truncations) {
        const auto i = static_cast<std::size_t>(m);
        const auto i2 = static_cast<std::size_t>(2 * m);
        const auto ratio = [](double num, double den) {
            return den == 0.0 ? (num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity()) : num / den;
        };
        rows.push_back(ConditionRow{m, c1[i], c2[i], ratio(c1[i2], c1[i]), ratio(c2[i2], c2[i])});
    }
    return rows;
}

std::pair<FunctionalSample, FunctionalSample> simulate(const PopulationModel& model, Eigen::Index n,
                                                       std::uint64_t seed)
{
    if (n < 1)
        throw Error(ErrorCode::invalid_argument, "simulation needs n >= 1");
    const Eigen::MatrixXd joint = model.joint_covariance();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(joint);
    if (es.eigenvalues().minCoeff() < kPsdFloor)
        throw Error(ErrorCode::not_psd, "joint score covariance is not positive semidefinite");
    const Eigen::MatrixXd factor =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();

    const Eigen::Index mx = model.components_x();
    const Eigen::Index my = model.components_y();
    const Eigen::Index nx = model.basis_x().rows();
    const Eigen::Index ny = model.basis_y().rows();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd draws(n, mx + my);
    Eigen::MatrixXd noise_x(n, nx), noise_y(n, ny);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index k = 0; k < mx + my; ++k)
            draws(i, k) = gauss(rng);
        for (Eigen::Index j = 0; j < nx; ++j)
            noise_x(i, j) = gauss(rng);
        for (Eigen::Index j = 0; j < ny; ++j)
            noise_y(i, j) = gauss(rng);
    }
    const Eigen::MatrixXd scores = draws * factor.transpose();
    Eigen::MatrixXd x = scores.leftCols(mx) * model.basis_x().transpose() + model.noise_sd() * noise_x;
    Eigen::MatrixXd y = scores.rightCols(my) * model.basis_y().transpose() + model.noise_sd() * noise_y;
    return {FunctionalSample(model.grid_x(), std::move(x)), FunctionalSample(model.grid_y(), std::move(y))};
}

} // namespace funreg::population
