#include "funreg/core.hpp"

#include <cmath>
#include <string>

namespace funreg {

namespace {

bool all_finite(const Eigen::Ref<const Eigen::MatrixXd>& m)
{
    return m.allFinite();
}

} // namespace

Grid::Grid(std::vector<double> points)
    : points_(std::move(points))
{
    if (points_.size() < 2)
        throw Error(ErrorCode::invalid_grid, "a grid needs at least 2 points, got "
                                                 + std::to_string(points_.size()));
    for (std::size_t j = 0; j < points_.size(); ++j) {
        if (!std::isfinite(points_[j]))
            throw Error(ErrorCode::invalid_grid, "grid point " + std::to_string(j) + " is not finite");
        if (j > 0 && !(points_[j] > points_[j - 1]))
            throw Error(ErrorCode::invalid_grid,
                        "grid is not strictly increasing at index " + std::to_string(j));
    }
}

Grid Grid::uniform(double lo, double hi, std::size_t count)
{
    if (count < 2)
        throw Error(ErrorCode::invalid_grid, "a grid needs at least 2 points");
    std::vector<double> points(count);
    const double step = (hi - lo) / static_cast<double>(count - 1);
    for (std::size_t j = 0; j < count; ++j)
        points[j] = lo + step * static_cast<double>(j);
    points.back() = hi;
    return Grid(std::move(points));
}

double Grid::max_spacing() const noexcept
{
    double widest = 0.0;
    for (std::size_t j = 1; j < points_.size(); ++j)
        widest = std::max(widest, points_[j] - points_[j - 1]);
    return widest;
}

QuadratureWeights::QuadratureWeights(Eigen::VectorXd weights)
    : weights_(std::move(weights))
{
    if (weights_.size() < 2)
        throw Error(ErrorCode::invalid_grid, "quadrature needs at least 2 weights");
    if (!all_finite(weights_) || (weights_.array() <= 0.0).any())
        throw Error(ErrorCode::invalid_grid, "quadrature weights must be positive and finite");
}

QuadratureWeights quadrature_weights(const Grid& grid)
{
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::VectorXd w(n);
    // s_0 = 2 s_1 - s_2, so s_1 - s_0 = s_2 - s_1.
    w[0] = grid[1] - grid[0];
    for (Eigen::Index j = 1; j < n; ++j)
        w[j] = grid[static_cast<std::size_t>(j)] - grid[static_cast<std::size_t>(j - 1)];
    return QuadratureWeights(std::move(w));
}

SampledCurve::SampledCurve(Grid grid, Eigen::VectorXd values)
    : grid_(std::move(grid))
    , values_(std::move(values))
{
    if (static_cast<std::size_t>(values_.size()) != grid_.size())
        throw Error(ErrorCode::dimension_mismatch,
                    "curve has " + std::to_string(values_.size()) + " values for a grid of "
                        + std::to_string(grid_.size()) + " points");
    if (!all_finite(values_))
        throw Error(ErrorCode::invalid_argument, "curve values must be finite");
}

SampledCurve SampledCurve::zeros(const Grid& grid)
{
    return SampledCurve(grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size())));
}

FunctionalSample::FunctionalSample(Grid grid, Eigen::MatrixXd matrix)
    : grid_(std::move(grid))
    , matrix_(std::move(matrix))
{
    if (matrix_.rows() < 1)
        throw Error(ErrorCode::invalid_argument, "a functional sample needs at least one curve");
    if (static_cast<std::size_t>(matrix_.cols()) != grid_.size())
        throw Error(ErrorCode::dimension_mismatch,
                    "sample has " + std::to_string(matrix_.cols()) + " columns for a grid of "
                        + std::to_string(grid_.size()) + " points");
    if (!all_finite(matrix_))
        throw Error(ErrorCode::invalid_argument, "sample values must be finite");
}

FunctionalSample FunctionalSample::centered(Grid grid, Eigen::MatrixXd matrix, SampledCurve mean)
{
    require_same_grid(grid, mean.grid(), "centering mean");
    FunctionalSample sample(std::move(grid), std::move(matrix));
    sample.mean_ = std::move(mean);
    return sample;
}

SampledCurve FunctionalSample::curve(Eigen::Index i) const
{
    return SampledCurve(grid_, matrix_.row(i).transpose());
}

FunctionalSample FunctionalSample::without(Eigen::Index i) const
{
    if (matrix_.rows() < 2)
        throw Error(ErrorCode::invalid_argument, "cannot drop the only curve of a sample");
    const Eigen::Index n = matrix_.rows();
    Eigen::MatrixXd rest(n - 1, matrix_.cols());
    rest.topRows(i) = matrix_.topRows(i);
    rest.bottomRows(n - 1 - i) = matrix_.bottomRows(n - 1 - i);
    return FunctionalSample(grid_, std::move(rest));
}

Surface::Surface(Grid grid_s, Grid grid_t, Eigen::MatrixXd values)
    : grid_s_(std::move(grid_s))
    , grid_t_(std::move(grid_t))
    , values_(std::move(values))
{
    if (static_cast<std::size_t>(values_.rows()) != grid_s_.size()
        || static_cast<std::size_t>(values_.cols()) != grid_t_.size())
        throw Error(ErrorCode::dimension_mismatch, "surface values do not match its grids");
    if (!all_finite(values_))
        throw Error(ErrorCode::invalid_argument, "surface values must be finite");
}

Surface Surface::zeros(const Grid& grid_s, const Grid& grid_t)
{
    return Surface(grid_s, grid_t,
                   Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(grid_s.size()),
                                         static_cast<Eigen::Index>(grid_t.size())));
}

double integrate(const SampledCurve& curve, const QuadratureWeights& w)
{
    if (curve.size() != w.size())
        throw Error(ErrorCode::dimension_mismatch, "curve and weights differ in length");
    return curve.values().dot(w.values());
}

double inner_product(const SampledCurve& f, const SampledCurve& g, const QuadratureWeights& w)
{
    require_same_grid(f.grid(), g.grid(), "inner product");
    if (f.size() != w.size())
        throw Error(ErrorCode::dimension_mismatch, "curves and weights differ in length");
    return (f.values().array() * g.values().array() * w.values().array()).sum();
}

double quadrature_norm(const Surface& surface)
{
    const auto ws = quadrature_weights(surface.grid_s()).values();
    const auto wt = quadrature_weights(surface.grid_t()).values();
    const double sq = (ws.transpose() * surface.values().cwiseAbs2() * wt)(0, 0);
    return std::sqrt(sq);
}

double quadrature_distance(const Surface& a, const Surface& b)
{
    require_same_grid(a.grid_s(), b.grid_s(), "surface distance (s)");
    require_same_grid(a.grid_t(), b.grid_t(), "surface distance (t)");
    return quadrature_norm(Surface(a.grid_s(), a.grid_t(), a.values() - b.values()));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what)
{
    if (!(a == b))
        throw Error(ErrorCode::dimension_mismatch, std::string("grid mismatch in ") + what);
}

} // namespace funreg
