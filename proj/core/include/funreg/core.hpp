#pragma once

#include "funreg/error.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace funreg {

/// Strictly increasing, finite sampling points of one process index set.
/// Immutable after construction; grids compare by value.
class Grid {
public:
    explicit Grid(std::vector<double> points);

    /// `count` equidistant points spanning [lo, hi].
    static Grid uniform(double lo, double hi, std::size_t count);

    std::span<const double> points() const noexcept { return points_; }
    std::size_t size() const noexcept { return points_.size(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const noexcept { return points_.front(); }
    double back() const noexcept { return points_.back(); }
    double max_spacing() const noexcept;

    Eigen::Map<const Eigen::VectorXd> vector() const noexcept
    {
        return {points_.data(), static_cast<Eigen::Index>(points_.size())};
    }

    bool operator==(const Grid&) const = default;

private:
    std::vector<double> points_;
};

/// Riemann-sum weights w_j = s_j - s_{j-1}, with the left extension
/// s_0 := 2 s_1 - s_2 so the first weight repeats the first spacing.
class QuadratureWeights {
public:
    explicit QuadratureWeights(Eigen::VectorXd weights);

    const Eigen::VectorXd& values() const noexcept { return weights_; }
    Eigen::Index size() const noexcept { return weights_.size(); }
    double operator[](Eigen::Index j) const { return weights_[j]; }
    double total() const noexcept { return weights_.sum(); }

private:
    Eigen::VectorXd weights_;
};

QuadratureWeights quadrature_weights(const Grid& grid);

class SampledCurve {
public:
    SampledCurve(Grid grid, Eigen::VectorXd values);

    static SampledCurve zeros(const Grid& grid);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::VectorXd& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.size(); }
    double operator[](Eigen::Index j) const { return values_[j]; }

private:
    Grid grid_;
    Eigen::VectorXd values_;
};

/// n curves on a common grid, one subject per row.
class FunctionalSample {
public:
    FunctionalSample(Grid grid, Eigen::MatrixXd matrix);

    /// A centered sample; `mean` is the curve that was subtracted.
    static FunctionalSample centered(Grid grid, Eigen::MatrixXd matrix, SampledCurve mean);

    const Grid& grid() const noexcept { return grid_; }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    Eigen::Index subjects() const noexcept { return matrix_.rows(); }
    Eigen::Index points() const noexcept { return matrix_.cols(); }
    bool is_centered() const noexcept { return mean_.has_value(); }
    const std::optional<SampledCurve>& mean_curve() const noexcept { return mean_; }

    SampledCurve curve(Eigen::Index i) const;
    /// Copy without subject `i`; centering information is dropped.
    FunctionalSample without(Eigen::Index i) const;

private:
    Grid grid_;
    Eigen::MatrixXd matrix_;
    std::optional<SampledCurve> mean_;
};

/// A function on grid_s x grid_t (covariance, cross-covariance, beta).
class Surface {
public:
    Surface(Grid grid_s, Grid grid_t, Eigen::MatrixXd values);

    static Surface zeros(const Grid& grid_s, const Grid& grid_t);

    const Grid& grid_s() const noexcept { return grid_s_; }
    const Grid& grid_t() const noexcept { return grid_t_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

private:
    Grid grid_s_;
    Grid grid_t_;
    Eigen::MatrixXd values_;
};

double integrate(const SampledCurve& curve, const QuadratureWeights& w);

double inner_product(const SampledCurve& f, const SampledCurve& g, const QuadratureWeights& w);

/// sqrt(sum_ij f(s_i, t_j)^2 w_i w_j) with the grids' own weights.
double quadrature_norm(const Surface& surface);

/// quadrature_norm(a - b); grids must agree.
double quadrature_distance(const Surface& a, const Surface& b);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

} // namespace funreg
