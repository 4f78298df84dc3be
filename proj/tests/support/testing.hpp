#pragma once

#include "funreg/core.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace funreg::testkit {

inline Grid unit_grid(std::size_t n, double lo = 0.0, double hi = 1.0)
{
    return Grid::uniform(lo, hi, n);
}

inline double max_abs(const Eigen::MatrixXd& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline Eigen::VectorXd evaluate(const Grid& grid, double (*f)(double))
{
    Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j)
        v[static_cast<Eigen::Index>(j)] = f(grid[j]);
    return v;
}

/// Seeded source of random test inputs.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& engine() { return rng_; }

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }
    double normal() { return std::normal_distribution<double>()(rng_); }

    Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols)
    {
        Eigen::MatrixXd m(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                m(i, j) = normal();
        return m;
    }

    Eigen::VectorXd normal_vector(Eigen::Index n) { return normal_matrix(n, 1); }

    /// Irregular increasing grid: random gaps in [0.5, 1.5] times the mean gap.
    Grid irregular_grid(std::size_t n, double lo, double hi)
    {
        std::vector<double> gaps(n - 1);
        for (double& g : gaps)
            g = uniform(0.5, 1.5);
        double total = 0.0;
        for (double g : gaps)
            total += g;
        std::vector<double> pts(n);
        pts[0] = lo;
        for (std::size_t j = 1; j < n; ++j)
            pts[j] = pts[j - 1] + gaps[j - 1] * (hi - lo) / total;
        pts.back() = hi;
        return Grid(std::move(pts));
    }

    /// Random orthogonal matrix from a Householder QR of a Gaussian matrix.
    Eigen::MatrixXd orthogonal(Eigen::Index n)
    {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(n, n));
        return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
    }

private:
    std::mt19937_64 rng_;
};

/// Constant function with unit quadrature norm.
inline Eigen::VectorXd unit_constant(const Grid& grid)
{
    const double measure = quadrature_weights(grid).total();
    return Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.size()), 1.0 / std::sqrt(measure));
}

} // namespace funreg::testkit
