#pragma once

#include "funreg/core.hpp"

namespace funreg {

/// Kernel half-width, in the units of the grid it smooths over.
class Bandwidth {
public:
    explicit Bandwidth(double h);

    double value() const noexcept { return h_; }
    /// h >= half the widest spacing of `grid`.
    bool covers(const Grid& grid) const noexcept;

    auto operator<=>(const Bandwidth&) const = default;

private:
    double h_;
};

/// K(u) = 0.75 (1 - u^2) on |u| <= 1.
double epanechnikov(double u) noexcept;

/// Condition number above which the local normal matrix is jittered by
/// `kRidgeJitter * trace` on its diagonal.
inline constexpr double kMaxLocalCondition = 1e12;
inline constexpr double kRidgeJitter = 1e-12;

/// Local linear smoother evaluated at `targets`. Throws
/// bandwidth_too_small when a target sees fewer than two design points.
SampledCurve smooth_curve(const SampledCurve& raw, Bandwidth h, const Grid& targets);

/// Local plane smoother with a product Epanechnikov kernel.
Surface smooth_surface(const Surface& raw, Bandwidth h, const Grid& targets_s, const Grid& targets_t);

} // namespace funreg
