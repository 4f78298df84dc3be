#include "funreg/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace funreg {

namespace {

std::string describe_target(const char* axis, double t, double h)
{
    std::ostringstream os;
    os.precision(17);
    os << "fewer than two design points within bandwidth h=" << h << " of " << axis
       << " target " << t;
    return os.str();
}

void require_within(const Grid& design, const Grid& targets, const char* axis)
{
    if (targets.front() < design.front() || targets.back() > design.back())
        throw Error(ErrorCode::invalid_argument,
                    std::string(axis) + " targets must lie within the design range");
}

// Kernel weights of every design point for every target, plus the local
// moments sum k, sum k u, sum k u^2 with u = (s - t) / h.
struct AxisKernel {
    Eigen::MatrixXd k;  // targets x design
    Eigen::MatrixXd ku; // targets x design
    Eigen::VectorXd m0, m1, m2;
};

AxisKernel axis_kernel(const Grid& design, const Grid& targets, double h, const char* axis)
{
    const auto nt = static_cast<Eigen::Index>(targets.size());
    const auto nd = static_cast<Eigen::Index>(design.size());
    AxisKernel ak{Eigen::MatrixXd::Zero(nt, nd), Eigen::MatrixXd::Zero(nt, nd),
                  Eigen::VectorXd::Zero(nt), Eigen::VectorXd::Zero(nt), Eigen::VectorXd::Zero(nt)};
    const auto pts = design.points();
    for (Eigen::Index i = 0; i < nt; ++i) {
        const double t = targets[static_cast<std::size_t>(i)];
        auto first = std::lower_bound(pts.begin(), pts.end(), t - h);
        int support = 0;
        for (auto it = first; it != pts.end() && *it <= t + h; ++it) {
            const double u = (*it - t) / h;
            const double kv = epanechnikov(u);
            if (kv <= 0.0)
                continue;
            const auto j = static_cast<Eigen::Index>(it - pts.begin());
            ak.k(i, j) = kv;
            ak.ku(i, j) = kv * u;
            ak.m0[i] += kv;
            ak.m1[i] += kv * u;
            ak.m2[i] += kv * u * u;
            ++support;
        }
        if (support < 2)
            throw Error(ErrorCode::bandwidth_too_small, describe_target(axis, t, h));
    }
    return ak;
}

template <int Dim>
double local_intercept(Eigen::Matrix<double, Dim, Dim> gram, const Eigen::Matrix<double, Dim, 1>& rhs)
{
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, Dim, Dim>> es;
    es.computeDirect(gram, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > kMaxLocalCondition)
        gram.diagonal().array() += kRidgeJitter * gram.trace();
    return gram.ldlt().solve(rhs)[0];
}

} // namespace

Bandwidth::Bandwidth(double h)
    : h_(h)
{
    if (!std::isfinite(h) || !(h > 0.0))
        throw Error(ErrorCode::invalid_argument, "bandwidth must be positive and finite");
}

bool Bandwidth::covers(const Grid& grid) const noexcept
{
    return h_ >= 0.5 * grid.max_spacing();
}

double epanechnikov(double u) noexcept
{
    return std::abs(u) <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
}

SampledCurve smooth_curve(const SampledCurve& raw, Bandwidth h, const Grid& targets)
{
    require_within(raw.grid(), targets, "curve");
    const AxisKernel ak = axis_kernel(raw.grid(), targets, h.value(), "curve");
    const Eigen::VectorXd r0 = ak.k * raw.values();
    const Eigen::VectorXd r1 = ak.ku * raw.values();

    Eigen::VectorXd out(static_cast<Eigen::Index>(targets.size()));
    for (Eigen::Index i = 0; i < out.size(); ++i) {
        Eigen::Matrix2d gram;
        gram << ak.m0[i], ak.m1[i], ak.m1[i], ak.m2[i];
        out[i] = local_intercept<2>(gram, Eigen::Vector2d(r0[i], r1[i]));
    }
    return SampledCurve(targets, std::move(out));
}

Surface smooth_surface(const Surface& raw, Bandwidth h, const Grid& targets_s, const Grid& targets_t)
{
    require_within(raw.grid_s(), targets_s, "surface s");
    require_within(raw.grid_t(), targets_t, "surface t");
    const AxisKernel as = axis_kernel(raw.grid_s(), targets_s, h.value(), "surface s");
    const AxisKernel at = axis_kernel(raw.grid_t(), targets_t, h.value(), "surface t");

    // With a product kernel on a product design, the local moments factor
    // across axes and the right-hand sides are bilinear forms in the data.
    const Eigen::MatrixXd y_kt = raw.values() * at.k.transpose();
    const Eigen::MatrixXd a0 = as.k * y_kt;
    const Eigen::MatrixXd au = as.ku * y_kt;
    const Eigen::MatrixXd av = as.k * raw.values() * at.ku.transpose();

    Eigen::MatrixXd out(a0.rows(), a0.cols());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.cols(); ++j) {
            const double s0 = as.m0[i], s1 = as.m1[i], s2 = as.m2[i];
            const double t0 = at.m0[j], t1 = at.m1[j], t2 = at.m2[j];
            Eigen::Matrix3d gram;
            gram << s0 * t0, s1 * t0, s0 * t1,
                    s1 * t0, s2 * t0, s1 * t1,
                    s0 * t1, s1 * t1, s0 * t2;
            out(i, j) = local_intercept<3>(gram, Eigen::Vector3d(a0(i, j), au(i, j), av(i, j)));
        }
    }
    return Surface(targets_s, targets_t, std::move(out));
}

} // namespace funreg
