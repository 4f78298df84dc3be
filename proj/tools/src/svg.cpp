#include "funreg/app/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

namespace funreg::app {

namespace {

constexpr double kPanelWidth = 260.0;
constexpr double kPanelHeight = 200.0;
constexpr double kMargin = 24.0;

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace

void write_trajectory_svg(const std::filesystem::path& path, const Grid& grid,
                          const std::vector<TrajectoryPanel>& panels)
{
    for (const auto& p : panels)
        if (p.observed.size() != static_cast<Eigen::Index>(grid.size()) || p.fcr.size() != p.observed.size()
            || p.fpr.size() != p.observed.size())
            throw Error(ErrorCode::dimension_mismatch, "trajectory panel does not match the grid");
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::invalid_argument, "cannot write '" + path.string() + "'");

    const double width = std::max<double>(1.0, static_cast<double>(panels.size())) * kPanelWidth;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width) << "\" height=\""
        << fixed(kPanelHeight) << "\" font-family=\"sans-serif\" font-size=\"11\">\n";

    for (std::size_t k = 0; k < panels.size(); ++k) {
        const TrajectoryPanel& p = panels[k];
        double lo = std::min({p.observed.minCoeff(), p.fcr.minCoeff(), p.fpr.minCoeff()});
        double hi = std::max({p.observed.maxCoeff(), p.fcr.maxCoeff(), p.fpr.maxCoeff()});
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double x0 = static_cast<double>(k) * kPanelWidth + kMargin;
        const double x1 = static_cast<double>(k + 1) * kPanelWidth - kMargin / 2;
        const double y0 = kPanelHeight - kMargin;
        const double y1 = kMargin;
        const auto px = [&](double t) { return x0 + (t - grid.front()) / (grid.back() - grid.front()) * (x1 - x0); };
        const auto py = [&](double v) { return y0 + (v - lo) / (hi - lo) * (y1 - y0); };

        out << "  <rect x=\"" << fixed(x0) << "\" y=\"" << fixed(y1) << "\" width=\"" << fixed(x1 - x0)
            << "\" height=\"" << fixed(y0 - y1) << "\" fill=\"none\" stroke=\"#999\"/>\n";
        out << "  <text x=\"" << fixed(x0) << "\" y=\"" << fixed(y1 - 6) << "\">" << p.title << "</text>\n";
        const auto line = [&](const Eigen::VectorXd& v, const char* colour, const char* dash) {
            out << "  <polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"";
            if (*dash)
                out << " stroke-dasharray=\"" << dash << "\"";
            out << " points=\"";
            for (Eigen::Index j = 0; j < v.size(); ++j)
                out << (j ? " " : "") << fixed(px(grid[static_cast<std::size_t>(j)])) << ',' << fixed(py(v[j]));
            out << "\"/>\n";
        };
        line(p.observed, "#000", "");
        line(p.fcr, "#1f77b4", "6 3");
        line(p.fpr, "#d62728", "2 2");
    }
    out << "</svg>\n";
    if (!out)
        throw Error(ErrorCode::invalid_argument, "failed writing '" + path.string() + "'");
}

} // namespace funreg::app
