#pragma once

#include "funreg/core.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace funreg::app {

struct TrajectoryPanel {
    std::string title;
    Eigen::VectorXd observed;
    Eigen::VectorXd fcr;
    Eigen::VectorXd fpr;
};

/// One small line plot per panel, laid out in a row: observed (solid),
/// FCR (dashed) and FPR (dotted) predictions over the response grid.
void write_trajectory_svg(const std::filesystem::path& path, const Grid& grid,
                          const std::vector<TrajectoryPanel>& panels);

} // namespace funreg::app
