#pragma once

#include "funreg/core.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace funreg::app {

enum class Role { predictor, response };

std::string_view to_string(Role role);

/// Shortest text that reads back to the same double ("%.17g").
std::string format_number(double value);

/// Wide format: the first row holds the grid, each further row one curve.
/// Blank lines are ignored. Errors carry the line (and column) they refer to.
FunctionalSample load_sample(const std::filesystem::path& path, Role role);
void save_sample(const std::filesystem::path& path, const FunctionalSample& sample);

/// First row "s\t" then the t grid; each further row s_i then beta(s_i, t_j).
Surface load_surface(const std::filesystem::path& path);
void save_surface(const std::filesystem::path& path, const Surface& surface);

/// A header of column names and rows of raw fields.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::string_view name) const;
    const std::string& text(std::size_t row, std::string_view name) const;
};

Table load_table(const std::filesystem::path& path);
void save_table(const std::filesystem::path& path, const Table& table);

} // namespace funreg::app
