#include "funreg/app/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace funreg::app {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> fields;
};

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<Line> read_lines(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::invalid_argument, "cannot open '" + path.string() + "'");
    std::vector<Line> lines;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (trim(raw).empty())
            continue;
        Line line{number, {}};
        std::size_t start = 0;
        while (true) {
            const auto comma = raw.find(',', start);
            line.fields.push_back(trim(std::string_view(raw).substr(start, comma - start)));
            if (comma == std::string::npos)
                break;
            start = comma + 1;
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

std::string where(const std::filesystem::path& path, std::size_t line)
{
    return path.string() + ":" + std::to_string(line);
}

double parse_number(const std::string& field, const std::filesystem::path& path, std::size_t line,
                    std::size_t column)
{
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (field.empty() || ec != std::errc() || ptr != end)
        throw Error(ErrorCode::parse_error, where(path, line) + ": column " + std::to_string(column + 1)
                                                + " is not a number: '" + field + "'");
    return value;
}

std::vector<double> parse_grid(const Line& line, std::size_t skip, const std::filesystem::path& path)
{
    if (line.fields.size() < skip + 2)
        throw Error(ErrorCode::parse_error,
                    where(path, line.number) + ": malformed header, a grid needs at least 2 values");
    std::vector<double> grid;
    grid.reserve(line.fields.size() - skip);
    for (std::size_t c = skip; c < line.fields.size(); ++c) {
        const double value = parse_number(line.fields[c], path, line.number, c);
        if (!std::isfinite(value))
            throw Error(ErrorCode::parse_error, where(path, line.number) + ": malformed header, column "
                                                    + std::to_string(c + 1) + " is not finite");
        if (!grid.empty() && value == grid.back())
            throw Error(ErrorCode::invalid_grid, where(path, line.number) + ": column " + std::to_string(c + 1)
                                                     + " repeats grid value " + format_number(value));
        if (!grid.empty() && value < grid.back())
            throw Error(ErrorCode::invalid_grid, where(path, line.number) + ": column " + std::to_string(c + 1)
                                                     + " breaks the increasing grid order");
        grid.push_back(value);
    }
    return grid;
}

std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::invalid_argument, "cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out)
        throw Error(ErrorCode::invalid_argument, "failed writing '" + path.string() + "'");
}

void write_row(std::ostream& out, std::span<const double> values)
{
    for (std::size_t j = 0; j < values.size(); ++j) {
        if (j > 0)
            out << ',';
        out << format_number(values[j]);
    }
    out << '\n';
}

} // namespace

std::string_view to_string(Role role)
{
    return role == Role::predictor ? "predictor" : "response";
}

std::string format_number(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

FunctionalSample load_sample(const std::filesystem::path& path, Role role)
{
    const std::vector<Line> lines = read_lines(path);
    const std::string label = std::string(to_string(role)) + " file ";
    if (lines.empty())
        throw Error(ErrorCode::parse_error, label + where(path, 1) + ": malformed header, file is empty");
    std::vector<double> grid = parse_grid(lines.front(), 0, path);
    if (lines.size() < 2)
        throw Error(ErrorCode::parse_error, label + path.string() + " holds a grid but no curves");

    const auto n = static_cast<Eigen::Index>(lines.size() - 1);
    const auto points = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd values(n, points);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Line& line = lines[static_cast<std::size_t>(i + 1)];
        if (line.fields.size() != grid.size())
            throw Error(ErrorCode::parse_error, label + where(path, line.number) + ": ragged row with "
                                                    + std::to_string(line.fields.size()) + " fields, expected "
                                                    + std::to_string(grid.size()));
        for (Eigen::Index j = 0; j < points; ++j) {
            const double v = parse_number(line.fields[static_cast<std::size_t>(j)], path, line.number,
                                          static_cast<std::size_t>(j));
            if (!std::isfinite(v))
                throw Error(ErrorCode::parse_error, label + where(path, line.number) + ": column "
                                                        + std::to_string(j + 1) + " is not finite");
            values(i, j) = v;
        }
    }
    return FunctionalSample(Grid(std::move(grid)), std::move(values));
}

void save_sample(const std::filesystem::path& path, const FunctionalSample& sample)
{
    std::ofstream out = open_output(path);
    write_row(out, sample.grid().points());
    const Eigen::Index points = sample.points();
    std::vector<double> row(static_cast<std::size_t>(points));
    for (Eigen::Index i = 0; i < sample.subjects(); ++i) {
        for (Eigen::Index j = 0; j < points; ++j)
            row[static_cast<std::size_t>(j)] = sample.matrix()(i, j);
        write_row(out, row);
    }
    finish(out, path);
}

Surface load_surface(const std::filesystem::path& path)
{
    const std::vector<Line> lines = read_lines(path);
    if (lines.empty())
        throw Error(ErrorCode::parse_error, where(path, 1) + ": malformed header, file is empty");
    std::vector<double> grid_t = parse_grid(lines.front(), 1, path);
    if (lines.size() < 3)
        throw Error(ErrorCode::parse_error, path.string() + ": a surface needs at least 2 rows");

    const auto rows = static_cast<Eigen::Index>(lines.size() - 1);
    const auto cols = static_cast<Eigen::Index>(grid_t.size());
    std::vector<double> grid_s;
    grid_s.reserve(static_cast<std::size_t>(rows));
    Eigen::MatrixXd values(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const Line& line = lines[static_cast<std::size_t>(i + 1)];
        if (line.fields.size() != grid_t.size() + 1)
            throw Error(ErrorCode::parse_error, where(path, line.number) + ": ragged row with "
                                                    + std::to_string(line.fields.size()) + " fields, expected "
                                                    + std::to_string(grid_t.size() + 1));
        const double s = parse_number(line.fields[0], path, line.number, 0);
        if (!grid_s.empty() && !(s > grid_s.back()))
            throw Error(ErrorCode::invalid_grid,
                        where(path, line.number) + ": column 1 breaks the increasing grid order");
        grid_s.push_back(s);
        for (Eigen::Index j = 0; j < cols; ++j)
            values(i, j) = parse_number(line.fields[static_cast<std::size_t>(j + 1)], path, line.number,
                                        static_cast<std::size_t>(j + 1));
    }
    return Surface(Grid(std::move(grid_s)), Grid(std::move(grid_t)), std::move(values));
}

void save_surface(const std::filesystem::path& path, const Surface& surface)
{
    std::ofstream out = open_output(path);
    out << "s\\t";
    for (double t : surface.grid_t().points())
        out << ',' << format_number(t);
    out << '\n';
    const Eigen::Index cols = surface.values().cols();
    std::vector<double> row(static_cast<std::size_t>(cols + 1));
    for (Eigen::Index i = 0; i < surface.values().rows(); ++i) {
        row[0] = surface.grid_s()[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < cols; ++j)
            row[static_cast<std::size_t>(j + 1)] = surface.values()(i, j);
        write_row(out, row);
    }
    finish(out, path);
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name)
            return c;
    throw Error(ErrorCode::parse_error, "table has no column '" + std::string(name) + "'");
}

const std::string& Table::text(std::size_t row, std::string_view name) const
{
    return rows.at(row).at(column(name));
}

double Table::number(std::size_t row, std::string_view name) const
{
    const std::string& field = text(row, name);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size())
        throw Error(ErrorCode::parse_error, "row " + std::to_string(row + 1) + ", column '" + std::string(name)
                                                + "' is not a number: '" + field + "'");
    return value;
}

Table load_table(const std::filesystem::path& path)
{
    std::vector<Line> lines = read_lines(path);
    if (lines.empty())
        throw Error(ErrorCode::parse_error, where(path, 1) + ": malformed header, file is empty");
    Table table{std::move(lines.front().fields), {}};
    for (std::size_t r = 1; r < lines.size(); ++r) {
        if (lines[r].fields.size() != table.header.size())
            throw Error(ErrorCode::parse_error, where(path, lines[r].number) + ": ragged row with "
                                                    + std::to_string(lines[r].fields.size())
                                                    + " fields, expected " + std::to_string(table.header.size()));
        table.rows.push_back(std::move(lines[r].fields));
    }
    return table;
}

void save_table(const std::filesystem::path& path, const Table& table)
{
    std::ofstream out = open_output(path);
    const auto emit = [&](const std::vector<std::string>& fields) {
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (fields[c].find_first_of(",\n") != std::string::npos)
                throw Error(ErrorCode::invalid_argument, "table field contains a separator: '" + fields[c] + "'");
            out << (c > 0 ? "," : "") << fields[c];
        }
        out << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw Error(ErrorCode::dimension_mismatch, "table row width differs from its header");
        emit(row);
    }
    finish(out, path);
}

} // namespace funreg::app
