#pragma once

#include <string>
#include <vector>

namespace heatctl {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    /// 1-based file line number of each data row (for error messages).
    std::vector<std::size_t> line_numbers;
};

/// Reads a comma-separated file with a header row. No quoting support:
/// every file format in this project is plain numeric columns.
CsvTable read_csv(const std::string& path);

std::vector<std::string> split_csv_line(const std::string& line);

double parse_double_field(const std::string& field, const std::string& column,
                          std::size_t line_number);

}  // namespace heatctl
