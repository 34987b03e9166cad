#include "heatctl/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace heatctl {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(current);
            current.clear();
        } else if (c != '\r') {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    CsvTable table;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        auto fields = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(fields);
        } else {
            if (fields.size() != table.header.size())
                throw std::runtime_error(path + ": line " + std::to_string(line_number) +
                                         ": expected " + std::to_string(table.header.size()) +
                                         " fields, got " + std::to_string(fields.size()));
            table.rows.push_back(std::move(fields));
            table.line_numbers.push_back(line_number);
        }
    }
    if (table.header.empty()) throw std::runtime_error(path + ": empty file");
    return table;
}

double parse_double_field(const std::string& field, const std::string& column,
                          std::size_t line_number) {
    char* end = nullptr;
    const double value = std::strtod(field.c_str(), &end);
    if (end == field.c_str() || *end != '\0')
        throw std::runtime_error("line " + std::to_string(line_number) + ": column '" + column +
                                 "': not a number: '" + field + "'");
    return value;
}

}  // namespace heatctl
